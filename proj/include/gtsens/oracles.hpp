#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace gtsens {

/// Binary-fission process S -> 2S at rate c per molecule, started at x0.
/// X(t) - x0 has an exact negative-binomial law; see pure_birth_pmf.
struct PureBirthLaw {
    std::int64_t x0 = 1;
    double c = 1.0;
    double t = 1.0;
};

/// P(X(t) = x0 + k) = C(x0+k-1, k) q^x0 p^k with q = e^{-ct}, p = 1 - q.
/// Evaluated in log space so large k stays accurate.
double pure_birth_pmf(const PureBirthLaw& law, std::int64_t k);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// mean = x0 e^{ct}, variance = x0 e^{ct} (e^{ct} - 1).
Moments pure_birth_moments(const PureBirthLaw& law);

/// d mean / dc = x0 t e^{ct}.
double pure_birth_mean_sensitivity(const PureBirthLaw& law);

/// E[e^{eps X(t)}] is finite iff eps < -ln(1 - e^{-ct}) (geometric tail).
bool pure_birth_exp_moment_finite(const PureBirthLaw& law, double eps);
double pure_birth_exp_moment_threshold(const PureBirthLaw& law);

enum class MonoKind {
    Immigration,       // 0 -> S at rate c
    Decay,             // S -> 0 at rate d per molecule
    ImmigrationDecay,  // both
};

/// Exact law of the monomolecular systems: distribution family, first two
/// moments, and the derivative of the mean in each rate.
struct MonoSolution {
    double mean = 0.0;
    double variance = 0.0;
    std::string family;
    std::map<std::string, double> mean_sensitivity;  // rate name -> d mean / d rate
};

MonoSolution monomolecular_solution(MonoKind kind, double c, double d, std::int64_t x0, double t);

}  // namespace gtsens
