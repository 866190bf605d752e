#include "gtsens/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace gtsens {

namespace {

void check_law(const PureBirthLaw& law) {
    if (law.x0 < 1) throw std::invalid_argument("pure birth law needs x0 >= 1");
    if (!(law.c > 0.0) || !(law.t > 0.0))
        throw std::invalid_argument("pure birth law needs c > 0 and t > 0");
}

}  // namespace

double pure_birth_pmf(const PureBirthLaw& law, std::int64_t k) {
    check_law(law);
    if (k < 0) return 0.0;
    double x = static_cast<double>(law.x0);
    double log_q = -law.c * law.t;            // ln e^{-ct}
    double p = -std::expm1(-law.c * law.t);   // 1 - e^{-ct}
    if (k == 0) return std::exp(x * log_q);
    double kd = static_cast<double>(k);
    double log_binom = std::lgamma(x + kd) - std::lgamma(kd + 1.0) - std::lgamma(x);
    return std::exp(log_binom + x * log_q + kd * std::log(p));
}

Moments pure_birth_moments(const PureBirthLaw& law) {
    check_law(law);
    double g = std::exp(law.c * law.t);
    Moments m;
    m.mean = static_cast<double>(law.x0) * g;
    m.variance = static_cast<double>(law.x0) * g * (g - 1.0);
    return m;
}

double pure_birth_mean_sensitivity(const PureBirthLaw& law) {
    check_law(law);
    return static_cast<double>(law.x0) * law.t * std::exp(law.c * law.t);
}

double pure_birth_exp_moment_threshold(const PureBirthLaw& law) {
    check_law(law);
    // Term ratio of e^{eps(x+k)} p_{x+k}(t) tends to e^{eps} (1 - e^{-ct});
    // the series converges exactly when that limit is below one.
    double p = -std::expm1(-law.c * law.t);
    return -std::log(p);
}

bool pure_birth_exp_moment_finite(const PureBirthLaw& law, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    return eps < pure_birth_exp_moment_threshold(law);
}

MonoSolution monomolecular_solution(MonoKind kind, double c, double d, std::int64_t x0, double t) {
    if (x0 < 0) throw std::invalid_argument("x0 must be nonnegative");
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    MonoSolution s;
    double x = static_cast<double>(x0);
    switch (kind) {
        case MonoKind::Immigration: {
            if (!(c > 0.0)) throw std::invalid_argument("rate c must be positive");
            s.mean = x + c * t;
            s.variance = c * t;
            s.family = "x0 + Poisson(c t)";
            s.mean_sensitivity["c"] = t;
            break;
        }
        case MonoKind::Decay: {
            if (!(d > 0.0)) throw std::invalid_argument("rate d must be positive");
            double q = std::exp(-d * t);
            s.mean = x * q;
            s.variance = x * q * (1.0 - q);
            s.family = "Binomial(x0, e^{-d t})";
            s.mean_sensitivity["d"] = -x * t * q;
            break;
        }
        case MonoKind::ImmigrationDecay: {
            if (!(c > 0.0) || !(d > 0.0))
                throw std::invalid_argument("rates c and d must be positive");
            double q = std::exp(-d * t);
            double pois = (c / d) * (1.0 - q);
            s.mean = x * q + pois;
            s.variance = x * q * (1.0 - q) + pois;
            s.family = "Binomial(x0, e^{-d t}) + Poisson((c/d)(1 - e^{-d t}))";
            s.mean_sensitivity["c"] = (1.0 - q) / d;
            s.mean_sensitivity["d"] =
                -x * t * q + c * (t * q / d - (1.0 - q) / (d * d));
            break;
        }
    }
    return s;
}

}  // namespace gtsens
