#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gtsens/expression.hpp"
#include "gtsens/network.hpp"
#include "gtsens/rational.hpp"
#include "gtsens/simulator.hpp"

namespace gtsens {

/// w >= 0 with w^T nu <= 0 columnwise and w[species] = 1, giving the
/// invariant bound X_species(t) <= w^T x0 along every path.
struct SpeciesBoundCertificate {
    std::size_t species;
    std::vector<Rational> weights;
    Rational bound;  // w^T x0
};

/// Pathwise affine bound R_target(t) <= constant + sum coeffs[j] * R_j(t)
/// over the certified channels, obtained from the dual of the nonnegativity
/// feasibility program. uncertified_coeffs documents the left-hand side the
/// dual controls: sum uncertified_coeffs[j] * R_j <= constant + ...
struct AffineReactionBound {
    std::size_t target;
    Rational constant;                                    // lambda^T x0
    std::map<std::size_t, Rational> coeffs;               // certified channel -> weight
    std::map<std::size_t, Rational> uncertified_coeffs;   // lambda^T (-nu_j), j uncertified
    std::vector<Rational> dual;                           // lambda over species
};

/// Direction in which the nonnegativity polytope is unbounded: a ray of
/// {xi >= 0 : sum nu_j xi_j >= 0 over uncertified channels} with positive
/// target coordinate. Witnesses that no affine bound on R_target exists.
struct RecessionRay {
    std::size_t target;
    std::map<std::size_t, Rational> ray;  // channel -> component
};

using DirectionResult = std::variant<AffineReactionBound, RecessionRay>;

struct CouplingAssignment {
    enum class Type {
        CatalyticBirth,  // A -> A + S with A empty or of certified-bounded count
        BinaryFission,   // S -> 2S
    };
    struct Entry {
        std::size_t channel;
        Type type;
        std::optional<std::size_t> catalyst;  // CatalyticBirth with nonempty A
        std::optional<std::size_t> species;   // BinaryFission species
    };
    std::vector<Entry> entries;
};

struct CouplingFailure {
    std::string condition;  // which structural condition failed
    std::string witness;
};

/// Species with a provable invariant upper bound (sound, not complete).
std::vector<SpeciesBoundCertificate> bounded_species(const ReactionNetwork& net);

/// Channels whose propensity is bounded on the reachable set: constant
/// kinetics, mass action over bounded reactants, or polynomials over bounded
/// variables only.
std::vector<std::size_t> bounded_propensity_channels(
    const ReactionNetwork& net, const std::vector<SpeciesBoundCertificate>& bounded);

/// Decide, in exact arithmetic, whether R_target admits an affine bound in
/// the counts of the `certified` channels, using only nonnegativity of the
/// state. Default certified set: the unconsuming channels.
DirectionResult lp_bounded_in_direction(const ReactionNetwork& net, std::size_t target,
                                        const std::vector<std::size_t>& certified);
DirectionResult lp_bounded_in_direction(const ReactionNetwork& net, std::size_t target);

/// Structural check for the dominating-process argument: every unconsuming
/// channel is a catalytic birth (bounded catalyst) or a binary fission, and
/// no consuming channel increases a fission species.
std::variant<CouplingAssignment, CouplingFailure> coupling_structure_check(
    const ReactionNetwork& net);

enum class ProbeKind { RightTail, LeftTail, MomentF };

/// Monte Carlo evidence about an exponential-moment quantity. Never a proof:
/// `stabilized` only says the empirical mean is not obviously dominated by
/// its largest summand and is stable under doubling the sample.
struct ProbeResult {
    ProbeKind kind;
    double parameter = 0.0;  // rho (RightTail) or eps (LeftTail); unused for MomentF
    double estimate = 0.0;
    double std_error = 0.0;
    double top_sample_share = 0.0;  // largest summand / total
    double split_z = 0.0;           // half-sample discrepancy in combined stderr units
    std::uint64_t n = 0;
    bool stabilized = false;
};

struct ValidityReport {
    std::string model;
    std::size_t target = 0;
    std::string target_param;
    bool valid = false;
    enum class Path { None, BoundedPropensity, LPCertificate, CouplingStructure } path = Path::None;

    std::vector<SpeciesBoundCertificate> species_bounds;
    std::vector<std::size_t> certified_channels;              // exp-moment certified
    std::map<std::size_t, std::string> channel_certifications;  // channel -> reason
    std::optional<CouplingAssignment> coupling;
    std::optional<CouplingFailure> coupling_failure;
    std::optional<AffineReactionBound> lp_certificate;
    std::optional<RecessionRay> recession_ray;

    std::vector<std::size_t> unresolved_channels;  // unconsuming, not certified
    std::vector<std::string> failures;             // failed conditions with witnesses
    /// True when an affine bound over certified channels exists even though
    /// some unconsuming channel stayed unresolved; recorded as an
    /// observation, never as a Valid verdict.
    bool bound_exists_despite_unresolved = false;

    std::vector<ProbeResult> probes;
};

/// Static decision: is the likelihood-ratio sensitivity estimator for this
/// target channel provably valid on this network?
ValidityReport check_gt_validity(const ReactionNetwork& net, std::size_t target);

struct ProbeConfig {
    std::vector<double> right_rho{1.1, 1.25, 1.5};   // factors c/c* > 1
    std::vector<double> left_eps_scale{0.1, 0.25, 0.5};  // times c*
    std::optional<Expression> f;  // enables the third-moment probe
    double top_share_threshold = 0.01;
    double split_z_threshold = 3.0;
};

/// Monte Carlo probes of the exponential-moment quantities behind the
/// verdict: E[rho^R], E[exp(eps * int_b)], E|f(X(T))|^3.
std::vector<ProbeResult> integrability_probe(const ReactionNetwork& net, std::size_t target,
                                             const SimConfig& cfg, std::uint64_t n,
                                             const ProbeConfig& probes, unsigned threads = 0);

std::string path_name(ValidityReport::Path path);

}  // namespace gtsens
