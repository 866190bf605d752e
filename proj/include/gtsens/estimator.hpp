#pragma once

#include <cstdint>
#include <string>

#include "gtsens/expression.hpp"
#include "gtsens/network.hpp"
#include "gtsens/simulator.hpp"

namespace gtsens {

/// Per-replicate record entering the sensitivity estimator.
struct GTSample {
    double f_value = 0.0;     // f(X(T))
    std::int64_t r_target = 0;  // firings of the target channel
    double int_b = 0.0;       // integral of the target's propensity factor
    double score = 0.0;       // r_target / c_star - int_b
};

struct EstimatorResult {
    double mean = 0.0;
    double variance = 0.0;  // sample variance of the per-replicate values
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;     // mean +- 1.96 * std_error
    std::uint64_t n_replicates = 0;  // replicates entering the mean
    std::uint64_t n_discarded = 0;   // event-cap discards (excluded, reported)
    std::uint64_t seed = 0;
};

/// Too many replicates hit the event cap; the estimate would be biased.
struct DiscardRateError : std::runtime_error {
    DiscardRateError(std::uint64_t discarded, std::uint64_t total)
        : std::runtime_error("discarded " + std::to_string(discarded) + " of " +
                             std::to_string(total) + " replicates (limit 1e-4 fraction)"),
          discarded(discarded),
          total(total) {}
    std::uint64_t discarded;
    std::uint64_t total;
};

/// Radon-Nikodym weight of a path simulated at c_star, reweighting the target
/// channel's rate to c: (c/c*)^R * exp((c* - c) * int_b).
double likelihood_ratio(const PathSummary& path, std::size_t target, double c, double c_star);
double likelihood_ratio(const Trajectory& traj, std::size_t target, double c, double c_star);

/// Score of the target channel at the simulated rate: R/c* - int_b.
/// Times c_star this is the channel's compensated count R - int_a.
double score(const PathSummary& path, std::size_t target, double c_star);

GTSample gt_sample(const PathSummary& path, const ReactionNetwork& net, std::size_t target,
                   const Expression& f);

/// Likelihood-ratio (Girsanov) sensitivity estimate of d/dc E f(X(T)) at the
/// network's current rate for the target channel: mean of f * score over N
/// replicates simulated at that rate.
EstimatorResult gt_estimate(const ReactionNetwork& net, const Expression& f, std::size_t target,
                            const SimConfig& cfg, std::uint64_t n, unsigned threads = 0);

enum class FdMode { Forward, Central };

/// Finite-difference baseline. With common random numbers the perturbed runs
/// reuse the same Poisson streams replicate by replicate.
EstimatorResult fd_estimate(const ReactionNetwork& net, const Expression& f, std::size_t target,
                            const SimConfig& cfg, std::uint64_t n, double h, FdMode mode,
                            bool crn, unsigned threads = 0);

/// Monte Carlo mean of the likelihood ratio L(T, c) over paths simulated at
/// the current rate; the change of measure is exact when this is 1. Each
/// replicate is also checked against the pathwise envelopes
/// L <= (c/c*)^R (c >= c*) and L <= exp((c*-c) int_b) (c <= c*).
EstimatorResult likelihood_mean(const ReactionNetwork& net, std::size_t target, double c,
                                const SimConfig& cfg, std::uint64_t n, unsigned threads = 0);

struct ReweightingDiagnostic {
    double direct_mean = 0.0;      // E f(X(T,c)), simulated at c
    double direct_stderr = 0.0;
    double reweighted_mean = 0.0;  // E f(X(T,c*)) L(T,c), simulated at c*
    double reweighted_stderr = 0.0;
    double z = 0.0;                // (direct - reweighted) / combined stderr
    std::uint64_t n = 0;
};

/// Two-route check of the change of measure: simulate at c directly versus
/// reweighting paths simulated at c_star.
ReweightingDiagnostic reweighting_check(const ReactionNetwork& net, const Expression& f,
                                        std::size_t target, double c, double c_star,
                                        const SimConfig& cfg, std::uint64_t n,
                                        unsigned threads = 0);

}  // namespace gtsens
