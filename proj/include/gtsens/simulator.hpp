#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtsens/network.hpp"

namespace gtsens {

struct SimConfig {
    double T = 1.0;
    std::uint64_t max_events = 10'000'000;
    std::uint64_t seed = 0;
    std::uint64_t replicate_index = 0;
};

enum class SimMethod {
    NextReaction,  // per-channel unit Poisson streams over internal time
    Direct,        // total-rate exponential + categorical channel pick
};

/// Full jump record of one path. states[0] is x0; states[k+1] is the state
/// after the k-th jump. counts and integrated_propensity are per channel.
struct Trajectory {
    double T = 0.0;
    std::vector<double> jump_times;
    std::vector<std::size_t> channels;
    std::vector<State> states;
    std::vector<std::int64_t> counts;
    std::vector<double> integrated_propensity;
    std::uint64_t seed = 0;
    std::uint64_t replicate_index = 0;
    std::uint64_t n_events = 0;
    bool discarded = false;  // event cap hit before T

    const State& final_state() const { return states.back(); }
};

/// What the estimators need from a path; no jump log kept.
struct PathSummary {
    State final_state;
    std::vector<std::int64_t> counts;
    std::vector<double> integrated_propensity;
    std::uint64_t n_events = 0;
    bool discarded = false;
};

struct ExplosionGuardError : std::runtime_error {
    ExplosionGuardError(std::uint64_t events, double t)
        : std::runtime_error("event cap " + std::to_string(events) + " exceeded at t = " +
                             std::to_string(t)),
          events(events),
          time_reached(t) {}
    std::uint64_t events;
    double time_reached;
};

/// Exact simulation of one path. Throws ExplosionGuardError when the event
/// cap trips.
Trajectory simulate(const ReactionNetwork& net, const SimConfig& cfg,
                    SimMethod method = SimMethod::NextReaction);

/// Same dynamics without the jump log; a tripped event cap sets `discarded`
/// instead of throwing (so replicate loops can flag and continue).
PathSummary simulate_summary(const ReactionNetwork& net, const SimConfig& cfg,
                             SimMethod method = SimMethod::NextReaction);

/// Recompute a channel's propensity integral from the jump log: sum of
/// a_j(state) * interval over the inter-jump intervals. Matches the stored
/// integrated_propensity field up to roundoff.
double integrated_propensity(const ReactionNetwork& net, const Trajectory& traj, std::size_t j);

/// CSV dump: header t,channel,x1..xn; one row per jump, final row at T with
/// channel = -1.
std::string trajectory_csv(const ReactionNetwork& net, const Trajectory& traj);

/// Pairing for the coupled simulation of a network with a dominating
/// single-species birth system. Each pair shares three unit Poisson streams:
/// one driven at the minimum of the two propensities and one residual stream
/// per side.
struct CouplingPairing {
    std::size_t net_species = 0;  // coupled species in the target network
    std::size_t dom_species = 0;  // coupled species in the dominating system
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (net channel, dom channel)
};

struct CoupledTrajectories {
    Trajectory primary;
    Trajectory dominating;
};

/// Joint CTMC of (net, dominating) under the shared-stream coupling;
/// unpaired channels get independent streams. Both trajectories live on the
/// same clock, and a common-stream firing records the same jump time in both.
CoupledTrajectories simulate_coupled(const ReactionNetwork& net, const ReactionNetwork& dominating,
                                     const CouplingPairing& pairing, const SimConfig& cfg);

}  // namespace gtsens
