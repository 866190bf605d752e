#include "gtsens/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gtsens/accumulator.hpp"
#include "gtsens/rng.hpp"

namespace gtsens {

namespace {

constexpr std::uint32_t kDirectTimeSubstream = 0x7FFFFFF0U;
constexpr std::uint32_t kDirectPickSubstream = 0x7FFFFFF1U;

void apply_column(State& x, const std::vector<std::int64_t>& nu, const std::string& name) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::int64_t v;
        if (__builtin_add_overflow(x[i], nu[i], &v))
            throw KineticsError("state overflow applying \"" + name + "\"");
        if (v < 0)
            throw KineticsError("negative count applying \"" + name +
                                "\": kinetics positive at an infeasible state");
        x[i] = v;
    }
}

struct Core {
    const ReactionNetwork& net;
    const SimConfig& cfg;
    State state;
    double t = 0.0;
    std::vector<double> a;
    std::vector<KahanSum> tau;
    std::vector<std::int64_t> counts;
    std::uint64_t events = 0;
    bool discarded = false;
    Trajectory* record;

    Core(const ReactionNetwork& n, const SimConfig& c, Trajectory* rec)
        : net(n), cfg(c), state(n.x0), a(n.n_reactions()), tau(n.n_reactions()),
          counts(n.n_reactions(), 0), record(rec) {
        if (!(cfg.T > 0.0)) throw std::invalid_argument("simulation horizon T must be positive");
        if (cfg.max_events < 1) throw std::invalid_argument("max_events must be at least 1");
        refresh_propensities();
        if (record) {
            record->T = cfg.T;
            record->seed = cfg.seed;
            record->replicate_index = cfg.replicate_index;
            record->states.push_back(state);
        }
    }

    void refresh_propensities() {
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = propensity(net, j, state);
    }

    void drain_to(double until) {
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[j] > 0.0) tau[j].add(a[j] * (until - t));
        t = until;
    }

    void fire(std::size_t j, double t_next) {
        ++counts[j];
        ++events;
        apply_column(state, net.nu[j], net.reactions[j].name);
        t = t_next;
        if (record) {
            record->jump_times.push_back(t);
            record->channels.push_back(j);
            record->states.push_back(state);
        }
        refresh_propensities();
    }

    void run_next_reaction() {
        std::size_t m = net.n_reactions();
        std::vector<StreamRng> rng;
        std::vector<double> next_arrival(m);
        rng.reserve(m);
        for (std::size_t j = 0; j < m; ++j) {
            rng.emplace_back(cfg.seed, cfg.replicate_index, static_cast<std::uint32_t>(j));
            next_arrival[j] = rng[j].exponential();
        }
        for (;;) {
            std::size_t best = m;
            double best_wait = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                if (a[j] <= 0.0) continue;
                double wait = (next_arrival[j] - tau[j].value()) / a[j];
                if (wait < 0.0) wait = 0.0;
                if (wait < best_wait) {
                    best_wait = wait;
                    best = j;
                }
            }
            if (best == m) {  // absorbing state
                t = cfg.T;
                break;
            }
            double t_next = t + best_wait;
            if (t_next > cfg.T) {
                drain_to(cfg.T);
                break;
            }
            if (events >= cfg.max_events) {
                discarded = true;
                break;
            }
            for (std::size_t j = 0; j < m; ++j)
                if (j != best && a[j] > 0.0) tau[j].add(a[j] * best_wait);
            tau[best].set(next_arrival[best]);
            next_arrival[best] += rng[best].exponential();
            fire(best, t_next);
        }
    }

    void run_direct() {
        std::size_t m = net.n_reactions();
        StreamRng time_rng(cfg.seed, cfg.replicate_index, kDirectTimeSubstream);
        StreamRng pick_rng(cfg.seed, cfg.replicate_index, kDirectPickSubstream);
        for (;;) {
            double total = 0.0;
            for (double v : a) total += v;
            if (total <= 0.0) {
                t = cfg.T;
                break;
            }
            double dt = time_rng.exponential() / total;
            double t_next = t + dt;
            if (t_next > cfg.T) {
                drain_to(cfg.T);
                break;
            }
            if (events >= cfg.max_events) {
                discarded = true;
                break;
            }
            for (std::size_t j = 0; j < m; ++j)
                if (a[j] > 0.0) tau[j].add(a[j] * dt);
            double u = pick_rng.uniform() * total;
            std::size_t pick = m;
            double cum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (a[j] <= 0.0) continue;
                cum += a[j];
                pick = j;
                if (u < cum) break;
            }
            fire(pick, t_next);
        }
    }

    PathSummary summary() const {
        PathSummary s;
        s.final_state = state;
        s.counts = counts;
        s.integrated_propensity.resize(tau.size());
        for (std::size_t j = 0; j < tau.size(); ++j) s.integrated_propensity[j] = tau[j].value();
        s.n_events = events;
        s.discarded = discarded;
        return s;
    }
};

void run_core(Core& core, SimMethod method) {
    if (method == SimMethod::NextReaction)
        core.run_next_reaction();
    else
        core.run_direct();
}

}  // namespace

Trajectory simulate(const ReactionNetwork& net, const SimConfig& cfg, SimMethod method) {
    Trajectory traj;
    Core core(net, cfg, &traj);
    run_core(core, method);
    if (core.discarded) throw ExplosionGuardError(core.events, core.t);
    PathSummary s = core.summary();
    traj.counts = std::move(s.counts);
    traj.integrated_propensity = std::move(s.integrated_propensity);
    traj.n_events = s.n_events;
    traj.discarded = false;
    return traj;
}

PathSummary simulate_summary(const ReactionNetwork& net, const SimConfig& cfg, SimMethod method) {
    Core core(net, cfg, nullptr);
    run_core(core, method);
    return core.summary();
}

double integrated_propensity(const ReactionNetwork& net, const Trajectory& traj, std::size_t j) {
    KahanSum sum;
    double prev = 0.0;
    for (std::size_t k = 0; k < traj.jump_times.size(); ++k) {
        sum.add(propensity(net, j, traj.states[k]) * (traj.jump_times[k] - prev));
        prev = traj.jump_times[k];
    }
    sum.add(propensity(net, j, traj.states.back()) * (traj.T - prev));
    return sum.value();
}

std::string trajectory_csv(const ReactionNetwork& net, const Trajectory& traj) {
    // state columns x1..xn, matching how expressions index species
    std::string out = "t,channel";
    for (std::size_t i = 1; i <= net.n_species(); ++i) out += ",x" + std::to_string(i);
    out += "\n";
    char buf[64];
    auto row = [&](double t, long long channel, const State& x) {
        std::snprintf(buf, sizeof buf, "%.17g,%lld", t, channel);
        out += buf;
        for (std::int64_t v : x) {
            std::snprintf(buf, sizeof buf, ",%lld", static_cast<long long>(v));
            out += buf;
        }
        out += "\n";
    };
    for (std::size_t k = 0; k < traj.jump_times.size(); ++k)
        row(traj.jump_times[k], static_cast<long long>(traj.channels[k]) + 1, traj.states[k + 1]);
    row(traj.T, -1, traj.states.back());
    return out;
}

namespace {

struct JointChannel {
    enum class Kind { Common, ResNet, ResDom, NetOnly, DomOnly } kind;
    std::size_t net_ch = SIZE_MAX;
    std::size_t dom_ch = SIZE_MAX;
};

}  // namespace

CoupledTrajectories simulate_coupled(const ReactionNetwork& net, const ReactionNetwork& dominating,
                                     const CouplingPairing& pairing, const SimConfig& cfg) {
    if (!(cfg.T > 0.0)) throw std::invalid_argument("simulation horizon T must be positive");
    if (pairing.pairs.empty()) throw std::invalid_argument("coupling pairing is empty");
    if (pairing.net_species >= net.n_species() || pairing.dom_species >= dominating.n_species())
        throw std::invalid_argument("coupling pairing: species index out of range");

    std::vector<bool> net_paired(net.n_reactions(), false);
    std::vector<bool> dom_paired(dominating.n_reactions(), false);
    for (const auto& [jn, jd] : pairing.pairs) {
        if (jn >= net.n_reactions() || jd >= dominating.n_reactions())
            throw std::invalid_argument("coupling pairing: channel index out of range");
        if (net_paired[jn] || dom_paired[jd])
            throw std::invalid_argument("coupling pairing: channel paired twice");
        net_paired[jn] = true;
        dom_paired[jd] = true;
        if (net.nu[jn][pairing.net_species] != dominating.nu[jd][pairing.dom_species])
            throw std::invalid_argument(
                "coupling pairing: paired channels disagree on the coupled species");
    }
    for (std::size_t jd = 0; jd < dominating.n_reactions(); ++jd) {
        bool nonneg = std::all_of(dominating.nu[jd].begin(), dominating.nu[jd].end(),
                                  [](std::int64_t v) { return v >= 0; });
        if (!nonneg)
            throw std::invalid_argument("dominating system must be a pure birth system");
    }

    std::vector<JointChannel> joint;
    for (const auto& [jn, jd] : pairing.pairs) {
        joint.push_back({JointChannel::Kind::Common, jn, jd});
        joint.push_back({JointChannel::Kind::ResNet, jn, jd});
        joint.push_back({JointChannel::Kind::ResDom, jn, jd});
    }
    for (std::size_t j = 0; j < net.n_reactions(); ++j)
        if (!net_paired[j]) joint.push_back({JointChannel::Kind::NetOnly, j, SIZE_MAX});
    for (std::size_t j = 0; j < dominating.n_reactions(); ++j)
        if (!dom_paired[j]) joint.push_back({JointChannel::Kind::DomOnly, SIZE_MAX, j});

    std::size_t K = joint.size();
    State x = net.x0;
    State xd = dominating.x0;
    double t = 0.0;
    std::vector<double> rate(K);
    std::vector<KahanSum> tau(K);
    std::vector<StreamRng> rng;
    std::vector<double> next_arrival(K);
    rng.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        rng.emplace_back(cfg.seed, cfg.replicate_index, static_cast<std::uint32_t>(k));
        next_arrival[k] = rng[k].exponential();
    }

    auto refresh = [&]() {
        for (std::size_t k = 0; k < K; ++k) {
            const JointChannel& jc = joint[k];
            switch (jc.kind) {
                case JointChannel::Kind::Common: {
                    double an = propensity(net, jc.net_ch, x);
                    double ad = propensity(dominating, jc.dom_ch, xd);
                    rate[k] = std::min(an, ad);
                    break;
                }
                case JointChannel::Kind::ResNet: {
                    double an = propensity(net, jc.net_ch, x);
                    double ad = propensity(dominating, jc.dom_ch, xd);
                    rate[k] = std::max(0.0, an - std::min(an, ad));
                    break;
                }
                case JointChannel::Kind::ResDom: {
                    double an = propensity(net, jc.net_ch, x);
                    double ad = propensity(dominating, jc.dom_ch, xd);
                    rate[k] = std::max(0.0, ad - std::min(an, ad));
                    break;
                }
                case JointChannel::Kind::NetOnly:
                    rate[k] = propensity(net, jc.net_ch, x);
                    break;
                case JointChannel::Kind::DomOnly:
                    rate[k] = propensity(dominating, jc.dom_ch, xd);
                    break;
            }
        }
    };
    refresh();

    CoupledTrajectories out;
    out.primary.T = out.dominating.T = cfg.T;
    out.primary.seed = out.dominating.seed = cfg.seed;
    out.primary.replicate_index = out.dominating.replicate_index = cfg.replicate_index;
    out.primary.states.push_back(x);
    out.dominating.states.push_back(xd);
    out.primary.counts.assign(net.n_reactions(), 0);
    out.dominating.counts.assign(dominating.n_reactions(), 0);

    std::uint64_t events = 0;
    bool discarded = false;
    for (;;) {
        std::size_t best = K;
        double best_wait = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
            if (rate[k] <= 0.0) continue;
            double wait = (next_arrival[k] - tau[k].value()) / rate[k];
            if (wait < 0.0) wait = 0.0;
            if (wait < best_wait) {
                best_wait = wait;
                best = k;
            }
        }
        if (best == K) {
            t = cfg.T;
            break;
        }
        double t_next = t + best_wait;
        if (t_next > cfg.T) {
            for (std::size_t k = 0; k < K; ++k)
                if (rate[k] > 0.0) tau[k].add(rate[k] * (cfg.T - t));
            t = cfg.T;
            break;
        }
        if (events >= cfg.max_events) {
            discarded = true;
            break;
        }
        for (std::size_t k = 0; k < K; ++k)
            if (k != best && rate[k] > 0.0) tau[k].add(rate[k] * best_wait);
        tau[best].set(next_arrival[best]);
        next_arrival[best] += rng[best].exponential();
        t = t_next;
        ++events;

        const JointChannel& jc = joint[best];
        bool hits_net = jc.kind == JointChannel::Kind::Common ||
                        jc.kind == JointChannel::Kind::ResNet ||
                        jc.kind == JointChannel::Kind::NetOnly;
        bool hits_dom = jc.kind == JointChannel::Kind::Common ||
                        jc.kind == JointChannel::Kind::ResDom ||
                        jc.kind == JointChannel::Kind::DomOnly;
        if (hits_net) {
            apply_column(x, net.nu[jc.net_ch], net.reactions[jc.net_ch].name);
            ++out.primary.counts[jc.net_ch];
            out.primary.jump_times.push_back(t);
            out.primary.channels.push_back(jc.net_ch);
            out.primary.states.push_back(x);
        }
        if (hits_dom) {
            apply_column(xd, dominating.nu[jc.dom_ch], dominating.reactions[jc.dom_ch].name);
            ++out.dominating.counts[jc.dom_ch];
            out.dominating.jump_times.push_back(t);
            out.dominating.channels.push_back(jc.dom_ch);
            out.dominating.states.push_back(xd);
        }
        refresh();
    }

    if (discarded) throw ExplosionGuardError(events, t);

    out.primary.integrated_propensity.assign(net.n_reactions(), 0.0);
    out.dominating.integrated_propensity.assign(dominating.n_reactions(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const JointChannel& jc = joint[k];
        if (jc.net_ch != SIZE_MAX && jc.kind != JointChannel::Kind::ResDom)
            out.primary.integrated_propensity[jc.net_ch] += tau[k].value();
        if (jc.dom_ch != SIZE_MAX && jc.kind != JointChannel::Kind::ResNet)
            out.dominating.integrated_propensity[jc.dom_ch] += tau[k].value();
    }
    out.primary.n_events = out.primary.jump_times.size();
    out.dominating.n_events = out.dominating.jump_times.size();
    return out;
}

}  // namespace gtsens
