#include "gtsens/estimator.hpp"

#include <cmath>
#include <limits>

#include "gtsens/accumulator.hpp"
#include "gtsens/replicate.hpp"
#include "gtsens/rng.hpp"

namespace gtsens {

namespace {

struct EstAcc {
    MeanVarAccumulator stats;
    std::uint64_t discarded = 0;
    std::uint64_t envelope_violations = 0;
    void merge(const EstAcc& o) {
        stats.merge(o.stats);
        discarded += o.discarded;
        envelope_violations += o.envelope_violations;
    }
};

EstimatorResult finish(const EstAcc& acc, std::uint64_t requested, std::uint64_t seed) {
    if (acc.discarded > 0 &&
        static_cast<double>(acc.discarded) > 1e-4 * static_cast<double>(requested))
        throw DiscardRateError(acc.discarded, requested);
    EstimatorResult r;
    r.mean = acc.stats.mean();
    r.variance = acc.stats.variance();
    r.std_error = acc.stats.stderr_of_mean();
    r.ci_lo = r.mean - 1.96 * r.std_error;
    r.ci_hi = r.mean + 1.96 * r.std_error;
    r.n_replicates = acc.stats.count();
    r.n_discarded = acc.discarded;
    r.seed = seed;
    return r;
}

double int_b_of(const PathSummary& path, const ReactionNetwork& net, std::size_t target) {
    return path.integrated_propensity[target] / net.rate[target];
}

}  // namespace

double likelihood_ratio(const PathSummary& path, std::size_t target, double c, double c_star) {
    if (!(c > 0.0) || !(c_star > 0.0))
        throw std::invalid_argument("likelihood_ratio: rates must be positive");
    double r = static_cast<double>(path.counts[target]);
    double int_b = path.integrated_propensity[target] / c_star;
    return std::exp(r * std::log(c / c_star) + (c_star - c) * int_b);
}

double likelihood_ratio(const Trajectory& traj, std::size_t target, double c, double c_star) {
    PathSummary s;
    s.counts = traj.counts;
    s.integrated_propensity = traj.integrated_propensity;
    s.final_state = traj.final_state();
    return likelihood_ratio(s, target, c, c_star);
}

double score(const PathSummary& path, std::size_t target, double c_star) {
    return static_cast<double>(path.counts[target]) / c_star -
           path.integrated_propensity[target] / c_star;
}

GTSample gt_sample(const PathSummary& path, const ReactionNetwork& net, std::size_t target,
                   const Expression& f) {
    GTSample s;
    s.f_value = f.eval(path.final_state);
    s.r_target = path.counts[target];
    s.int_b = int_b_of(path, net, target);
    s.score = static_cast<double>(s.r_target) / net.rate[target] - s.int_b;
    return s;
}

EstimatorResult gt_estimate(const ReactionNetwork& net, const Expression& f, std::size_t target,
                            const SimConfig& cfg, std::uint64_t n, unsigned threads) {
    EstAcc acc = replicate_reduce<EstAcc>(n, threads, [&](EstAcc& a, std::uint64_t r) {
        SimConfig c = cfg;
        c.replicate_index = r;
        PathSummary path = simulate_summary(net, c);
        if (path.discarded) {
            ++a.discarded;
            return;
        }
        GTSample s = gt_sample(path, net, target, f);
        a.stats.add(s.f_value * s.score);
    });
    return finish(acc, n, cfg.seed);
}

EstimatorResult fd_estimate(const ReactionNetwork& net, const Expression& f, std::size_t target,
                            const SimConfig& cfg, std::uint64_t n, double h, FdMode mode,
                            bool crn, unsigned threads) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_estimate: step h must be positive");
    const std::string& param = net.reactions[target].rate_param;
    double c_star = net.rate[target];
    double c_plus = c_star + h;
    double c_minus = mode == FdMode::Central ? c_star - h : c_star;
    if (!(c_minus > 0.0)) throw std::invalid_argument("fd_estimate: c - h must stay positive");
    ReactionNetwork net_plus = with_param(net, param, c_plus);
    ReactionNetwork net_minus =
        mode == FdMode::Central ? with_param(net, param, c_minus) : net;
    double denom = mode == FdMode::Central ? 2.0 * h : h;

    std::uint64_t seed_plus = crn ? cfg.seed : StreamRng::mix64(cfg.seed ^ 0x706C7573ULL);
    std::uint64_t seed_minus = crn ? cfg.seed : StreamRng::mix64(cfg.seed ^ 0x6D696E75ULL);

    EstAcc acc = replicate_reduce<EstAcc>(n, threads, [&](EstAcc& a, std::uint64_t r) {
        SimConfig cp = cfg;
        cp.seed = seed_plus;
        cp.replicate_index = r;
        SimConfig cm = cfg;
        cm.seed = seed_minus;
        cm.replicate_index = r;
        PathSummary plus = simulate_summary(net_plus, cp);
        PathSummary minus = simulate_summary(net_minus, cm);
        if (plus.discarded || minus.discarded) {
            ++a.discarded;
            return;
        }
        a.stats.add((f.eval(plus.final_state) - f.eval(minus.final_state)) / denom);
    });
    return finish(acc, n, cfg.seed);
}

EstimatorResult likelihood_mean(const ReactionNetwork& net, std::size_t target, double c,
                                const SimConfig& cfg, std::uint64_t n, unsigned threads) {
    double c_star = net.rate[target];
    EstAcc acc = replicate_reduce<EstAcc>(n, threads, [&](EstAcc& a, std::uint64_t r) {
        SimConfig cr = cfg;
        cr.replicate_index = r;
        PathSummary path = simulate_summary(net, cr);
        if (path.discarded) {
            ++a.discarded;
            return;
        }
        double weight = likelihood_ratio(path, target, c, c_star);
        double count_envelope =
            std::exp(static_cast<double>(path.counts[target]) * std::log(c / c_star));
        double int_envelope = std::exp((c_star - c) * int_b_of(path, net, target));
        if (c >= c_star && weight > count_envelope * (1.0 + 1e-12)) ++a.envelope_violations;
        if (c <= c_star && weight > int_envelope * (1.0 + 1e-12)) ++a.envelope_violations;
        a.stats.add(weight);
    });
    if (acc.envelope_violations > 0)
        throw std::logic_error(std::to_string(acc.envelope_violations) +
                               " replicates exceeded the pathwise likelihood-ratio envelope");
    return finish(acc, n, cfg.seed);
}

ReweightingDiagnostic reweighting_check(const ReactionNetwork& net, const Expression& f,
                                        std::size_t target, double c, double c_star,
                                        const SimConfig& cfg, std::uint64_t n, unsigned threads) {
    const std::string& param = net.reactions[target].rate_param;
    ReactionNetwork net_at_c = with_param(net, param, c);
    ReactionNetwork net_at_star = with_param(net, param, c_star);

    EstAcc direct = replicate_reduce<EstAcc>(n, threads, [&](EstAcc& a, std::uint64_t r) {
        SimConfig cr = cfg;
        cr.replicate_index = r;
        PathSummary path = simulate_summary(net_at_c, cr);
        if (path.discarded) {
            ++a.discarded;
            return;
        }
        a.stats.add(f.eval(path.final_state));
    });
    EstAcc reweighted = replicate_reduce<EstAcc>(n, threads, [&](EstAcc& a, std::uint64_t r) {
        SimConfig cr = cfg;
        cr.replicate_index = r;
        PathSummary path = simulate_summary(net_at_star, cr);
        if (path.discarded) {
            ++a.discarded;
            return;
        }
        a.stats.add(f.eval(path.final_state) *
                    likelihood_ratio(path, target, c, c_star));
    });

    if (direct.discarded + reweighted.discarded > 0 &&
        static_cast<double>(direct.discarded + reweighted.discarded) >
            1e-4 * static_cast<double>(2 * n))
        throw DiscardRateError(direct.discarded + reweighted.discarded, 2 * n);

    ReweightingDiagnostic d;
    d.direct_mean = direct.stats.mean();
    d.direct_stderr = direct.stats.stderr_of_mean();
    d.reweighted_mean = reweighted.stats.mean();
    d.reweighted_stderr = reweighted.stats.stderr_of_mean();
    double combined =
        std::sqrt(d.direct_stderr * d.direct_stderr + d.reweighted_stderr * d.reweighted_stderr);
    d.z = combined > 0.0 ? (d.direct_mean - d.reweighted_mean) / combined
                         : (d.direct_mean == d.reweighted_mean ? 0.0
                                                               : std::numeric_limits<double>::infinity());
    d.n = n;
    return d;
}

}  // namespace gtsens
