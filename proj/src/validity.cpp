#include "gtsens/validity.hpp"

#include <algorithm>
#include <cmath>

#include "gtsens/accumulator.hpp"
#include "gtsens/replicate.hpp"
#include "gtsens/simplex.hpp"

namespace gtsens {

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

/// max of x[pick] over the cone {x >= 0, A x <= 0} intersected with
/// sum x <= 1. Positive optimum exhibits a ray; zero means the cone has none
/// with a positive pick coordinate.
SimplexResult cone_direction_lp(const std::vector<std::vector<Rational>>& cone_rows,
                                std::size_t dim, std::size_t pick) {
    std::vector<std::vector<Rational>> A = cone_rows;
    A.emplace_back(dim, Rational(1));  // sum xi <= 1
    std::vector<Rational> b(A.size(), Rational(0));
    b.back() = Rational(1);
    std::vector<Rational> c(dim, Rational(0));
    c[pick] = Rational(1);
    return simplex_max(A, b, c);
}

}  // namespace

std::vector<SpeciesBoundCertificate> bounded_species(const ReactionNetwork& net) {
    std::size_t n = net.n_species();
    std::size_t m = net.n_reactions();
    // Cone {w >= 0 : nu^T w <= 0}; species i is bounded when the cone has a
    // ray with w_i > 0, since then w^T X(t) <= w^T x0 pins X_i.
    std::vector<std::vector<Rational>> rows(m, std::vector<Rational>(n, Rational(0)));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) rows[j][i] = Rational(net.nu[j][i]);

    std::vector<SpeciesBoundCertificate> out;
    for (std::size_t i = 0; i < n; ++i) {
        SimplexResult lp = cone_direction_lp(rows, n, i);
        if (lp.status != SimplexResult::Status::Optimal || lp.value.sign() <= 0) continue;
        SpeciesBoundCertificate cert;
        cert.species = i;
        cert.weights.resize(n);
        Rational scale = lp.x[i];
        Rational bound(0);
        for (std::size_t k = 0; k < n; ++k) {
            cert.weights[k] = lp.x[k] / scale;
            bound += cert.weights[k] * Rational(net.x0[k]);
        }
        cert.bound = bound;
        out.push_back(std::move(cert));
    }
    return out;
}

std::vector<std::size_t> bounded_propensity_channels(
    const ReactionNetwork& net, const std::vector<SpeciesBoundCertificate>& bounded) {
    std::vector<bool> is_bounded(net.n_species(), false);
    for (const auto& cert : bounded) is_bounded[cert.species] = true;

    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < net.n_reactions(); ++j) {
        const Reaction& rx = net.reactions[j];
        bool ok;
        if (rx.custom_factor) {
            ok = true;
            for (std::size_t v : rx.custom_factor->variables())
                if (!is_bounded[v]) ok = false;
        } else {
            ok = true;  // no reactants means constant kinetics
            for (const auto& [i, mult] : rx.reactants)
                if (!is_bounded[i]) ok = false;
        }
        if (ok) out.push_back(j);
    }
    return out;
}

DirectionResult lp_bounded_in_direction(const ReactionNetwork& net, std::size_t target,
                                        const std::vector<std::size_t>& certified) {
    if (contains(certified, target))
        throw std::invalid_argument("lp_bounded_in_direction: target channel is already certified");
    std::size_t n = net.n_species();

    std::vector<std::size_t> open;  // channels the bound must control
    for (std::size_t j = 0; j < net.n_reactions(); ++j)
        if (!contains(certified, j)) open.push_back(j);
    std::size_t d = open.size();
    std::size_t target_col = static_cast<std::size_t>(
        std::find(open.begin(), open.end(), target) - open.begin());

    // Rows of -nu over the open channels: nonnegativity X(t) >= 0 reads
    // sum_open (-nu_j) xi_j <= y with y = x0 + sum_certified mu_j R_j.
    std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(d, Rational(0)));
    for (std::size_t col = 0; col < d; ++col)
        for (std::size_t i = 0; i < n; ++i) rows[i][col] = Rational(-net.nu[open[col]][i]);

    // Ray search over the recession cone {xi >= 0 : -nu xi <= 0}.
    SimplexResult ray_lp = cone_direction_lp(rows, d, target_col);
    if (ray_lp.status != SimplexResult::Status::Optimal)
        throw std::logic_error("cone LP cannot be unbounded on the simplex slice");
    if (ray_lp.value.sign() > 0) {
        RecessionRay ray;
        ray.target = target;
        // Normalize so the smallest positive component is 1.
        Rational scale(0);
        for (const auto& v : ray_lp.x)
            if (v.sign() > 0 && (scale.is_zero() || v < scale)) scale = v;
        for (std::size_t col = 0; col < d; ++col)
            if (ray_lp.x[col].sign() != 0) ray.ray[open[col]] = ray_lp.x[col] / scale;
        return ray;
    }

    // Bounded: solve max xi_target s.t. -nu xi <= y0 with the representative
    // y0 = x0 + sum_certified mu_j (counts set to one); the optimal dual
    // multipliers form the affine certificate.
    std::vector<Rational> y0(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational y(net.x0[i]);
        for (std::size_t j : certified) {
            std::int64_t pos = std::max<std::int64_t>(net.nu[j][i], 0);
            y += Rational(pos);
        }
        y0[i] = y;
    }
    std::vector<Rational> c(d, Rational(0));
    c[target_col] = Rational(1);
    SimplexResult bound_lp = simplex_max(rows, y0, c);
    if (bound_lp.status != SimplexResult::Status::Optimal)
        throw std::logic_error("bound LP unbounded although the recession cone is trivial");

    AffineReactionBound cert;
    cert.target = target;
    cert.dual = bound_lp.dual;
    Rational constant(0);
    for (std::size_t i = 0; i < n; ++i) constant += bound_lp.dual[i] * Rational(net.x0[i]);
    cert.constant = constant;
    for (std::size_t j : certified) {
        Rational w(0);
        for (std::size_t i = 0; i < n; ++i)
            w += bound_lp.dual[i] * Rational(std::max<std::int64_t>(net.nu[j][i], 0));
        if (w.sign() != 0) cert.coeffs[j] = w;
    }
    for (std::size_t j : open) {
        Rational w(0);
        for (std::size_t i = 0; i < n; ++i) w += bound_lp.dual[i] * Rational(-net.nu[j][i]);
        if (w.sign() != 0) cert.uncertified_coeffs[j] = w;
    }
    return cert;
}

DirectionResult lp_bounded_in_direction(const ReactionNetwork& net, std::size_t target) {
    return lp_bounded_in_direction(net, target, classify_reactions(net).unconsuming);
}

std::variant<CouplingAssignment, CouplingFailure> coupling_structure_check(
    const ReactionNetwork& net) {
    ReactionClassification cls = classify_reactions(net);
    std::vector<SpeciesBoundCertificate> sb = bounded_species(net);
    std::vector<bool> species_bounded(net.n_species(), false);
    for (const auto& cert : sb) species_bounded[cert.species] = true;

    CouplingAssignment assignment;
    std::vector<bool> fission_species(net.n_species(), false);
    for (std::size_t j : cls.unconsuming) {
        const Reaction& rx = net.reactions[j];
        if (rx.custom_factor)
            return CouplingFailure{"unconsuming channel not of a recognized birth form",
                                   "channel " + rx.name + " has polynomial kinetics"};
        CouplingAssignment::Entry entry;
        entry.channel = j;
        if (rx.reactants.empty() && rx.products.size() == 1 && rx.products[0].second == 1) {
            entry.type = CouplingAssignment::Type::CatalyticBirth;  // 0 -> S
        } else if (rx.reactants.size() == 1 && rx.reactants[0].second == 1 &&
                   rx.products.size() == 1 && rx.products[0].first == rx.reactants[0].first &&
                   rx.products[0].second == 2) {
            entry.type = CouplingAssignment::Type::BinaryFission;  // S -> 2S
            entry.species = rx.reactants[0].first;
            fission_species[*entry.species] = true;
        } else if (rx.reactants.size() == 1 && rx.reactants[0].second == 1 &&
                   rx.products.size() == 2) {
            // A -> A + S, in either product order
            std::size_t a = rx.reactants[0].first;
            const auto& p0 = rx.products[0];
            const auto& p1 = rx.products[1];
            bool shape = (p0.first == a && p0.second == 1 && p1.second == 1) ||
                         (p1.first == a && p1.second == 1 && p0.second == 1);
            if (!shape)
                return CouplingFailure{"unconsuming channel not of a recognized birth form",
                                       "channel " + rx.name};
            if (!species_bounded[a])
                return CouplingFailure{
                    "catalytic birth with unbounded catalyst",
                    "channel " + rx.name + ", catalyst " + net.species[a]};
            entry.type = CouplingAssignment::Type::CatalyticBirth;
            entry.catalyst = a;
        } else {
            return CouplingFailure{"unconsuming channel not of a recognized birth form",
                                   "channel " + rx.name};
        }
        assignment.entries.push_back(entry);
    }

    for (std::size_t j : cls.consuming) {
        for (std::size_t i = 0; i < net.n_species(); ++i) {
            if (fission_species[i] && net.nu[j][i] > 0)
                return CouplingFailure{
                    "consuming channel increases a fission species",
                    "species " + net.species[i] + ", channel " + net.reactions[j].name};
        }
    }
    return assignment;
}

ValidityReport check_gt_validity(const ReactionNetwork& net, std::size_t target) {
    if (target >= net.n_reactions())
        throw std::out_of_range("check_gt_validity: channel index out of range");
    ValidityReport rep;
    rep.target = target;
    rep.target_param = net.reactions[target].rate_param;

    ReactionClassification cls = classify_reactions(net);
    rep.species_bounds = bounded_species(net);
    std::vector<std::size_t> bp = bounded_propensity_channels(net, rep.species_bounds);

    auto coupling = coupling_structure_check(net);
    bool coupling_ok = std::holds_alternative<CouplingAssignment>(coupling);
    if (coupling_ok)
        rep.coupling = std::get<CouplingAssignment>(coupling);
    else
        rep.coupling_failure = std::get<CouplingFailure>(coupling);

    for (std::size_t j : bp) {
        rep.certified_channels.push_back(j);
        rep.channel_certifications[j] =
            net.reactions[j].reactants.empty() && !net.reactions[j].custom_factor
                ? "constant propensity"
                : "bounded propensity";
    }
    if (coupling_ok) {
        for (std::size_t j : cls.unconsuming) {
            if (!contains(rep.certified_channels, j)) {
                rep.certified_channels.push_back(j);
                rep.channel_certifications[j] = "dominating birth process";
            }
        }
    }
    std::sort(rep.certified_channels.begin(), rep.certified_channels.end());

    for (std::size_t j : cls.unconsuming)
        if (!contains(rep.certified_channels, j)) rep.unresolved_channels.push_back(j);

    bool target_certified = contains(rep.certified_channels, target);
    if (contains(bp, target)) {
        rep.valid = true;
        rep.path = ValidityReport::Path::BoundedPropensity;
        return rep;
    }
    if (target_certified) {
        // Dominating-process route: it certifies every unconsuming channel
        // at once, so no unresolved obligations remain.
        rep.valid = true;
        rep.path = ValidityReport::Path::CouplingStructure;
        return rep;
    }

    if (cls.is_unconsuming(target)) {
        rep.failures.push_back("target channel " + net.reactions[target].name +
                               " is unconsuming with unbounded propensity and no dominating "
                               "birth structure applies");
        if (rep.coupling_failure)
            rep.failures.push_back(rep.coupling_failure->condition + " (" +
                                   rep.coupling_failure->witness + ")");
        return rep;
    }

    DirectionResult dir = lp_bounded_in_direction(net, target, rep.certified_channels);
    if (std::holds_alternative<RecessionRay>(dir)) {
        rep.recession_ray = std::get<RecessionRay>(dir);
        std::string ray_str;
        for (const auto& [j, v] : rep.recession_ray->ray) {
            if (!ray_str.empty()) ray_str += ", ";
            ray_str += net.reactions[j].name + "=" + v.str();
        }
        rep.failures.push_back("count of " + net.reactions[target].name +
                               " admits no affine bound: recession ray (" + ray_str + ")");
        for (std::size_t j : rep.unresolved_channels)
            rep.failures.push_back("unconsuming channel " + net.reactions[j].name +
                                   " has no exponential-moment certificate");
        return rep;
    }

    rep.lp_certificate = std::get<AffineReactionBound>(dir);
    if (rep.unresolved_channels.empty()) {
        rep.valid = true;
        rep.path = ValidityReport::Path::LPCertificate;
        return rep;
    }
    rep.bound_exists_despite_unresolved = true;
    for (std::size_t j : rep.unresolved_channels)
        rep.failures.push_back("unconsuming channel " + net.reactions[j].name +
                               " has no exponential-moment certificate");
    if (rep.coupling_failure)
        rep.failures.push_back(rep.coupling_failure->condition + " (" +
                               rep.coupling_failure->witness + ")");
    return rep;
}

namespace {

struct ProbeAcc {
    MeanVarAccumulator all;
    MeanVarAccumulator first_half;
    MeanVarAccumulator second_half;
    double max_sample = 0.0;
    double sum = 0.0;
    std::uint64_t discarded = 0;

    void merge(const ProbeAcc& o) {
        all.merge(o.all);
        first_half.merge(o.first_half);
        second_half.merge(o.second_half);
        max_sample = std::max(max_sample, o.max_sample);
        sum += o.sum;
        discarded += o.discarded;
    }
};

ProbeResult run_probe(const ReactionNetwork& net, std::size_t target, const SimConfig& cfg,
                      std::uint64_t n, ProbeKind kind, double parameter, const Expression* f,
                      double top_share_threshold, double split_z_threshold, unsigned threads) {
    double c_star = net.rate[target];
    std::uint64_t half = n / 2;
    ProbeAcc acc = replicate_reduce<ProbeAcc>(n, threads, [&](ProbeAcc& a, std::uint64_t r) {
        SimConfig cr = cfg;
        cr.replicate_index = r;
        PathSummary path = simulate_summary(net, cr);
        if (path.discarded) {
            ++a.discarded;
            return;
        }
        double v = 0.0;
        switch (kind) {
            case ProbeKind::RightTail: {
                // rho^R, capped so one monster path degrades diagnostics
                // instead of poisoning the accumulator with inf.
                double lg = static_cast<double>(path.counts[target]) * std::log(parameter);
                v = std::exp(std::min(lg, 600.0));
                break;
            }
            case ProbeKind::LeftTail: {
                double int_b = path.integrated_propensity[target] / c_star;
                v = std::exp(std::min(parameter * int_b, 600.0));
                break;
            }
            case ProbeKind::MomentF: {
                double fv = std::fabs(f->eval(path.final_state));
                v = fv * fv * fv;
                break;
            }
        }
        a.all.add(v);
        (r < half ? a.first_half : a.second_half).add(v);
        a.max_sample = std::max(a.max_sample, v);
        a.sum += v;
    });

    ProbeResult res;
    res.kind = kind;
    res.parameter = parameter;
    res.estimate = acc.all.mean();
    res.std_error = acc.all.stderr_of_mean();
    res.n = acc.all.count();
    res.top_sample_share = acc.sum > 0.0 ? acc.max_sample / acc.sum : 0.0;
    double se1 = acc.first_half.stderr_of_mean();
    double se2 = acc.second_half.stderr_of_mean();
    double combined = std::sqrt(se1 * se1 + se2 * se2);
    double diff = std::fabs(acc.first_half.mean() - acc.second_half.mean());
    res.split_z = combined > 0.0 ? diff / combined : (diff == 0.0 ? 0.0 : 1e300);
    res.stabilized =
        res.top_sample_share <= top_share_threshold && res.split_z <= split_z_threshold;
    return res;
}

}  // namespace

std::vector<ProbeResult> integrability_probe(const ReactionNetwork& net, std::size_t target,
                                             const SimConfig& cfg, std::uint64_t n,
                                             const ProbeConfig& probes, unsigned threads) {
    double c_star = net.rate[target];
    std::vector<ProbeResult> out;
    for (double rho : probes.right_rho) {
        if (!(rho > 1.0)) throw std::invalid_argument("right-tail probe needs rho > 1");
        out.push_back(run_probe(net, target, cfg, n, ProbeKind::RightTail, rho, nullptr,
                                probes.top_share_threshold, probes.split_z_threshold, threads));
    }
    for (double scale : probes.left_eps_scale) {
        if (!(scale > 0.0)) throw std::invalid_argument("left-tail probe needs eps > 0");
        out.push_back(run_probe(net, target, cfg, n, ProbeKind::LeftTail, scale * c_star, nullptr,
                                probes.top_share_threshold, probes.split_z_threshold, threads));
    }
    if (probes.f) {
        out.push_back(run_probe(net, target, cfg, n, ProbeKind::MomentF, 0.0, &*probes.f,
                                probes.top_share_threshold, probes.split_z_threshold, threads));
    }
    return out;
}

std::string path_name(ValidityReport::Path path) {
    switch (path) {
        case ValidityReport::Path::None: return "none";
        case ValidityReport::Path::BoundedPropensity: return "bounded-propensity";
        case ValidityReport::Path::LPCertificate: return "affine-count-bound";
        case ValidityReport::Path::CouplingStructure: return "dominating-birth-process";
    }
    return "none";
}

}  // namespace gtsens
