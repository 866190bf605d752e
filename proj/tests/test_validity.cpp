#include <doctest.h>

#include <cmath>

#include "gtsens/builtin.hpp"
#include "gtsens/json_io.hpp"
#include "gtsens/simulator.hpp"
#include "gtsens/validity.hpp"

using namespace gtsens;

namespace {

const SpeciesBoundCertificate* find_bound(const std::vector<SpeciesBoundCertificate>& certs,
                                          std::size_t species) {
    for (const auto& c : certs)
        if (c.species == species) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("conserved gene states are certified bounded") {
    ReactionNetwork net = builtin_model("gene-expression");
    auto certs = bounded_species(net);
    const auto* a = find_bound(certs, 0);
    const auto* ap = find_bound(certs, 1);
    REQUIRE(a);
    REQUIRE(ap);
    // the conservation weights (1,1,0,0) bound both states by x0_A + x0_Ap
    CHECK(a->weights == std::vector<Rational>{Rational(1), Rational(1), Rational(0), Rational(0)});
    CHECK(a->bound == Rational(net.x0[0] + net.x0[1]));
    CHECK(ap->bound == Rational(net.x0[0] + net.x0[1]));
    CHECK(find_bound(certs, 2) == nullptr);  // transcript counts are unbounded
    CHECK(find_bound(certs, 3) == nullptr);
}

TEST_CASE("net production directions leave nothing bounded") {
    CHECK(bounded_species(builtin_model("dimer-exchange")).empty());
    CHECK(bounded_species(builtin_model("pure-birth")).empty());
}

TEST_CASE("single decaying species is bounded by its initial count") {
    ReactionNetwork net = parse_model(
        "[params] d = 1.0\n[species] S = 9\n[reactions]\nR1: S -> 0 @ d\n");
    auto certs = bounded_species(net);
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].weights == std::vector<Rational>{Rational(1)});
    CHECK(certs[0].bound == Rational(9));
}

TEST_CASE("bounded-propensity channels follow the bounded species") {
    ReactionNetwork gene = builtin_model("gene-expression");
    CHECK(bounded_propensity_channels(gene, bounded_species(gene)) ==
          std::vector<std::size_t>{0, 1, 4});

    ReactionNetwork cascade = builtin_model("conversion-annihilation");
    CHECK(bounded_propensity_channels(cascade, bounded_species(cascade)) ==
          std::vector<std::size_t>{2});  // only the constant immigration channel

    ReactionNetwork fission = builtin_model("birth-annihilation");
    CHECK(bounded_propensity_channels(fission, bounded_species(fission)).empty());
}

TEST_CASE("polynomial kinetics count as bounded only over bounded variables") {
    ReactionNetwork net = parse_model(
        "[params] c = 1.0 d = 1.0 e = 1.0\n[species] S1 = 2 S2 = 0\n[reactions]\n"
        "R1: S1 -> S2 @ c | b = \"x1*x1\"\n"
        "R2: S1 -> S2 @ d | b = \"x2 + 1\"\n"
        "R3: 0 -> S2 @ e\n");
    // S1 is only consumed -> bounded; S2 receives immigration -> unbounded
    auto certs = bounded_species(net);
    REQUIRE(find_bound(certs, 0));
    CHECK(find_bound(certs, 1) == nullptr);
    // R1's polynomial touches only the bounded S1; R2's touches S2; R3 constant
    CHECK(bounded_propensity_channels(net, certs) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("affine bound for the cascade reproduces the hand derivation") {
    ReactionNetwork net = builtin_model("conversion-annihilation");
    DirectionResult dir = lp_bounded_in_direction(net, 0);  // default unconsuming split
    REQUIRE(std::holds_alternative<AffineReactionBound>(dir));
    const auto& cert = std::get<AffineReactionBound>(dir);
    // R1 + R2 <= x0_1 + R3
    CHECK(cert.constant == Rational(net.x0[0]));
    CHECK(cert.coeffs == std::map<std::size_t, Rational>{{2, Rational(1)}});
    CHECK(cert.uncertified_coeffs ==
          std::map<std::size_t, Rational>{{0, Rational(1)}, {1, Rational(1)}});
}

TEST_CASE("pair exchange admits the equal-components recession ray") {
    ReactionNetwork net = builtin_model("dimer-exchange");
    DirectionResult dir = lp_bounded_in_direction(net, 1);
    REQUIRE(std::holds_alternative<RecessionRay>(dir));
    const auto& ray = std::get<RecessionRay>(dir);
    CHECK(ray.ray == std::map<std::size_t, Rational>{{1, Rational(1)}, {2, Rational(1)}});
}

TEST_CASE("single consuming channel against one species is bounded") {
    ReactionNetwork net = parse_model(
        "[params] a = 1.0 b = 1.0\n[species] S1 = 4 S2 = 0\n[reactions]\n"
        "U1: 0 -> S1 @ a\nC1: S1 -> 0 @ b\n");
    DirectionResult dir = lp_bounded_in_direction(net, 1);
    REQUIRE(std::holds_alternative<AffineReactionBound>(dir));
    const auto& cert = std::get<AffineReactionBound>(dir);
    CHECK(cert.constant == Rational(4));
    CHECK(cert.coeffs == std::map<std::size_t, Rational>{{0, Rational(1)}});
}

TEST_CASE("certified targets are rejected as LP directions") {
    ReactionNetwork net = builtin_model("conversion-annihilation");
    CHECK_THROWS_AS(lp_bounded_in_direction(net, 2), std::invalid_argument);
}

TEST_CASE("coupling structure accepts the fission and prey systems") {
    auto fission = coupling_structure_check(builtin_model("birth-annihilation"));
    REQUIRE(std::holds_alternative<CouplingAssignment>(fission));
    const auto& fa = std::get<CouplingAssignment>(fission);
    REQUIRE(fa.entries.size() == 1);
    CHECK(fa.entries[0].channel == 0);
    CHECK(fa.entries[0].type == CouplingAssignment::Type::BinaryFission);
    CHECK(fa.entries[0].species == 0);

    auto prey = coupling_structure_check(builtin_model("lotka-volterra"));
    REQUIRE(std::holds_alternative<CouplingAssignment>(prey));
    const auto& pa = std::get<CouplingAssignment>(prey);
    REQUIRE(pa.entries.size() == 2);
    CHECK(pa.entries[0].type == CouplingAssignment::Type::CatalyticBirth);
    CHECK_FALSE(pa.entries[0].catalyst.has_value());  // bare immigration
    CHECK(pa.entries[1].type == CouplingAssignment::Type::BinaryFission);
}

TEST_CASE("consuming channels that feed a fission species break the coupling") {
    ReactionNetwork net = parse_model(
        "[params] a = 1.0 b = 1.0 c = 1.0\n[species] S1 = 1 S2 = 1\n[reactions]\n"
        "R1: S1 -> 2 S1 @ a\n"
        "R2: S1 + S2 -> 2 S1 @ b\n"
        "R3: 2 S1 -> S1 + S2 @ c\n");
    auto res = coupling_structure_check(net);
    REQUIRE(std::holds_alternative<CouplingFailure>(res));
    const auto& fail = std::get<CouplingFailure>(res);
    CHECK(fail.condition == "consuming channel increases a fission species");
    CHECK(fail.witness.find("S1") != std::string::npos);
    CHECK(fail.witness.find("R2") != std::string::npos);
}

TEST_CASE("unrecognized unconsuming shapes break the coupling") {
    // double birth 0 -> 2S is neither a catalytic birth nor a fission
    ReactionNetwork net = parse_model(
        "[params] a = 1.0\n[species] S = 0\n[reactions]\nR1: 0 -> 2 S @ a\n");
    auto res = coupling_structure_check(net);
    REQUIRE(std::holds_alternative<CouplingFailure>(res));
    // catalytic birth with an unbounded catalyst is also out
    ReactionNetwork net2 = parse_model(
        "[params] a = 1.0 b = 1.0\n[species] S1 = 1 S2 = 0\n[reactions]\n"
        "R1: 0 -> S1 @ a\nR2: S1 -> S1 + S2 @ b\n");
    auto res2 = coupling_structure_check(net2);
    REQUIRE(std::holds_alternative<CouplingFailure>(res2));
    CHECK(std::get<CouplingFailure>(res2).condition == "catalytic birth with unbounded catalyst");
}

TEST_CASE("golden verdicts across the registry") {
    auto verdict = [](const std::string& model, const std::string& param) {
        ReactionNetwork net = builtin_model(model);
        return check_gt_validity(net, net.channel_of_param(param));
    };

    for (const char* p : {"c1", "c2", "c3"}) {
        ValidityReport r = verdict("conversion-annihilation", p);
        INFO("cascade ", p);
        CHECK(r.valid);
    }
    CHECK(verdict("conversion-annihilation", "c3").path ==
          ValidityReport::Path::BoundedPropensity);
    CHECK(verdict("conversion-annihilation", "c1").path == ValidityReport::Path::LPCertificate);

    for (const char* p : {"c1", "c2", "c3", "alpha", "beta"}) {
        ValidityReport r = verdict("gene-expression", p);
        INFO("gene expression ", p);
        CHECK(r.valid);
    }
    CHECK(verdict("gene-expression", "c3").path == ValidityReport::Path::LPCertificate);
    CHECK(verdict("gene-expression", "alpha").path == ValidityReport::Path::LPCertificate);

    CHECK(verdict("dimer-exchange", "c1").valid);
    for (const char* p : {"c2", "c3"}) {
        ValidityReport r = verdict("dimer-exchange", p);
        INFO("pair exchange ", p);
        CHECK_FALSE(r.valid);
        REQUIRE(r.recession_ray.has_value());
        CHECK(r.recession_ray->ray ==
              std::map<std::size_t, Rational>{{1, Rational(1)}, {2, Rational(1)}});
    }

    ValidityReport fission1 = verdict("birth-annihilation", "c1");
    CHECK(fission1.valid);
    CHECK(fission1.path == ValidityReport::Path::CouplingStructure);
    ValidityReport fission2 = verdict("birth-annihilation", "c2");
    CHECK(fission2.valid);
    CHECK(fission2.path == ValidityReport::Path::LPCertificate);
    REQUIRE(fission2.lp_certificate.has_value());
    CHECK(fission2.lp_certificate->constant == Rational(1, 2));
    CHECK(fission2.lp_certificate->coeffs ==
          std::map<std::size_t, Rational>{{0, Rational(1, 2)}});

    for (const char* p : {"alpha1", "beta1", "gamma12", "delta1"}) {
        ValidityReport r = verdict("lotka-volterra", p);
        INFO("prey model ", p);
        CHECK(r.valid);
    }
    CHECK(verdict("lotka-volterra", "beta1").path == ValidityReport::Path::CouplingStructure);
    ValidityReport lv3 = verdict("lotka-volterra", "gamma12");
    REQUIRE(lv3.lp_certificate.has_value());
    CHECK(lv3.lp_certificate->constant == Rational(1));
    CHECK(lv3.lp_certificate->coeffs ==
          std::map<std::size_t, Rational>{{0, Rational(1)}, {1, Rational(1)}});

    CHECK(verdict("immigration", "c").valid);
    CHECK(verdict("pure-birth", "c").valid);
    CHECK(verdict("pure-birth", "c").path == ValidityReport::Path::CouplingStructure);
}

TEST_CASE("extra unconsuming channels never turn a ray into a bound") {
    // the recession cone over consuming columns ignores unconsuming channels
    ReactionNetwork base = builtin_model("dimer-exchange");
    ReactionNetwork extended = parse_model(
        "[params] c1 = 1.0 c2 = 1.0 c3 = 1.0 c4 = 1.0\n"
        "[species] S1 = 2 S2 = 0\n"
        "[reactions]\n"
        "R1: 0 -> S1 @ c1\n"
        "R2: 2 S1 -> 2 S2 @ c2\n"
        "R3: 2 S2 -> 2 S1 @ c3\n"
        "R4: 0 -> S2 @ c4\n");
    for (std::size_t target : {std::size_t{1}, std::size_t{2}}) {
        DirectionResult before = lp_bounded_in_direction(base, target);
        DirectionResult after = lp_bounded_in_direction(extended, target);
        CHECK(std::holds_alternative<RecessionRay>(before));
        CHECK(std::holds_alternative<RecessionRay>(after));
        CHECK(std::get<RecessionRay>(before).ray == std::get<RecessionRay>(after).ray);
    }
}

TEST_CASE("unresolved unconsuming channels keep the verdict inconclusive") {
    // S2 -> S2 + S2? no: use an unbounded catalytic birth plus a consuming
    // target that the LP could bound; the verdict must stay inconclusive and
    // record the weaker-variant observation
    ReactionNetwork net = parse_model(
        "[params] a = 1.0 b = 1.0 c = 1.0\n[species] S1 = 1 S2 = 0\n[reactions]\n"
        "R1: 0 -> S1 @ a\n"
        "R2: S1 -> S1 + S2 @ b\n"   // catalyst S1 unbounded (immigration feeds it)
        "R3: S1 -> 0 @ c\n");
    ValidityReport rep = check_gt_validity(net, 2);
    CHECK_FALSE(rep.valid);
    CHECK(rep.unresolved_channels == std::vector<std::size_t>{1});
    CHECK(rep.bound_exists_despite_unresolved);
    REQUIRE(rep.lp_certificate.has_value());
    CHECK_FALSE(rep.failures.empty());
}

TEST_CASE("emitted certificates hold pathwise on simulated trajectories") {
    for (const auto& name : builtin_model_names()) {
        ReactionNetwork net = builtin_model(name);
        std::vector<ValidityReport> reports;
        for (std::size_t j = 0; j < net.n_reactions(); ++j)
            reports.push_back(check_gt_validity(net, j));
        for (std::uint64_t rep = 0; rep < 300; ++rep) {
            Trajectory traj = simulate(net, {1.0, 1000000, 606, rep});
            std::vector<std::int64_t> running(net.n_reactions(), 0);
            for (std::size_t k = 0; k <= traj.jump_times.size(); ++k) {
                if (k > 0) ++running[traj.channels[k - 1]];
                const State& x = traj.states[k];
                for (const auto& report : reports) {
                    for (const auto& sb : report.species_bounds)
                        CHECK(static_cast<double>(x[sb.species]) <= sb.bound.to_double() + 1e-9);
                    if (report.lp_certificate) {
                        const auto& cert = *report.lp_certificate;
                        double lhs = 0.0;
                        for (const auto& [ch, w] : cert.uncertified_coeffs)
                            lhs += w.to_double() * static_cast<double>(running[ch]);
                        double rhs = cert.constant.to_double();
                        for (const auto& [ch, w] : cert.coeffs)
                            rhs += w.to_double() * static_cast<double>(running[ch]);
                        CHECK(lhs <= rhs + 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("right-tail probe matches the Poisson generating function") {
    ReactionNetwork net = builtin_model("immigration");
    ProbeConfig pc;
    pc.right_rho = {1.5};
    pc.left_eps_scale = {};
    auto probes = integrability_probe(net, 0, {1.0, 1000000, 909, 0}, 20000, pc);
    REQUIRE(probes.size() == 1);
    CHECK(probes[0].stabilized);
    CHECK(std::fabs(probes[0].estimate - std::exp(0.5)) < 4.0 * probes[0].std_error);
}

TEST_CASE("supercritical fission probe is flagged unstable") {
    ReactionNetwork net = builtin_model("pure-birth");
    ProbeConfig pc;
    pc.right_rho = {2.0};  // beyond 1/(1-e^{-1}), the true expectation is infinite
    pc.left_eps_scale = {};
    auto probes = integrability_probe(net, 0, {1.0, 1000000, 910, 0}, 20000, pc);
    REQUIRE(probes.size() == 1);
    CHECK_FALSE(probes[0].stabilized);
    CHECK(probes[0].top_sample_share > 0.01);
}

TEST_CASE("stabilized probes are stable under doubling the sample size") {
    ReactionNetwork net = builtin_model("immigration");
    ProbeConfig pc;
    pc.right_rho = {1.25};
    pc.left_eps_scale = {0.25};
    auto at_n = integrability_probe(net, 0, {1.0, 1000000, 912, 0}, 20000, pc);
    auto at_2n = integrability_probe(net, 0, {1.0, 1000000, 912, 0}, 40000, pc);
    for (std::size_t i = 0; i < at_n.size(); ++i) {
        REQUIRE(at_n[i].stabilized);
        double combined = std::sqrt(at_n[i].std_error * at_n[i].std_error +
                                    at_2n[i].std_error * at_2n[i].std_error);
        // <= keeps the degenerate constant-sample probe (stderr 0) honest
        CHECK(std::fabs(at_n[i].estimate - at_2n[i].estimate) <= 3.0 * combined);
    }
}

TEST_CASE("constant observable third-moment probe is exactly one") {
    ReactionNetwork net = builtin_model("immigration");
    ProbeConfig pc;
    pc.right_rho = {};
    pc.left_eps_scale = {};
    pc.f = Expression::parse("1", 1);
    auto probes = integrability_probe(net, 0, {1.0, 1000000, 911, 0}, 5000, pc);
    REQUIRE(probes.size() == 1);
    CHECK(probes[0].estimate == 1.0);
    CHECK(probes[0].std_error == 0.0);
    CHECK(probes[0].stabilized);
}

TEST_CASE("validity report serializes to json with exact rationals") {
    ReactionNetwork net = builtin_model("birth-annihilation");
    ValidityReport rep = check_gt_validity(net, 1);
    rep.model = "birth-annihilation";
    nlohmann::json j = to_json(net, rep);
    CHECK(j["verdict"] == "valid");
    CHECK(j["path"] == "affine-count-bound");
    CHECK(j["affine_bound"]["constant"] == "1/2");
    CHECK(j["affine_bound"]["coeffs"]["R1"] == "1/2");
    std::string text = render_report_text(net, rep);
    CHECK(text.find("VALID") != std::string::npos);
}
