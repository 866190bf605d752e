#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gtsens/builtin.hpp"
#include "gtsens/network.hpp"
#include "gtsens/rng.hpp"

using namespace gtsens;

TEST_CASE("parse_model handles the documented format") {
    ReactionNetwork net = parse_model(
        "[params]   c1 = 1.0  c2 = 0.5\n"
        "[species]  S1 = 10   S2 = 0        # name = initial count\n"
        "[reactions]\n"
        "R1: S1 -> S2        @ c1           # mass action inferred\n"
        "R2: S1 + S2 -> 0    @ c2\n"
        "R3: 0 -> S1         @ c1\n"
        "R4: S1 -> S2 @ c2 | b = \"x1*x1\"\n");
    CHECK(net.n_species() == 2);
    CHECK(net.n_reactions() == 4);
    CHECK(net.x0 == State{10, 0});
    CHECK(net.nu[0] == std::vector<std::int64_t>{-1, 1});
    CHECK(net.nu[1] == std::vector<std::int64_t>{-1, -1});
    CHECK(net.nu[2] == std::vector<std::int64_t>{1, 0});
    CHECK(net.rate[1] == 0.5);
    REQUIRE(net.reactions[3].custom_factor.has_value());
    CHECK(propensity(net, 3, State{4, 0}) == 0.5 * 16.0);
}

TEST_CASE("gene expression builtin has the documented stoichiometry") {
    ReactionNetwork net = builtin_model("gene-expression");
    CHECK(net.n_species() == 4);
    CHECK(net.n_reactions() == 5);
    CHECK(net.nu[3] == std::vector<std::int64_t>{-1, 1, 0, -1});
    CHECK(net.nu[0] == std::vector<std::int64_t>{0, 0, 1, 0});
    CHECK(net.nu[1] == std::vector<std::int64_t>{0, 0, 1, 0});
}

TEST_CASE("smallest network: one immigration reaction") {
    ReactionNetwork net = parse_model(
        "[params] c = 2.0\n[species] S = 0\n[reactions]\nR1: 0 -> S @ c\n");
    CHECK(net.n_species() == 1);
    CHECK(net.n_reactions() == 1);
    CHECK(net.nu[0] == std::vector<std::int64_t>{1});
    CHECK(propensity(net, 0, State{123}) == 2.0);
}

TEST_CASE("parse errors carry line numbers and reasons") {
    auto line_of = [](const std::string& text) {
        try {
            parse_model(text);
        } catch (const ModelParseError& e) {
            return e.line;
        }
        return -1;
    };
    // reaction referencing an undeclared species
    CHECK(line_of("[params] c = 1.0\n[species] S = 1\n[reactions]\nR1: Q -> S @ c\n") == 4);
    // nonpositive rate constant
    CHECK_THROWS_WITH_AS(
        parse_model("[params] c = 0.0\n[species] S = 1\n[reactions]\nR1: S -> 2 S @ c\n"),
        doctest::Contains("must be positive"), ModelParseError);
    // negative initial count
    CHECK_THROWS_WITH_AS(
        parse_model("[params] c = 1.0\n[species] S = -3\n[reactions]\nR1: S -> 2 S @ c\n"),
        doctest::Contains("negative initial count"), ModelParseError);
    // zero stoichiometric column
    CHECK_THROWS_WITH_AS(
        parse_model("[params] c = 1.0\n[species] S = 1\n[reactions]\nR1: S -> S @ c\n"),
        doctest::Contains("zero stoichiometric column"), ModelParseError);
    CHECK(line_of("[params] c = 1.0\n[species] S = 1 S = 2\n") == 2);  // duplicate species
    CHECK(line_of("stray text\n") == 1);                               // before any section
    CHECK(line_of("[params] c = 1.0\n[species] S = 1\n[reactions]\nR1: S 2 S @ c\n") == 4);
    // undeclared rate parameter
    CHECK_THROWS_WITH_AS(
        parse_model("[params] c = 1.0\n[species] S = 1\n[reactions]\nR1: S -> 2 S @ k\n"),
        doctest::Contains("undeclared parameter"), ModelParseError);
    // overflowing numerals are rejected, not wrapped or crashed on
    CHECK_THROWS_AS(
        parse_model("[params] c = 1.0\n[species] S = 99999999999999999999999\n[reactions]\n"
                    "R1: S -> 2 S @ c\n"),
        ModelParseError);
    CHECK_THROWS_AS(
        parse_model("[params] c = 1.0\n[species] S = 1\n[reactions]\n"
                    "R1: 99999999999999999999 S -> S @ c\n"),
        ModelParseError);
    CHECK_THROWS_AS(
        parse_model("[params] c = 1e999\n[species] S = 1\n[reactions]\nR1: S -> 2 S @ c\n"),
        ModelParseError);
}

TEST_CASE("mass action propensities match the worked examples") {
    // two-molecule reactant: a = c * x(x-1)/2
    ReactionNetwork net = builtin_model("dimer-exchange");
    double c2 = net.rate[1];
    CHECK(propensity(net, 1, State{4, 0}) == 6.0 * c2);
    CHECK(propensity(net, 1, State{1, 5}) == 0.0);  // below multiplicity
    // linear decay channel of the predator-prey model: a4 = delta1 * x1
    ReactionNetwork lv = builtin_model("lotka-volterra");
    CHECK(propensity(lv, 3, State{7, 2}) == 7.0 * lv.rate[3]);
    // any reaction at a state lacking a reactant fires at rate zero
    CHECK(propensity(lv, 2, State{5, 0}) == 0.0);
}

namespace {

// Independent route: count injective ordered tuples by explicit enumeration,
// then divide by the per-species symmetry factor.
double brute_force_combinations(const Reaction& rx, const State& x) {
    double total = 1.0;
    for (const auto& [i, m] : rx.reactants) {
        long count = 0;
        // ordered selections of m distinct labeled molecules out of x[i]
        std::vector<int> slot(static_cast<std::size_t>(m), -1);
        std::vector<bool> used(static_cast<std::size_t>(std::max<std::int64_t>(x[i], 0)), false);
        auto rec = [&](auto&& self, std::size_t depth) -> void {
            if (depth == slot.size()) {
                ++count;
                return;
            }
            for (std::int64_t mol = 0; mol < x[i]; ++mol) {
                if (used[static_cast<std::size_t>(mol)]) continue;
                used[static_cast<std::size_t>(mol)] = true;
                self(self, depth + 1);
                used[static_cast<std::size_t>(mol)] = false;
            }
        };
        rec(rec, 0);
        double symmetry = 1.0;
        for (std::int64_t k = 2; k <= m; ++k) symmetry *= static_cast<double>(k);
        total *= static_cast<double>(count) / symmetry;
    }
    return total;
}

}  // namespace

TEST_CASE("mass action equals brute-force combination counting on all builtins") {
    for (const auto& name : builtin_model_names()) {
        ReactionNetwork net = builtin_model(name);
        State x(net.n_species(), 0);
        // sweep all states with max coordinate <= 6
        std::size_t n = net.n_species();
        std::vector<std::int64_t> limit(n, 6);
        for (;;) {
            for (std::size_t j = 0; j < net.n_reactions(); ++j) {
                if (net.reactions[j].custom_factor) continue;
                INFO("model ", name, " channel ", net.reactions[j].name);
                CHECK(propensity_factor(net, j, x) ==
                      doctest::Approx(brute_force_combinations(net.reactions[j], x))
                          .epsilon(1e-12));
            }
            std::size_t i = 0;
            while (i < n && ++x[i] > limit[i]) x[i++] = 0;
            if (i == n) break;
        }
    }
}

TEST_CASE("classification partitions channels by stoichiometric sign") {
    ReactionClassification gene = classify_reactions(builtin_model("gene-expression"));
    CHECK(gene.unconsuming == std::vector<std::size_t>{0, 1});
    CHECK(gene.consuming == std::vector<std::size_t>{2, 3, 4});

    ReactionClassification dimer = classify_reactions(builtin_model("dimer-exchange"));
    CHECK(dimer.unconsuming == std::vector<std::size_t>{0});
    CHECK(dimer.consuming == std::vector<std::size_t>{1, 2});

    // every column nonnegative -> nothing consuming
    ReactionNetwork births = parse_model(
        "[params] a = 1.0 b = 1.0\n[species] S1 = 0 S2 = 0\n[reactions]\n"
        "R1: 0 -> S1 @ a\nR2: 0 -> S2 @ b\n");
    CHECK(classify_reactions(births).consuming.empty());
}

TEST_CASE("classification is stable under channel reordering") {
    ReactionNetwork net = builtin_model("lotka-volterra");
    ReactionNetwork shuffled = net;
    std::vector<std::size_t> perm{2, 0, 3, 1};
    for (std::size_t k = 0; k < perm.size(); ++k) {
        shuffled.reactions[k] = net.reactions[perm[k]];
        shuffled.nu[k] = net.nu[perm[k]];
        shuffled.rate[k] = net.rate[perm[k]];
    }
    ReactionClassification a = classify_reactions(net);
    ReactionClassification b = classify_reactions(shuffled);
    auto mapped = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> out;
        for (std::size_t k : idx) out.push_back(perm[k]);
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<std::size_t> ua = a.unconsuming;
    std::sort(ua.begin(), ua.end());
    CHECK(mapped(b.unconsuming) == ua);
}

TEST_CASE("apply_reaction respects nonnegativity and preconditions") {
    ReactionNetwork net = builtin_model("conversion-annihilation");
    // annihilation at (1,1) lands exactly on the origin
    CHECK(apply_reaction(State{1, 1}, net, 1) == State{0, 0});
    // zero-propensity channel cannot fire
    CHECK_THROWS_AS(apply_reaction(State{0, 5}, net, 0), std::invalid_argument);

    ReactionNetwork dimer = builtin_model("dimer-exchange");
    CHECK(apply_reaction(State{2, 0}, dimer, 1) == State{0, 2});
}

TEST_CASE("positive mass-action propensity implies the jump stays feasible") {
    StreamRng rng(123, 0, 0);
    for (const auto& name : builtin_model_names()) {
        ReactionNetwork net = builtin_model(name);
        for (int trial = 0; trial < 500; ++trial) {
            State x(net.n_species());
            for (auto& v : x) v = static_cast<std::int64_t>(rng.next_u64() % 7);
            for (std::size_t j = 0; j < net.n_reactions(); ++j) {
                if (propensity(net, j, x) > 0.0) {
                    State y = apply_reaction(x, net, j);
                    for (std::int64_t v : y) CHECK(v >= 0);
                }
            }
        }
    }
}

TEST_CASE("polynomial kinetics still honor the reactant floor") {
    ReactionNetwork net = parse_model(
        "[params] c = 1.0\n[species] S1 = 3 S2 = 0\n[reactions]\n"
        "R1: S1 -> S2 @ c | b = \"x1*x1\"\n");
    CHECK(propensity(net, 0, State{4, 0}) == 16.0);
    CHECK(propensity(net, 0, State{0, 9}) == 0.0);  // reactant below multiplicity
}

TEST_CASE("with_param rewrites one rate constant") {
    ReactionNetwork net = builtin_model("birth-annihilation");
    ReactionNetwork bumped = with_param(net, "c1", 2.5);
    CHECK(bumped.rate[0] == 2.5);
    CHECK(bumped.rate[1] == net.rate[1]);
    CHECK(net.rate[0] == 1.0);  // original untouched
    CHECK_THROWS_AS(with_param(net, "nope", 1.0), std::out_of_range);
    CHECK_THROWS_AS(with_param(net, "c1", 0.0), std::invalid_argument);
    CHECK(net.channel_of_param("c2") == 1);
    CHECK_THROWS_AS(net.channel_of_param("zzz"), std::out_of_range);
}

TEST_CASE("render_model round-trips through the parser") {
    for (const auto& name : builtin_model_names()) {
        ReactionNetwork net = builtin_model(name);
        ReactionNetwork again = parse_model(render_model(net));
        CHECK(again.species == net.species);
        CHECK(again.x0 == net.x0);
        CHECK(again.nu == net.nu);
        CHECK(again.rate == net.rate);
    }
}

TEST_CASE("mangled model text fails cleanly, never crashes") {
    // random mutations of a valid model must either parse or raise a
    // ModelParseError; anything else is a parser bug
    const std::string base =
        "[params] c1 = 1.0 c2 = 0.5\n"
        "[species] S1 = 3 S2 = 0\n"
        "[reactions]\n"
        "R1: S1 -> S2 @ c1\n"
        "R2: 2 S1 -> 2 S2 @ c2 | b = \"x1*x1\"\n";
    StreamRng rng(0xBADC0DE, 0, 0);
    const std::string garbage = "[]->@=|#\"x0123 \n";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text = base;
        for (int edits = 0; edits < 3; ++edits) {
            std::size_t pos = rng.next_u64() % text.size();
            switch (rng.next_u64() % 3) {
                case 0:
                    text[pos] = garbage[rng.next_u64() % garbage.size()];
                    break;
                case 1:
                    text.erase(pos, 1);
                    break;
                default:
                    text.insert(pos, 1, garbage[rng.next_u64() % garbage.size()]);
                    break;
            }
            if (text.empty()) text = " ";
        }
        try {
            parse_model(text);
        } catch (const ModelParseError&) {
            // expected for most mutations
        }
    }
    CHECK(true);  // reaching here means no crash and no foreign exception
}

TEST_CASE("content hash distinguishes different model texts") {
    CHECK(content_hash("abc") != content_hash("abd"));
    CHECK(content_hash("abc") == content_hash("abc"));
    CHECK(content_hash("").size() == 16);
}
