#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtsens/expression.hpp"

namespace gtsens {

using State = std::vector<std::int64_t>;

/// One reaction channel. Multiplicities are positive; the propensity factor
/// b(x) is the stochastic mass-action count unless an explicit polynomial
/// is supplied.
struct Reaction {
    std::string name;
    std::vector<std::pair<std::size_t, std::int64_t>> reactants;  // (species, multiplicity)
    std::vector<std::pair<std::size_t, std::int64_t>> products;
    std::string rate_param;
    std::optional<Expression> custom_factor;  // explicit b(x); mass action if absent
};

/// Immutable reaction network: species, stoichiometry, product-form
/// propensities a_j(x) = c_j * b_j(x), and the initial state. Safe to share
/// across threads after construction.
struct ReactionNetwork {
    std::vector<std::string> species;
    std::vector<std::vector<std::int64_t>> nu;  // one column per reaction, length n_species
    std::vector<Reaction> reactions;
    State x0;
    std::map<std::string, double> params;
    std::vector<double> rate;  // resolved c_j per reaction

    std::size_t n_species() const { return species.size(); }
    std::size_t n_reactions() const { return reactions.size(); }

    std::size_t species_index(const std::string& name) const;
    std::size_t reaction_index(const std::string& name) const;

    /// Index of the unique reaction whose rate parameter is `param`.
    /// Throws if the parameter is unused or shared by several channels.
    std::size_t channel_of_param(const std::string& param) const;
};

struct ReactionClassification {
    std::vector<std::size_t> unconsuming;  // nu_j >= 0 componentwise
    std::vector<std::size_t> consuming;
    bool is_unconsuming(std::size_t j) const;
};

struct ModelParseError : std::runtime_error {
    ModelParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

/// Kinetics contradiction at runtime: a propensity positive at a state the
/// reaction cannot fire from, or state overflow.
struct KineticsError : std::runtime_error {
    explicit KineticsError(const std::string& what) : std::runtime_error(what) {}
};

/// Parse the line-oriented model format ([params] / [species] / [reactions]).
ReactionNetwork parse_model(const std::string& text);

/// Check all structural invariants and resolve rate constants. parse_model
/// calls this; programmatically built networks should too.
ReactionNetwork validate_network(ReactionNetwork net);

/// Propensity factor b_j(x): falling-factorial count for mass action,
/// or the explicit polynomial. Zero whenever a reactant count is below its
/// multiplicity.
double propensity_factor(const ReactionNetwork& net, std::size_t j, std::span<const std::int64_t> x);

/// a_j(x) = c_j * b_j(x).
double propensity(const ReactionNetwork& net, std::size_t j, std::span<const std::int64_t> x);

ReactionClassification classify_reactions(const ReactionNetwork& net);

/// x + nu_j with precondition propensity > 0; rejects negative results and
/// 64-bit overflow.
State apply_reaction(const State& x, const ReactionNetwork& net, std::size_t j);

/// Copy of the network with one rate constant replaced.
ReactionNetwork with_param(const ReactionNetwork& net, const std::string& name, double value);

/// Canonical text rendering of a network in the model file format.
std::string render_model(const ReactionNetwork& net);

/// FNV-1a 64-bit content hash, hex-encoded; used to fingerprint model files.
std::string content_hash(const std::string& bytes);

}  // namespace gtsens
