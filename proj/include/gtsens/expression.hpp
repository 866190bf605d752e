#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>

namespace gtsens {

/// Polynomial expression over species counts x1..xn: +, -, *, integer powers
/// (^k), numeric constants, parentheses, unary minus. This covers observables
/// f of polynomial growth and explicit propensity factors b(x).
class Expression {
public:
    /// Parse. `n_species` bounds the variable indices (0 = unknown count;
    /// indices are then validated at evaluation time).
    static Expression parse(const std::string& text, std::size_t n_species = 0);

    double eval(std::span<const std::int64_t> state) const;

    /// 0-based indices of variables that appear in the expression.
    const std::set<std::size_t>& variables() const { return variables_; }

    const std::string& text() const { return text_; }

    bool is_constant() const { return variables_.empty(); }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::set<std::size_t> variables_;
    std::string text_;
};

/// Thrown on malformed expression text; carries the offending position.
struct ExpressionError : std::runtime_error {
    explicit ExpressionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gtsens
