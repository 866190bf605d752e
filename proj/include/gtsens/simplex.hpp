#pragma once

#include <vector>

#include "gtsens/rational.hpp"

namespace gtsens {

/// Exact simplex for: maximize c^T x subject to A x <= b, x >= 0,
/// with b >= 0 (slack basis start). Bland's rule, so no cycling and a
/// deterministic optimal vertex. Inputs are tiny certificate problems.
struct SimplexResult {
    enum class Status { Optimal, Unbounded } status;
    Rational value;
    std::vector<Rational> x;     // primal solution
    std::vector<Rational> dual;  // one multiplier per constraint row
};

SimplexResult simplex_max(const std::vector<std::vector<Rational>>& A,
                          const std::vector<Rational>& b, const std::vector<Rational>& c);

}  // namespace gtsens
