#include "gtsens/simplex.hpp"

#include <stdexcept>

namespace gtsens {

// Dense tableau over the n structural plus m slack variables. Row i holds the
// current basic representation; the last row carries reduced costs and the
// objective value. Bland's rule: entering = lowest-index column with positive
// reduced cost, leaving = tightest ratio with lowest basic index tiebreak.
SimplexResult simplex_max(const std::vector<std::vector<Rational>>& A,
                          const std::vector<Rational>& b, const std::vector<Rational>& c) {
    std::size_t m = A.size();
    std::size_t n = c.size();
    if (b.size() != m) throw std::invalid_argument("simplex_max: rhs size mismatch");
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("simplex_max: row size mismatch");
    for (const auto& v : b)
        if (v.sign() < 0) throw std::invalid_argument("simplex_max: rhs must be nonnegative");

    std::size_t cols = n + m + 1;
    std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(cols, Rational(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
        t[i][n + i] = Rational(1);
        t[i][cols - 1] = b[i];
        basis[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) t[m][j] = c[j];

    for (;;) {
        std::size_t enter = cols - 1;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (t[m][j].sign() > 0) {
                enter = j;
                break;
            }
        }
        if (enter == cols - 1) break;  // optimal

        std::size_t leave = m;
        Rational best_ratio(0);
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter].sign() <= 0) continue;
            Rational ratio = t[i][cols - 1] / t[i][enter];
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) {
            SimplexResult r;
            r.status = SimplexResult::Status::Unbounded;
            return r;
        }

        Rational pivot = t[leave][enter];
        for (auto& v : t[leave]) v /= pivot;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || t[i][enter].is_zero()) continue;
            Rational factor = t[i][enter];
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= factor * t[leave][j];
        }
        basis[leave] = enter;
    }

    SimplexResult r;
    r.status = SimplexResult::Status::Optimal;
    r.value = -t[m][cols - 1];
    r.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) r.x[basis[i]] = t[i][cols - 1];
    r.dual.resize(m);
    for (std::size_t i = 0; i < m; ++i) r.dual[i] = -t[m][n + i];
    return r;
}

}  // namespace gtsens
