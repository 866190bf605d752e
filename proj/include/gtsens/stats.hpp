#pragma once

#include <cstddef>
#include <vector>

namespace gtsens {

/// Lower regularized incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
double chi_square_upper_p(double statistic, int dof);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_upper = 0.0;   // P(Chi2 >= statistic)
    int pooled_bins = 0;    // bins after pooling
};

/// Goodness-of-fit test of observed counts against expected counts.
/// Adjacent bins are pooled until every expected count is at least
/// `min_expected`; the last bin absorbs any remainder. dof = bins - 1.
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected = 5.0);

}  // namespace gtsens
