#include "gtsens/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace gtsens {

namespace {

// Series expansion, converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction, converges fast for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_upper_p(double statistic, int dof) {
    if (dof <= 0) throw std::domain_error("chi_square_upper_p: dof must be positive");
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");

    std::vector<double> obs;
    std::vector<double> exp;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    // Fold the under-populated remainder into the last bin.
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    if (exp.size() < 2) throw std::invalid_argument("chi_square_gof: fewer than two pooled bins");

    ChiSquareResult r;
    r.pooled_bins = static_cast<int>(exp.size());
    r.dof = r.pooled_bins - 1;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        double d = obs[i] - exp[i];
        r.statistic += d * d / exp[i];
    }
    r.p_upper = chi_square_upper_p(r.statistic, r.dof);
    return r;
}

}  // namespace gtsens
