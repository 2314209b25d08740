#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "rsglm/errors.hpp"

// Tail-probability kernels for the chi-square and Student-t distributions,
// built on the regularized incomplete gamma and beta functions. Self-contained
// on purpose: these back every p-value in the toolkit.

namespace rsglm {

namespace detail {

inline constexpr int kMaxIter = 500;
inline constexpr double kEps = 1e-16;
inline constexpr double kTiny = 1e-300;

/// Regularized lower incomplete gamma P(a, x) by power series (valid x < a+1).
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction
/// (valid x >= a+1).
inline double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Continued fraction for the regularized incomplete beta (Lentz).
inline double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw validation_error("gamma_p: a must be positive");
    if (x < 0.0) throw validation_error("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw validation_error("gamma_q: a must be positive");
    if (x < 0.0) throw validation_error("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw validation_error("incomplete_beta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw validation_error("incomplete_beta: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cf(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi2_sf(double x, int df) {
    if (df < 1) throw validation_error("chi2_sf: df must be >= 1");
    if (x < 0.0) throw validation_error("chi2_sf: x must be nonnegative");
    return gamma_q(0.5 * df, 0.5 * x);
}

/// Upper tail P(T > x) of Student's t with df degrees of freedom.
inline double t_sf(double x, int df) {
    if (df < 1) throw validation_error("t_sf: df must be >= 1");
    const double v = static_cast<double>(df);
    const double half = 0.5 * incomplete_beta(0.5 * v, 0.5, v / (v + x * x));
    return x >= 0.0 ? half : 1.0 - half;
}

/// Two-sided t-test p-value for an observed statistic t.
inline double t_two_sided_p(double t, int df) {
    double p = 2.0 * t_sf(std::abs(t), df);
    return p > 1.0 ? 1.0 : p;
}

/// Standard normal upper tail, used as the df -> infinity reference for t_sf.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / 1.4142135623730950488);
}

/// Significance glyphs with strict thresholds: p < 0.001 "***", p < 0.01 "**",
/// p < 0.05 "*", p < 0.1 "•", otherwise "".
inline std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    if (p < 0.1) return "•";
    return "";
}

} // namespace rsglm
