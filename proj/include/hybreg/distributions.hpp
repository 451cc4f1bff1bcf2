#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hybreg/errors.hpp"

namespace hybreg {

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ContractError("incomplete_beta: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// CDF of the central F distribution with (df1, df2) degrees of freedom.
inline double f_cdf(double x, long df1, long df2) {
    if (df1 < 1 || df2 < 1)
        throw ContractError("f_cdf: degrees of freedom must be >= 1 (got " + std::to_string(df1) + ", " +
                            std::to_string(df2) + ")");
    if (std::isnan(x)) throw ContractError("f_cdf: x is NaN");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double a = 0.5 * static_cast<double>(df1);
    const double b = 0.5 * static_cast<double>(df2);
    const double d1x = static_cast<double>(df1) * x;
    // I_w(a, b) with w = d1 x / (d1 x + d2); evaluate via the complement when w is near 1.
    const double w = d1x / (d1x + static_cast<double>(df2));
    if (w > 0.5) return 1.0 - incomplete_beta(b, a, static_cast<double>(df2) / (d1x + static_cast<double>(df2)));
    return incomplete_beta(a, b, w);
}

/// Upper-tail probability P(F > x).
inline double f_sf(double x, long df1, long df2) {
    if (df1 < 1 || df2 < 1) return f_cdf(x, df1, df2);  // raises
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double a = 0.5 * static_cast<double>(df1);
    const double b = 0.5 * static_cast<double>(df2);
    const double d1x = static_cast<double>(df1) * x;
    return incomplete_beta(b, a, static_cast<double>(df2) / (d1x + static_cast<double>(df2)));
}

/// Inverse CDF by bisection on f_cdf; p in (0, 1).
inline double f_quantile(double p, long df1, long df2) {
    if (!(p > 0.0 && p < 1.0)) throw ContractError("f_quantile: probability must lie in (0, 1)");
    double lo = 0.0;
    double hi = 1.0;
    while (f_cdf(hi, df1, df2) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    for (int i = 0; i < 300 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f_cdf(mid, df1, df2) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Critical value F_{alpha; df1, df2} (upper alpha point).
inline double f_critical(double alpha, long df1, long df2) { return f_quantile(1.0 - alpha, df1, df2); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Standard normal quantile: rational approximation refined by two Newton steps.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ContractError("normal_quantile: probability must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    for (int i = 0; i < 2; ++i) {
        const double err = normal_cdf(x) - p;
        const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
        if (pdf <= 0.0) break;
        x -= err / pdf;
    }
    return x;
}

}  // namespace hybreg
