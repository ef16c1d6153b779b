#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "grievlex/error.hpp"

namespace grievlex {

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0; // sample SD, N-1 denominator
};

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (const double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Two-pass sample variance (N-1).
inline double sample_variance(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw ArgumentError("sample variance needs n >= 2");
    const double m = mean_of(xs);
    double ss = 0.0;
    for (const double x : xs) {
        const double d = x - m;
        ss += d * d;
    }
    return ss / static_cast<double>(n - 1);
}

// Values are sorted before accumulating, so any permutation of the same
// multiset yields bitwise-identical stats (bootstrap subsamples of a whole
// group reproduce the group's stats exactly).
inline SampleStats compute_stats(std::span<const double> xs) {
    if (xs.size() < 2) throw ArgumentError("sample stats need n >= 2");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    SampleStats s;
    s.n = sorted.size();
    s.mean = mean_of(sorted);
    s.sd = std::sqrt(sample_variance(sorted));
    return s;
}

inline bool all_equal(std::span<const double> xs) {
    for (const double x : xs) {
        if (x != xs[0]) return false;
    }
    return true;
}

namespace stats_detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta did not converge");
}

} // namespace stats_detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * stats_detail::betacf(a, b, x) / a;
    }
    return 1.0 - bt * stats_detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a t statistic with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw ArgumentError("degrees of freedom must be positive");
    if (t == 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

// Linear-interpolation quantile (the common "type 7"): q in [0, 1] over
// sorted values.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ArgumentError("quantile of empty data");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

// Pearson correlation; returns false when either side has no variance.
inline bool pearson_r(std::span<const double> x, std::span<const double> y, double& r_out) {
    const std::size_t n = x.size();
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return false;
    r_out = sxy / std::sqrt(sxx * syy);
    r_out = std::clamp(r_out, -1.0, 1.0);
    return true;
}

} // namespace grievlex
