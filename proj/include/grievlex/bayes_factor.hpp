#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "grievlex/error.hpp"

namespace grievlex {

// Default JZS Bayes factor for the t-test (Rouder et al. 2009 form).
//
// The effect size delta carries a Cauchy(0, r) prior, equivalently
// delta | g ~ N(0, g r^2) with g ~ InverseGamma(1/2, 1/2). Marginalizing
// gives a one-dimensional integral over g:
//
//   BF10 = integral_0^inf (1 + N g r^2)^(-1/2)
//            * [ (1 + t^2 / ((1 + N g r^2) nu)) / (1 + t^2 / nu) ]^(-(nu+1)/2)
//            * (2 pi)^(-1/2) g^(-3/2) exp(-1 / (2 g)) dg
//
// with N the effective sample size (n for one sample / paired,
// n1 n2 / (n1 + n2) for two samples) and nu the degrees of freedom. The
// null likelihood ratio is folded into the integrand so everything stays
// representable in log space for the paper-scale |t| where BF10 exceeds
// exp(1000). Integration runs over x = ln g with adaptive Gauss-Kronrod
// (G7, K15) panels after locating the integrand's peak.

enum class TestDesign { two_sample, one_sample };

struct BayesFactor {
    double bf10 = 0.0;    // exp(ln_bf10); +inf when out of double range
    double ln_bf10 = 0.0;
};

inline constexpr double kDefaultBfScale = 0.70710678118654752; // sqrt(2)/2

namespace bf_detail {

struct Integrand {
    double t2;          // t^2
    double nu;          // degrees of freedom
    double neff_r2;     // N * r^2
    double ln_null;     // log1p(t^2 / nu)

    // h(x) = log integrand after the g = e^x substitution (includes the
    // Jacobian e^x and the factored-out null term).
    double operator()(double x) const {
        const double g = std::exp(x);
        const double one_plus = 1.0 + neff_r2 * g;
        const double alt = std::log1p(t2 / (one_plus * nu));
        return -0.918938533204672742 /* 0.5 ln(2 pi) */
               - 0.5 * x - 0.5 * std::exp(-x)
               - 0.5 * std::log(one_plus)
               - 0.5 * (nu + 1.0) * (alt - ln_null);
    }
};

// Gauss-Kronrod 7-15 nodes and weights (positive half).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double integral;
    double error;
};

template <typename F>
PanelResult gauss_kronrod(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double gauss = 0.0;
    double kronrod = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = h * kXgk[i];
        double fv;
        if (i == 7) {
            fv = f(c);
            kronrod += kWgk[7] * fv;
            gauss += kWg[3] * fv;
        } else {
            const double f1 = f(c - dx);
            const double f2 = f(c + dx);
            kronrod += kWgk[i] * (f1 + f2);
            if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
        }
    }
    return PanelResult{kronrod * h, std::fabs(kronrod - gauss) * h};
}

struct Segment {
    double a, b, integral, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// Adaptive integral of exp(h(x) - h_max) over [a, b]: split the panel
// with the largest error estimate until the summed estimate meets the
// relative tolerance.
template <typename F>
double adaptive_integral(const F& f, double a, double b, double rel_tol) {
    std::priority_queue<Segment> queue;
    double total = 0.0;
    double err = 0.0;
    const auto push = [&](double lo, double hi) {
        const PanelResult r = gauss_kronrod(f, lo, hi);
        queue.push(Segment{lo, hi, r.integral, r.error});
        total += r.integral;
        err += r.error;
    };
    // Several initial panels keep single-panel error estimates honest on
    // strongly peaked integrands.
    constexpr int kInitial = 8;
    for (int i = 0; i < kInitial; ++i) {
        push(a + (b - a) * i / kInitial, a + (b - a) * (i + 1) / kInitial);
    }

    constexpr int kMaxPanels = 4000;
    int panels = kInitial;
    while (err > rel_tol * std::fabs(total)) {
        if (panels >= kMaxPanels) {
            if (err > 100.0 * rel_tol * std::fabs(total)) {
                throw NumericError("Bayes factor quadrature did not converge: error " +
                                   std::to_string(err) + " on integral " +
                                   std::to_string(total));
            }
            break;
        }
        const Segment worst = queue.top();
        queue.pop();
        total -= worst.integral;
        err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid);
        push(mid, worst.b);
        ++panels;
    }

    // Re-sum the final panels; the incremental total above only steered
    // the refinement.
    double result = 0.0;
    while (!queue.empty()) {
        result += queue.top().integral;
        queue.pop();
    }
    return result;
}

} // namespace bf_detail

// n2 is ignored for the one-sample design. Returns both BF10 and its log;
// the log is the quantity of record once BF10 leaves double range.
inline BayesFactor jzs_bayes_factor(double t, double n1, double n2, TestDesign design,
                                    double rscale = kDefaultBfScale, double rel_tol = 1e-9) {
    if (!std::isfinite(t)) throw ArgumentError("t must be finite");
    if (rscale <= 0.0) throw ArgumentError("bf scale must be positive");
    double n_eff;
    double nu;
    if (design == TestDesign::two_sample) {
        if (n1 < 2.0 || n2 < 2.0) throw ArgumentError("two-sample design needs n >= 2 per group");
        n_eff = n1 * n2 / (n1 + n2);
        nu = n1 + n2 - 2.0;
    } else {
        if (n1 < 2.0) throw ArgumentError("one-sample design needs n >= 2");
        n_eff = n1;
        nu = n1 - 1.0;
    }

    bf_detail::Integrand h;
    h.t2 = t * t;
    h.nu = nu;
    h.neff_r2 = n_eff * rscale * rscale;
    h.ln_null = std::log1p(h.t2 / nu);

    // Locate the peak of h over x = ln g, then bound where the integrand
    // has fallen by e^-80 relative to it.
    double h_max = -1e308;
    double x_peak = 0.0;
    for (double x = -60.0; x <= 60.0; x += 0.25) {
        const double v = h(x);
        if (v > h_max) {
            h_max = v;
            x_peak = x;
        }
    }
    const double cutoff = h_max - 80.0;
    double lo = x_peak;
    while (lo > -700.0 && h(lo) > cutoff) lo -= 1.0;
    double hi = x_peak;
    while (hi < 700.0 && h(hi) > cutoff) hi += 1.0;

    const auto scaled = [&](double x) { return std::exp(h(x) - h_max); };
    const double integral = bf_detail::adaptive_integral(scaled, lo, hi, rel_tol);
    if (!(integral > 0.0)) throw NumericError("Bayes factor integral vanished");

    BayesFactor out;
    out.ln_bf10 = h_max + std::log(integral);
    out.bf10 = std::exp(out.ln_bf10);
    return out;
}

} // namespace grievlex
