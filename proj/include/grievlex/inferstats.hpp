#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "grievlex/bayes_factor.hpp"
#include "grievlex/csv.hpp"
#include "grievlex/error.hpp"
#include "grievlex/parallel.hpp"
#include "grievlex/rng.hpp"
#include "grievlex/scorer.hpp"
#include "grievlex/stats.hpp"

namespace grievlex {

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom. Two all-constant samples with equal means define t = 0, p = 1;
// with different means the statistic is undefined.
inline TTestResult welch_t(const SampleStats& a, const SampleStats& b) {
    if (a.n < 2 || b.n < 2) throw ArgumentError("welch_t needs n >= 2 per group");
    const double va = a.sd * a.sd / static_cast<double>(a.n);
    const double vb = b.sd * b.sd / static_cast<double>(b.n);
    if (va + vb == 0.0) {
        if (a.mean == b.mean) {
            return TTestResult{0.0, static_cast<double>(a.n + b.n - 2), 1.0};
        }
        throw DegenerateError("both variances are zero with unequal means");
    }
    TTestResult r;
    r.t = (a.mean - b.mean) / std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) /
           (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
    r.p = t_two_sided_p(r.t, r.df);
    return r;
}

struct EffectSize {
    double d = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Pooled-SD standardized mean difference, 95% CI by the normal
// approximation d +/- 1.96 * SE.
inline EffectSize cohen_d(const SampleStats& a, const SampleStats& b) {
    if (a.n < 2 || b.n < 2) throw ArgumentError("cohen_d needs n >= 2 per group");
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double pooled_var = ((na - 1.0) * a.sd * a.sd + (nb - 1.0) * b.sd * b.sd) /
                              (na + nb - 2.0);
    if (pooled_var <= 0.0) throw DegenerateError("pooled SD is zero");
    EffectSize e;
    e.d = (a.mean - b.mean) / std::sqrt(pooled_var);
    const double se = std::sqrt((na + nb) / (na * nb) + e.d * e.d / (2.0 * (na + nb)));
    e.lo = e.d - 1.96 * se;
    e.hi = e.d + 1.96 * se;
    return e;
}

enum class CompareDesign { independent_bootstrap, paired };

struct CategoryComparison {
    std::string category;
    bool defined = true;              // false when every iteration was degenerate
    double d_mean = 0.0;
    double d_lo = 0.0;
    double d_hi = 0.0;
    double t_mean = 0.0;
    double bf10_mean = 0.0;
    double ln_bf10_mean = 0.0;
    std::size_t degenerate_iterations = 0;
};

struct ComparisonReport {
    CompareDesign design = CompareDesign::independent_bootstrap;
    std::size_t iterations = 1;
    std::uint64_t seed = 0;
    double bf_scale = kDefaultBfScale;
    std::vector<CategoryComparison> categories;
};

namespace inferstats_detail {

inline std::vector<double> column(const ScoreTable& table, std::size_t col) {
    std::vector<double> out;
    out.reserve(table.values.size());
    for (const auto& row : table.values) out.push_back(row[col]);
    return out;
}

inline void require_same_columns(const ScoreTable& a, const ScoreTable& b) {
    if (a.columns != b.columns) {
        throw ArgumentError("score tables have different columns");
    }
}

} // namespace inferstats_detail

// Down-sampling bootstrap comparison: per iteration, draw |target| control
// rows without replacement (substream of (seed, iteration)), then compute
// Welch t, Cohen's d, and the two-sample JZS Bayes factor per category.
// Reported per category: means of d / t / BF10 / ln BF10 across
// iterations and the 2.5/97.5 percentile interval of d. Deterministic in
// (tables, B, seed) regardless of thread count.
inline ComparisonReport bootstrap_compare(const ScoreTable& target, const ScoreTable& control,
                                          std::size_t iterations, std::uint64_t seed,
                                          double bf_scale = kDefaultBfScale,
                                          unsigned threads = 1) {
    inferstats_detail::require_same_columns(target, control);
    const std::size_t nt = target.values.size();
    const std::size_t nc = control.values.size();
    if (nt < 2) throw ArgumentError("target table needs at least 2 rows");
    if (nc < nt) throw ArgumentError("control table must be at least as large as target");
    if (iterations < 1) throw ArgumentError("iterations must be >= 1");

    const std::size_t k = target.columns.size();
    std::vector<SampleStats> target_stats(k);
    for (std::size_t c = 0; c < k; ++c) {
        target_stats[c] = compute_stats(inferstats_detail::column(target, c));
    }

    struct IterationResult {
        std::vector<double> d, t, bf, ln_bf;
        std::vector<char> degenerate;
    };
    std::vector<IterationResult> results(iterations);

    parallel_for(iterations, threads, [&](std::size_t it) {
        auto rng = substream(seed, it);
        const auto idx = sample_without_replacement(rng, nc, nt);
        IterationResult& res = results[it];
        res.d.assign(k, 0.0);
        res.t.assign(k, 0.0);
        res.bf.assign(k, 0.0);
        res.ln_bf.assign(k, 0.0);
        res.degenerate.assign(k, 0);
        std::vector<double> sample(nt);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < nt; ++i) sample[i] = control.values[idx[i]][c];
            const SampleStats cs = compute_stats(sample);
            try {
                const TTestResult tt = welch_t(target_stats[c], cs);
                const EffectSize es = cohen_d(target_stats[c], cs);
                const BayesFactor bf = jzs_bayes_factor(
                    tt.t, static_cast<double>(nt), static_cast<double>(nt),
                    TestDesign::two_sample, bf_scale);
                res.t[c] = tt.t;
                res.d[c] = es.d;
                res.bf[c] = bf.bf10;
                res.ln_bf[c] = bf.ln_bf10;
            } catch (const DegenerateError&) {
                res.degenerate[c] = 1;
            }
        }
    });

    ComparisonReport report;
    report.design = CompareDesign::independent_bootstrap;
    report.iterations = iterations;
    report.seed = seed;
    report.bf_scale = bf_scale;
    report.categories.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        CategoryComparison& out = report.categories[c];
        out.category = target.columns[c];
        std::vector<double> ds;
        double sum_d = 0.0, sum_t = 0.0, sum_bf = 0.0, sum_ln = 0.0;
        for (std::size_t it = 0; it < iterations; ++it) {
            if (results[it].degenerate[c]) {
                ++out.degenerate_iterations;
                continue;
            }
            ds.push_back(results[it].d[c]);
            sum_d += results[it].d[c];
            sum_t += results[it].t[c];
            sum_bf += results[it].bf[c];
            sum_ln += results[it].ln_bf[c];
        }
        if (ds.empty()) {
            out.defined = false;
            continue;
        }
        const double n = static_cast<double>(ds.size());
        out.d_mean = sum_d / n;
        out.t_mean = sum_t / n;
        out.bf10_mean = sum_bf / n;
        out.ln_bf10_mean = sum_ln / n;
        std::sort(ds.begin(), ds.end());
        out.d_lo = quantile_sorted(ds, 0.025);
        out.d_hi = quantile_sorted(ds, 0.975);
    }
    return report;
}

// Dependent-samples comparison, rows paired by doc id: paired t on the
// differences, d = mean(diff) / sd(diff), CI d +/- 1.96 * sqrt(1/n +
// d^2/(2n)), BF10 from the one-sample JZS test on the differences.
inline ComparisonReport paired_compare(const ScoreTable& a, const ScoreTable& b,
                                       double bf_scale = kDefaultBfScale) {
    inferstats_detail::require_same_columns(a, b);
    const std::size_t n = a.values.size();
    if (n < 2) throw ArgumentError("paired comparison needs n >= 2");
    if (b.values.size() != n) throw ArgumentError("paired tables must have equal row counts");

    std::map<std::string, std::size_t> b_rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (!b_rows.emplace(b.doc_ids[i], i).second) {
            throw ArgumentError("duplicate doc id '" + b.doc_ids[i] + "' in second table");
        }
    }
    std::vector<std::size_t> align(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = b_rows.find(a.doc_ids[i]);
        if (it == b_rows.end()) {
            throw ArgumentError("doc id '" + a.doc_ids[i] + "' missing from second table");
        }
        align[i] = it->second;
    }

    ComparisonReport report;
    report.design = CompareDesign::paired;
    report.iterations = 1;
    report.seed = 0;
    report.bf_scale = bf_scale;
    report.categories.resize(a.columns.size());

    std::vector<double> diff(n);
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
        CategoryComparison& out = report.categories[c];
        out.category = a.columns[c];
        for (std::size_t i = 0; i < n; ++i) {
            diff[i] = a.values[i][c] - b.values[align[i]][c];
        }
        const double md = mean_of(diff);
        const double sd = std::sqrt(sample_variance(diff));
        if (sd == 0.0) {
            if (md != 0.0) {
                out.defined = false;
                out.degenerate_iterations = 1;
                continue;
            }
            // a == b on this category: the null case is well-defined.
            const BayesFactor bf = jzs_bayes_factor(0.0, static_cast<double>(n), 0.0,
                                                    TestDesign::one_sample, bf_scale);
            out.bf10_mean = bf.bf10;
            out.ln_bf10_mean = bf.ln_bf10;
            continue;
        }
        const double nn = static_cast<double>(n);
        const double t = md / (sd / std::sqrt(nn));
        const double d = md / sd;
        const double se = std::sqrt(1.0 / nn + d * d / (2.0 * nn));
        const BayesFactor bf =
            jzs_bayes_factor(t, nn, 0.0, TestDesign::one_sample, bf_scale);
        out.d_mean = d;
        out.d_lo = d - 1.96 * se;
        out.d_hi = d + 1.96 * se;
        out.t_mean = t;
        out.bf10_mean = bf.bf10;
        out.ln_bf10_mean = bf.ln_bf10;
    }
    return report;
}

inline void write_comparison_csv(std::ostream& os, const ComparisonReport& report,
                                 const std::vector<std::string>& config_comments = {}) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    write_csv_row(os, {"category", "d_mean", "d_lo", "d_hi", "t_mean", "bf10_mean",
                       "ln_bf10_mean", "iterations", "seed"});
    for (const auto& cat : report.categories) {
        std::vector<std::string> row;
        row.push_back(cat.category);
        if (cat.defined) {
            row.push_back(format_fixed(cat.d_mean, 6));
            row.push_back(format_fixed(cat.d_lo, 6));
            row.push_back(format_fixed(cat.d_hi, 6));
            row.push_back(format_fixed(cat.t_mean, 6));
            row.push_back(format_sci(cat.bf10_mean, 6));
            row.push_back(format_fixed(cat.ln_bf10_mean, 6));
        } else {
            for (int i = 0; i < 6; ++i) row.push_back("NA");
        }
        row.push_back(std::to_string(report.iterations));
        row.push_back(std::to_string(report.seed));
        write_csv_row(os, row);
    }
}

// Table-6 style display: BF10 above 10^3 prints as ">10^3".
inline std::string display_bf10(double bf10) {
    if (bf10 > 1000.0) return ">10^3";
    return format_fixed(bf10, 2);
}

} // namespace grievlex
