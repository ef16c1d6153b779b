#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "grievlex/inferstats.hpp"
#include "oracles.hpp"

using namespace grievlex;

namespace {

SampleStats stats(std::size_t n, double mean, double sd) {
    return SampleStats{n, mean, sd};
}

SampleStats random_stats(std::mt19937_64& rng) {
    return stats(2 + rng() % 200, static_cast<double>(rng() % 2000) / 100.0 - 10.0,
                 0.01 + static_cast<double>(rng() % 500) / 100.0);
}

ScoreTable table_from_columns(const std::vector<std::string>& cols,
                              const std::vector<std::vector<double>>& rows,
                              const std::string& prefix) {
    ScoreTable t;
    t.columns = cols;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.doc_ids.push_back(prefix + std::to_string(i));
        t.token_counts.push_back(100);
        t.values.push_back(rows[i]);
    }
    return t;
}

ScoreTable random_table(std::mt19937_64& rng, std::size_t n, std::size_t k,
                        const std::string& prefix, double shift = 0.0) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    std::normal_distribution<double> gauss(shift, 1.0);
    for (auto& r : rows) {
        for (double& v : r) v = gauss(rng);
    }
    std::vector<std::string> cols;
    for (std::size_t c = 0; c < k; ++c) cols.push_back("cat" + std::to_string(c));
    return table_from_columns(cols, rows, prefix);
}

} // namespace

TEST_CASE("welch: identical samples give t = 0, p = 1") {
    const auto r = welch_t(stats(10, 3.0, 1.5), stats(10, 3.0, 1.5));
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
}

TEST_CASE("welch: hand-evaluated case") {
    // t = (2 - 0) / sqrt(1/5 + 1/5) = 2 / sqrt(0.4)
    const auto r = welch_t(stats(5, 2.0, 1.0), stats(5, 0.0, 1.0));
    CHECK(r.t == doctest::Approx(2.0 / std::sqrt(0.4)).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(t_two_sided_p(r.t, 8.0)).epsilon(1e-15));
    CHECK(r.p < 0.05);
    CHECK(r.p > 0.001);
}

TEST_CASE("welch: antisymmetric under group swap") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        const SampleStats a = random_stats(rng);
        const SampleStats b = random_stats(rng);
        const auto ab = welch_t(a, b);
        const auto ba = welch_t(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
        CHECK(ab.df == doctest::Approx(ba.df).epsilon(1e-12));
    }
}

TEST_CASE("welch: degenerate zero-variance cases") {
    const auto ok = welch_t(stats(5, 2.0, 0.0), stats(7, 2.0, 0.0));
    CHECK(ok.t == 0.0);
    CHECK(ok.p == 1.0);
    CHECK_THROWS_AS(welch_t(stats(5, 2.0, 0.0), stats(7, 3.0, 0.0)), DegenerateError);
    CHECK_THROWS_AS(welch_t(stats(1, 2.0, 1.0), stats(7, 3.0, 1.0)), ArgumentError);
}

TEST_CASE("welch: equals the student formula at equal variance and n") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng() % 50;
        const double sd = 0.5 + static_cast<double>(rng() % 100) / 50.0;
        const double ma = static_cast<double>(rng() % 100) / 10.0;
        const double mb = static_cast<double>(rng() % 100) / 10.0;
        const auto w = welch_t(stats(n, ma, sd), stats(n, mb, sd));
        // pooled student t with equal n and sd
        const double student =
            (ma - mb) / (sd * std::sqrt(2.0 / static_cast<double>(n)));
        CHECK(w.t == doctest::Approx(student).epsilon(1e-12));
        CHECK(w.df == doctest::Approx(static_cast<double>(2 * n - 2)).epsilon(1e-9));
    }
}

TEST_CASE("cohen_d: exact half at the spec'd inputs") {
    const auto e = cohen_d(stats(10, 1.5, 1.0), stats(10, 1.0, 1.0));
    CHECK(e.d == 0.5);
    CHECK(e.lo < 0.5);
    CHECK(e.hi > 0.5);
    // SE = sqrt(20/100 + 0.25/40)
    const double se = std::sqrt(0.2 + 0.25 / 40.0);
    CHECK(e.hi - e.d == doctest::Approx(1.96 * se).epsilon(1e-12));
}

TEST_CASE("cohen_d: null, swap, and degenerate") {
    CHECK(cohen_d(stats(6, 4.0, 2.0), stats(9, 4.0, 1.0)).d == 0.0);
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const SampleStats a = random_stats(rng);
        const SampleStats b = random_stats(rng);
        const auto ab = cohen_d(a, b);
        const auto ba = cohen_d(b, a);
        CHECK(ab.d == doctest::Approx(-ba.d).epsilon(1e-12));
        CHECK(ab.lo == doctest::Approx(-ba.hi).epsilon(1e-12));
        CHECK(ab.hi == doctest::Approx(-ba.lo).epsilon(1e-12));
        // formula oracle
        const double na = static_cast<double>(a.n);
        const double nb = static_cast<double>(b.n);
        const double pooled =
            std::sqrt(((na - 1) * a.sd * a.sd + (nb - 1) * b.sd * b.sd) / (na + nb - 2));
        CHECK(ab.d == doctest::Approx((a.mean - b.mean) / pooled).epsilon(1e-10));
    }
    CHECK_THROWS_AS(cohen_d(stats(5, 1.0, 0.0), stats(5, 2.0, 0.0)), DegenerateError);
}

TEST_CASE("stats: scale invariance of t, d, and BF") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const SampleStats a = random_stats(rng);
        const SampleStats b = random_stats(rng);
        const double c = 0.001 + static_cast<double>(rng() % 10000) / 100.0;
        const SampleStats sa{a.n, a.mean * c, a.sd * c};
        const SampleStats sb{b.n, b.mean * c, b.sd * c};
        const auto t0 = welch_t(a, b);
        const auto t1 = welch_t(sa, sb);
        CHECK(t1.t == doctest::Approx(t0.t).epsilon(1e-9));
        const auto d0 = cohen_d(a, b);
        const auto d1 = cohen_d(sa, sb);
        CHECK(d1.d == doctest::Approx(d0.d).epsilon(1e-9));
        const auto bf0 = jzs_bayes_factor(t0.t, static_cast<double>(a.n),
                                          static_cast<double>(b.n), TestDesign::two_sample);
        const auto bf1 = jzs_bayes_factor(t1.t, static_cast<double>(a.n),
                                          static_cast<double>(b.n), TestDesign::two_sample);
        CHECK(bf1.ln_bf10 == doctest::Approx(bf0.ln_bf10).epsilon(1e-9));
    }
}

TEST_CASE("bootstrap_compare: self comparison is the exact null") {
    // With |control| == |target| the subsample is the whole table, so the
    // group stats coincide bitwise and every iteration's d is exactly 0.
    std::mt19937_64 rng(79);
    const ScoreTable t = random_table(rng, 50, 4, "d");
    const ComparisonReport report = bootstrap_compare(t, t, 100, 42);
    REQUIRE(report.categories.size() == 4);
    for (const auto& cat : report.categories) {
        CHECK(cat.d_mean == 0.0);
        CHECK(cat.d_lo == 0.0);
        CHECK(cat.d_hi == 0.0);
        CHECK(cat.t_mean == 0.0);
    }
}

TEST_CASE("bootstrap_compare: two independent null samples stay inside the noise bound") {
    std::mt19937_64 rng(83);
    const ScoreTable target = random_table(rng, 200, 3, "t");
    const ScoreTable control = random_table(rng, 600, 3, "c");
    const ComparisonReport report = bootstrap_compare(target, control, 100, 42);
    for (const auto& cat : report.categories) {
        CHECK(std::fabs(cat.d_mean) < 0.2);
        CHECK(cat.d_lo <= cat.d_mean);
        CHECK(cat.d_hi >= cat.d_mean);
    }
}

TEST_CASE("bootstrap_compare: deterministic and thread-count independent") {
    std::mt19937_64 rng(89);
    const ScoreTable target = random_table(rng, 8, 3, "t", 0.5);
    const ScoreTable control = random_table(rng, 20, 3, "c");

    const ComparisonReport a = bootstrap_compare(target, control, 50, 7);
    const ComparisonReport b = bootstrap_compare(target, control, 50, 7);
    const ComparisonReport par = bootstrap_compare(target, control, 50, 7, kDefaultBfScale, 4);

    std::ostringstream sa, sb, sp;
    write_comparison_csv(sa, a);
    write_comparison_csv(sb, b);
    write_comparison_csv(sp, par);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() == sp.str());

    const ComparisonReport other = bootstrap_compare(target, control, 50, 8);
    std::ostringstream so;
    write_comparison_csv(so, other);
    CHECK(sa.str() != so.str());
}

TEST_CASE("bootstrap_compare: matches a scripted re-implementation of the loop") {
    std::mt19937_64 rng(97);
    const ScoreTable target = random_table(rng, 8, 2, "t", 1.0);
    const ScoreTable control = random_table(rng, 20, 2, "c");
    const std::size_t B = 25;
    const std::uint64_t seed = 5;
    const ComparisonReport report = bootstrap_compare(target, control, B, seed);

    for (std::size_t cat = 0; cat < 2; ++cat) {
        double sum_d = 0.0;
        double sum_t = 0.0;
        for (std::size_t it = 0; it < B; ++it) {
            auto sub_rng = substream(seed, it);
            const auto idx = sample_without_replacement(sub_rng, 20, 8);
            std::vector<double> tv, cv;
            for (std::size_t i = 0; i < 8; ++i) tv.push_back(target.values[i][cat]);
            for (const std::size_t i : idx) cv.push_back(control.values[i][cat]);
            // direct formulas, written out
            double mt = 0.0, mc = 0.0;
            for (const double v : tv) mt += v / 8.0;
            for (const double v : cv) mc += v / 8.0;
            double vt = 0.0, vc = 0.0;
            for (const double v : tv) vt += (v - mt) * (v - mt) / 7.0;
            for (const double v : cv) vc += (v - mc) * (v - mc) / 7.0;
            sum_t += (mt - mc) / std::sqrt(vt / 8.0 + vc / 8.0);
            const double pooled = std::sqrt((7.0 * vt + 7.0 * vc) / 14.0);
            sum_d += (mt - mc) / pooled;
        }
        CHECK(report.categories[cat].d_mean ==
              doctest::Approx(sum_d / static_cast<double>(B)).epsilon(1e-10));
        CHECK(report.categories[cat].t_mean ==
              doctest::Approx(sum_t / static_cast<double>(B)).epsilon(1e-10));
    }
}

TEST_CASE("bootstrap_compare: argument errors") {
    std::mt19937_64 rng(101);
    const ScoreTable big = random_table(rng, 20, 2, "b");
    const ScoreTable small = random_table(rng, 8, 2, "s");
    CHECK_THROWS_AS(bootstrap_compare(big, small, 10, 1), ArgumentError);
    ScoreTable other = small;
    other.columns = {"x", "y"};
    CHECK_THROWS_AS(bootstrap_compare(other, big, 10, 1), ArgumentError);
    CHECK_THROWS_AS(bootstrap_compare(small, big, 0, 1), ArgumentError);
}

TEST_CASE("paired_compare: equal tables are the null everywhere") {
    std::mt19937_64 rng(103);
    const ScoreTable a = random_table(rng, 12, 3, "p");
    const ComparisonReport report = paired_compare(a, a);
    CHECK(report.design == CompareDesign::paired);
    CHECK(report.iterations == 1);
    for (const auto& cat : report.categories) {
        CHECK(cat.defined);
        CHECK(cat.d_mean == 0.0);
        CHECK(cat.t_mean == 0.0);
        CHECK(cat.bf10_mean < 1.0);
    }
}

TEST_CASE("paired_compare: five hand-made pairs against the formula") {
    const std::vector<double> xs = {2.0, 3.5, 1.0, 4.0, 2.5};
    const std::vector<double> ys = {1.0, 2.0, 1.5, 2.0, 2.0};
    ScoreTable a = table_from_columns({"c"}, {{xs[0]}, {xs[1]}, {xs[2]}, {xs[3]}, {xs[4]}}, "p");
    ScoreTable b = table_from_columns({"c"}, {{ys[0]}, {ys[1]}, {ys[2]}, {ys[3]}, {ys[4]}}, "p");

    std::vector<double> diff(5);
    for (int i = 0; i < 5; ++i) diff[i] = xs[i] - ys[i];
    double md = 0.0;
    for (const double d : diff) md += d / 5.0;
    double vd = 0.0;
    for (const double d : diff) vd += (d - md) * (d - md) / 4.0;
    const double sd = std::sqrt(vd);

    const ComparisonReport report = paired_compare(a, b);
    REQUIRE(report.categories.size() == 1);
    CHECK(report.categories[0].d_mean == doctest::Approx(md / sd).epsilon(1e-12));
    CHECK(report.categories[0].t_mean ==
          doctest::Approx(md / (sd / std::sqrt(5.0))).epsilon(1e-12));

    // pairing happens by id, not by order
    ScoreTable shuffled = b;
    std::swap(shuffled.doc_ids[0], shuffled.doc_ids[4]);
    std::swap(shuffled.values[0], shuffled.values[4]);
    const ComparisonReport same = paired_compare(a, shuffled);
    CHECK(same.categories[0].d_mean == doctest::Approx(report.categories[0].d_mean).epsilon(1e-12));
}

TEST_CASE("paired_compare: negating differences flips signs") {
    std::mt19937_64 rng(107);
    const ScoreTable a = random_table(rng, 10, 2, "p", 0.3);
    const ScoreTable b = random_table(rng, 10, 2, "p");
    const ComparisonReport ab = paired_compare(a, b);
    const ComparisonReport ba = paired_compare(b, a);
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(ab.categories[c].d_mean == doctest::Approx(-ba.categories[c].d_mean).epsilon(1e-12));
        CHECK(ab.categories[c].t_mean == doctest::Approx(-ba.categories[c].t_mean).epsilon(1e-12));
        CHECK(ab.categories[c].bf10_mean ==
              doctest::Approx(ba.categories[c].bf10_mean).epsilon(1e-9));
    }
}

TEST_CASE("paired_compare: unpaired ids and zero-variance differences") {
    std::mt19937_64 rng(109);
    const ScoreTable a = random_table(rng, 6, 2, "a");
    const ScoreTable b = random_table(rng, 6, 2, "b"); // different id prefix
    CHECK_THROWS_AS(paired_compare(a, b), ArgumentError);

    // constant nonzero difference: degenerate flag, not fatal
    const ScoreTable base =
        table_from_columns({"c"}, {{1.0}, {2.0}, {3.0}, {4.0}, {5.0}, {6.0}}, "p");
    ScoreTable shifted = base;
    for (auto& row : shifted.values) {
        for (double& v : row) v += 1.0;
    }
    const ComparisonReport report = paired_compare(shifted, base);
    for (const auto& cat : report.categories) {
        CHECK(!cat.defined);
        CHECK(cat.degenerate_iterations == 1);
    }
}
