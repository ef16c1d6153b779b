#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "grievlex/csv.hpp"
#include "grievlex/error.hpp"
#include "grievlex/scorer.hpp"
#include "grievlex/stats.hpp"

namespace grievlex {

struct AlphaResult {
    double alpha = 0.0;
    std::size_t items_used = 0;
    std::size_t items_dropped = 0;
};

// Cronbach's alpha over an items matrix (rows = observations, columns =
// items): alpha = k/(k-1) * (1 - sum_i var(item_i) / var(row totals)),
// sample variances (N-1). Constant columns (words that never occur, or
// occur identically everywhere) carry no covariance information and are
// dropped first; the drop count is reported. Undefined when fewer than
// two items survive or the row totals have no variance.
inline AlphaResult cronbach_alpha(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n < 2) throw UndefinedAlphaError("alpha needs at least 2 rows");
    const std::size_t total_items = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != total_items) throw ArgumentError("ragged item matrix");
    }

    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < total_items; ++c) {
        bool constant = true;
        for (std::size_t r = 1; r < n; ++r) {
            if (rows[r][c] != rows[0][c]) {
                constant = false;
                break;
            }
        }
        if (!constant) keep.push_back(c);
    }

    AlphaResult result;
    result.items_used = keep.size();
    result.items_dropped = total_items - keep.size();
    const std::size_t k = keep.size();
    if (k < 2) throw UndefinedAlphaError("fewer than 2 items with variance");

    std::vector<double> totals(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (const std::size_t c : keep) totals[r] += rows[r][c];
    }
    if (all_equal(totals)) throw UndefinedAlphaError("row totals have no variance");
    const double var_total = sample_variance(totals);

    double sum_item_var = 0.0;
    std::vector<double> col(n);
    for (const std::size_t c : keep) {
        for (std::size_t r = 0; r < n; ++r) col[r] = rows[r][c];
        sum_item_var += sample_variance(col);
    }

    result.alpha = (static_cast<double>(k) / static_cast<double>(k - 1)) *
                   (1.0 - sum_item_var / var_total);
    return result;
}

inline AlphaResult cronbach_alpha(const WordOccurrenceMatrix& matrix) {
    return cronbach_alpha(matrix.cells);
}

struct AlphaReport {
    std::string category;
    // One entry per corpus, in input order; nullopt where alpha is undefined.
    std::vector<std::pair<std::string, std::optional<AlphaResult>>> per_corpus;
    double mean_alpha = 0.0;      // unweighted mean over the defined corpora
    std::size_t defined_corpora = 0;
};

// Per category: alpha in each corpus, then the unweighted mean across
// corpora. Corpora where alpha is undefined are excluded from the mean
// and flagged by their nullopt cell.
inline std::vector<AlphaReport> alpha_suite(const std::vector<Corpus>& corpora,
                                            const Lexicon& lex) {
    if (corpora.empty()) throw ArgumentError("alpha_suite needs at least one corpus");
    const LexiconMatcher matcher(lex);

    // Sparse per-document entry counts per corpus, computed once.
    struct DocCounts {
        std::size_t token_count;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> entries; // (entry, count)
    };
    std::vector<std::vector<DocCounts>> counts(corpora.size());
    for (std::size_t ci = 0; ci < corpora.size(); ++ci) {
        counts[ci].reserve(corpora[ci].docs.size());
        for (const Document& doc : corpora[ci].docs) {
            const auto m = matcher.match(doc.tokens);
            DocCounts dc;
            dc.token_count = doc.tokens.size();
            for (std::uint32_t e = 0; e < m.entry_counts.size(); ++e) {
                if (m.entry_counts[e] > 0) dc.entries.emplace_back(e, m.entry_counts[e]);
            }
            counts[ci].push_back(std::move(dc));
        }
    }

    std::vector<AlphaReport> reports;
    reports.reserve(lex.categories.size());
    for (std::size_t cat = 0; cat < lex.categories.size(); ++cat) {
        // Entry index range of this category in canonical order.
        std::size_t cat_begin = lex.entries.size();
        std::size_t cat_end = lex.entries.size();
        for (std::size_t e = 0; e < lex.entries.size(); ++e) {
            if (lex.entries[e].category == lex.categories[cat]) {
                if (cat_begin == lex.entries.size()) cat_begin = e;
                cat_end = e + 1;
            }
        }
        const std::size_t width = cat_end - cat_begin;

        AlphaReport report;
        report.category = lex.categories[cat];
        double sum_alpha = 0.0;
        for (std::size_t ci = 0; ci < corpora.size(); ++ci) {
            std::vector<std::vector<double>> rows;
            rows.reserve(counts[ci].size());
            for (const auto& dc : counts[ci]) {
                std::vector<double> row(width, 0.0);
                if (dc.token_count > 0) {
                    const double denom = static_cast<double>(dc.token_count);
                    for (const auto& [e, count] : dc.entries) {
                        if (e >= cat_begin && e < cat_end) {
                            row[e - cat_begin] = static_cast<double>(count) / denom;
                        }
                    }
                }
                rows.push_back(std::move(row));
            }
            std::optional<AlphaResult> cell;
            if (width >= 2 && rows.size() >= 2) {
                try {
                    cell = cronbach_alpha(rows);
                } catch (const UndefinedAlphaError&) {
                    cell = std::nullopt;
                }
            }
            if (cell) {
                sum_alpha += cell->alpha;
                ++report.defined_corpora;
            }
            report.per_corpus.emplace_back(corpora[ci].name, cell);
        }
        if (report.defined_corpora > 0) {
            report.mean_alpha = sum_alpha / static_cast<double>(report.defined_corpora);
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

inline void write_alpha_csv(std::ostream& os, const std::vector<AlphaReport>& reports,
                            const std::vector<std::string>& config_comments = {}) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    std::vector<std::string> header{"category"};
    if (!reports.empty()) {
        for (const auto& [name, cell] : reports[0].per_corpus) header.push_back(name);
    }
    header.push_back("mean_alpha");
    header.push_back("items_dropped_total");
    write_csv_row(os, header);
    for (const auto& r : reports) {
        std::vector<std::string> row{r.category};
        std::size_t dropped = 0;
        for (const auto& [name, cell] : r.per_corpus) {
            if (cell) {
                row.push_back(format_fixed(cell->alpha, 6));
                dropped += cell->items_dropped;
            } else {
                row.push_back("NA");
            }
        }
        row.push_back(r.defined_corpora > 0 ? format_fixed(r.mean_alpha, 6) : "NA");
        row.push_back(std::to_string(dropped));
        write_csv_row(os, row);
    }
}

struct PairCorrelation {
    std::string category_a;
    std::string category_b;
    bool defined = true;
    double r = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double p = 1.0;
};

struct CorrelationReport {
    std::vector<PairCorrelation> pairs; // |cols_a| x |cols_b|, a-major order
    double bonferroni_threshold = 0.05;
};

// Pearson correlations of every (column_a, column_b) pair over documents
// shared by id. 95% CI via the Fisher z transform (clamped to a point at
// |r| = 1), two-sided p from the t transform; the Bonferroni threshold is
// 0.05 divided by the number of a-columns (the paper's 0.05/22).
inline CorrelationReport cross_correlate(const ScoreTable& a, const ScoreTable& b) {
    const std::size_t n = a.doc_ids.size();
    if (n != b.doc_ids.size()) throw ArgumentError("score tables differ in size");
    if (n < 4) throw ArgumentError("cross_correlate needs at least 4 shared documents");

    std::map<std::string, std::size_t> b_rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (!b_rows.emplace(b.doc_ids[i], i).second) {
            throw ArgumentError("duplicate doc id '" + b.doc_ids[i] + "'");
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

    CorrelationReport report;
    report.bonferroni_threshold = 0.05 / static_cast<double>(a.columns.size());
    const double nf = static_cast<double>(n);

    std::vector<double> xa(n), xb(n);
    for (std::size_t ca = 0; ca < a.columns.size(); ++ca) {
        for (std::size_t i = 0; i < n; ++i) xa[i] = a.values[i][ca];
        for (std::size_t cb = 0; cb < b.columns.size(); ++cb) {
            for (std::size_t i = 0; i < n; ++i) xb[i] = b.values[align[i]][cb];
            PairCorrelation pair;
            pair.category_a = a.columns[ca];
            pair.category_b = b.columns[cb];
            double r = 0.0;
            if (!pearson_r(xa, xb, r)) {
                pair.defined = false;
            } else {
                pair.r = r;
                if (std::fabs(r) >= 1.0) {
                    pair.ci_lo = r;
                    pair.ci_hi = r;
                    pair.p = 0.0;
                } else {
                    const double z = std::atanh(r);
                    const double se = 1.0 / std::sqrt(nf - 3.0);
                    pair.ci_lo = std::tanh(z - 1.96 * se);
                    pair.ci_hi = std::tanh(z + 1.96 * se);
                    const double t = r * std::sqrt((nf - 2.0) / (1.0 - r * r));
                    pair.p = t_two_sided_p(t, nf - 2.0);
                }
            }
            report.pairs.push_back(std::move(pair));
        }
    }
    return report;
}

inline void write_correlation_csv(std::ostream& os, const CorrelationReport& report,
                                  const std::vector<std::string>& config_comments = {}) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    write_csv_row(os, {"cat_a", "cat_b", "r", "ci_low", "ci_high", "p", "significant"});
    for (const auto& pair : report.pairs) {
        std::vector<std::string> row{pair.category_a, pair.category_b};
        if (pair.defined) {
            row.push_back(format_fixed(pair.r, 6));
            row.push_back(format_fixed(pair.ci_lo, 6));
            row.push_back(format_fixed(pair.ci_hi, 6));
            row.push_back(format_sci(pair.p, 6));
            row.push_back(pair.p < report.bonferroni_threshold ? "true" : "false");
        } else {
            row.insert(row.end(), {"NA", "NA", "NA", "NA", "NA"});
        }
        write_csv_row(os, row);
    }
}

} // namespace grievlex
