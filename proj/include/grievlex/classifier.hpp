#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "grievlex/csv.hpp"
#include "grievlex/error.hpp"
#include "grievlex/parallel.hpp"
#include "grievlex/rng.hpp"
#include "grievlex/scorer.hpp"
#include "grievlex/stats.hpp"

namespace grievlex {

// Feature matrix with binary labels; label 1 is the designated positive
// class (the target group: manifesto / abuse / ...).
struct FeatureTable {
    std::vector<std::string> features;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::string> doc_ids; // optional; empty when synthetic
};

inline FeatureTable make_feature_table(const ScoreTable& positive, const ScoreTable& negative) {
    if (positive.columns != negative.columns) {
        throw ArgumentError("positive and negative tables have different columns");
    }
    FeatureTable t;
    t.features = positive.columns;
    for (std::size_t i = 0; i < positive.values.size(); ++i) {
        t.rows.push_back(positive.values[i]);
        t.labels.push_back(1);
        t.doc_ids.push_back(positive.doc_ids[i]);
    }
    for (std::size_t i = 0; i < negative.values.size(); ++i) {
        t.rows.push_back(negative.values[i]);
        t.labels.push_back(0);
        t.doc_ids.push_back(negative.doc_ids[i]);
    }
    return t;
}

// Column union of two score tables over the same documents (matched and
// ordered by the first table's ids).
inline ScoreTable join_score_columns(const ScoreTable& a, const ScoreTable& b) {
    if (a.doc_ids.size() != b.doc_ids.size()) {
        throw ArgumentError("tables differ in document count");
    }
    for (const auto& col : b.columns) {
        if (std::find(a.columns.begin(), a.columns.end(), col) != a.columns.end()) {
            throw ArgumentError("duplicate column '" + col + "' across joined tables");
        }
    }
    std::map<std::string, std::size_t> b_rows;
    for (std::size_t i = 0; i < b.doc_ids.size(); ++i) {
        if (!b_rows.emplace(b.doc_ids[i], i).second) {
            throw ArgumentError("duplicate doc id '" + b.doc_ids[i] + "'");
        }
    }
    ScoreTable out;
    out.columns = a.columns;
    out.columns.insert(out.columns.end(), b.columns.begin(), b.columns.end());
    for (std::size_t i = 0; i < a.doc_ids.size(); ++i) {
        const auto it = b_rows.find(a.doc_ids[i]);
        if (it == b_rows.end()) {
            throw ArgumentError("doc id '" + a.doc_ids[i] + "' missing from second table");
        }
        out.doc_ids.push_back(a.doc_ids[i]);
        out.token_counts.push_back(a.token_counts[i]);
        std::vector<double> row = a.values[i];
        const auto& brow = b.values[it->second];
        row.insert(row.end(), brow.begin(), brow.end());
        out.values.push_back(std::move(row));
    }
    return out;
}

// Gaussian Naive Bayes over continuous dictionary scores. Class 1 is the
// positive class; ties in the posterior break toward it.
struct GnbModel {
    std::vector<std::string> features;
    std::array<double, 2> log_prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> variance; // floored, always > 0
    double variance_floor = 0.0;
};

inline GnbModel gnb_fit(const FeatureTable& table) {
    const std::size_t k = table.features.size();
    std::array<std::vector<const std::vector<double>*>, 2> by_class;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const int label = table.labels[i];
        if (label != 0 && label != 1) throw TrainingError("labels must be 0/1");
        if (table.rows[i].size() != k) throw TrainingError("ragged feature rows");
        by_class[static_cast<std::size_t>(label)].push_back(&table.rows[i]);
    }
    if (by_class[0].size() < 2 || by_class[1].size() < 2) {
        throw TrainingError("each class needs at least 2 training rows");
    }

    // Floor: 1e-9 x the largest total (both-class) feature variance.
    double max_total_var = 0.0;
    std::vector<double> col(table.rows.size());
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t i = 0; i < table.rows.size(); ++i) col[i] = table.rows[i][f];
        max_total_var = std::max(max_total_var, sample_variance(col));
    }
    double floor = 1e-9 * max_total_var;
    if (floor <= 0.0) floor = 1e-300;

    GnbModel model;
    model.features = table.features;
    model.variance_floor = floor;
    const double total = static_cast<double>(table.rows.size());
    for (int cls = 0; cls < 2; ++cls) {
        const auto& rows = by_class[static_cast<std::size_t>(cls)];
        model.log_prior[static_cast<std::size_t>(cls)] =
            std::log(static_cast<double>(rows.size()) / total);
        auto& means = model.mean[static_cast<std::size_t>(cls)];
        auto& vars = model.variance[static_cast<std::size_t>(cls)];
        means.assign(k, 0.0);
        vars.assign(k, 0.0);
        std::vector<double> values(rows.size());
        for (std::size_t f = 0; f < k; ++f) {
            for (std::size_t i = 0; i < rows.size(); ++i) values[i] = (*rows[i])[f];
            means[f] = mean_of(values);
            vars[f] = sample_variance(values) + floor;
        }
    }
    return model;
}

struct Prediction {
    int cls = 0;
    std::array<double, 2> log_posterior{}; // unnormalized
};

inline Prediction gnb_predict(const GnbModel& model, std::span<const double> row) {
    if (row.size() != model.features.size()) {
        throw ArgumentError("row has " + std::to_string(row.size()) + " features, model has " +
                            std::to_string(model.features.size()));
    }
    Prediction pred;
    for (int cls = 0; cls < 2; ++cls) {
        const auto c = static_cast<std::size_t>(cls);
        double lp = model.log_prior[c];
        for (std::size_t f = 0; f < row.size(); ++f) {
            const double var = model.variance[c][f];
            const double diff = row[f] - model.mean[c][f];
            lp += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
        }
        pred.log_posterior[c] = lp;
    }
    pred.cls = pred.log_posterior[1] >= pred.log_posterior[0] ? 1 : 0;
    return pred;
}

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::uint64_t total() const { return tp + fp + tn + fn; }
};

// Footnote-style metrics with explicit undefined markers: a zero
// denominator yields nullopt, never NaN.
struct Metrics {
    ConfusionCounts counts;

    static std::optional<double> ratio(std::uint64_t num, std::uint64_t denom) {
        if (denom == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(denom);
    }
    std::optional<double> accuracy() const {
        return ratio(counts.tp + counts.tn, counts.total());
    }
    std::optional<double> specificity() const { return ratio(counts.tn, counts.tn + counts.fp); }
    std::optional<double> precision() const { return ratio(counts.tp, counts.tp + counts.fp); }
    std::optional<double> recall() const { return ratio(counts.tp, counts.tp + counts.fn); }
};

inline Metrics evaluate(const GnbModel& model, const FeatureTable& test) {
    if (test.rows.empty()) throw ArgumentError("test table is empty");
    Metrics m;
    for (std::size_t i = 0; i < test.rows.size(); ++i) {
        const int predicted = gnb_predict(model, test.rows[i]).cls;
        const int actual = test.labels[i];
        if (actual == 1) {
            if (predicted == 1) ++m.counts.tp;
            else ++m.counts.fn;
        } else {
            if (predicted == 1) ++m.counts.fp;
            else ++m.counts.tn;
        }
    }
    return m;
}

struct MetricMean {
    std::optional<double> mean;      // over iterations where the metric was defined
    std::size_t undefined_count = 0;
};

struct BootstrapClassifyResult {
    MetricMean accuracy, specificity, precision, recall;
    std::size_t iterations = 0;
    std::size_t retries = 0;
    std::uint64_t seed = 0;
    double split = 0.8;
};

namespace classifier_detail {

// Stratified train/test split; returns false when either side of either
// class would be empty.
inline bool stratified_split(std::mt19937_64& rng, const FeatureTable& pool, double split,
                             FeatureTable& train, FeatureTable& test) {
    train.features = pool.features;
    test.features = pool.features;
    train.rows.clear();
    train.labels.clear();
    test.rows.clear();
    test.labels.clear();
    for (int cls = 1; cls >= 0; --cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < pool.rows.size(); ++i) {
            if (pool.labels[i] == cls) idx.push_back(i);
        }
        shuffle_inplace(rng, idx);
        const std::size_t n_train = static_cast<std::size_t>(
            std::floor(split * static_cast<double>(idx.size())));
        if (n_train == 0 || n_train == idx.size()) return false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            auto& dst = i < n_train ? train : test;
            dst.rows.push_back(pool.rows[idx[i]]);
            dst.labels.push_back(cls);
        }
    }
    return true;
}

} // namespace classifier_detail

// Down-sampling bootstrap classification: per iteration, subsample the
// control rows to the target size without replacement, pool (target =
// positive), stratified-split train/test, fit, evaluate. An iteration
// whose split leaves a class too small for training retries with the next
// per-iteration substream (counted). Metric means exclude undefined
// iterations and report how many were excluded.
inline BootstrapClassifyResult bootstrap_classify(const std::vector<std::string>& features,
                                                  const std::vector<std::vector<double>>& target_rows,
                                                  const std::vector<std::vector<double>>& control_rows,
                                                  std::size_t iterations, std::uint64_t seed,
                                                  double split = 0.8, unsigned threads = 1) {
    if (target_rows.size() > control_rows.size()) {
        throw ArgumentError("control group must be at least as large as target");
    }
    if (!(split > 0.0 && split < 1.0)) throw ArgumentError("split must be in (0,1)");
    if (iterations < 1) throw ArgumentError("iterations must be >= 1");

    struct IterationOutcome {
        Metrics metrics;
        std::size_t retries = 0;
    };
    std::vector<IterationOutcome> outcomes(iterations);

    parallel_for(iterations, threads, [&](std::size_t it) {
        constexpr std::size_t kMaxAttempts = 64;
        const std::uint64_t iter_seed = substream_seed(seed, it);
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt >= kMaxAttempts) {
                throw TrainingError("bootstrap iteration could not produce a usable split");
            }
            auto rng = substream(iter_seed, attempt);
            const auto idx =
                sample_without_replacement(rng, control_rows.size(), target_rows.size());

            FeatureTable pool;
            pool.features = features;
            for (const auto& row : target_rows) {
                pool.rows.push_back(row);
                pool.labels.push_back(1);
            }
            for (const std::size_t i : idx) {
                pool.rows.push_back(control_rows[i]);
                pool.labels.push_back(0);
            }

            FeatureTable train, test;
            if (!classifier_detail::stratified_split(rng, pool, split, train, test)) {
                ++outcomes[it].retries;
                continue;
            }
            bool retry = false;
            try {
                const GnbModel model = gnb_fit(train);
                outcomes[it].metrics = evaluate(model, test);
            } catch (const TrainingError&) {
                retry = true;
            }
            if (retry) {
                ++outcomes[it].retries;
                continue;
            }
            break;
        }
    });

    BootstrapClassifyResult result;
    result.iterations = iterations;
    result.seed = seed;
    result.split = split;

    const auto summarize = [&](auto metric_fn) {
        MetricMean mm;
        double sum = 0.0;
        std::size_t defined = 0;
        for (const auto& o : outcomes) {
            const std::optional<double> v = metric_fn(o.metrics);
            if (v) {
                sum += *v;
                ++defined;
            } else {
                ++mm.undefined_count;
            }
        }
        if (defined > 0) mm.mean = sum / static_cast<double>(defined);
        return mm;
    };
    result.accuracy = summarize([](const Metrics& m) { return m.accuracy(); });
    result.specificity = summarize([](const Metrics& m) { return m.specificity(); });
    result.precision = summarize([](const Metrics& m) { return m.precision(); });
    result.recall = summarize([](const Metrics& m) { return m.recall(); });
    for (const auto& o : outcomes) result.retries += o.retries;
    return result;
}

// Task-4 style transfer: fit on the whole train table, evaluate on the
// whole test table. Feature columns must be identical, order included.
inline Metrics cross_sample_classify(const FeatureTable& train, const FeatureTable& test) {
    if (train.features != test.features) {
        throw ArgumentError("train and test feature columns differ");
    }
    return evaluate(gnb_fit(train), test);
}

struct FeatureImportance {
    std::string feature;
    double auc = 0.5;        // AUC of the raw feature value as a score
    double importance = 0.5; // max(auc, 1 - auc)
};

// Per-feature ROC AUC by the Mann-Whitney rank formula with midrank tie
// handling; importance is direction-free. Ranked descending, ties broken
// by feature name.
inline std::vector<FeatureImportance> roc_importance(const FeatureTable& table) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const int label : table.labels) {
        if (label == 1) ++n_pos;
        else ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0) throw ArgumentError("roc_importance needs both classes");

    std::vector<FeatureImportance> out;
    out.reserve(table.features.size());
    const std::size_t n = table.rows.size();
    std::vector<std::size_t> order(n);
    std::vector<double> values(n);
    std::vector<double> ranks(n);
    for (std::size_t f = 0; f < table.features.size(); ++f) {
        for (std::size_t i = 0; i < n; ++i) values[i] = table.rows[i][f];
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        // Midranks: tied values share the mean of their 1-based rank range.
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
            const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
            i = j + 1;
        }
        double rank_sum_pos = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (table.labels[r] == 1) rank_sum_pos += ranks[r];
        }
        const double np = static_cast<double>(n_pos);
        const double nn = static_cast<double>(n_neg);
        const double auc = (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
        out.push_back(FeatureImportance{table.features[f], auc, std::max(auc, 1.0 - auc)});
    }
    std::sort(out.begin(), out.end(), [](const FeatureImportance& a, const FeatureImportance& b) {
        if (a.importance != b.importance) return a.importance > b.importance;
        return a.feature < b.feature;
    });
    return out;
}

// --- CSV output ------------------------------------------------------------

inline std::string metric_cell(const std::optional<double>& v) {
    return v ? format_fixed(*v, 6) : "NA";
}

inline void write_metrics_csv_header(std::ostream& os,
                                     const std::vector<std::string>& config_comments) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    write_csv_row(os, {"task", "feature_set", "accuracy", "specificity", "precision", "recall",
                       "iterations", "seed"});
}

inline void write_metrics_row(std::ostream& os, const std::string& task,
                              const std::string& feature_set, const Metrics& m,
                              std::size_t iterations, std::uint64_t seed) {
    write_csv_row(os, {task, feature_set, metric_cell(m.accuracy()), metric_cell(m.specificity()),
                       metric_cell(m.precision()), metric_cell(m.recall()),
                       std::to_string(iterations), std::to_string(seed)});
}

inline void write_metrics_row(std::ostream& os, const std::string& task,
                              const std::string& feature_set,
                              const BootstrapClassifyResult& r) {
    write_csv_row(os, {task, feature_set, metric_cell(r.accuracy.mean),
                       metric_cell(r.specificity.mean), metric_cell(r.precision.mean),
                       metric_cell(r.recall.mean), std::to_string(r.iterations),
                       std::to_string(r.seed)});
}

inline void write_importance_csv(std::ostream& os, const std::vector<FeatureImportance>& ranked,
                                 const std::vector<std::string>& config_comments = {}) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    write_csv_row(os, {"feature", "auc", "importance", "rank"});
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        write_csv_row(os, {ranked[i].feature, format_fixed(ranked[i].auc, 6),
                           format_fixed(ranked[i].importance, 6), std::to_string(i + 1)});
    }
}

} // namespace grievlex
