// grievlex — lexicon-based text scoring, psychometrics, group comparison,
// and dictionary rebuilding from the command line. All randomized commands
// are seeded; reruns with the same inputs and flags are byte-identical.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grievlex/builder.hpp"
#include "grievlex/classifier.hpp"
#include "grievlex/inferstats.hpp"
#include "grievlex/lexicon.hpp"
#include "grievlex/psychometrics.hpp"
#include "grievlex/run_config.hpp"
#include "grievlex/scorer.hpp"
#include "grievlex/text.hpp"
#include "grievlex/version.hpp"

namespace fs = std::filesystem;
using namespace grievlex;

namespace {

struct CliState {
    RunConfig config;
    int exit_code = 0;
};

fs::path out_path(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    return fs::path(config.out_dir) / name;
}

void run_score(const RunConfig& config, const std::string& corpus_path,
               const std::string& lexicon_path, const std::string& mode_name,
               bool write_counts) {
    const Lexicon lex = load_lexicon(lexicon_path);
    const Corpus corpus = load_corpus(corpus_path);
    const ScoreMode mode =
        mode_name == "weighted" ? ScoreMode::weighted : ScoreMode::proportional;
    if (mode == ScoreMode::weighted && lex.threshold) {
        std::cerr << "warning: weighted scoring against a thresholded lexicon ("
                  << lex.version_tag << "); weights are compressed above the threshold\n";
    }
    const CorpusScores scores = score_corpus(corpus, lex, mode, config.threads);

    const auto comments = config_comments(config, "score", "mode=" + mode_name);
    {
        auto os = open_output(out_path(config, "scores.csv").string());
        write_score_table(os, scores.scores, comments);
    }
    if (write_counts) {
        auto os = open_output(out_path(config, "scores_counts.csv").string());
        write_count_table(os, scores, comments);
    }
    std::cout << "scored " << corpus.docs.size() << " documents x " << lex.categories.size()
              << " categories (" << mode_name << ")\n";
}

void run_chunk(const RunConfig& config, const std::string& corpus_path) {
    const Corpus corpus = load_corpus(corpus_path);
    const Corpus chunked = chunk_corpus(corpus, config.chunk_size);
    auto os = open_output(out_path(config, "chunked.jsonl").string());
    for (const auto& line : config_comments(config, "chunk")) os << "# " << line << '\n';
    write_corpus_jsonl(os, chunked);
    std::cout << "chunked " << corpus.docs.size() << " documents into " << chunked.docs.size()
              << " chunks of " << config.chunk_size << " tokens\n";
}

void run_alpha(const RunConfig& config, const std::vector<std::string>& corpus_paths,
               const std::string& lexicon_path) {
    const Lexicon lex = load_lexicon(lexicon_path);
    std::vector<Corpus> corpora;
    corpora.reserve(corpus_paths.size());
    for (const auto& p : corpus_paths) corpora.push_back(load_corpus(p));
    const auto reports = alpha_suite(corpora, lex);
    auto os = open_output(out_path(config, "alpha.csv").string());
    write_alpha_csv(os, reports, config_comments(config, "alpha"));
    std::cout << "alpha for " << reports.size() << " categories over " << corpora.size()
              << " corpora\n";
}

void run_correlate(const RunConfig& config, const std::string& a_path,
                   const std::string& b_path) {
    const ScoreTable a = read_score_table(a_path);
    const ScoreTable b = read_score_table(b_path);
    const CorrelationReport report = cross_correlate(a, b);
    auto os = open_output(out_path(config, "correlations.csv").string());
    write_correlation_csv(
        os, report,
        config_comments(config, "correlate",
                        "bonferroni=" + format_general(report.bonferroni_threshold)));
    std::cout << report.pairs.size() << " correlation pairs, Bonferroni threshold "
              << format_fixed(report.bonferroni_threshold, 4) << "\n";
}

void run_compare(const RunConfig& config, const std::string& target_path,
                 const std::string& control_path, bool paired) {
    const ScoreTable target = read_score_table(target_path);
    const ScoreTable control = read_score_table(control_path);
    const ComparisonReport report =
        paired ? paired_compare(target, control, config.bf_scale)
               : bootstrap_compare(target, control, config.iterations, config.seed,
                                   config.bf_scale, config.threads);
    auto os = open_output(out_path(config, "comparison.csv").string());
    write_comparison_csv(os, report,
                         config_comments(config, "compare",
                                         paired ? "design=paired" : "design=bootstrap"));

    std::cout << "category            d [2.5%;97.5%]            BF10\n";
    for (const auto& cat : report.categories) {
        if (!cat.defined) {
            std::cout << cat.category << "  (degenerate)\n";
            continue;
        }
        std::cout << cat.category << "  " << format_fixed(cat.d_mean, 2) << " ["
                  << format_fixed(cat.d_lo, 2) << ";" << format_fixed(cat.d_hi, 2) << "]  "
                  << display_bf10(cat.bf10_mean) << "\n";
    }
}

struct ClassifyTables {
    ScoreTable target;
    ScoreTable control;
};

ClassifyTables resolve_feature_set(const std::string& features, const std::string& target_path,
                                   const std::string& control_path,
                                   const std::string& target_ext_path,
                                   const std::string& control_ext_path) {
    if (features == "grievance") {
        return {read_score_table(target_path), read_score_table(control_path)};
    }
    if (target_ext_path.empty() || control_ext_path.empty()) {
        throw ArgumentError("feature set '" + features +
                            "' needs --target-external and --control-external");
    }
    if (features == "external") {
        return {read_score_table(target_ext_path), read_score_table(control_ext_path)};
    }
    // both: column union of the grievance and external tables.
    return {join_score_columns(read_score_table(target_path), read_score_table(target_ext_path)),
            join_score_columns(read_score_table(control_path),
                               read_score_table(control_ext_path))};
}

void run_classify(const RunConfig& config, const std::string& features,
                  const std::string& target_path, const std::string& control_path,
                  const std::string& target_ext_path, const std::string& control_ext_path,
                  bool cross_test, const std::string& test_target_path,
                  const std::string& test_control_path) {
    const ClassifyTables train =
        resolve_feature_set(features, target_path, control_path, target_ext_path,
                            control_ext_path);
    const FeatureTable train_table = make_feature_table(train.target, train.control);
    const auto comments = config_comments(config, "classify", "features=" + features);

    auto metrics_os = open_output(out_path(config, "metrics.csv").string());
    write_metrics_csv_header(metrics_os, comments);
    if (cross_test) {
        if (test_target_path.empty() || test_control_path.empty()) {
            throw ArgumentError("--cross-test needs --test-target and --test-control");
        }
        const FeatureTable test_table = make_feature_table(
            read_score_table(test_target_path), read_score_table(test_control_path));
        const Metrics m = cross_sample_classify(train_table, test_table);
        write_metrics_row(metrics_os, "cross_sample", features, m, 1, config.seed);
        std::cout << "cross-sample accuracy: " << metric_cell(m.accuracy()) << "\n";
    } else {
        const BootstrapClassifyResult r = bootstrap_classify(
            train.target.columns, train.target.values, train.control.values,
            config.iterations, config.seed, config.split, config.threads);
        write_metrics_row(metrics_os, "bootstrap", features, r);
        std::cout << "bootstrap mean accuracy: " << metric_cell(r.accuracy.mean) << " over "
                  << r.iterations << " iterations (" << r.retries << " retries)\n";
    }

    const auto ranked = roc_importance(train_table);
    auto importance_os = open_output(out_path(config, "importance.csv").string());
    write_importance_csv(importance_os, ranked, comments);
}

void run_build(const RunConfig& config, const std::string& seeds_path,
               const std::string& synonyms_path, const std::string& embeddings_path,
               const std::string& ratings_path, std::size_t neighbors) {
    const auto seed_lists = load_seed_lists(seeds_path);
    const auto provider = load_synonym_provider(synonyms_path);
    const auto embeddings = load_embeddings(embeddings_path);
    const auto records = load_rating_records(ratings_path);

    const BuildOutput built = run_build(seed_lists, provider, embeddings, records, neighbors);
    const auto comments = config_comments(config, "build",
                                          "neighbors=" + std::to_string(neighbors));
    save_lexicon(built.weighted, out_path(config, "weighted.tsv").string(), comments);
    save_lexicon(filter_by_threshold(built.weighted, 7.0),
                 out_path(config, "threshold-7.tsv").string(), comments);
    save_lexicon(filter_by_threshold(built.weighted, 5.0),
                 out_path(config, "threshold-5.tsv").string(), comments);
    if (config.threshold != 7.0 && config.threshold != 5.0) {
        const Lexicon custom = filter_by_threshold(built.weighted, config.threshold);
        save_lexicon(custom, out_path(config, custom.version_tag + ".tsv").string(), comments);
    }

    nlohmann::json j = build_report_json(built.report);
    j["tool"] = "grievlex " + std::string(kVersion);
    j["neighbors"] = neighbors;
    j["config"] = {{"seed", config.seed},
                   {"iterations", config.iterations},
                   {"chunk_size", config.chunk_size},
                   {"threshold", config.threshold},
                   {"bf_scale", config.bf_scale},
                   {"split", config.split}};
    auto os = open_output(out_path(config, "build_report.json").string());
    os << j.dump(2) << '\n';

    std::cout << "built weighted lexicon: " << built.weighted.entries.size() << " entries over "
              << built.weighted.categories.size() << " categories\n";
}

void run_info(const std::string& lexicon_path) {
    std::cout << "grievlex " << kVersion << "\n";
    const RunConfig defaults;
    std::cout << "defaults: seed=" << defaults.seed << " iterations=" << defaults.iterations
              << " chunk-size=" << defaults.chunk_size
              << " threshold=" << format_short(defaults.threshold)
              << " bf-scale=" << format_general(defaults.bf_scale)
              << " split=" << format_short(defaults.split) << "\n";
    if (lexicon_path.empty()) return;
    const Lexicon lex = load_lexicon(lexicon_path);
    std::cout << "lexicon: " << lexicon_path << "\n";
    std::cout << "  version_tag: " << lex.version_tag << "\n";
    if (lex.threshold) std::cout << "  threshold: " << format_short(*lex.threshold) << "\n";
    std::cout << "  entries: " << lex.entries.size() << "\n";
    std::cout << "  categories: " << lex.categories.size()
              << (is_canonical_grievance(lex) ? " (canonical grievance set)" : "") << "\n";
    for (const auto& cat : lex.categories) {
        std::size_t count = 0;
        for (const auto& e : lex.entries) {
            if (e.category == cat) ++count;
        }
        std::cout << "    " << cat << ": " << count << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"grievance-dictionary text analysis engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunConfig config;
    app.add_option("--seed", config.seed, "RNG seed for randomized commands")
        ->capture_default_str();
    app.add_option("--iterations", config.iterations, "bootstrap iterations")
        ->capture_default_str();
    app.add_option("--threshold", config.threshold, "rating threshold")
        ->capture_default_str();
    app.add_option("--chunk-size", config.chunk_size, "tokens per chunk")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--bf-scale", config.bf_scale, "Cauchy prior scale for Bayes factors")
        ->capture_default_str();
    app.add_option("--split", config.split, "train fraction for classify")
        ->capture_default_str();
    app.add_option("--threads", config.threads, "worker threads")->capture_default_str();
    app.add_option("--out", config.out_dir, "output directory")->capture_default_str();

    // score
    auto* score = app.add_subcommand("score", "score a corpus against a lexicon");
    std::string score_corpus_path, score_lexicon_path, score_mode = "proportional";
    bool score_counts = false;
    score->add_option("--corpus", score_corpus_path, "corpus JSONL file or directory of .txt")
        ->required();
    score->add_option("--lexicon", score_lexicon_path, "lexicon TSV")
        ->envname("GRIEVLEX_LEXICON")
        ->required();
    score->add_option("--mode", score_mode, "proportional|weighted")
        ->check(CLI::IsMember({"proportional", "weighted"}));
    score->add_flag("--counts", score_counts, "also write scores_counts.csv");

    // chunk
    auto* chunk_cmd = app.add_subcommand("chunk", "split documents into fixed-size excerpts");
    std::string chunk_corpus_path;
    chunk_cmd->add_option("--corpus", chunk_corpus_path, "corpus JSONL file or directory")
        ->required();

    // alpha
    auto* alpha = app.add_subcommand("alpha", "internal consistency per category");
    std::vector<std::string> alpha_corpora;
    std::string alpha_lexicon_path;
    alpha->add_option("--corpus", alpha_corpora, "corpus path (repeatable)")
        ->required()
        ->take_all();
    alpha->add_option("--lexicon", alpha_lexicon_path, "lexicon TSV")
        ->envname("GRIEVLEX_LEXICON")
        ->required();

    // correlate
    auto* correlate = app.add_subcommand("correlate", "cross-dictionary Pearson correlations");
    std::string corr_a, corr_b;
    correlate->add_option("--scores-a", corr_a, "first score table CSV")->required();
    correlate->add_option("--scores-b", corr_b, "second score table CSV")->required();

    // compare
    auto* compare = app.add_subcommand("compare", "group comparison with effect sizes");
    std::string cmp_target, cmp_control;
    bool cmp_paired = false;
    compare->add_option("--target", cmp_target, "target score table CSV")->required();
    compare->add_option("--control", cmp_control, "control score table CSV")->required();
    compare->add_flag("--paired", cmp_paired, "dependent-samples design (rows paired by id)");

    // classify
    auto* classify = app.add_subcommand("classify", "Naive Bayes classification");
    std::string cls_target, cls_control, cls_target_ext, cls_control_ext;
    std::string cls_features = "grievance";
    std::string cls_test_target, cls_test_control;
    bool cls_cross = false;
    classify->add_option("--target", cls_target, "target score table CSV")->required();
    classify->add_option("--control", cls_control, "control score table CSV")->required();
    classify->add_option("--target-external", cls_target_ext, "external target features CSV");
    classify->add_option("--control-external", cls_control_ext, "external control features CSV");
    classify->add_option("--features", cls_features, "grievance|external|both")
        ->check(CLI::IsMember({"grievance", "external", "both"}));
    classify->add_flag("--cross-test", cls_cross, "train on full tables, test on held-out tables");
    classify->add_option("--test-target", cls_test_target, "cross-test target CSV");
    classify->add_option("--test-control", cls_test_control, "cross-test control CSV");

    // build
    auto* build = app.add_subcommand("build", "rebuild lexicon versions from raw inputs");
    std::string build_seeds, build_synonyms, build_embeddings, build_ratings;
    std::size_t build_neighbors = 10;
    build->add_option("--seeds", build_seeds, "seeds TSV")->required();
    build->add_option("--synonyms", build_synonyms, "synonym provider TSV")->required();
    build->add_option("--embeddings", build_embeddings, "embedding vectors file")->required();
    build->add_option("--ratings", build_ratings, "ratings CSV")->required();
    build->add_option("--neighbors", build_neighbors, "nearest neighbors per seed")
        ->capture_default_str();

    // info
    auto* info = app.add_subcommand("info", "show version, defaults, lexicon summary");
    std::string info_lexicon;
    info->add_option("--lexicon", info_lexicon, "lexicon TSV")->envname("GRIEVLEX_LEXICON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) {
            run_score(config, score_corpus_path, score_lexicon_path, score_mode, score_counts);
        } else if (chunk_cmd->parsed()) {
            run_chunk(config, chunk_corpus_path);
        } else if (alpha->parsed()) {
            run_alpha(config, alpha_corpora, alpha_lexicon_path);
        } else if (correlate->parsed()) {
            run_correlate(config, corr_a, corr_b);
        } else if (compare->parsed()) {
            run_compare(config, cmp_target, cmp_control, cmp_paired);
        } else if (classify->parsed()) {
            run_classify(config, cls_features, cls_target, cls_control, cls_target_ext,
                         cls_control_ext, cls_cross, cls_test_target, cls_test_control);
        } else if (build->parsed()) {
            run_build(config, build_seeds, build_synonyms, build_embeddings, build_ratings,
                      build_neighbors);
        } else if (info->parsed()) {
            run_info(info_lexicon);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
