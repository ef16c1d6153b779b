// End-to-end tests of the grievlex binary (path injected by the build).
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "grievlex/lexicon.hpp"
#include "grievlex/scorer.hpp"

using namespace grievlex;
namespace fs = std::filesystem;

namespace {

const fs::path kWorkRoot = fs::temp_directory_path() / "grievlex_test_cli";

struct RunResult {
    int exit_code;
    std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const fs::path log = kWorkRoot / "run.log";
    const std::string cmd =
        std::string(GRIEVLEX_BIN_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream is(log);
    std::ostringstream buf;
    buf << is.rdbuf();
    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return RunResult{exit_code, buf.str()};
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    os << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

fs::path fixture_dir() {
    const fs::path dir = kWorkRoot / "fixtures";
    fs::create_directories(dir);
    return dir;
}

fs::path toy_lexicon() {
    const fs::path path = fixture_dir() / "toy_lexicon.tsv";
    write_file(path,
               "key\tcategory\tmean_rating\tn_ratings\n"
               "gun\tweaponry\t8.500000\t12\n"
               "knife\tweaponry\t7.200000\t9\n"
               "kill\tmurder\t9.100000\t11\n"
               "last resort\tsuicide\t6.800000\t7\n");
    return path;
}

fs::path toy_corpus() {
    const fs::path path = fixture_dir() / "toy_corpus.jsonl";
    write_file(path,
               "{\"id\": \"a\", \"text\": \"The gun and the knife.\"}\n"
               "{\"id\": \"b\", \"text\": \"Nothing to see here at all.\"}\n"
               "{\"id\": \"c\", \"text\": \"He kills; killing is his last resort now.\"}\n");
    return path;
}

// Score tables large enough for bootstrap work, written via the library.
void write_group_tables(const fs::path& target_path, const fs::path& control_path,
                        double shift) {
    ScoreTable target, control;
    target.columns = control.columns = {"weaponry", "murder"};
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 12; ++i) {
        target.doc_ids.push_back("t" + std::to_string(i));
        target.token_counts.push_back(100);
        target.values.push_back({gauss(rng) + shift, gauss(rng) + shift / 2.0});
    }
    for (int i = 0; i < 40; ++i) {
        control.doc_ids.push_back("c" + std::to_string(i));
        control.token_counts.push_back(100);
        control.values.push_back({gauss(rng), gauss(rng)});
    }
    {
        std::ofstream os(target_path);
        write_score_table(os, target);
    }
    {
        std::ofstream os(control_path);
        write_score_table(os, control);
    }
}

} // namespace

TEST_CASE("cli: score writes one row per document") {
    const fs::path out = kWorkRoot / "score_out";
    fs::remove_all(out);
    const auto r = run_cli("--out " + out.string() + " score --corpus " +
                           toy_corpus().string() + " --lexicon " + toy_lexicon().string() +
                           " --counts");
    CHECK(r.exit_code == 0);
    const ScoreTable table = read_score_table((out / "scores.csv").string());
    REQUIRE(table.doc_ids.size() == 3);
    CHECK(table.columns == std::vector<std::string>{"murder", "suicide", "weaponry"});
    // doc a: 5 tokens, weaponry 2/5
    CHECK(table.values[0][2] == doctest::Approx(0.4).epsilon(1e-9));
    // doc c: kills+killing -> murder 2/8; "last resort" phrase -> suicide 1/8
    CHECK(table.values[2][0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(table.values[2][1] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(fs::exists(out / "scores_counts.csv"));
    // config embedded as comments
    const std::string raw = read_file(out / "scores.csv");
    CHECK(raw.rfind("# grievlex", 0) == 0);
}

TEST_CASE("cli: score error paths") {
    const fs::path out = kWorkRoot / "score_err";
    const auto missing = run_cli("--out " + out.string() + " score --corpus " +
                                 toy_corpus().string() + " --lexicon /nonexistent.tsv");
    CHECK(missing.exit_code != 0);

    // weighted scoring against a thresholded lexicon warns but succeeds
    const fs::path thresholded = fixture_dir() / "thresholded.tsv";
    save_lexicon(filter_by_threshold(load_lexicon(toy_lexicon().string()), 7.0),
                 thresholded.string());
    const auto warned = run_cli("--out " + out.string() + " score --corpus " +
                                toy_corpus().string() + " --lexicon " + thresholded.string() +
                                " --mode weighted");
    CHECK(warned.exit_code == 0);
    CHECK(warned.output.find("warning") != std::string::npos);
}

TEST_CASE("cli: env var supplies the default lexicon") {
    const fs::path out = kWorkRoot / "score_env";
    // without the option and without the env var the command cannot run
    const auto bare = run_cli("--out " + out.string() + " score --corpus " +
                              toy_corpus().string());
    CHECK(bare.exit_code != 0);

    const std::string cmd = "GRIEVLEX_LEXICON=" + toy_lexicon().string() + " " +
                            std::string(GRIEVLEX_BIN_PATH) + " --out " + out.string() +
                            " score --corpus " + toy_corpus().string() + " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(out / "scores.csv"));
}

TEST_CASE("cli: chunk splits documents and suffixes ids") {
    const fs::path big = fixture_dir() / "big.jsonl";
    std::string text;
    for (int i = 0; i < 437; ++i) text += "word ";
    write_file(big, "{\"id\": \"m\", \"text\": \"" + text + "\"}\n");

    const fs::path out = kWorkRoot / "chunk_out";
    const auto r = run_cli("--out " + out.string() + " --chunk-size 100 chunk --corpus " +
                           big.string());
    CHECK(r.exit_code == 0);
    const Corpus chunked = load_corpus_jsonl((out / "chunked.jsonl").string());
    REQUIRE(chunked.docs.size() == 4);
    CHECK(chunked.docs[0].id == "m#0");
    CHECK(chunked.docs[3].id == "m#3");
    CHECK(chunked.docs[0].tokens.size() == 100);

    const auto bad = run_cli("--out " + out.string() + " --chunk-size 0 chunk --corpus " +
                             big.string());
    CHECK(bad.exit_code != 0);
}

TEST_CASE("cli: alpha emits a per-category report") {
    const fs::path out = kWorkRoot / "alpha_out";
    const auto r = run_cli("--out " + out.string() + " alpha --corpus " +
                           toy_corpus().string() + " --lexicon " + toy_lexicon().string());
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(out / "alpha.csv");
    CHECK(csv.find("category,toy_corpus,mean_alpha,items_dropped_total") != std::string::npos);
    CHECK(csv.find("murder") != std::string::npos);
    CHECK(csv.find("weaponry") != std::string::npos);

    const auto none = run_cli("--out " + out.string() + " alpha --lexicon " +
                              toy_lexicon().string());
    CHECK(none.exit_code != 0);
}

TEST_CASE("cli: compare is byte-deterministic across runs and thread counts") {
    const fs::path target = fixture_dir() / "target.csv";
    const fs::path control = fixture_dir() / "control.csv";
    write_group_tables(target, control, 1.0);

    const fs::path out1 = kWorkRoot / "cmp1";
    const fs::path out2 = kWorkRoot / "cmp2";
    const fs::path out3 = kWorkRoot / "cmp3";
    const std::string base = " compare --target " + target.string() + " --control " +
                             control.string();
    CHECK(run_cli("--seed 42 --iterations 30 --out " + out1.string() + base).exit_code == 0);
    CHECK(run_cli("--seed 42 --iterations 30 --out " + out2.string() + base).exit_code == 0);
    CHECK(run_cli("--seed 42 --iterations 30 --threads 2 --out " + out3.string() + base)
              .exit_code == 0);

    const std::string csv1 = read_file(out1 / "comparison.csv");
    CHECK(csv1 == read_file(out2 / "comparison.csv"));
    CHECK(csv1 == read_file(out3 / "comparison.csv"));
    CHECK(csv1.find("category,d_mean,d_lo,d_hi,t_mean,bf10_mean,ln_bf10_mean,iterations,seed") !=
          std::string::npos);

    // a different seed must change the bytes
    const fs::path out4 = kWorkRoot / "cmp4";
    CHECK(run_cli("--seed 43 --iterations 30 --out " + out4.string() + base).exit_code == 0);
    CHECK(csv1 != read_file(out4 / "comparison.csv"));
}

TEST_CASE("cli: paired compare demands matching ids") {
    const fs::path a = fixture_dir() / "paired_a.csv";
    const fs::path b = fixture_dir() / "paired_b.csv";
    ScoreTable ta, tb;
    ta.columns = tb.columns = {"x"};
    for (int i = 0; i < 6; ++i) {
        ta.doc_ids.push_back("p" + std::to_string(i));
        tb.doc_ids.push_back("q" + std::to_string(i)); // mismatched ids
        ta.token_counts.push_back(10);
        tb.token_counts.push_back(10);
        ta.values.push_back({0.1 * i});
        tb.values.push_back({0.2 * i});
    }
    {
        std::ofstream os(a);
        write_score_table(os, ta);
    }
    {
        std::ofstream os(b);
        write_score_table(os, tb);
    }
    const fs::path out = kWorkRoot / "paired_out";
    const auto r = run_cli("--out " + out.string() + " compare --paired --target " +
                           a.string() + " --control " + b.string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("cli: classify writes metrics and a full importance ranking") {
    const fs::path target = fixture_dir() / "cls_target.csv";
    const fs::path control = fixture_dir() / "cls_control.csv";
    write_group_tables(target, control, 6.0); // separable

    const fs::path out = kWorkRoot / "cls_out";
    const auto r = run_cli("--seed 42 --iterations 20 --out " + out.string() +
                           " classify --target " + target.string() + " --control " +
                           control.string());
    CHECK(r.exit_code == 0);

    const std::string metrics = read_file(out / "metrics.csv");
    CHECK(metrics.find("task,feature_set,accuracy,specificity,precision,recall,iterations,seed") !=
          std::string::npos);
    CHECK(metrics.find("bootstrap,grievance,") != std::string::npos);

    const std::string importance = read_file(out / "importance.csv");
    // header + one row per feature
    std::size_t rows = 0;
    for (const char ch : importance) {
        if (ch == '\n') ++rows;
    }
    CHECK(rows >= 3); // comments + header + 2 features
    CHECK(importance.find("feature,auc,importance,rank") != std::string::npos);
    CHECK(importance.find("weaponry") != std::string::npos);
    CHECK(importance.find("murder") != std::string::npos);

    // determinism across thread counts
    const fs::path out2 = kWorkRoot / "cls_out2";
    CHECK(run_cli("--seed 42 --iterations 20 --threads 2 --out " + out2.string() +
                  " classify --target " + target.string() + " --control " + control.string())
              .exit_code == 0);
    CHECK(read_file(out / "metrics.csv") == read_file(out2 / "metrics.csv"));
    CHECK(read_file(out / "importance.csv") == read_file(out2 / "importance.csv"));
}

TEST_CASE("cli: cross-test classification checks columns") {
    const fs::path target = fixture_dir() / "ct_target.csv";
    const fs::path control = fixture_dir() / "ct_control.csv";
    write_group_tables(target, control, 2.0);

    // mismatched columns in the test tables
    const fs::path bad = fixture_dir() / "ct_bad.csv";
    write_file(bad,
               "doc_id,token_count,other\n"
               "x,10,0.5\n"
               "y,10,0.6\n"
               "z,10,0.55\n");
    const fs::path out = kWorkRoot / "ct_out";
    const auto r = run_cli("--out " + out.string() + " classify --target " + target.string() +
                           " --control " + control.string() + " --cross-test --test-target " +
                           bad.string() + " --test-control " + bad.string());
    CHECK(r.exit_code != 0);

    // well-formed cross test: train tables double as test tables
    const auto ok = run_cli("--out " + out.string() + " classify --target " + target.string() +
                            " --control " + control.string() + " --cross-test --test-target " +
                            target.string() + " --test-control " + control.string());
    CHECK(ok.exit_code == 0);
    CHECK(read_file(out / "metrics.csv").find("cross_sample,grievance,") != std::string::npos);
}

TEST_CASE("cli: classify with external and combined feature sets") {
    const fs::path target = fixture_dir() / "fx_target.csv";
    const fs::path control = fixture_dir() / "fx_control.csv";
    write_group_tables(target, control, 3.0);

    // external tables share doc ids but carry their own columns
    const auto rewrite_columns = [&](const fs::path& src, const fs::path& dst) {
        ScoreTable t = read_score_table(src.string());
        t.columns = {"ext1", "ext2"};
        for (auto& row : t.values) {
            row[0] = row[0] * 0.5 + 1.0;
            row[1] = row[1] * -0.25;
        }
        std::ofstream os(dst);
        write_score_table(os, t);
    };
    const fs::path target_ext = fixture_dir() / "fx_target_ext.csv";
    const fs::path control_ext = fixture_dir() / "fx_control_ext.csv";
    rewrite_columns(target, target_ext);
    rewrite_columns(control, control_ext);

    const fs::path out = kWorkRoot / "fx_out";
    const std::string common = " --target " + target.string() + " --control " +
                               control.string() + " --target-external " + target_ext.string() +
                               " --control-external " + control_ext.string();

    CHECK(run_cli("--seed 1 --iterations 10 --out " + out.string() +
                  " classify --features external" + common)
              .exit_code == 0);
    CHECK(read_file(out / "importance.csv").find("ext1") != std::string::npos);

    CHECK(run_cli("--seed 1 --iterations 10 --out " + out.string() +
                  " classify --features both" + common)
              .exit_code == 0);
    const std::string importance = read_file(out / "importance.csv");
    CHECK(importance.find("weaponry") != std::string::npos);
    CHECK(importance.find("ext2") != std::string::npos);

    // both without external tables is an error
    CHECK(run_cli("--out " + out.string() + " classify --features both --target " +
                  target.string() + " --control " + control.string())
              .exit_code != 0);
}

TEST_CASE("cli: correlate produces the pair table") {
    const fs::path a = fixture_dir() / "corr_a.csv";
    const fs::path b = fixture_dir() / "corr_b.csv";
    write_group_tables(a, b, 0.0);
    // correlate needs shared ids: reuse the target table against itself
    const fs::path out = kWorkRoot / "corr_out";
    const auto r = run_cli("--out " + out.string() + " correlate --scores-a " + a.string() +
                           " --scores-b " + a.string());
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(out / "correlations.csv");
    CHECK(csv.find("cat_a,cat_b,r,ci_low,ci_high,p,significant") != std::string::npos);
    // self-correlation of the first column is exactly 1
    CHECK(csv.find("weaponry,weaponry,1.000000,1.000000,1.000000") != std::string::npos);
}

TEST_CASE("cli: build emits three lexicons and a report") {
    const fs::path dir = fixture_dir();
    write_file(dir / "b_seeds.tsv",
               "category\tword\nweaponry\tknife\nmurder\tkill\n");
    write_file(dir / "b_syn.tsv", "word\trelated\nknife\tdagger\nkill\tslay\n");
    write_file(dir / "b_vec.txt",
               "knife 1.0 0.1\ndagger 0.9 0.12\nkill 0.0 1.0\nslay -0.05 0.99\n");
    write_file(dir / "b_ratings.csv",
               "participant_id,word,category,rating,unknown,attention_pass\n"
               "p1,knife,weaponry,9,false,true\n"
               "p2,dagger,weaponry,6,false,true\n"
               "p3,kill,murder,8,false,true\n"
               "p4,slay,murder,7,false,true\n");

    const fs::path out = kWorkRoot / "build_out";
    const auto r = run_cli("--out " + out.string() + " build --seeds " +
                           (dir / "b_seeds.tsv").string() + " --synonyms " +
                           (dir / "b_syn.tsv").string() + " --embeddings " +
                           (dir / "b_vec.txt").string() + " --ratings " +
                           (dir / "b_ratings.csv").string() + " --neighbors 1");
    CHECK(r.exit_code == 0);
    const Lexicon weighted = load_lexicon((out / "weighted.tsv").string());
    CHECK(weighted.entries.size() == 4);
    const Lexicon t7 = load_lexicon((out / "threshold-7.tsv").string());
    CHECK(t7.entries.size() == 3); // dagger rated 6 falls out
    CHECK(t7.threshold == 7.0);
    const Lexicon t5 = load_lexicon((out / "threshold-5.tsv").string());
    CHECK(t5.entries.size() == 4);
    CHECK(read_file(out / "build_report.json").find("\"final_entries\": 4") !=
          std::string::npos);

    // a non-default --threshold adds a fourth, custom version
    const fs::path out_custom = kWorkRoot / "build_custom";
    CHECK(run_cli("--threshold 8.5 --out " + out_custom.string() + " build --seeds " +
                  (dir / "b_seeds.tsv").string() + " --synonyms " +
                  (dir / "b_syn.tsv").string() + " --embeddings " +
                  (dir / "b_vec.txt").string() + " --ratings " +
                  (dir / "b_ratings.csv").string() + " --neighbors 1")
              .exit_code == 0);
    const Lexicon custom = load_lexicon((out_custom / "threshold-8.5.tsv").string());
    CHECK(custom.entries.size() == 1); // only knife at 9
    CHECK(custom.threshold == 8.5);

    const auto missing = run_cli("--out " + out.string() + " build --seeds " +
                                 (dir / "b_seeds.tsv").string() + " --synonyms " +
                                 (dir / "b_syn.tsv").string() + " --embeddings " +
                                 (dir / "b_vec.txt").string() + " --ratings /nope.csv");
    CHECK(missing.exit_code != 0);
}

TEST_CASE("cli: info prints version and lexicon summary") {
    const auto r = run_cli("info --lexicon " + toy_lexicon().string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("grievlex") != std::string::npos);
    CHECK(r.output.find("entries: 4") != std::string::npos);
    CHECK(r.output.find("weaponry: 2") != std::string::npos);
}
