#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "grievlex/text.hpp"

using namespace grievlex;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("grievlex_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    os << content;
}

} // namespace

TEST_CASE("tokenize: punctuation splits, internal marks survive") {
    CHECK(tokenize("AK-47, ammo!") == std::vector<std::string>{"ak-47", "ammo"});
    CHECK(tokenize("It's over.") == std::vector<std::string>{"it's", "over"});
    CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("tokenize: edge placements of hyphen and apostrophe") {
    CHECK(tokenize("-x") == std::vector<std::string>{"x"});
    CHECK(tokenize("x-") == std::vector<std::string>{"x"});
    CHECK(tokenize("a--b") == std::vector<std::string>{"a", "b"});
    CHECK(tokenize("'quoted'") == std::vector<std::string>{"quoted"});
    CHECK(tokenize("rock-n-roll") == std::vector<std::string>{"rock-n-roll"});
    CHECK(tokenize("3:30pm, 100%") == std::vector<std::string>{"3", "30pm", "100"});
}

TEST_CASE("tokenize: curly marks fold to ascii") {
    CHECK(tokenize("it\xE2\x80\x99s") == std::vector<std::string>{"it's"});
    // em dash separates
    CHECK(tokenize("one\xE2\x80\x94two") == std::vector<std::string>{"one", "two"});
}

TEST_CASE("tokenize: concatenation is count-additive") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> pieces = {
        "Hello, world!", "ak-47 and it's 99 bottles", "", "  spaces   everywhere ",
        "don\xE2\x80\x99t stop-me now"};
    for (int trial = 0; trial < 50; ++trial) {
        const std::string a = pieces[rng() % pieces.size()];
        const std::string b = pieces[rng() % pieces.size()];
        const auto joined = tokenize(a + " " + b);
        CHECK(joined.size() == tokenize(a).size() + tokenize(b).size());
        CHECK(tokenize(a + " " + b) == joined); // deterministic
    }
}

TEST_CASE("chunk: size and remainder rules") {
    Document doc;
    doc.id = "m1";
    doc.label = "manifesto";
    for (int i = 0; i < 437; ++i) doc.tokens.push_back("w" + std::to_string(i));

    const auto chunks = chunk(doc, 100);
    REQUIRE(chunks.size() == 4);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        CHECK(chunks[i].tokens.size() == 100);
        CHECK(chunks[i].id == "m1#" + std::to_string(i));
        CHECK(chunks[i].label == "manifesto");
    }
    CHECK(chunks[1].tokens.front() == "w100");

    Document small;
    small.id = "s";
    for (int i = 0; i < 99; ++i) small.tokens.push_back("x");
    CHECK(chunk(small, 100).empty());

    CHECK_THROWS_AS(chunk(doc, 0), ArgumentError);
}

TEST_CASE("chunk: default size is 100 and totals obey the floor rule") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Document doc;
        doc.id = "d";
        const std::size_t n = rng() % 1000;
        for (std::size_t i = 0; i < n; ++i) doc.tokens.push_back("t");
        const auto chunks = chunk(doc);
        std::size_t total = 0;
        for (const auto& c : chunks) total += c.tokens.size();
        CHECK(total == 100 * (n / 100));
    }
}

TEST_CASE("chunk: raw text re-tokenizes to the chunk tokens") {
    Document doc = make_document("d", "The gun, the knife and the AK-47; it's a long list of words!");
    REQUIRE(doc.tokens.size() >= 4);
    const auto chunks = chunk(doc, 4);
    for (const auto& c : chunks) CHECK(tokenize(c.raw) == c.tokens);
}

TEST_CASE("corpus: jsonl round trip") {
    const auto dir = make_temp_dir("jsonl");
    write_file(dir / "c.jsonl",
               "{\"id\": \"a\", \"text\": \"Hello world\", \"label\": \"ctrl\"}\n"
               "{\"id\": \"b\", \"text\": \"Second doc\"}\n");
    const Corpus corpus = load_corpus_jsonl((dir / "c.jsonl").string());
    REQUIRE(corpus.docs.size() == 2);
    CHECK(corpus.docs[0].id == "a");
    CHECK(corpus.docs[0].label == "ctrl");
    CHECK(corpus.docs[0].tokens == std::vector<std::string>{"hello", "world"});
    CHECK(corpus.docs[1].label.empty());

    std::ostringstream out;
    write_corpus_jsonl(out, corpus);
    write_file(dir / "rt.jsonl", out.str());
    const Corpus again = load_corpus_jsonl((dir / "rt.jsonl").string());
    REQUIRE(again.docs.size() == 2);
    CHECK(again.docs[0].tokens == corpus.docs[0].tokens);
    CHECK(again.docs[0].label == corpus.docs[0].label);
}

TEST_CASE("corpus: jsonl error paths") {
    const auto dir = make_temp_dir("jsonl_err");
    write_file(dir / "missing_text.jsonl", "{\"id\": \"a\"}\n");
    CHECK_THROWS_AS(load_corpus_jsonl((dir / "missing_text.jsonl").string()), ParseError);

    write_file(dir / "dup.jsonl",
               "{\"id\": \"a\", \"text\": \"x\"}\n{\"id\": \"a\", \"text\": \"y\"}\n");
    CHECK_THROWS_AS(load_corpus_jsonl((dir / "dup.jsonl").string()), ValidationError);

    write_file(dir / "bad.jsonl", "{\"id\": \"a\", \"text\": \"x\"}\nnot json\n");
    try {
        load_corpus_jsonl((dir / "bad.jsonl").string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("corpus: txt directory uses filename stems as ids") {
    const auto dir = make_temp_dir("txtdir");
    write_file(dir / "beta.txt", "two words");
    write_file(dir / "alpha.txt", "one");
    write_file(dir / "gamma.txt", "three tokens here");
    write_file(dir / "ignored.csv", "nope");
    const Corpus corpus = load_corpus_txt_dir(dir.string());
    REQUIRE(corpus.docs.size() == 3);
    CHECK(corpus.docs[0].id == "alpha");
    CHECK(corpus.docs[1].id == "beta");
    CHECK(corpus.docs[2].id == "gamma");
    CHECK(corpus.docs[2].tokens.size() == 3);
}
