#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "grievlex/error.hpp"

namespace grievlex {

struct Document {
    std::string id;
    std::string raw;
    std::vector<std::string> tokens;
    std::string label; // empty = unlabeled
};

struct Corpus {
    std::string name;
    std::vector<Document> docs;
};

namespace text_detail {

enum class CharClass { word, apostrophe, hyphen, separator };

struct Cp {
    CharClass cls;
    std::string bytes; // normalized UTF-8 (ASCII lowercased, curly marks folded)
};

inline CharClass classify(std::uint32_t cp) {
    if (cp < 128) {
        if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9'))
            return CharClass::word;
        if (cp == '\'') return CharClass::apostrophe;
        if (cp == '-') return CharClass::hyphen;
        return CharClass::separator;
    }
    if (cp == 0x2019) return CharClass::apostrophe; // right single quote
    if (cp == 0x2010 || cp == 0x2011) return CharClass::hyphen;
    if (cp >= 0x00A1 && cp <= 0x00BF) return CharClass::separator;
    if (cp >= 0x2000 && cp <= 0x206F) return CharClass::separator; // general punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return CharClass::separator;
    return CharClass::word; // accented letters, CJK, ...
}

// Decodes one UTF-8 codepoint at s[i]; invalid bytes count as separators.
inline std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else { ++i; return 0xFFFD; }
    if (i + len > s.size()) { ++i; return 0xFFFD; }
    for (std::size_t k = 1; k < len; ++k) {
        const unsigned char bk = byte(i + k);
        if ((bk & 0xC0) != 0x80) { ++i; return 0xFFFD; }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

} // namespace text_detail

// Lowercase word tokens. Splits on whitespace and punctuation, except that
// hyphens and apostrophes between two word characters stay inside the token
// ("ak-47", "it's"); digits are word characters. Curly apostrophes/hyphens
// are folded to their ASCII forms so tokens meet dictionary keys in one
// alphabet. Total: any input, including invalid UTF-8, yields a token list.
inline std::vector<std::string> tokenize(std::string_view raw) {
    using namespace text_detail;
    std::vector<Cp> cps;
    cps.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        const std::size_t start = i;
        const std::uint32_t cp = decode_utf8(raw, i);
        const CharClass cls = classify(cp);
        Cp out;
        out.cls = cls;
        if (cls == CharClass::separator) {
            // bytes irrelevant
        } else if (cls == CharClass::apostrophe) {
            out.bytes = "'";
        } else if (cls == CharClass::hyphen) {
            out.bytes = "-";
        } else if (cp < 128) {
            char c = static_cast<char>(cp);
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            out.bytes.assign(1, c);
        } else {
            out.bytes.assign(raw.substr(start, i - start));
        }
        cps.push_back(std::move(out));
    }

    std::vector<std::string> tokens;
    std::string current;
    const auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (std::size_t k = 0; k < cps.size(); ++k) {
        const Cp& c = cps[k];
        switch (c.cls) {
            case CharClass::word:
                current += c.bytes;
                break;
            case CharClass::apostrophe:
            case CharClass::hyphen: {
                const bool internal = !current.empty() && k + 1 < cps.size() &&
                                      cps[k + 1].cls == CharClass::word;
                if (internal) current += c.bytes;
                else flush();
                break;
            }
            case CharClass::separator:
                flush();
                break;
        }
    }
    flush();
    return tokens;
}

inline Document make_document(std::string id, std::string raw, std::string label = {}) {
    Document d;
    d.id = std::move(id);
    d.raw = std::move(raw);
    d.label = std::move(label);
    d.tokens = tokenize(d.raw);
    return d;
}

// Consecutive non-overlapping windows of exactly `size` tokens; a trailing
// remainder shorter than `size` is dropped. Chunk ids are "{id}#{index}".
inline std::vector<Document> chunk(const Document& doc, std::size_t size = 100) {
    if (size < 1) throw ArgumentError("chunk size must be >= 1");
    std::vector<Document> out;
    const std::size_t n = doc.tokens.size() / size;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Document c;
        c.id = doc.id + "#" + std::to_string(i);
        c.label = doc.label;
        c.tokens.assign(doc.tokens.begin() + static_cast<std::ptrdiff_t>(i * size),
                        doc.tokens.begin() + static_cast<std::ptrdiff_t>((i + 1) * size));
        std::string raw;
        for (std::size_t t = 0; t < c.tokens.size(); ++t) {
            if (t) raw += ' ';
            raw += c.tokens[t];
        }
        c.raw = std::move(raw);
        out.push_back(std::move(c));
    }
    return out;
}

inline Corpus chunk_corpus(const Corpus& corpus, std::size_t size = 100) {
    Corpus out;
    out.name = corpus.name;
    for (const Document& d : corpus.docs) {
        auto chunks = chunk(d, size);
        for (auto& c : chunks) out.docs.push_back(std::move(c));
    }
    return out;
}

namespace text_detail {

inline void check_unique_ids(const Corpus& corpus) {
    std::set<std::string_view> seen;
    for (const Document& d : corpus.docs) {
        if (!seen.insert(d.id).second) {
            throw ValidationError("duplicate document id '" + d.id + "' in corpus " +
                                  corpus.name);
        }
    }
}

} // namespace text_detail

// JSONL corpus: one {"id": ..., "text": ..., "label": ...} object per
// line; label optional; '#' comment lines and blank lines are skipped.
inline Corpus load_corpus_jsonl(const std::string& path) {
    auto is = std::ifstream(path, std::ios::binary);
    if (!is) throw IoError("cannot open corpus: " + path);
    Corpus corpus;
    corpus.name = std::filesystem::path(path).stem().string();
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), path, line_no);
        }
        if (!row.is_object() || !row.contains("id") || !row["id"].is_string()) {
            throw ParseError("row needs a string \"id\" field", path, line_no);
        }
        if (!row.contains("text") || !row["text"].is_string()) {
            throw ParseError("row needs a string \"text\" field", path, line_no);
        }
        std::string label;
        if (row.contains("label")) {
            if (!row["label"].is_string()) {
                throw ParseError("\"label\" must be a string", path, line_no);
            }
            label = row["label"].get<std::string>();
        }
        corpus.docs.push_back(make_document(row["id"].get<std::string>(),
                                            row["text"].get<std::string>(), label));
    }
    text_detail::check_unique_ids(corpus);
    return corpus;
}

// Directory of *.txt files; the filename stem is the document id; files
// load in lexicographic name order.
inline Corpus load_corpus_txt_dir(const std::string& path) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(path)) throw IoError("not a directory: " + path);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    Corpus corpus;
    corpus.name = fs::path(path).filename().string();
    for (const auto& f : files) {
        std::ifstream is(f, std::ios::binary);
        if (!is) throw IoError("cannot open: " + f.string());
        std::ostringstream buf;
        buf << is.rdbuf();
        corpus.docs.push_back(make_document(f.stem().string(), buf.str()));
    }
    text_detail::check_unique_ids(corpus);
    return corpus;
}

inline Corpus load_corpus(const std::string& path) {
    if (std::filesystem::is_directory(path)) return load_corpus_txt_dir(path);
    return load_corpus_jsonl(path);
}

inline void write_corpus_jsonl(std::ostream& os, const Corpus& corpus) {
    for (const Document& d : corpus.docs) {
        nlohmann::json row;
        row["id"] = d.id;
        row["text"] = d.raw;
        if (!d.label.empty()) row["label"] = d.label;
        os << row.dump() << '\n';
    }
}

} // namespace grievlex
