#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "grievlex/csv.hpp"
#include "grievlex/error.hpp"
#include "grievlex/version.hpp"

namespace grievlex {

// One rated wordlist entry. The key is a lowercase stem or a multi-token
// phrase of stems separated by single spaces; stemming happens at build
// time so storage and matching share one key space.
struct LexiconEntry {
    std::string key;
    std::string category;
    double mean_rating = 0.0; // in [0, 10], carried at 6-decimal precision
    int n_ratings = 1;

    friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

struct Lexicon {
    std::vector<LexiconEntry> entries;    // canonical order: (category, key)
    std::vector<std::string> categories;  // sorted; superset of entry categories
    std::string version_tag;
    std::optional<double> threshold;

    friend bool operator==(const Lexicon&, const Lexicon&) = default;
};

// The 22 canonical Grievance Dictionary categories.
inline const std::array<std::string_view, 22>& grievance_categories() {
    static const std::array<std::string_view, 22> names = {
        "planning",  "violence",     "weaponry",   "help",       "hate",
        "frustration", "suicide",    "threat",     "grievance",  "fixation",
        "desperation", "deadline",   "murder",     "relationship", "loneliness",
        "surveillance", "soldier",   "honour",     "impostor",   "jealousy",
        "god",       "paranoia"};
    return names;
}

inline bool is_canonical_grievance(const Lexicon& lex) {
    if (lex.categories.size() != 22) return false;
    std::set<std::string_view> have(lex.categories.begin(), lex.categories.end());
    for (const auto& name : grievance_categories()) {
        if (!have.count(name)) return false;
    }
    return true;
}

inline bool valid_lexicon_key(const std::string& key) {
    if (key.empty()) return false;
    if (key.front() == ' ' || key.back() == ' ') return false;
    if (key.front() == '#') return false; // would collide with comment lines
    bool prev_space = false;
    for (char c : key) {
        if (c >= 'A' && c <= 'Z') return false;
        if (c == '\t' || c == '\n' || c == '\r') return false;
        if (c == ' ') {
            if (prev_space) return false; // double space
            prev_space = true;
        } else {
            prev_space = false;
        }
    }
    return true;
}

inline double quantize_rating(double rating) {
    return std::round(rating * 1e6) / 1e6;
}

namespace lexicon_detail {

inline bool entry_less(const LexiconEntry& a, const LexiconEntry& b) {
    if (a.category != b.category) return a.category < b.category;
    return a.key < b.key;
}

} // namespace lexicon_detail

// Validates, sorts into canonical (category, key) order, and derives the
// category list when none is supplied. Duplicate (key, category) pairs
// are rejected.
inline Lexicon make_lexicon(std::vector<LexiconEntry> entries,
                            std::string version_tag = {},
                            std::optional<double> threshold = std::nullopt,
                            std::vector<std::string> categories = {}) {
    for (auto& e : entries) {
        if (!valid_lexicon_key(e.key)) {
            throw ValidationError("invalid lexicon key '" + e.key + "'");
        }
        e.mean_rating = quantize_rating(e.mean_rating);
        if (e.mean_rating < 0.0 || e.mean_rating > 10.0) {
            throw ArgumentError("mean_rating out of [0,10] for key '" + e.key + "'");
        }
        if (e.n_ratings < 1) {
            throw ArgumentError("n_ratings must be >= 1 for key '" + e.key + "'");
        }
        if (threshold && e.mean_rating < *threshold) {
            throw ValidationError("entry '" + e.key + "' rated below the lexicon threshold");
        }
    }
    std::sort(entries.begin(), entries.end(), lexicon_detail::entry_less);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].key == entries[i - 1].key &&
            entries[i].category == entries[i - 1].category) {
            throw ValidationError("duplicate (key, category): ('" + entries[i].key +
                                  "', '" + entries[i].category + "')");
        }
    }

    std::set<std::string> cats(categories.begin(), categories.end());
    if (!categories.empty()) {
        for (const auto& e : entries) {
            if (!cats.count(e.category)) {
                throw ValidationError("entry category '" + e.category +
                                      "' missing from category list");
            }
        }
    } else {
        for (const auto& e : entries) cats.insert(e.category);
    }

    Lexicon lex;
    lex.entries = std::move(entries);
    lex.categories.assign(cats.begin(), cats.end());
    lex.version_tag = std::move(version_tag);
    lex.threshold = threshold;
    return lex;
}

// Keeps exactly the entries with mean_rating >= theta (inclusive, per the
// rating-7-or-higher rule). The category list is preserved unless the
// caller asks for pruning of now-empty categories.
inline Lexicon filter_by_threshold(const Lexicon& lex, double theta, bool prune_empty = false) {
    if (!(theta >= 0.0 && theta <= 10.0)) {
        throw ArgumentError("threshold must be in [0,10]");
    }
    std::vector<LexiconEntry> kept;
    kept.reserve(lex.entries.size());
    for (const auto& e : lex.entries) {
        if (e.mean_rating >= theta) kept.push_back(e);
    }
    std::vector<std::string> categories;
    if (prune_empty) {
        std::set<std::string> used;
        for (const auto& e : kept) used.insert(e.category);
        categories.assign(used.begin(), used.end());
    } else {
        categories = lex.categories;
    }
    return make_lexicon(std::move(kept), "threshold-" + format_short(theta), theta,
                        std::move(categories));
}

inline void save_lexicon(const Lexicon& lex, const std::string& path,
                         const std::vector<std::string>& extra_comments = {}) {
    auto os = open_output(path);
    os << "# grievlex " << kVersion << " lexicon\n";
    for (const auto& c : extra_comments) os << "# " << c << '\n';
    os << "# version_tag=" << lex.version_tag << '\n';
    if (lex.threshold) os << "# threshold=" << format_general(*lex.threshold) << '\n';
    os << "# categories=";
    for (std::size_t i = 0; i < lex.categories.size(); ++i) {
        if (i) os << ',';
        os << lex.categories[i];
    }
    os << '\n';
    os << "key\tcategory\tmean_rating\tn_ratings\n";
    for (const auto& e : lex.entries) {
        os << e.key << '\t' << e.category << '\t' << format_fixed(e.mean_rating, 6) << '\t'
           << e.n_ratings << '\n';
    }
    if (!os) throw IoError("write failed: " + path);
}

inline Lexicon load_lexicon(const std::string& path) {
    auto is = open_input(path);
    std::string line;
    long line_no = 0;

    std::string version_tag;
    bool version_tag_seen = false;
    std::optional<double> threshold;
    std::vector<std::string> categories;

    bool header_seen = false;
    std::vector<LexiconEntry> entries;

    const auto split_tabs = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t tab = s.find('\t', start);
            if (tab == std::string::npos) {
                fields.push_back(s.substr(start));
                break;
            }
            fields.push_back(s.substr(start, tab - start));
            start = tab + 1;
        }
        return fields;
    };

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string_view body = std::string_view(line).substr(1);
            const auto eat = [&](std::string_view prefix) -> std::optional<std::string> {
                std::string_view b = body;
                while (!b.empty() && b.front() == ' ') b.remove_prefix(1);
                if (b.substr(0, prefix.size()) != prefix) return std::nullopt;
                return std::string(b.substr(prefix.size()));
            };
            if (auto v = eat("version_tag=")) {
                version_tag = *v;
                version_tag_seen = true;
            } else if (auto t = eat("threshold=")) {
                threshold = parse_double(*t, path, line_no, "threshold");
            } else if (auto c = eat("categories=")) {
                categories.clear();
                std::size_t start = 0;
                const std::string& s = *c;
                while (start <= s.size()) {
                    const std::size_t comma = s.find(',', start);
                    const std::string item = s.substr(
                        start, comma == std::string::npos ? std::string::npos : comma - start);
                    if (!item.empty()) categories.push_back(item);
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != "key\tcategory\tmean_rating\tn_ratings") {
                throw ParseError(
                    "expected header 'key\\tcategory\\tmean_rating\\tn_ratings'", path,
                    line_no);
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 4) {
            throw ParseError("expected 4 tab-separated columns, got " +
                                 std::to_string(fields.size()),
                             path, line_no);
        }
        LexiconEntry e;
        e.key = fields[0];
        e.category = fields[1];
        if (!valid_lexicon_key(e.key)) {
            throw ParseError("invalid key '" + e.key + "'", path, line_no);
        }
        if (e.category.empty()) throw ParseError("empty category", path, line_no);
        e.mean_rating = parse_double(fields[2], path, line_no, "mean_rating");
        if (e.mean_rating < 0.0 || e.mean_rating > 10.0) {
            throw ParseError("mean_rating " + fields[2] + " outside [0,10]", path, line_no);
        }
        const long long n = parse_integer(fields[3], path, line_no, "n_ratings");
        if (n < 1 || n > INT32_MAX) {
            throw ParseError("n_ratings must be a positive integer", path, line_no);
        }
        e.n_ratings = static_cast<int>(n);
        entries.push_back(std::move(e));
    }
    if (!header_seen) throw ParseError("missing header row", path, 0);

    if (!version_tag_seen) {
        version_tag = std::filesystem::path(path).stem().string();
    }
    return make_lexicon(std::move(entries), std::move(version_tag), threshold,
                        std::move(categories));
}

} // namespace grievlex
