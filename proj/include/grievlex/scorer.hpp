#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grievlex/csv.hpp"
#include "grievlex/error.hpp"
#include "grievlex/lexicon.hpp"
#include "grievlex/matcher.hpp"
#include "grievlex/parallel.hpp"
#include "grievlex/text.hpp"

namespace grievlex {

enum class ScoreMode { proportional, weighted };

inline const char* to_string(ScoreMode mode) {
    return mode == ScoreMode::proportional ? "proportional" : "weighted";
}

// Per-document category scores. Proportional: matches / tokens, in
// [0, 1] per match. Weighted: mean entry rating over the document's
// matches in the category, in [0, 10], 0 when nothing matched.
struct ScoreProfile {
    std::string doc_id;
    ScoreMode mode = ScoreMode::proportional;
    std::vector<double> per_category;          // lexicon category order
    std::vector<std::uint32_t> match_counts;   // same order
    std::size_t token_count = 0;
};

namespace scorer_detail {

inline ScoreProfile profile_from_matches(const Document& doc, const Lexicon& lex,
                                         const LexiconMatcher& matcher,
                                         const LexiconMatcher::DocMatches& m,
                                         ScoreMode mode) {
    ScoreProfile p;
    p.doc_id = doc.id;
    p.mode = mode;
    p.token_count = doc.tokens.size();
    p.match_counts = m.category_counts;
    p.per_category.assign(lex.categories.size(), 0.0);

    if (mode == ScoreMode::proportional) {
        if (p.token_count > 0) {
            for (std::size_t c = 0; c < p.per_category.size(); ++c) {
                p.per_category[c] =
                    static_cast<double>(m.category_counts[c]) / static_cast<double>(p.token_count);
            }
        }
    } else {
        std::vector<double> rating_sum(lex.categories.size(), 0.0);
        for (std::size_t e = 0; e < m.entry_counts.size(); ++e) {
            if (m.entry_counts[e] == 0) continue;
            rating_sum[matcher.entry_category(e)] +=
                static_cast<double>(m.entry_counts[e]) * matcher.entry_rating(e);
        }
        for (std::size_t c = 0; c < p.per_category.size(); ++c) {
            if (m.category_counts[c] > 0) {
                p.per_category[c] = rating_sum[c] / static_cast<double>(m.category_counts[c]);
            }
        }
    }
    return p;
}

} // namespace scorer_detail

inline ScoreProfile score_document(const Document& doc, const Lexicon& lex,
                                   const LexiconMatcher& matcher, ScoreMode mode) {
    const auto m = matcher.match(doc.tokens);
    return scorer_detail::profile_from_matches(doc, lex, matcher, m, mode);
}

// Convenience single-document forms; corpus work should reuse one matcher.
inline ScoreProfile score_proportional(const Document& doc, const Lexicon& lex) {
    return score_document(doc, lex, LexiconMatcher(lex), ScoreMode::proportional);
}

inline ScoreProfile score_weighted(const Document& doc, const Lexicon& lex) {
    return score_document(doc, lex, LexiconMatcher(lex), ScoreMode::weighted);
}

// Tabular scores: one row per document, columns in a fixed order.
// Also the interchange type for externally supplied score tables.
struct ScoreTable {
    std::vector<std::string> columns;
    std::vector<std::string> doc_ids;
    std::vector<std::size_t> token_counts;
    std::vector<std::vector<double>> values; // rows x columns
};

struct CorpusScores {
    ScoreTable scores;
    std::vector<std::vector<std::uint32_t>> match_counts; // rows x categories
    ScoreMode mode = ScoreMode::proportional;
};

// Scores every document; output order equals corpus order regardless of
// thread count.
inline CorpusScores score_corpus(const Corpus& corpus, const Lexicon& lex, ScoreMode mode,
                                 unsigned threads = 1) {
    const LexiconMatcher matcher(lex);
    CorpusScores out;
    out.mode = mode;
    out.scores.columns = lex.categories;
    const std::size_t n = corpus.docs.size();
    out.scores.doc_ids.resize(n);
    out.scores.token_counts.resize(n);
    out.scores.values.resize(n);
    out.match_counts.resize(n);

    parallel_for(n, threads, [&](std::size_t i) {
        const ScoreProfile p = score_document(corpus.docs[i], lex, matcher, mode);
        out.scores.doc_ids[i] = p.doc_id;
        out.scores.token_counts[i] = p.token_count;
        out.scores.values[i] = p.per_category;
        out.match_counts[i].assign(p.match_counts.begin(), p.match_counts.end());
    });
    return out;
}

// Documents x keys-of-one-category matrix of proportional occurrences,
// the item matrix for internal-consistency work. Column order is the
// lexicon's canonical key order within the category.
struct WordOccurrenceMatrix {
    std::string category;
    std::vector<std::string> keys;     // columns
    std::vector<std::string> doc_ids;  // rows
    std::vector<std::vector<double>> cells;
};

inline WordOccurrenceMatrix word_occurrence_matrix(const Corpus& corpus, const Lexicon& lex,
                                                   const std::string& category,
                                                   const LexiconMatcher* shared_matcher = nullptr) {
    std::size_t cat_begin = lex.entries.size();
    std::size_t cat_end = lex.entries.size();
    bool known = false;
    for (const auto& c : lex.categories) {
        if (c == category) known = true;
    }
    if (!known) throw ArgumentError("unknown category '" + category + "'");
    for (std::size_t e = 0; e < lex.entries.size(); ++e) {
        if (lex.entries[e].category == category) {
            if (cat_begin == lex.entries.size()) cat_begin = e;
            cat_end = e + 1;
        }
    }

    std::optional<LexiconMatcher> local;
    if (!shared_matcher) local.emplace(lex);
    const LexiconMatcher& matcher = shared_matcher ? *shared_matcher : *local;

    WordOccurrenceMatrix m;
    m.category = category;
    for (std::size_t e = cat_begin; e < cat_end; ++e) m.keys.push_back(lex.entries[e].key);
    for (const Document& doc : corpus.docs) {
        const auto dm = matcher.match(doc.tokens);
        std::vector<double> row(m.keys.size(), 0.0);
        if (!doc.tokens.empty()) {
            const double denom = static_cast<double>(doc.tokens.size());
            for (std::size_t e = cat_begin; e < cat_end; ++e) {
                row[e - cat_begin] = static_cast<double>(dm.entry_counts[e]) / denom;
            }
        }
        m.doc_ids.push_back(doc.id);
        m.cells.push_back(std::move(row));
    }
    return m;
}

// --- score table CSV ------------------------------------------------------

inline void write_score_table(std::ostream& os, const ScoreTable& table,
                              const std::vector<std::string>& config_comments = {}) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    std::vector<std::string> header;
    header.reserve(2 + table.columns.size());
    header.push_back("doc_id");
    header.push_back("token_count");
    for (const auto& c : table.columns) header.push_back(c);
    write_csv_row(os, header);
    for (std::size_t r = 0; r < table.doc_ids.size(); ++r) {
        std::vector<std::string> row;
        row.reserve(header.size());
        row.push_back(table.doc_ids[r]);
        row.push_back(std::to_string(table.token_counts[r]));
        for (const double v : table.values[r]) row.push_back(format_fixed(v, 6));
        write_csv_row(os, row);
    }
}

inline void write_count_table(std::ostream& os, const CorpusScores& scores,
                              const std::vector<std::string>& config_comments = {}) {
    for (const auto& c : config_comments) os << "# " << c << '\n';
    std::vector<std::string> header;
    header.push_back("doc_id");
    header.push_back("token_count");
    for (const auto& c : scores.scores.columns) header.push_back(c);
    write_csv_row(os, header);
    for (std::size_t r = 0; r < scores.scores.doc_ids.size(); ++r) {
        std::vector<std::string> row;
        row.push_back(scores.scores.doc_ids[r]);
        row.push_back(std::to_string(scores.scores.token_counts[r]));
        for (const auto v : scores.match_counts[r]) row.push_back(std::to_string(v));
        write_csv_row(os, row);
    }
}

inline ScoreTable read_score_table(const std::string& path) {
    auto is = open_input(path);
    std::vector<std::string> fields;
    long line_no = 0;
    if (!read_csv_record(is, fields, line_no)) {
        throw ParseError("empty score table", path, 0);
    }
    if (fields.size() < 3 || fields[0] != "doc_id" || fields[1] != "token_count") {
        throw ParseError("expected header 'doc_id,token_count,<columns>...'", path, line_no);
    }
    ScoreTable table;
    table.columns.assign(fields.begin() + 2, fields.end());
    while (read_csv_record(is, fields, line_no)) {
        if (fields.size() != table.columns.size() + 2) {
            throw ParseError("expected " + std::to_string(table.columns.size() + 2) +
                                 " fields, got " + std::to_string(fields.size()),
                             path, line_no);
        }
        table.doc_ids.push_back(fields[0]);
        const long long tc = parse_integer(fields[1], path, line_no, "token_count");
        if (tc < 0) throw ParseError("negative token_count", path, line_no);
        table.token_counts.push_back(static_cast<std::size_t>(tc));
        std::vector<double> row;
        row.reserve(table.columns.size());
        for (std::size_t i = 2; i < fields.size(); ++i) {
            row.push_back(parse_double(fields[i], path, line_no, "score"));
        }
        table.values.push_back(std::move(row));
    }
    return table;
}

} // namespace grievlex
