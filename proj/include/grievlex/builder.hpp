#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "grievlex/csv.hpp"
#include "grievlex/error.hpp"
#include "grievlex/lexicon.hpp"
#include "grievlex/porter.hpp"

namespace grievlex {

struct SeedList {
    std::string category;
    std::vector<std::string> words; // lowercase surface forms / phrases
};

// Seeds TSV: header "category\tword", one seed per row, lowercased on load.
inline std::vector<SeedList> load_seed_lists(const std::string& path) {
    auto is = open_input(path);
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::vector<SeedList> lists;
    std::map<std::string, std::size_t> index;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "category\tword") {
                throw ParseError("expected header 'category\\tword'", path, line_no);
            }
            header_seen = true;
            continue;
        }
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw ParseError("expected 2 tab-separated columns", path, line_no);
        }
        std::string category = line.substr(0, tab);
        std::string word = line.substr(tab + 1);
        for (char& c : word) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        if (category.empty() || word.empty()) {
            throw ParseError("empty category or word", path, line_no);
        }
        auto it = index.find(category);
        if (it == index.end()) {
            index.emplace(category, lists.size());
            lists.push_back(SeedList{category, {word}});
        } else {
            lists[it->second].words.push_back(word);
        }
    }
    if (!header_seen) throw ParseError("missing header row", path, 0);
    if (lists.empty()) throw ParseError("no seed rows", path, 0);
    return lists;
}

// Synonym provider TSV: header "word\trelated", related = comma-separated.
using SynonymProvider = std::unordered_map<std::string, std::vector<std::string>>;

inline SynonymProvider load_synonym_provider(const std::string& path) {
    auto is = open_input(path);
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    SynonymProvider provider;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "word\trelated") {
                throw ParseError("expected header 'word\\trelated'", path, line_no);
            }
            header_seen = true;
            continue;
        }
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("expected 2 tab-separated columns", path, line_no);
        }
        const std::string word = line.substr(0, tab);
        std::vector<std::string> related;
        std::size_t start = tab + 1;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            std::string item = line.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            for (char& c : item) {
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            }
            if (!item.empty()) related.push_back(std::move(item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        provider[word] = std::move(related);
    }
    if (!header_seen) throw ParseError("missing header row", path, 0);
    return provider;
}

struct ExpansionResult {
    std::vector<std::string> words;
    std::size_t warnings = 0; // seeds the provider / table did not know
};

// Union of the seeds and each seed's related words, order-stable: seeds
// in input order, then additions in provider order, first occurrence wins.
inline ExpansionResult expand_synonyms(const SeedList& seeds, const SynonymProvider& provider) {
    ExpansionResult out;
    std::unordered_set<std::string> seen;
    const auto add = [&](const std::string& w) {
        if (seen.insert(w).second) out.words.push_back(w);
    };
    for (const auto& seed : seeds.words) add(seed);
    for (const auto& seed : seeds.words) {
        const auto it = provider.find(seed);
        if (it == provider.end()) {
            ++out.warnings;
            continue;
        }
        for (const auto& related : it->second) add(related);
    }
    return out;
}

// Pre-trained embedding table; vectors are unit-normalized on load so
// neighbor queries are plain dot products.
struct EmbeddingTable {
    std::size_t dimension = 0;
    std::vector<std::string> words;
    std::vector<std::vector<double>> vectors;
    std::unordered_map<std::string, std::size_t> index;
};

// Text format: one word per line followed by its components, whitespace
// separated (the common pre-trained vector layout).
inline EmbeddingTable load_embeddings(const std::string& path) {
    auto is = open_input(path);
    EmbeddingTable table;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::size_t pos = 0;
        const auto next_field = [&]() -> std::string {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            const std::size_t start = pos;
            while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
            return line.substr(start, pos - start);
        };
        std::string word = next_field();
        if (word.empty()) throw ParseError("missing word", path, line_no);
        for (char& c : word) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        std::vector<double> vec;
        for (;;) {
            const std::string field = next_field();
            if (field.empty()) break;
            vec.push_back(parse_double(field, path, line_no, "vector component"));
        }
        if (vec.empty()) throw ParseError("vector has no components", path, line_no);
        if (table.dimension == 0) {
            table.dimension = vec.size();
        } else if (vec.size() != table.dimension) {
            throw ParseError("vector has " + std::to_string(vec.size()) +
                                 " components, expected " + std::to_string(table.dimension),
                             path, line_no);
        }
        double norm_sq = 0.0;
        for (const double v : vec) norm_sq += v * v;
        if (norm_sq == 0.0) throw ParseError("zero-norm vector for '" + word + "'", path, line_no);
        const double norm = std::sqrt(norm_sq);
        for (double& v : vec) v /= norm;

        if (table.index.count(word)) continue; // keep the first occurrence
        table.index.emplace(word, table.words.size());
        table.words.push_back(std::move(word));
        table.vectors.push_back(std::move(vec));
    }
    if (table.words.empty()) throw ParseError("no vectors loaded", path, 0);
    return table;
}

// k nearest vocabulary words of each in-vocabulary seed by cosine
// similarity, seed itself excluded, ties broken lexicographically.
// Out-of-vocabulary seeds contribute nothing and count as warnings.
inline ExpansionResult expand_embeddings(const SeedList& seeds, const EmbeddingTable& table,
                                         std::size_t k = 10) {
    if (k < 1) throw ArgumentError("k must be >= 1");
    if (table.words.empty()) throw ArgumentError("empty embedding vocabulary");
    ExpansionResult out;
    for (const auto& seed : seeds.words) {
        const auto it = table.index.find(seed);
        if (it == table.index.end()) {
            ++out.warnings;
            continue;
        }
        const auto& seed_vec = table.vectors[it->second];

        struct Scored {
            double sim;
            std::size_t idx;
        };
        std::vector<Scored> scored;
        scored.reserve(table.words.size() - 1);
        for (std::size_t i = 0; i < table.words.size(); ++i) {
            if (i == it->second) continue;
            double dot = 0.0;
            for (std::size_t d = 0; d < table.dimension; ++d) {
                dot += seed_vec[d] * table.vectors[i][d];
            }
            scored.push_back(Scored{dot, i});
        }
        const auto better = [&](const Scored& a, const Scored& b) {
            if (a.sim != b.sim) return a.sim > b.sim;
            return table.words[a.idx] < table.words[b.idx];
        };
        const std::size_t take = std::min(k, scored.size());
        std::partial_sort(scored.begin(),
                          scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                          better);
        for (std::size_t i = 0; i < take; ++i) out.words.push_back(table.words[scored[i].idx]);
    }
    return out;
}

struct CandidateSet {
    // category -> deduplicated candidate words, first-occurrence order.
    std::vector<std::pair<std::string, std::vector<std::string>>> per_category;
    std::size_t total = 0; // cross-category duplicates count separately
};

// Per-category deduplication of the expanders' outputs; a word proposed
// under several categories stays a candidate in each of them.
inline CandidateSet merge_candidates(
    const std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>>& inputs) {
    CandidateSet out;
    for (const auto& [category, lists] : inputs) {
        std::unordered_set<std::string> seen;
        std::vector<std::string> merged;
        for (const auto& list : lists) {
            for (const auto& word : list) {
                if (seen.insert(word).second) merged.push_back(word);
            }
        }
        out.total += merged.size();
        out.per_category.emplace_back(category, std::move(merged));
    }
    return out;
}

// One crowdsourced judgment. attention_pass is a per-participant fact
// (passed every check); any failing record marks the participant failed.
struct RatingRecord {
    std::string participant_id;
    std::string word;
    std::string category;
    int rating = 0;       // 0..10, meaningful only when !unknown
    bool unknown = false; // "I do not know this word"
    bool attention_pass = true;
};

// Ratings CSV: header participant_id,word,category,rating,unknown,attention_pass
// with rating blank when unknown = true; booleans are true/false.
inline std::vector<RatingRecord> load_rating_records(const std::string& path) {
    auto is = open_input(path);
    std::vector<std::string> fields;
    long line_no = 0;
    if (!read_csv_record(is, fields, line_no)) throw ParseError("empty ratings file", path, 0);
    const std::vector<std::string> expected{"participant_id", "word", "category",
                                            "rating",         "unknown", "attention_pass"};
    if (fields != expected) {
        throw ParseError(
            "expected header 'participant_id,word,category,rating,unknown,attention_pass'",
            path, line_no);
    }
    const auto parse_bool = [&](const std::string& s, long line) {
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw ParseError("invalid boolean '" + s + "'", path, line);
    };
    std::vector<RatingRecord> records;
    while (read_csv_record(is, fields, line_no)) {
        if (fields.size() != 6) {
            throw ParseError("expected 6 fields, got " + std::to_string(fields.size()), path,
                             line_no);
        }
        RatingRecord r;
        r.participant_id = fields[0];
        r.word = fields[1];
        r.category = fields[2];
        for (char& c : r.word) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        if (r.word.empty() || r.category.empty() || r.participant_id.empty()) {
            throw ParseError("empty participant/word/category", path, line_no);
        }
        r.unknown = parse_bool(fields[4], line_no);
        r.attention_pass = parse_bool(fields[5], line_no);
        if (r.unknown) {
            if (!fields[3].empty()) {
                throw ParseError("rating must be blank when unknown=true", path, line_no);
            }
        } else {
            const long long v = parse_integer(fields[3], path, line_no, "rating");
            if (v < 0 || v > 10) throw ParseError("rating must be 0..10", path, line_no);
            r.rating = static_cast<int>(v);
        }
        records.push_back(std::move(r));
    }
    return records;
}

// Token-wise stemming of a word or space-separated phrase.
inline std::string stem_phrase(const std::string& word) {
    std::string out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t space = word.find(' ', start);
        const std::string token =
            word.substr(start, space == std::string::npos ? std::string::npos : space - start);
        if (!out.empty()) out += ' ';
        out += stem(token);
        if (space == std::string::npos) break;
        start = space + 1;
    }
    return out;
}

struct IngestReport {
    std::size_t participants_total = 0;
    std::size_t participants_dropped = 0;
    std::size_t records_total = 0;
    std::size_t records_dropped_attention = 0;
    std::size_t words_rated = 0;            // distinct (word, category) after attention filter
    std::size_t words_dropped_unknown = 0;  // >= 50% unknown
    std::size_t words_dropped_no_ratings = 0;
    std::vector<std::string> dropped_no_rating_keys;
    std::size_t final_entries = 0;          // (stem, category) pairs emitted
};

// Phase-4a ingestion, in the paper's order: drop every record from any
// participant who failed an attention check; drop (word, category) pairs
// where unknown-flags are >= 50% of the remaining records; stem words
// (phrases token-wise) and pool the surviving numeric ratings per
// (stem, category) with a flat mean.
inline Lexicon ingest_ratings(const std::vector<RatingRecord>& records, IngestReport* report_out = nullptr,
                              const CandidateSet* candidates = nullptr) {
    IngestReport report;
    report.records_total = records.size();

    if (candidates) {
        std::set<std::pair<std::string_view, std::string_view>> known;
        for (const auto& [category, words] : candidates->per_category) {
            for (const auto& w : words) known.emplace(w, category);
        }
        for (const auto& r : records) {
            if (!known.count({r.word, r.category})) {
                throw ValidationError("rating references unknown candidate ('" + r.word +
                                      "', '" + r.category + "')");
            }
        }
    }

    std::set<std::string> participants;
    std::set<std::string> failed;
    for (const auto& r : records) {
        participants.insert(r.participant_id);
        if (!r.attention_pass) failed.insert(r.participant_id);
    }
    report.participants_total = participants.size();
    report.participants_dropped = failed.size();

    // word-major grouping keeps ingestion order-independent.
    struct WordTally {
        std::size_t unknown = 0;
        std::size_t total = 0;
        std::vector<int> ratings;
    };
    std::map<std::pair<std::string, std::string>, WordTally> by_word;
    for (const auto& r : records) {
        if (failed.count(r.participant_id)) {
            ++report.records_dropped_attention;
            continue;
        }
        WordTally& tally = by_word[{r.word, r.category}];
        ++tally.total;
        if (r.unknown) ++tally.unknown;
        else tally.ratings.push_back(r.rating);
    }
    report.words_rated = by_word.size();

    struct StemPool {
        long long sum = 0;
        int count = 0;
    };
    std::map<std::pair<std::string, std::string>, StemPool> by_stem;
    for (const auto& [word_cat, tally] : by_word) {
        if (2 * tally.unknown >= tally.total) {
            ++report.words_dropped_unknown;
            continue;
        }
        // unknowns < 50% of total implies at least one numeric rating
        const std::string stem_key = stem_phrase(word_cat.first);
        StemPool& pool = by_stem[{stem_key, word_cat.second}];
        for (const int rating : tally.ratings) {
            pool.sum += rating;
            pool.count += 1;
        }
    }

    // Candidates whose every record was filtered away have no say at all;
    // they are dropped with a report entry rather than silently vanishing.
    if (candidates) {
        for (const auto& [category, words] : candidates->per_category) {
            for (const auto& w : words) {
                if (!by_word.count({w, category})) {
                    ++report.words_dropped_no_ratings;
                    report.dropped_no_rating_keys.push_back(w + "/" + category);
                }
            }
        }
    }

    if (by_stem.empty()) throw BuildError("no candidates survived rating ingestion");

    std::vector<LexiconEntry> entries;
    entries.reserve(by_stem.size());
    for (const auto& [stem_cat, pool] : by_stem) {
        LexiconEntry e;
        e.key = stem_cat.first;
        e.category = stem_cat.second;
        e.mean_rating = static_cast<double>(pool.sum) / static_cast<double>(pool.count);
        e.n_ratings = pool.count;
        entries.push_back(std::move(e));
    }
    report.final_entries = entries.size();
    if (report_out) *report_out = report;
    return make_lexicon(std::move(entries), "weighted");
}

struct BuildReport {
    std::size_t seeds = 0;
    std::size_t post_synonym = 0;   // per-category synonym-union sizes, summed
    std::size_t post_embedding = 0; // + embedding neighbors, before cross-source dedup
    std::size_t post_dedup = 0;     // candidate total after per-category dedup
    std::size_t synonym_warnings = 0;
    std::size_t embedding_warnings = 0;
    IngestReport ingest;
};

inline nlohmann::json build_report_json(const BuildReport& report) {
    nlohmann::json j;
    j["seeds"] = report.seeds;
    j["post_synonym"] = report.post_synonym;
    j["post_embedding"] = report.post_embedding;
    j["post_dedup"] = report.post_dedup;
    j["synonym_warnings"] = report.synonym_warnings;
    j["embedding_warnings"] = report.embedding_warnings;
    j["participants_total"] = report.ingest.participants_total;
    j["participants_dropped"] = report.ingest.participants_dropped;
    j["records_total"] = report.ingest.records_total;
    j["records_dropped_attention"] = report.ingest.records_dropped_attention;
    j["words_rated"] = report.ingest.words_rated;
    j["words_dropped_unknown"] = report.ingest.words_dropped_unknown;
    j["words_dropped_no_ratings"] = report.ingest.words_dropped_no_ratings;
    j["final_entries"] = report.ingest.final_entries;
    return j;
}

struct BuildOutput {
    Lexicon weighted;
    CandidateSet candidates;
    BuildReport report;
};

// Phases 3-4 end to end: expand each seed list through the synonym
// provider and the embedding neighbors, merge candidates per category,
// then ingest the crowdsourced ratings into the weighted lexicon.
inline BuildOutput run_build(const std::vector<SeedList>& seed_lists,
                             const SynonymProvider& provider, const EmbeddingTable& embeddings,
                             const std::vector<RatingRecord>& records,
                             std::size_t neighbors = 10) {
    BuildOutput out;
    std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> merged_inputs;
    for (const auto& seeds : seed_lists) {
        out.report.seeds += seeds.words.size();
        ExpansionResult syn = expand_synonyms(seeds, provider);
        ExpansionResult emb = expand_embeddings(seeds, embeddings, neighbors);
        out.report.post_synonym += syn.words.size();
        out.report.post_embedding += syn.words.size() + emb.words.size();
        out.report.synonym_warnings += syn.warnings;
        out.report.embedding_warnings += emb.warnings;
        merged_inputs.emplace_back(
            seeds.category,
            std::vector<std::vector<std::string>>{std::move(syn.words), std::move(emb.words)});
    }
    out.candidates = merge_candidates(merged_inputs);
    out.report.post_dedup = out.candidates.total;
    out.weighted = ingest_ratings(records, &out.report.ingest, &out.candidates);
    return out;
}

} // namespace grievlex
