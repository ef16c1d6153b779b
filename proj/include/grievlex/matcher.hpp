#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "grievlex/lexicon.hpp"
#include "grievlex/porter.hpp"

namespace grievlex {

// Compiled multi-pattern matcher over stemmed token streams.
//
// Keys live in stem space: each input token is stemmed, then unigram keys
// match single stems and phrase keys match consecutive stem runs. Within
// one category, matching scans left to right taking the longest key that
// starts at each position, and a token consumed by a phrase cannot also
// produce a match in that same category (non-overlap). Categories are
// independent: the same token may count in several categories at once.
//
// The structure is a trie over interned stem symbols (phrases are short,
// so a per-position descent bounded by the longest key is cheaper than a
// full failure-link automaton and directly yields the longest-first
// semantics). Immutable after construction; safe for concurrent match().
class LexiconMatcher {
public:
    struct DocMatches {
        // Aligned with the lexicon's canonical entry order.
        std::vector<std::uint32_t> entry_counts;
        // Aligned with the lexicon's category order.
        std::vector<std::uint32_t> category_counts;
    };

    explicit LexiconMatcher(const Lexicon& lex) {
        category_count_ = lex.categories.size();
        std::unordered_map<std::string_view, std::size_t> category_index;
        for (std::size_t c = 0; c < lex.categories.size(); ++c) {
            category_index.emplace(lex.categories[c], c);
        }

        entry_count_ = lex.entries.size();
        entry_category_.reserve(entry_count_);
        nodes_.push_back(Node{});

        for (std::size_t e = 0; e < lex.entries.size(); ++e) {
            const LexiconEntry& entry = lex.entries[e];
            entry_category_.push_back(static_cast<std::uint32_t>(category_index.at(entry.category)));
            entry_rating_.push_back(entry.mean_rating);

            std::vector<std::string> parts = split_key(entry.key);
            max_key_tokens_ = std::max<std::size_t>(max_key_tokens_, parts.size());

            std::size_t node = 0;
            for (const std::string& part : parts) {
                const std::int32_t sym = intern(part);
                auto it = nodes_[node].children.find(sym);
                if (it == nodes_[node].children.end()) {
                    nodes_.push_back(Node{});
                    it = nodes_[node].children.emplace(sym, nodes_.size() - 1).first;
                }
                node = it->second;
            }
            nodes_[node].terminal_entries.push_back(static_cast<std::uint32_t>(e));
        }
    }

    std::size_t entry_count() const { return entry_count_; }
    std::size_t category_count() const { return category_count_; }
    std::size_t max_key_tokens() const { return max_key_tokens_; }
    double entry_rating(std::size_t e) const { return entry_rating_[e]; }
    std::uint32_t entry_category(std::size_t e) const { return entry_category_[e]; }

    DocMatches match(std::span<const std::string> tokens) const {
        DocMatches result;
        result.entry_counts.assign(entry_count_, 0);
        result.category_counts.assign(category_count_, 0);
        if (tokens.empty() || entry_count_ == 0) return result;

        // Stem tokens and map to interned symbols; unseen stems cannot match.
        std::vector<std::int32_t> syms(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const std::string s = stem(tokens[i]);
            const auto it = symbols_.find(s);
            syms[i] = (it == symbols_.end()) ? -1 : it->second;
        }

        // Collect every (category, position, length, entry) hit.
        struct Hit {
            std::uint32_t category;
            std::uint32_t pos;
            std::uint32_t len;
            std::uint32_t entry;
        };
        std::vector<Hit> hits;
        for (std::size_t i = 0; i < syms.size(); ++i) {
            if (syms[i] < 0) continue;
            std::size_t node = 0;
            for (std::size_t j = i; j < syms.size() && j - i < max_key_tokens_; ++j) {
                if (syms[j] < 0) break;
                const auto it = nodes_[node].children.find(syms[j]);
                if (it == nodes_[node].children.end()) break;
                node = it->second;
                for (const std::uint32_t e : nodes_[node].terminal_entries) {
                    hits.push_back(Hit{entry_category_[e], static_cast<std::uint32_t>(i),
                                       static_cast<std::uint32_t>(j - i + 1), e});
                }
            }
        }

        // Per category, greedy left-to-right, longest key first at each
        // position. Sorting (category, pos, len desc) makes the first
        // usable hit at a position the longest one.
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
            if (a.category != b.category) return a.category < b.category;
            if (a.pos != b.pos) return a.pos < b.pos;
            if (a.len != b.len) return a.len > b.len;
            return a.entry < b.entry;
        });

        std::vector<std::uint32_t> next_free(category_count_, 0);
        for (const Hit& h : hits) {
            if (h.pos < next_free[h.category]) continue;
            result.entry_counts[h.entry] += 1;
            result.category_counts[h.category] += 1;
            next_free[h.category] = h.pos + h.len;
        }
        return result;
    }

private:
    struct Node {
        std::unordered_map<std::int32_t, std::size_t> children;
        std::vector<std::uint32_t> terminal_entries;
    };

    static std::vector<std::string> split_key(const std::string& key) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const std::size_t space = key.find(' ', start);
            if (space == std::string::npos) {
                parts.push_back(key.substr(start));
                return parts;
            }
            parts.push_back(key.substr(start, space - start));
            start = space + 1;
        }
    }

    std::int32_t intern(const std::string& s) {
        const auto it = symbols_.find(s);
        if (it != symbols_.end()) return it->second;
        const auto sym = static_cast<std::int32_t>(symbols_.size());
        symbols_.emplace(s, sym);
        return sym;
    }

    std::unordered_map<std::string, std::int32_t> symbols_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> entry_category_;
    std::vector<double> entry_rating_;
    std::size_t entry_count_ = 0;
    std::size_t category_count_ = 0;
    std::size_t max_key_tokens_ = 0;
};

} // namespace grievlex
