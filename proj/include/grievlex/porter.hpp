#pragma once

#include <string>
#include <string_view>

namespace grievlex {

// Porter's English suffix-stripping algorithm, original 1980 rule tables.
// Stems are the merge keys for dictionary entries and input tokens alike,
// so the exact variant is pinned: no later "departures" (BLI->BLE,
// LOGI->LOG) are applied. Tokens containing anything other than ASCII
// letters a-z (digits, hyphens, apostrophes, non-ASCII) pass through
// unchanged. Words of length <= 2 are never altered.

namespace porter_detail {

inline bool is_consonant(const std::string& w, std::size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(w, i - 1);
        default:
            return true;
    }
}

// Number of VC sequences in w[0, len): the "measure" m of the stem.
inline int measure(const std::string& w, std::size_t len) {
    int m = 0;
    std::size_t i = 0;
    while (i < len && is_consonant(w, i)) ++i;
    for (;;) {
        while (i < len && !is_consonant(w, i)) ++i;
        if (i >= len) return m;
        while (i < len && is_consonant(w, i)) ++i;
        ++m;
        if (i >= len) return m;
    }
}

inline bool has_vowel(const std::string& w, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        if (!is_consonant(w, i)) return true;
    }
    return false;
}

inline bool double_consonant_at_end(const std::string& w) {
    const std::size_t n = w.size();
    if (n < 2) return false;
    if (w[n - 1] != w[n - 2]) return false;
    return is_consonant(w, n - 1);
}

// consonant-vowel-consonant ending at index i, final consonant not w/x/y.
inline bool cvc(const std::string& w, std::size_t i) {
    if (i < 2) return false;
    if (!is_consonant(w, i) || is_consonant(w, i - 1) || !is_consonant(w, i - 2)) return false;
    const char c = w[i];
    return c != 'w' && c != 'x' && c != 'y';
}

inline bool ends_with(const std::string& w, std::string_view suf) {
    return w.size() >= suf.size() &&
           std::string_view(w).substr(w.size() - suf.size()) == suf;
}

// Replaces `suf` by `repl` when the stem measure condition holds. Per the
// algorithm, once a suffix of a step matches, that rule decides the step:
// the caller must not try shorter suffixes afterwards.
inline bool replace_if_m(std::string& w, std::string_view suf, std::string_view repl,
                         int min_m) {
    const std::size_t stem_len = w.size() - suf.size();
    if (measure(w, stem_len) > min_m) {
        w.resize(stem_len);
        w.append(repl);
    }
    return true; // suffix matched, step resolved
}

inline void step1ab(std::string& w) {
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 3);
        w += 'i';
    } else if (!ends_with(w, "ss") && ends_with(w, "s")) {
        w.pop_back();
    }

    bool cleanup = false;
    if (ends_with(w, "eed")) {
        if (measure(w, w.size() - 3) > 0) w.pop_back();
    } else if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) {
        w.resize(w.size() - 2);
        cleanup = true;
    } else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) {
        w.resize(w.size() - 3);
        cleanup = true;
    }

    if (cleanup) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w += 'e';
        } else if (double_consonant_at_end(w)) {
            const char last = w.back();
            if (last != 'l' && last != 's' && last != 'z') w.pop_back();
        } else if (measure(w, w.size()) == 1 && cvc(w, w.size() - 1)) {
            w += 'e';
        }
    }
}

inline void step1c(std::string& w) {
    if (ends_with(w, "y") && has_vowel(w, w.size() - 1)) {
        w.back() = 'i';
    }
}

inline void step2(std::string& w) {
    if (w.size() < 2) return;
    switch (w[w.size() - 2]) {
        case 'a':
            if (ends_with(w, "ational")) { replace_if_m(w, "ational", "ate", 0); return; }
            if (ends_with(w, "tional")) { replace_if_m(w, "tional", "tion", 0); return; }
            return;
        case 'c':
            if (ends_with(w, "enci")) { replace_if_m(w, "enci", "ence", 0); return; }
            if (ends_with(w, "anci")) { replace_if_m(w, "anci", "ance", 0); return; }
            return;
        case 'e':
            if (ends_with(w, "izer")) { replace_if_m(w, "izer", "ize", 0); return; }
            return;
        case 'l':
            if (ends_with(w, "abli")) { replace_if_m(w, "abli", "able", 0); return; }
            if (ends_with(w, "alli")) { replace_if_m(w, "alli", "al", 0); return; }
            if (ends_with(w, "entli")) { replace_if_m(w, "entli", "ent", 0); return; }
            if (ends_with(w, "eli")) { replace_if_m(w, "eli", "e", 0); return; }
            if (ends_with(w, "ousli")) { replace_if_m(w, "ousli", "ous", 0); return; }
            return;
        case 'o':
            if (ends_with(w, "ization")) { replace_if_m(w, "ization", "ize", 0); return; }
            if (ends_with(w, "ation")) { replace_if_m(w, "ation", "ate", 0); return; }
            if (ends_with(w, "ator")) { replace_if_m(w, "ator", "ate", 0); return; }
            return;
        case 's':
            if (ends_with(w, "alism")) { replace_if_m(w, "alism", "al", 0); return; }
            if (ends_with(w, "iveness")) { replace_if_m(w, "iveness", "ive", 0); return; }
            if (ends_with(w, "fulness")) { replace_if_m(w, "fulness", "ful", 0); return; }
            if (ends_with(w, "ousness")) { replace_if_m(w, "ousness", "ous", 0); return; }
            return;
        case 't':
            if (ends_with(w, "aliti")) { replace_if_m(w, "aliti", "al", 0); return; }
            if (ends_with(w, "iviti")) { replace_if_m(w, "iviti", "ive", 0); return; }
            if (ends_with(w, "biliti")) { replace_if_m(w, "biliti", "ble", 0); return; }
            return;
        default:
            return;
    }
}

inline void step3(std::string& w) {
    switch (w.back()) {
        case 'e':
            if (ends_with(w, "icate")) { replace_if_m(w, "icate", "ic", 0); return; }
            if (ends_with(w, "ative")) { replace_if_m(w, "ative", "", 0); return; }
            if (ends_with(w, "alize")) { replace_if_m(w, "alize", "al", 0); return; }
            return;
        case 'i':
            if (ends_with(w, "iciti")) { replace_if_m(w, "iciti", "ic", 0); return; }
            return;
        case 'l':
            if (ends_with(w, "ical")) { replace_if_m(w, "ical", "ic", 0); return; }
            if (ends_with(w, "ful")) { replace_if_m(w, "ful", "", 0); return; }
            return;
        case 's':
            if (ends_with(w, "ness")) { replace_if_m(w, "ness", "", 0); return; }
            return;
        default:
            return;
    }
}

inline void step4(std::string& w) {
    if (w.size() < 2) return;
    std::string_view suf;
    switch (w[w.size() - 2]) {
        case 'a':
            if (ends_with(w, "al")) suf = "al";
            break;
        case 'c':
            if (ends_with(w, "ance")) suf = "ance";
            else if (ends_with(w, "ence")) suf = "ence";
            break;
        case 'e':
            if (ends_with(w, "er")) suf = "er";
            break;
        case 'i':
            if (ends_with(w, "ic")) suf = "ic";
            break;
        case 'l':
            if (ends_with(w, "able")) suf = "able";
            else if (ends_with(w, "ible")) suf = "ible";
            break;
        case 'n':
            if (ends_with(w, "ant")) suf = "ant";
            else if (ends_with(w, "ement")) suf = "ement";
            else if (ends_with(w, "ment")) suf = "ment";
            else if (ends_with(w, "ent")) suf = "ent";
            break;
        case 'o':
            if (ends_with(w, "ion")) {
                const std::size_t stem_len = w.size() - 3;
                if (stem_len > 0 && (w[stem_len - 1] == 's' || w[stem_len - 1] == 't')) {
                    suf = "ion";
                }
            } else if (ends_with(w, "ou")) {
                suf = "ou";
            }
            break;
        case 's':
            if (ends_with(w, "ism")) suf = "ism";
            break;
        case 't':
            if (ends_with(w, "ate")) suf = "ate";
            else if (ends_with(w, "iti")) suf = "iti";
            break;
        case 'u':
            if (ends_with(w, "ous")) suf = "ous";
            break;
        case 'v':
            if (ends_with(w, "ive")) suf = "ive";
            break;
        case 'z':
            if (ends_with(w, "ize")) suf = "ize";
            break;
        default:
            break;
    }
    if (suf.empty()) return;
    const std::size_t stem_len = w.size() - suf.size();
    if (measure(w, stem_len) > 1) w.resize(stem_len);
}

inline void step5(std::string& w) {
    if (w.back() == 'e') {
        const int m = measure(w, w.size() - 1);
        if (m > 1 || (m == 1 && !cvc(w, w.size() - 2))) w.pop_back();
    }
    if (w.back() == 'l' && double_consonant_at_end(w) && measure(w, w.size()) > 1) {
        w.pop_back();
    }
}

} // namespace porter_detail

inline bool is_all_ascii_lower_alpha(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

inline std::string porter_stem(std::string word) {
    if (word.size() <= 2) return word;
    using namespace porter_detail;
    step1ab(word);
    step1c(word);
    step2(word);
    step3(word);
    step4(word);
    step5(word);
    return word;
}

// Total stemming function over arbitrary lowercase tokens.
inline std::string stem(const std::string& token) {
    if (!is_all_ascii_lower_alpha(token)) return token;
    return porter_stem(token);
}

} // namespace grievlex
