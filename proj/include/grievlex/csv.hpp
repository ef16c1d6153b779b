#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "grievlex/error.hpp"

namespace grievlex {

inline std::string format_fixed(double x, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

inline std::string format_general(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_sci(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, x);
    return buf;
}

// Shortest representation that parses back to the same double where
// possible; used for human-facing knobs like thresholds.
inline std::string format_short(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline std::string csv_escape(const std::string& field) {
    // Leading '#' is quoted so a row can never masquerade as a comment.
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos ||
                              (!field.empty() && field.front() == '#');
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(fields[i]);
    }
    os << '\n';
}

namespace detail {

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

} // namespace detail

// Reads the next CSV record, skipping blank lines and '#' comment lines.
// Handles quoted fields, including embedded separators and doubled quotes.
// Returns false at end of input. `line_no` tracks the physical line of the
// record start (1-based) for error reporting.
inline bool read_csv_record(std::istream& is, std::vector<std::string>& out, long& line_no,
                            char sep = ',') {
    std::string line;
    for (;;) {
        if (!std::getline(is, line)) return false;
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        break;
    }

    out.clear();
    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;
    for (;;) {
        if (i >= line.size()) {
            if (!in_quotes) break;
            // Quoted field continues on the next physical line.
            if (!std::getline(is, line)) {
                throw ParseError("unterminated quoted field");
            }
            ++line_no;
            detail::strip_cr(line);
            field += '\n';
            i = 0;
            continue;
        }
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
            ++i;
        } else if (c == sep) {
            out.push_back(field);
            field.clear();
            ++i;
        } else {
            field += c;
            ++i;
        }
    }
    out.push_back(field);
    return true;
}

inline double parse_double(const std::string& s, const std::string& path, long line,
                           const std::string& what) {
    if (s.empty()) throw ParseError("empty " + what, path, line);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw ParseError("invalid " + what + " '" + s + "'", path, line);
    }
    return v;
}

inline long long parse_integer(const std::string& s, const std::string& path, long line,
                               const std::string& what) {
    if (s.empty()) throw ParseError("empty " + what, path, line);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) {
        throw ParseError("invalid " + what + " '" + s + "'", path, line);
    }
    return v;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    return is;
}

} // namespace grievlex
