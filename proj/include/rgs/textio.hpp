#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include "rgs/errors.hpp"

namespace rgs {

// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return std::string(buf);
}

// RFC 4180 field quoting.
inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_quote(fields[i]);
    }
    return out;
}

// Parse one RFC 4180 record starting at `pos`; advances `pos` past the
// record terminator. Handles quoted fields, escaped quotes, and CRLF.
inline std::vector<std::string> csv_parse_record(const std::string& text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    cur += '"';
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                cur += c;
                ++pos;
            }
        } else if (c == '"') {
            in_quotes = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
            ++pos;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            fields.push_back(cur);
            return fields;
        } else {
            cur += c;
            ++pos;
        }
    }
    if (in_quotes) throw DataError("unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace rgs
