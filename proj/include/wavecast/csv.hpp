#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavecast/error.hpp"

namespace wavecast {

// Splits one CSV record. Double-quoted fields with "" escapes are accepted;
// embedded newlines are not (none of the documented schemas need them).
inline std::vector<std::string> split_csv_line(std::string_view line, const std::string& where) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
        ++i;
    }
    if (quoted)
        throw Error(where + ": unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

/// Line-oriented CSV reader that validates the header row and reports
/// errors as `path:line: message`.
class CsvReader {
public:
    CsvReader(const std::string& path, const std::vector<std::string>& expected_header)
        : in_(path), path_(path) {
        if (!in_)
            throw Error("cannot open '" + path + "'");
        std::string header;
        if (!std::getline(in_, header))
            fail("missing header row");
        ++line_no_;
        strip_cr(header);
        auto fields = split_csv_line(header, location());
        if (fields != expected_header) {
            std::ostringstream want;
            for (std::size_t i = 0; i < expected_header.size(); ++i)
                want << (i ? "," : "") << expected_header[i];
            fail("unexpected header '" + header + "' (expected '" + want.str() + "')");
        }
    }

    /// Advances to the next non-blank row. Returns false at end of file.
    bool next_row(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            strip_cr(line);
            if (line.empty())
                continue;
            fields = split_csv_line(line, location());
            return true;
        }
        return false;
    }

    std::string location() const { return path_ + ":" + std::to_string(line_no_); }

    [[noreturn]] void fail(const std::string& message) const {
        throw Error(location() + ": " + message);
    }

private:
    static void strip_cr(std::string& s) {
        if (!s.empty() && s.back() == '\r')
            s.pop_back();
    }

    std::ifstream in_;
    std::string path_;
    std::size_t line_no_ = 0;
};

inline long long parse_integer(std::string_view text, const std::string& what) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error("non-integer " + what + " '" + std::string(text) + "'");
    return value;
}

inline double parse_real(std::string_view text, const std::string& what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error("non-numeric " + what + " '" + std::string(text) + "'");
    return value;
}

/// Fixed formatting for emitted CSV numbers; NaN (undefined MASE) prints as
/// a bare "nan" so output stays byte-stable.
inline std::string format_number(double v) {
    if (v != v)
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace wavecast
