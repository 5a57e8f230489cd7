#pragma once

// Minimal RFC-4180 CSV: quoted fields may contain commas, doubled quotes and
// newlines; CRLF and LF both accepted; empty field == missing value.

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cabinfare/errors.hpp"

namespace cabinfare::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<int>(j);
        return -1;
    }
};

inline Table read_stream(std::istream& in, const std::string& origin) {
    Table t;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false, any_field = false;
    long line = 1, record_line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        any_field = true;
    };
    // caller only invokes this when the record is non-empty
    auto end_record = [&] {
        end_field();
        if (t.header.empty()) {
            t.header = std::move(record);
        } else {
            if (record.size() != t.header.size())
                throw ParseError(origin, record_line,
                                 "expected " + std::to_string(t.header.size()) +
                                     " fields, got " + std::to_string(record.size()));
            t.rows.push_back(std::move(record));
        }
        record.clear();
        any_field = false;
        record_line = line;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') { in.get(); field += '"'; }
                else in_quotes = false;
            } else {
                if (c == '\n') ++line;
                field += c;
            }
        } else if (c == '"') {
            if (!field.empty())
                throw ParseError(origin, line, "quote inside unquoted field");
            in_quotes = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; LF (or EOF) terminates the record
        } else if (c == '\n') {
            ++line;
            if (any_field || !field.empty() || !record.empty()) end_record();
            record_line = line;
        } else {
            field += c;
        }
    }
    if (in_quotes) throw ParseError(origin, line, "unterminated quoted field");
    if (any_field || !field.empty() || !record.empty()) end_record();
    if (t.header.empty()) throw ParseError(origin, 1, "empty CSV (no header row)");
    return t;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CSV file: " + path);
    return read_stream(in, path);
}

inline std::string escape(const std::string& s) {
    bool need = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!need) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (size_t j = 0; j < row.size(); ++j) {
        if (j) out << ',';
        out << escape(row[j]);
    }
    out << '\n';
}

}  // namespace cabinfare::csv
