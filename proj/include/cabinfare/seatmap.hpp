#pragma once

// Cabin layout model: .smap parsing/serialization, seat classification,
// density indexes, zone capacity and dispersion tables.
//
// .smap is a line-oriented UTF-8 format:
//
//   # comment
//   aircraft: Boeing 737-800
//   airline: Gol
//   letters: A B C | D E F        <- '|' marks an aisle
//   default_pitch_in: 31
//   pitch_plus_in: 34
//   refmax_rows: 33
//   refmax_pitch_in: 34
//   row 1: 1+ 1+ 1+ 1+ 1+ 1+      <- 1 = seat, 1+ = extra-pitch seat, . = absent
//   row 16 exit: . . . . . .
//   row 17 pitch=32 exit: 1 1 1 1 1 1

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cabinfare/csv.hpp"
#include "cabinfare/errors.hpp"
#include "cabinfare/util.hpp"

namespace cabinfare {

enum class CellState { Seat, SeatPlus, Absent };

enum class Lateral { Window, Middle, Aisle };

inline const char* to_string(Lateral l) {
    switch (l) {
        case Lateral::Window: return "WINDOW";
        case Lateral::Middle: return "MIDDLE";
        default: return "AISLE";
    }
}

struct SeatClass {
    Lateral lateral;
    bool lastrow = false;
    bool emergexit = false;
    bool comfort = false;
};

struct RowSpec {
    int label = 0;
    std::vector<CellState> cells;
    double pitch_in = 0.0;      // effective pitch of the row
    bool exit = false;
    bool explicit_pitch = false;  // pitch= given in the file

    bool seat_bearing() const {
        for (auto c : cells)
            if (c != CellState::Absent) return true;
        return false;
    }
    int seat_count() const {
        int n = 0;
        for (auto c : cells) n += (c != CellState::Absent);
        return n;
    }
    bool operator==(const RowSpec&) const = default;
};

struct SeatMap {
    std::string aircraft;
    std::string airline;
    std::vector<char> letters;
    std::vector<int> aisles_after;  // aisle sits after letters[i]
    double default_pitch_in = 0.0;
    double pitch_plus_in = 0.0;  // 0 when the map has no 1+ cells
    int refmax_rows = 0;
    double refmax_pitch_in = 0.0;
    std::vector<RowSpec> rows;

    bool operator==(const SeatMap&) const = default;

    int seat_count() const {
        int n = 0;
        for (const auto& r : rows) n += r.seat_count();
        return n;
    }
    int seat_bearing_rows() const {
        int n = 0;
        for (const auto& r : rows) n += r.seat_bearing();
        return n;
    }
    // highest-labeled seat-bearing row; 0 if none
    int last_seat_row() const {
        int last = 0;
        for (const auto& r : rows)
            if (r.seat_bearing() && r.label > last) last = r.label;
        return last;
    }
    int comfort_seat_count() const {
        int n = 0;
        for (const auto& r : rows)
            if (r.pitch_in > default_pitch_in) n += r.seat_count();
        return n;
    }
    bool has_comfort_rows() const {
        for (const auto& r : rows)
            if (r.seat_bearing() && r.pitch_in > default_pitch_in) return true;
        return false;
    }
    std::vector<int> comfort_row_labels() const {
        std::vector<int> out;
        for (const auto& r : rows)
            if (r.seat_bearing() && r.pitch_in > default_pitch_in) out.push_back(r.label);
        return out;
    }
    const RowSpec* find_row(int label) const {
        for (const auto& r : rows)
            if (r.label == label) return &r;
        return nullptr;
    }
    int letter_index(char letter) const {
        for (size_t i = 0; i < letters.size(); ++i)
            if (letters[i] == letter) return static_cast<int>(i);
        return -1;
    }
};

// ---------------------------------------------------------------------------
// parsing

namespace detail {

inline void parse_letters(const std::string& value, SeatMap& m, const std::string& origin,
                          long lineno) {
    m.letters.clear();
    m.aisles_after.clear();
    for (const auto& tok : split_ws(value)) {
        if (tok == "|") {
            if (m.letters.empty())
                throw ParseError(origin, lineno, "aisle '|' before any seat letter");
            int idx = static_cast<int>(m.letters.size()) - 1;
            if (!m.aisles_after.empty() && m.aisles_after.back() == idx)
                throw ParseError(origin, lineno, "double aisle separator");
            m.aisles_after.push_back(idx);
        } else if (tok.size() == 1 && std::isalpha(static_cast<unsigned char>(tok[0]))) {
            char c = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
            for (char seen : m.letters)
                if (seen == c) throw ParseError(origin, lineno, std::string("duplicate seat letter '") + c + "'");
            m.letters.push_back(c);
        } else {
            throw ParseError(origin, lineno, "bad token in letters: '" + tok + "'");
        }
    }
    if (m.letters.empty()) throw ParseError(origin, lineno, "letters line defines no seats");
    if (!m.aisles_after.empty() && m.aisles_after.back() == static_cast<int>(m.letters.size()) - 1)
        throw ParseError(origin, lineno, "aisle '|' after the last seat letter");
}

inline RowSpec parse_row_line(const std::string& line, const SeatMap& m, const std::string& origin,
                              long lineno) {
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(origin, lineno, "row line missing ':'");
    auto head = split_ws(std::string_view(line).substr(0, colon));
    auto cells = split_ws(std::string_view(line).substr(colon + 1));

    RowSpec r;
    // head: row <int> [pitch=<in>] [exit]
    if (head.size() < 2) throw ParseError(origin, lineno, "row line needs a label");
    auto label = parse_long(head[1]);
    if (!label) throw ParseError(origin, lineno, "bad row label '" + head[1] + "'");
    r.label = static_cast<int>(*label);
    size_t k = 2;
    if (k < head.size() && head[k].rfind("pitch=", 0) == 0) {
        auto v = parse_double(std::string_view(head[k]).substr(6));
        if (!v || *v <= 0) throw ParseError(origin, lineno, "bad pitch in '" + head[k] + "'");
        r.pitch_in = *v;
        r.explicit_pitch = true;
        ++k;
    }
    if (k < head.size() && head[k] == "exit") {
        r.exit = true;
        ++k;
    }
    if (k != head.size())
        throw ParseError(origin, lineno, "unexpected token '" + head[k] + "' in row header");

    bool any_plus = false;
    for (const auto& tok : cells) {
        if (tok == "1") r.cells.push_back(CellState::Seat);
        else if (tok == "1+") { r.cells.push_back(CellState::SeatPlus); any_plus = true; }
        else if (tok == ".") r.cells.push_back(CellState::Absent);
        else throw ParseError(origin, lineno, "bad cell token '" + tok + "'");
    }
    if (r.cells.size() != m.letters.size())
        throw ParseError(origin, lineno,
                         "row " + std::to_string(r.label) + " has " + std::to_string(r.cells.size()) +
                             " cells, letters define " + std::to_string(m.letters.size()));
    if (!r.explicit_pitch) {
        // pitch is a physical row property: any 1+ cell lifts the whole row
        if (any_plus) {
            if (m.pitch_plus_in <= 0)
                throw ParseError(origin, lineno, "row uses '1+' but pitch_plus_in is not set");
            r.pitch_in = m.pitch_plus_in;
        } else {
            r.pitch_in = m.default_pitch_in;
        }
    }
    return r;
}

}  // namespace detail

inline SeatMap parse_seatmap(std::istream& in, const std::string& origin) {
    SeatMap m;
    std::set<std::string> seen_keys;
    bool in_rows = false;
    std::string raw;
    long lineno = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line{trim(raw)};
        if (line.empty()) continue;

        if (line.rfind("row", 0) == 0 &&
            (line.size() == 3 || std::isspace(static_cast<unsigned char>(line[3])))) {
            if (m.letters.empty())
                throw ParseError(origin, lineno, "row line before letters header");
            if (m.default_pitch_in <= 0)
                throw ParseError(origin, lineno, "row line before default_pitch_in header");
            in_rows = true;
            RowSpec r = detail::parse_row_line(line, m, origin, lineno);
            if (!m.rows.empty() && r.label <= m.rows.back().label)
                throw ParseError(origin, lineno,
                                 "row label " + std::to_string(r.label) +
                                     " not greater than previous row " +
                                     std::to_string(m.rows.back().label));
            m.rows.push_back(std::move(r));
            continue;
        }

        if (in_rows) throw ParseError(origin, lineno, "header line after row lines");
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(origin, lineno, "expected 'key: value'");
        std::string key{trim(std::string_view(line).substr(0, colon))};
        std::string value{trim(std::string_view(line).substr(colon + 1))};
        if (!seen_keys.insert(key).second)
            throw ParseError(origin, lineno, "duplicate header key '" + key + "'");
        if (value.empty()) throw ParseError(origin, lineno, "empty value for '" + key + "'");

        if (key == "aircraft") m.aircraft = value;
        else if (key == "airline") m.airline = value;
        else if (key == "letters") detail::parse_letters(value, m, origin, lineno);
        else if (key == "default_pitch_in" || key == "pitch_plus_in" || key == "refmax_pitch_in") {
            auto v = parse_double(value);
            if (!v || *v <= 0) throw ParseError(origin, lineno, "bad value for '" + key + "'");
            if (key == "default_pitch_in") m.default_pitch_in = *v;
            else if (key == "pitch_plus_in") m.pitch_plus_in = *v;
            else m.refmax_pitch_in = *v;
        } else if (key == "refmax_rows") {
            auto v = parse_long(value);
            if (!v || *v < 1) throw ParseError(origin, lineno, "refmax_rows must be >= 1");
            m.refmax_rows = static_cast<int>(*v);
        } else {
            throw ParseError(origin, lineno, "unknown header key '" + key + "'");
        }
    }

    for (const char* req : {"aircraft", "airline", "letters", "default_pitch_in",
                            "refmax_rows", "refmax_pitch_in"})
        if (!seen_keys.count(req))
            throw ParseError(origin, lineno, std::string("missing required header '") + req + "'");
    if (m.pitch_plus_in > 0 && m.pitch_plus_in <= m.default_pitch_in)
        throw ParseError(origin, lineno, "pitch_plus_in must exceed default_pitch_in");
    if (m.rows.empty()) throw ParseError(origin, lineno, "map defines no rows");
    if (m.seat_bearing_rows() == 0)
        throw ParseError(origin, lineno, "map has zero seat-bearing rows");
    return m;
}

inline SeatMap parse_seatmap_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open seat map: " + path);
    return parse_seatmap(in, path);
}

inline std::string format_pitch(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline std::string serialize_seatmap(const SeatMap& m) {
    std::ostringstream out;
    out << "aircraft: " << m.aircraft << "\n";
    out << "airline: " << m.airline << "\n";
    out << "letters:";
    for (size_t i = 0; i < m.letters.size(); ++i) {
        out << ' ' << m.letters[i];
        for (int a : m.aisles_after)
            if (a == static_cast<int>(i)) out << " |";
    }
    out << "\n";
    out << "default_pitch_in: " << format_pitch(m.default_pitch_in) << "\n";
    if (m.pitch_plus_in > 0) out << "pitch_plus_in: " << format_pitch(m.pitch_plus_in) << "\n";
    out << "refmax_rows: " << m.refmax_rows << "\n";
    out << "refmax_pitch_in: " << format_pitch(m.refmax_pitch_in) << "\n";
    for (const auto& r : m.rows) {
        out << "row " << r.label;
        if (r.explicit_pitch) out << " pitch=" << format_pitch(r.pitch_in);
        if (r.exit) out << " exit";
        out << ":";
        for (auto c : r.cells)
            out << ' ' << (c == CellState::Seat ? "1" : c == CellState::SeatPlus ? "1+" : ".");
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// classification

inline Lateral lateral_of(const SeatMap& m, int col) {
    const int last = static_cast<int>(m.letters.size()) - 1;
    const bool wall = (col == 0 || col == last);
    bool aisle = false;
    for (int a : m.aisles_after)
        if (a == col || a == col - 1) aisle = true;
    // wall wins for 1-abreast corner blocks; blocks of >=2 never conflict
    if (wall) return Lateral::Window;
    if (aisle) return Lateral::Aisle;
    return Lateral::Middle;
}

inline SeatClass classify_seat(const SeatMap& m, int row_label, char letter) {
    const RowSpec* row = m.find_row(row_label);
    if (!row) throw DataError("no row " + std::to_string(row_label) + " on map '" + m.aircraft +
                              " " + std::to_string(m.seat_count()) + "'");
    int col = m.letter_index(static_cast<char>(std::toupper(static_cast<unsigned char>(letter))));
    if (col < 0)
        throw DataError(std::string("no seat letter '") + letter + "' on this map");
    if (row->cells[col] == CellState::Absent)
        throw DataError("seat " + std::to_string(row_label) + letter + " is ABSENT on this map");
    SeatClass sc;
    sc.lateral = lateral_of(m, col);
    sc.lastrow = (row_label == m.last_seat_row());
    sc.emergexit = row->exit;
    sc.comfort = row->pitch_in > m.default_pitch_in;
    return sc;
}

// ---------------------------------------------------------------------------
// density indexes

inline double irowdens(const SeatMap& m) {
    if (m.refmax_rows < 1) throw DataError("refmax_rows not set");
    return 100.0 * static_cast<double>(m.seat_bearing_rows()) / m.refmax_rows;
}

// row-count-weighted mean pitch over seat-bearing rows
inline double ipitch(const SeatMap& m) {
    if (m.refmax_pitch_in <= 0) throw DataError("refmax_pitch_in not set");
    double sum = 0.0;
    int nrows = 0;
    for (const auto& r : m.rows)
        if (r.seat_bearing()) { sum += r.pitch_in; ++nrows; }
    if (nrows == 0) throw DataError("map has zero seat-bearing rows");
    return 100.0 * (sum / nrows) / m.refmax_pitch_in;
}

// sensitivity variant: weight by seats per row instead of rows
inline double ipitch_seat_weighted(const SeatMap& m) {
    if (m.refmax_pitch_in <= 0) throw DataError("refmax_pitch_in not set");
    double sum = 0.0;
    long nseats = 0;
    for (const auto& r : m.rows) {
        sum += r.pitch_in * r.seat_count();
        nseats += r.seat_count();
    }
    if (nseats == 0) throw DataError("map has zero seats");
    return 100.0 * (sum / nseats) / m.refmax_pitch_in;
}

struct DensityReport {
    double irowdens = 0.0;
    double ipitch = 0.0;
    double ipitch_seat_weighted = 0.0;
    std::vector<std::string> warnings;  // >100 is a warning, never an error
};

inline DensityReport density_report(const SeatMap& m) {
    DensityReport rep;
    rep.irowdens = irowdens(m);
    rep.ipitch = ipitch(m);
    rep.ipitch_seat_weighted = ipitch_seat_weighted(m);
    if (rep.irowdens > 100.0)
        rep.warnings.push_back("IROWDENS " + format_fixed(rep.irowdens, 2) +
                               " exceeds 100: installed rows exceed the documented reference maximum");
    if (rep.ipitch > 100.0)
        rep.warnings.push_back("IPITCH " + format_fixed(rep.ipitch, 2) +
                               " exceeds 100: mean pitch exceeds the documented reference maximum");
    return rep;
}

// ---------------------------------------------------------------------------
// reference maxima file: CSV model,refmax_rows,refmax_pitch_in

struct RefMax {
    int refmax_rows = 0;
    double refmax_pitch_in = 0.0;
};

inline std::map<std::string, RefMax> load_refmax_csv(const std::string& path) {
    auto t = csv::read_file(path);
    int cm = t.column("model"), cr = t.column("refmax_rows"), cp = t.column("refmax_pitch_in");
    if (cm < 0 || cr < 0 || cp < 0)
        throw DataError(path + ": expected header model,refmax_rows,refmax_pitch_in");
    std::map<std::string, RefMax> out;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        auto rows = parse_long(t.rows[i][cr]);
        auto pitch = parse_double(t.rows[i][cp]);
        if (!rows || *rows < 1 || !pitch || *pitch <= 0)
            throw DataError(path + ": bad reference values for model '" + t.rows[i][cm] + "'");
        out[t.rows[i][cm]] = RefMax{static_cast<int>(*rows), *pitch};
    }
    return out;
}

// override in-file reference maxima when the refs table knows the model
inline bool apply_refmax(SeatMap& m, const std::map<std::string, RefMax>& refs) {
    auto it = refs.find(m.aircraft);
    if (it == refs.end()) return false;
    m.refmax_rows = it->second.refmax_rows;
    m.refmax_pitch_in = it->second.refmax_pitch_in;
    return true;
}

// ---------------------------------------------------------------------------
// zone capacity

struct CabinZone {
    double pitch_in = 0.0;
    int rows = 0;
    int abreast = 0;
};

inline long capacity_from_zones(const std::vector<CabinZone>& zones) {
    long total = 0;
    for (const auto& z : zones) {
        if (z.rows < 0 || z.abreast < 0 || z.pitch_in < 0)
            throw DataError("zone values must be non-negative");
        total += static_cast<long>(z.rows) * z.abreast;
    }
    return total;
}

// "PxRxA,PxRxA,..." e.g. "34x7x6,31x23x6"
inline std::vector<CabinZone> parse_zones(const std::string& s) {
    std::vector<CabinZone> zones;
    for (const auto& part : split_on(s, ',')) {
        auto fields = split_on(trim(part), 'x');
        if (fields.size() != 3) throw DataError("bad zone '" + part + "', expected PxRxA");
        auto p = parse_double(fields[0]);
        auto r = parse_long(fields[1]);
        auto a = parse_long(fields[2]);
        if (!p || !r || !a) throw DataError("bad zone '" + part + "', expected PxRxA");
        zones.push_back(CabinZone{*p, static_cast<int>(*r), static_cast<int>(*a)});
    }
    if (zones.empty()) throw DataError("no zones given");
    return zones;
}

// ---------------------------------------------------------------------------
// dispersion table (Table-2 style aggregate)

struct DispersionEntry {
    int row = 0;
    char letter = 0;
    long count = 0;
};

struct DispersionTable {
    std::vector<int> rows;     // ascending
    std::vector<char> letters; // ascending
    std::vector<std::vector<long>> counts;  // [row][letter]
    std::vector<long> row_totals;
    std::vector<long> letter_totals;
    long grand_total = 0;

    bool operator==(const DispersionTable&) const = default;

    // exact percentages
    double row_share(size_t i, size_t j) const {
        return row_totals[i] == 0 ? 0.0 : 100.0 * counts[i][j] / row_totals[i];
    }
    double letter_share(size_t j) const {
        return grand_total == 0 ? 0.0 : 100.0 * letter_totals[j] / grand_total;
    }
    // display percentages, rounded half away from zero
    long row_share_pct(size_t i, size_t j) const { return round_half_away_long(row_share(i, j)); }
    long letter_share_pct(size_t j) const { return round_half_away_long(letter_share(j)); }

    std::vector<DispersionEntry> entries() const {
        std::vector<DispersionEntry> out;
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < letters.size(); ++j)
                out.push_back(DispersionEntry{rows[i], letters[j], counts[i][j]});
        return out;
    }
};

inline DispersionTable dispersion_table(const std::vector<DispersionEntry>& entries) {
    std::set<int> row_set;
    std::set<char> letter_set;
    for (const auto& e : entries) {
        if (e.count < 0) throw DataError("negative passenger count for seat " +
                                         std::to_string(e.row) + e.letter);
        row_set.insert(e.row);
        letter_set.insert(e.letter);
    }
    if (entries.empty()) throw DataError("dispersion input has no records");
    DispersionTable t;
    t.rows.assign(row_set.begin(), row_set.end());
    t.letters.assign(letter_set.begin(), letter_set.end());
    t.counts.assign(t.rows.size(), std::vector<long>(t.letters.size(), 0));
    std::map<int, size_t> row_idx;
    std::map<char, size_t> letter_idx;
    for (size_t i = 0; i < t.rows.size(); ++i) row_idx[t.rows[i]] = i;
    for (size_t j = 0; j < t.letters.size(); ++j) letter_idx[t.letters[j]] = j;
    for (const auto& e : entries) t.counts[row_idx[e.row]][letter_idx[e.letter]] += e.count;
    t.row_totals.assign(t.rows.size(), 0);
    t.letter_totals.assign(t.letters.size(), 0);
    for (size_t i = 0; i < t.rows.size(); ++i)
        for (size_t j = 0; j < t.letters.size(); ++j) {
            t.row_totals[i] += t.counts[i][j];
            t.letter_totals[j] += t.counts[i][j];
            t.grand_total += t.counts[i][j];
        }
    return t;
}

inline DispersionTable load_dispersion_csv(const std::string& path) {
    auto t = csv::read_file(path);
    int cr = t.column("row"), cl = t.column("letter"), cc = t.column("count");
    if (cr < 0 || cl < 0 || cc < 0)
        throw DataError(path + ": expected header row,letter,count");
    std::vector<DispersionEntry> entries;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        auto row = parse_long(t.rows[i][cr]);
        auto cnt = parse_long(t.rows[i][cc]);
        std::string letter{trim(t.rows[i][cl])};
        if (!row || !cnt || letter.size() != 1)
            throw ParseError(path, static_cast<long>(i) + 2, "bad dispersion record");
        entries.push_back(DispersionEntry{static_cast<int>(*row), letter[0], *cnt});
    }
    return dispersion_table(entries);
}

}  // namespace cabinfare
