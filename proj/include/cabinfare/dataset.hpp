#pragma once

// Column-oriented dataset: numeric columns hold doubles (NaN == missing),
// categorical columns hold strings ("" == missing).

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cabinfare/csv.hpp"
#include "cabinfare/errors.hpp"
#include "cabinfare/util.hpp"

namespace cabinfare {

struct Column {
    std::string name;
    bool numeric = true;
    std::vector<double> num;
    std::vector<std::string> str;

    size_t size() const { return numeric ? num.size() : str.size(); }
};

class Dataset {
public:
    long n_rows() const { return n_rows_; }
    size_t n_cols() const { return cols_.size(); }

    void add_numeric(const std::string& name, std::vector<double> values) {
        check_new(name, values.size());
        Column c;
        c.name = name;
        c.numeric = true;
        c.num = std::move(values);
        index_[name] = cols_.size();
        cols_.push_back(std::move(c));
    }

    void add_categorical(const std::string& name, std::vector<std::string> values) {
        check_new(name, values.size());
        Column c;
        c.name = name;
        c.numeric = false;
        c.str = std::move(values);
        index_[name] = cols_.size();
        cols_.push_back(std::move(c));
    }

    bool has(const std::string& name) const { return index_.count(name) > 0; }

    const Column& col(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw DataError("no such column: '" + name + "'");
        return cols_[it->second];
    }
    const std::vector<double>& numeric(const std::string& name) const {
        const Column& c = col(name);
        if (!c.numeric) throw DataError("column '" + name + "' is categorical, expected numeric");
        return c.num;
    }
    const std::vector<std::string>& categorical(const std::string& name) const {
        const Column& c = col(name);
        if (c.numeric) throw DataError("column '" + name + "' is numeric, expected categorical");
        return c.str;
    }
    const std::vector<Column>& columns() const { return cols_; }

    // Load a CSV, parsing the named columns as numeric (empty field -> NaN,
    // anything unparseable -> error); all other columns stay categorical.
    static Dataset from_csv(const csv::Table& t, const std::set<std::string>& numeric_cols,
                            const std::string& origin = "<csv>") {
        Dataset d;
        for (size_t j = 0; j < t.header.size(); ++j) {
            const std::string& name = t.header[j];
            if (numeric_cols.count(name)) {
                std::vector<double> v;
                v.reserve(t.rows.size());
                for (size_t i = 0; i < t.rows.size(); ++i) {
                    std::string_view f = trim(t.rows[i][j]);
                    if (f.empty()) {
                        v.push_back(std::numeric_limits<double>::quiet_NaN());
                    } else if (auto x = parse_double(f)) {
                        v.push_back(*x);
                    } else {
                        throw ParseError(origin, static_cast<long>(i) + 2,
                                         "column '" + name + "': not a number: '" +
                                             std::string(f) + "'");
                    }
                }
                d.add_numeric(name, std::move(v));
            } else {
                std::vector<std::string> v;
                v.reserve(t.rows.size());
                for (const auto& row : t.rows) v.emplace_back(trim(row[j]));
                d.add_categorical(name, std::move(v));
            }
        }
        return d;
    }

    static Dataset from_csv_file(const std::string& path,
                                 const std::set<std::string>& numeric_cols) {
        return from_csv(csv::read_file(path), numeric_cols, path);
    }

private:
    void check_new(const std::string& name, size_t n) {
        if (index_.count(name)) throw DataError("duplicate column name: '" + name + "'");
        if (cols_.empty()) n_rows_ = static_cast<long>(n);
        else if (static_cast<long>(n) != n_rows_)
            throw DataError("column '" + name + "' has " + std::to_string(n) + " rows, dataset has " +
                            std::to_string(n_rows_));
    }

    std::vector<Column> cols_;
    std::map<std::string, size_t> index_;
    long n_rows_ = 0;
};

}  // namespace cabinfare
