#pragma once

// Design-matrix construction: log transforms, dummy encoding (first
// lexicographic level is the baseline), named interactions, missing-value
// policy and constant-column dropping.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "cabinfare/dataset.hpp"
#include "cabinfare/errors.hpp"

namespace cabinfare {

struct Term {
    enum class Kind { Numeric, Log, Dummies, Interaction };
    Kind kind = Kind::Numeric;
    std::string column;
    std::string column2;  // interactions only
    bool optional = false;  // rows with missing values are dropped instead of erroring

    static Term num(std::string c) { return {Kind::Numeric, std::move(c), "", false}; }
    static Term log(std::string c) { return {Kind::Log, std::move(c), "", false}; }
    static Term cat(std::string c) { return {Kind::Dummies, std::move(c), "", false}; }
    static Term interact(std::string a, std::string b) {
        return {Kind::Interaction, std::move(a), std::move(b), false};
    }
    Term opt() const {
        Term t = *this;
        t.optional = true;
        return t;
    }
};

struct ModelSpec {
    std::string response;
    bool log_response = false;
    std::vector<Term> terms;
    bool intercept = true;
};

enum class ColumnOrigin { Intercept, Raw, LogTransformed, Dummy, Interaction };

struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> names;
    std::vector<ColumnOrigin> origins;
    std::string response_name;
    std::vector<long> kept_rows;          // original row index per design row
    std::vector<std::string> notices;     // dropped constants, dropped rows, ...

    long n() const { return X.rows(); }
    long k() const { return X.cols(); }
    int column_index(const std::string& name) const {
        for (size_t j = 0; j < names.size(); ++j)
            if (names[j] == name) return static_cast<int>(j);
        return -1;
    }
};

namespace detail {

inline bool is_missing_num(double v) { return std::isnan(v); }

struct BuiltColumn {
    std::string name;
    ColumnOrigin origin;
    std::vector<double> values;
};

}  // namespace detail

inline DesignMatrix build_design(const Dataset& data, const ModelSpec& spec) {
    const long n_in = data.n_rows();
    if (n_in == 0) throw DataError("dataset has no rows");

    // pass 1: find rows to drop (missing values under optional terms) and
    // reject missing values in required terms
    std::vector<char> drop(n_in, 0);
    long dropped = 0;
    auto scan_numeric = [&](const std::string& cname, bool optional, bool log_needed) {
        const auto& v = data.numeric(cname);
        for (long i = 0; i < n_in; ++i) {
            bool bad = detail::is_missing_num(v[i]) || (log_needed && v[i] <= 0.0);
            if (!bad) continue;
            std::string why = detail::is_missing_num(v[i]) ? "missing value" : "non-positive value under log";
            if (optional) drop[i] = 1;
            else
                throw DataError("column '" + cname + "', row " + std::to_string(i + 1) + ": " + why);
        }
    };
    auto scan_categorical = [&](const std::string& cname, bool optional) {
        const auto& v = data.categorical(cname);
        for (long i = 0; i < n_in; ++i) {
            if (!v[i].empty()) continue;
            if (optional) drop[i] = 1;
            else throw DataError("column '" + cname + "', row " + std::to_string(i + 1) + ": missing level");
        }
    };

    scan_numeric(spec.response, false, spec.log_response);
    for (const auto& t : spec.terms) {
        switch (t.kind) {
            case Term::Kind::Numeric: scan_numeric(t.column, t.optional, false); break;
            case Term::Kind::Log: scan_numeric(t.column, t.optional, true); break;
            case Term::Kind::Dummies: scan_categorical(t.column, t.optional); break;
            case Term::Kind::Interaction:
                scan_numeric(t.column, t.optional, false);
                scan_numeric(t.column2, t.optional, false);
                break;
        }
    }
    for (long i = 0; i < n_in; ++i) dropped += drop[i];
    if (dropped == n_in) throw DataError("all rows dropped by missing-value policy");

    DesignMatrix dm;
    dm.kept_rows.reserve(n_in - dropped);
    for (long i = 0; i < n_in; ++i)
        if (!drop[i]) dm.kept_rows.push_back(i);
    if (dropped > 0)
        dm.notices.push_back("dropped " + std::to_string(dropped) +
                             " row(s) with missing values in optional terms");
    const long n = static_cast<long>(dm.kept_rows.size());

    // pass 2: build columns
    std::vector<detail::BuiltColumn> built;
    auto add_col = [&](std::string name, ColumnOrigin origin, std::vector<double> vals) {
        for (const auto& b : built)
            if (b.name == name) throw DataError("duplicate design column '" + name + "'");
        built.push_back({std::move(name), origin, std::move(vals)});
    };
    auto gather = [&](const std::string& cname, bool take_log) {
        const auto& v = data.numeric(cname);
        std::vector<double> out(n);
        for (long i = 0; i < n; ++i) {
            double x = v[dm.kept_rows[i]];
            out[i] = take_log ? std::log(x) : x;
        }
        return out;
    };

    if (spec.intercept) add_col("(intercept)", ColumnOrigin::Intercept, std::vector<double>(n, 1.0));

    for (const auto& t : spec.terms) {
        switch (t.kind) {
            case Term::Kind::Numeric:
                add_col(t.column, ColumnOrigin::Raw, gather(t.column, false));
                break;
            case Term::Kind::Log:
                add_col("log(" + t.column + ")", ColumnOrigin::LogTransformed, gather(t.column, true));
                break;
            case Term::Kind::Interaction: {
                auto a = gather(t.column, false);
                auto b = gather(t.column2, false);
                std::vector<double> prod(n);
                for (long i = 0; i < n; ++i) prod[i] = a[i] * b[i];
                add_col(t.column + ":" + t.column2, ColumnOrigin::Interaction, std::move(prod));
                break;
            }
            case Term::Kind::Dummies: {
                const auto& v = data.categorical(t.column);
                std::set<std::string> levels;
                for (long i = 0; i < n; ++i) levels.insert(v[dm.kept_rows[i]]);
                if (levels.size() < 2) {
                    dm.notices.push_back("categorical '" + t.column +
                                         "' has a single level; no dummies emitted");
                    break;
                }
                bool first = true;  // first lexicographic level is the baseline
                for (const auto& lvl : levels) {
                    if (first) { first = false; continue; }
                    std::vector<double> dcol(n, 0.0);
                    for (long i = 0; i < n; ++i)
                        if (v[dm.kept_rows[i]] == lvl) dcol[i] = 1.0;
                    add_col(t.column + "=" + lvl, ColumnOrigin::Dummy, std::move(dcol));
                }
                break;
            }
        }
    }

    // constant columns carry no variation: flag and drop (intercept excluded)
    std::vector<detail::BuiltColumn> kept;
    for (auto& b : built) {
        if (b.origin != ColumnOrigin::Intercept) {
            auto [mn, mx] = std::minmax_element(b.values.begin(), b.values.end());
            if (*mn == *mx) {
                dm.notices.push_back("dropped constant regressor '" + b.name + "'");
                continue;
            }
        }
        kept.push_back(std::move(b));
    }
    if (kept.empty()) throw DataError("model has no regressors after drops");

    dm.response_name = spec.log_response ? "log(" + spec.response + ")" : spec.response;
    dm.y.resize(n);
    {
        const auto& v = data.numeric(spec.response);
        for (long i = 0; i < n; ++i) {
            double x = v[dm.kept_rows[i]];
            dm.y[i] = spec.log_response ? std::log(x) : x;
        }
    }
    dm.X.resize(n, static_cast<long>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j) {
        dm.names.push_back(kept[j].name);
        dm.origins.push_back(kept[j].origin);
        for (long i = 0; i < n; ++i) dm.X(i, static_cast<long>(j)) = kept[j].values[i];
    }
    return dm;
}

}  // namespace cabinfare
