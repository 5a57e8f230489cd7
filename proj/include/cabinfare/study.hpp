#pragma once

// Study pipeline: schema-checked CSV ingestion, variable construction over the
// parsed seat maps, the eight-column specification ladder (each column is one
// post-double-selection fit), and the rendered regression table.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabinfare/dataset.hpp"
#include "cabinfare/errors.hpp"
#include "cabinfare/pds.hpp"
#include "cabinfare/seatmap.hpp"
#include "cabinfare/stats.hpp"
#include "cabinfare/synth.hpp"
#include "cabinfare/util.hpp"

namespace cabinfare {

// --- loading -----------------------------------------------------------------

struct StudyLoadOptions {
    double max_reject_frac = 0.05;  // hard error when more rows than this fail validation
};

struct StudyTable {
    Dataset data;                      // validated rows only
    std::vector<std::string> rejects;  // "row N: reason", N = 1-based data row
    long n_input = 0;
};

namespace study_detail {

inline const std::array<const char*, 20>& schema_columns() {
    static const std::array<const char*, 20> cols = {
        "price",  "adv_days", "dist_km", "bsn",    "fltime_min", "shipment_kg", "revpax",
        "lf",     "fuelp",    "hub",     "seatsh", "rhhi",       "row",         "letter",
        "seatmap_id", "airline", "route_id", "svy_date", "dep_hour", "pax_profile_id"};
    return cols;
}

// first violated invariant of one raw row, or "" when it is clean
inline std::string row_reason(const std::vector<std::string>& row,
                              const std::map<std::string, int>& at) {
    auto field = [&](const char* name) { return trim(row[at.at(name)]); };
    auto num = [&](const char* name) { return parse_double(field(name)); };

    for (const char* c : {"price", "dist_km", "fltime_min", "shipment_kg", "revpax", "fuelp"}) {
        auto v = num(c);
        if (!v) return std::string("unparseable ") + c;
        if (!(*v > 0.0) || !std::isfinite(*v)) return std::string(c) + " not positive";
    }
    auto adv = parse_long(field("adv_days"));
    if (!adv) return "unparseable adv_days";
    if (*adv < 1) return "ADV out of range";
    for (const char* c : {"bsn", "hub"}) {
        auto v = parse_long(field(c));
        if (!v || (*v != 0 && *v != 1)) return std::string(c) + " not 0/1";
    }
    auto lf = num("lf");
    if (!lf) return "unparseable lf";
    if (!(*lf > 0.0 && *lf <= 1.0)) return "LF out of range";
    auto seatsh = num("seatsh");
    if (!seatsh) return "unparseable seatsh";
    if (!(*seatsh > 0.0 && *seatsh <= 100.0)) return "SEATSH out of range";
    auto rhhi = num("rhhi");
    if (!rhhi) return "unparseable rhhi";
    if (!(*rhhi > 0.0 && *rhhi <= 1.0)) return "RHHI out of range";
    auto r = parse_long(field("row"));
    if (!r || *r < 1) return "bad seat row";
    auto letter = field("letter");
    if (letter.size() != 1 || !std::isalpha(static_cast<unsigned char>(letter[0])))
        return "bad seat letter";
    auto hour = parse_long(field("dep_hour"));
    if (!hour || *hour < 0 || *hour > 23) return "dep_hour out of range";
    for (const char* c : {"seatmap_id", "airline", "route_id", "svy_date", "pax_profile_id"})
        if (field(c).empty()) return std::string("empty ") + c;
    return "";
}

}  // namespace study_detail

inline StudyTable load_study_csv(const csv::Table& t, const StudyLoadOptions& opts = {},
                                 const std::string& origin = "<csv>") {
    std::map<std::string, int> at;
    for (size_t j = 0; j < t.header.size(); ++j) at.emplace(trim(t.header[j]), static_cast<int>(j));
    for (const char* c : study_detail::schema_columns())
        if (!at.count(c)) throw DataError(origin + ": missing column '" + c + "'");

    StudyTable out;
    out.n_input = static_cast<long>(t.rows.size());
    if (out.n_input == 0) throw DataError(origin + ": no data rows");

    csv::Table kept;
    kept.header.assign(study_detail::schema_columns().begin(), study_detail::schema_columns().end());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        std::string reason = study_detail::row_reason(t.rows[i], at);
        if (!reason.empty()) {
            out.rejects.push_back("row " + std::to_string(i + 1) + ": " + reason);
            continue;
        }
        std::vector<std::string> row;
        row.reserve(kept.header.size());
        for (const auto& name : kept.header) row.emplace_back(trim(t.rows[i][at.at(name)]));
        kept.rows.push_back(std::move(row));
    }

    if (static_cast<double>(out.rejects.size()) > opts.max_reject_frac * out.n_input) {
        std::string msg = origin + ": " + std::to_string(out.rejects.size()) + " of " +
                          std::to_string(out.n_input) + " rows rejected (threshold " +
                          format_fixed(100.0 * opts.max_reject_frac, 1) + "%)";
        for (size_t i = 0; i < std::min<size_t>(out.rejects.size(), 5); ++i)
            msg += "\n  " + out.rejects[i];
        throw DataError(msg);
    }
    if (kept.rows.empty()) throw DataError(origin + ": every row was rejected");

    out.data = Dataset::from_csv(kept,
                                 {"price", "adv_days", "dist_km", "bsn", "fltime_min",
                                  "shipment_kg", "revpax", "lf", "fuelp", "hub", "seatsh", "rhhi",
                                  "row"},
                                 origin);
    return out;
}

inline StudyTable load_study_file(const std::string& path, const StudyLoadOptions& opts = {}) {
    return load_study_csv(csv::read_file(path), opts, path);
}

// --- variable construction ----------------------------------------------------

struct AdvBuckets {
    long w1 = 7;   // 1w: 0-7 days
    long w2 = 14;  // 2w: 8-14
    long w3 = 21;  // 3w: 15-21; >3w: beyond
};

// Estimation-ready columns. Regressor columns carry their table display names;
// continuous ones already hold logs (the name refers to the transformed value).
struct StudyVariables {
    Dataset vars;
    std::vector<std::string> clusters;  // airport-pair (route) labels, row-aligned
};

inline StudyVariables build_variables(const StudyTable& t,
                                      const std::vector<PoolEntry>& maps,
                                      const AdvBuckets& buckets = {}) {
    const Dataset& d = t.data;
    const long n = d.n_rows();

    std::map<std::string, const PoolEntry*> by_id;
    for (const auto& e : maps) by_id[e.id] = &e;

    // per-map derived facts, plus the placebo geometry: comfort-row positions
    // pooled across same-aircraft same-airline siblings, applied to maps that
    // have no comfort rows of their own
    struct MapFacts {
        double ln_irowdens = 0, ln_ipitch = 0;
        std::set<int> placebo_rows;
        const SeatMap* map = nullptr;
    };
    std::map<std::string, MapFacts> facts;
    std::map<std::pair<std::string, std::string>, std::set<int>> family_comfort;
    for (const auto& e : maps) {
        auto rows = e.map.comfort_row_labels();
        family_comfort[{e.map.aircraft, e.map.airline}].insert(rows.begin(), rows.end());
    }
    for (const auto& e : maps) {
        MapFacts f;
        f.map = &e.map;
        f.ln_irowdens = std::log(irowdens(e.map));
        f.ln_ipitch = std::log(ipitch(e.map));
        if (!e.map.has_comfort_rows())
            f.placebo_rows = family_comfort[{e.map.aircraft, e.map.airline}];
        facts[e.id] = std::move(f);
    }

    const auto& price = d.numeric("price");
    const auto& adv = d.numeric("adv_days");
    const auto& dist = d.numeric("dist_km");
    const auto& bsn = d.numeric("bsn");
    const auto& fltime = d.numeric("fltime_min");
    const auto& shipment = d.numeric("shipment_kg");
    const auto& revpax = d.numeric("revpax");
    const auto& lf = d.numeric("lf");
    const auto& fuelp = d.numeric("fuelp");
    const auto& hub = d.numeric("hub");
    const auto& seatsh = d.numeric("seatsh");
    const auto& rhhi = d.numeric("rhhi");
    const auto& seat_row = d.numeric("row");
    const auto& letter = d.categorical("letter");
    const auto& map_id = d.categorical("seatmap_id");
    const auto& route = d.categorical("route_id");

    std::vector<double> lnp(n), ln_adv(n), ln_dist(n), ln_fltime(n), ln_ship(n), ln_revpax(n),
        ln_lf(n), ln_fuelp(n), ln_seatsh(n), ln_rhhi(n), ln_ird(n), ln_ip(n);
    std::vector<double> v_bsn(n), v_hub(n), v_last(n), v_exit(n), v_comf(n), v_mid(n),
        v_placebo(n), b1(n), b2(n), b3(n), b4(n), m1(n), m2(n), m3(n), m4(n);
    std::vector<std::string> origin_apt(n), dest_apt(n);

    for (long i = 0; i < n; ++i) {
        auto it = facts.find(map_id[i]);
        if (it == facts.end())
            throw DataError("row " + std::to_string(i + 1) + ": unknown seat map id '" +
                            map_id[i] + "'");
        const MapFacts& f = it->second;
        const int row_label = static_cast<int>(seat_row[i]);
        SeatClass sc;
        try {
            sc = classify_seat(*f.map, row_label, letter[i][0]);
        } catch (const DataError& e) {
            throw DataError("row " + std::to_string(i + 1) + " (map '" + map_id[i] +
                            "'): " + e.what());
        }

        lnp[i] = std::log(price[i]);
        ln_adv[i] = std::log(adv[i]);
        ln_dist[i] = std::log(dist[i]);
        ln_fltime[i] = std::log(fltime[i]);
        ln_ship[i] = std::log(shipment[i]);
        ln_revpax[i] = std::log(revpax[i]);
        ln_lf[i] = std::log(lf[i]);
        ln_fuelp[i] = std::log(fuelp[i]);
        ln_seatsh[i] = std::log(seatsh[i]);
        ln_rhhi[i] = std::log(rhhi[i]);
        ln_ird[i] = f.ln_irowdens;
        ln_ip[i] = f.ln_ipitch;

        v_bsn[i] = bsn[i];
        v_hub[i] = hub[i];
        v_last[i] = sc.lastrow ? 1.0 : 0.0;
        v_exit[i] = sc.emergexit ? 1.0 : 0.0;
        v_comf[i] = sc.comfort ? 1.0 : 0.0;
        v_mid[i] = sc.lateral == Lateral::Middle ? 1.0 : 0.0;
        v_placebo[i] = f.placebo_rows.count(row_label) ? 1.0 : 0.0;

        const long a = static_cast<long>(adv[i]);
        b1[i] = a <= buckets.w1 ? 1.0 : 0.0;
        b2[i] = (a > buckets.w1 && a <= buckets.w2) ? 1.0 : 0.0;
        b3[i] = (a > buckets.w2 && a <= buckets.w3) ? 1.0 : 0.0;
        b4[i] = a > buckets.w3 ? 1.0 : 0.0;
        m1[i] = v_mid[i] * b1[i];
        m2[i] = v_mid[i] * b2[i];
        m3[i] = v_mid[i] * b3[i];
        m4[i] = v_mid[i] * b4[i];

        auto dash = route[i].find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 == route[i].size())
            throw DataError("row " + std::to_string(i + 1) + ": route_id '" + route[i] +
                            "' is not origin-dest");
        origin_apt[i] = route[i].substr(0, dash);
        dest_apt[i] = route[i].substr(dash + 1);
    }

    StudyVariables out;
    out.clusters = route;
    Dataset& v = out.vars;
    v.add_numeric("lnP", std::move(lnp));
    v.add_numeric("ADV", std::move(ln_adv));
    v.add_numeric("DIST", std::move(ln_dist));
    v.add_numeric("IROWDENS", std::move(ln_ird));
    v.add_numeric("BSN", std::move(v_bsn));
    v.add_numeric("FLTIME", std::move(ln_fltime));
    v.add_numeric("SHIPMENT", std::move(ln_ship));
    v.add_numeric("REVPAX", std::move(ln_revpax));
    v.add_numeric("LF", std::move(ln_lf));
    v.add_numeric("FUELP", std::move(ln_fuelp));
    v.add_numeric("HUB", std::move(v_hub));
    v.add_numeric("SEATSH", std::move(ln_seatsh));
    v.add_numeric("RHHI", std::move(ln_rhhi));
    v.add_numeric("LASTROW", std::move(v_last));
    v.add_numeric("EMERGEXIT", std::move(v_exit));
    v.add_numeric("COMFORT", std::move(v_comf));
    v.add_numeric("MIDDLE", std::move(v_mid));
    v.add_numeric("COMFORT (placebo)", std::move(v_placebo));
    v.add_numeric("ADV (1w)", std::move(b1));
    v.add_numeric("ADV (2w)", std::move(b2));
    v.add_numeric("ADV (3w)", std::move(b3));
    v.add_numeric("ADV (>3w)", std::move(b4));
    v.add_numeric("MIDDLE x ADV (1w)", std::move(m1));
    v.add_numeric("MIDDLE x ADV (2w)", std::move(m2));
    v.add_numeric("MIDDLE x ADV (3w)", std::move(m3));
    v.add_numeric("MIDDLE x ADV (>3w)", std::move(m4));
    v.add_numeric("IPITCH", std::move(ln_ip));
    v.add_categorical("svy_date", d.categorical("svy_date"));
    v.add_categorical("dep_hour", d.categorical("dep_hour"));
    v.add_categorical("pax_profile_id", d.categorical("pax_profile_id"));
    v.add_categorical("route_id", route);
    v.add_categorical("origin", std::move(origin_apt));
    v.add_categorical("dest", std::move(dest_apt));
    return out;
}

// --- the specification ladder ---------------------------------------------------

struct LadderColumn {
    std::string label;
    std::vector<std::string> interest;  // display-named columns of StudyVariables
    bool airport_profile = false;       // columns (7)-(8): airport + profile candidates
};

inline std::vector<LadderColumn> default_ladder() {
    using V = std::vector<std::string>;
    V c1 = {"ADV", "DIST", "IROWDENS"};
    V c2 = c1;
    c2.push_back("BSN");
    V c3 = c2;
    for (const char* s : {"FLTIME", "SHIPMENT", "REVPAX", "LF", "FUELP", "HUB"}) c3.push_back(s);
    V c4 = c3;
    for (const char* s : {"SEATSH", "RHHI"}) c4.push_back(s);
    V c5 = c4;
    for (const char* s : {"LASTROW", "EMERGEXIT", "COMFORT", "MIDDLE"}) c5.push_back(s);
    V c6 = c4;
    for (const char* s : {"LASTROW", "EMERGEXIT", "COMFORT", "COMFORT (placebo)",
                          "MIDDLE x ADV (1w)", "MIDDLE x ADV (2w)", "MIDDLE x ADV (3w)",
                          "MIDDLE x ADV (>3w)"})
        c6.push_back(s);
    V c8 = c6;
    for (auto& name : c8)
        if (name == "IROWDENS") name = "IPITCH";
    return {
        {"(1)", c1, false}, {"(2)", c2, false}, {"(3)", c3, false}, {"(4)", c4, false},
        {"(5)", c5, false}, {"(6)", c6, false}, {"(7)", c6, true},  {"(8)", c8, true},
    };
}

// footer display names for the candidate control groups, in table order
inline const std::vector<std::pair<const char*, const char*>>& control_group_columns() {
    static const std::vector<std::pair<const char*, const char*>> g = {
        {"Svy Date Controls", "svy_date"},
        {"Flight Time Controls", "dep_hour"},
        {"Airport Controls", "origin+dest"},
        {"PAX Profile Controls", "pax_profile_id"},
    };
    return g;
}

inline PdsResult run_column(const StudyVariables& sv, const LadderColumn& col,
                            const PdsOptions& opts = {}) {
    const Dataset& v = sv.vars;
    const long n = v.n_rows();

    Eigen::VectorXd y(n);
    {
        const auto& lnp = v.numeric("lnP");
        for (long i = 0; i < n; ++i) y[i] = lnp[i];
    }
    Eigen::MatrixXd D(n, static_cast<long>(col.interest.size()));
    for (size_t j = 0; j < col.interest.size(); ++j) {
        const auto& src = v.numeric(col.interest[j]);
        for (long i = 0; i < n; ++i) D(i, static_cast<long>(j)) = src[i];
    }

    std::vector<ControlGroup> groups;
    groups.push_back(ControlGroup::indicators("Svy Date Controls", v.categorical("svy_date")));
    groups.push_back(ControlGroup::indicators("Flight Time Controls", v.categorical("dep_hour")));
    if (col.airport_profile) {
        std::vector<const std::vector<std::string>*> sets = {&v.categorical("origin"),
                                                             &v.categorical("dest")};
        groups.push_back(ControlGroup::indicators("Airport Controls", sets));
        groups.push_back(
            ControlGroup::indicators("PAX Profile Controls", v.categorical("pax_profile_id")));
    }

    try {
        return pds_estimate(y, "lnP", D, col.interest, groups, sv.clusters, opts);
    } catch (const EstimationError& e) {
        throw EstimationError("column " + col.label + ": " + e.what());
    }
}

// --- the rendered table -----------------------------------------------------------

struct TableCell {
    bool present = false;
    double coef = 0, se = 0, tstat = 0, pval = 0;

    bool operator==(const TableCell&) const = default;
};

struct FooterGroup {
    std::string name;
    bool present = false;  // absent groups render "No"
    long selected = 0, total = 0;

    bool operator==(const FooterGroup&) const = default;
};

struct TableColumn {
    std::string label;
    std::map<std::string, TableCell> cells;
    std::string estimator = "PDS/LASSO";
    long n_clusters = 0;
    std::vector<FooterGroup> groups;
    double aic = 0, bic = 0, adj_r2 = 0, rmse = 0;
    bool ic_defined = true;
    long n_obs = 0;

    bool operator==(const TableColumn& o) const {
        auto num_eq = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
        return label == o.label && cells == o.cells && estimator == o.estimator &&
               n_clusters == o.n_clusters && groups == o.groups && num_eq(aic, o.aic) &&
               num_eq(bic, o.bic) && adj_r2 == o.adj_r2 && rmse == o.rmse &&
               ic_defined == o.ic_defined && n_obs == o.n_obs;
    }
};

struct RegressionTable {
    std::vector<std::string> rows;  // regressor display names, ladder order
    std::vector<TableColumn> cols;

    bool operator==(const RegressionTable&) const = default;
};

inline RegressionTable run_ladder(const StudyVariables& sv,
                                  const std::vector<LadderColumn>& ladder,
                                  const PdsOptions& opts = {}) {
    if (ladder.empty()) throw EstimationError("empty specification ladder");
    RegressionTable table;
    for (const auto& col : ladder)
        for (const auto& name : col.interest)
            if (std::find(table.rows.begin(), table.rows.end(), name) == table.rows.end())
                table.rows.push_back(name);

    for (const auto& col : ladder) {
        PdsResult res = run_column(sv, col, opts);
        TableColumn tc;
        tc.label = col.label;
        for (const auto& pi : res.interest) {
            TableCell cell;
            cell.present = true;
            cell.coef = pi.coef;
            cell.se = pi.se;
            cell.tstat = pi.tstat;
            cell.pval = pi.pval;
            tc.cells[pi.name] = cell;
        }
        tc.n_clusters = res.n_clusters;
        for (const auto& [footer_name, _] : control_group_columns()) {
            FooterGroup fg;
            fg.name = footer_name;
            for (const auto& gc : res.group_counts)
                if (gc.group == footer_name) {
                    fg.present = true;
                    fg.selected = gc.selected;
                    fg.total = gc.total;
                }
            tc.groups.push_back(fg);
        }
        tc.aic = res.stats.aic;
        tc.bic = res.stats.bic;
        tc.ic_defined = res.stats.ic_defined;
        tc.adj_r2 = res.stats.adj_r2;
        tc.rmse = res.stats.rmse;
        tc.n_obs = res.fit.n;
        table.cols.push_back(std::move(tc));
    }
    return table;
}

// --- rendering ---------------------------------------------------------------

namespace study_detail {

inline std::string thousands(long v) {
    std::string digits = std::to_string(v < 0 ? -v : v);
    std::string out;
    for (size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return (v < 0 ? "-" : "") + out;
}

inline std::string coef_cell(const TableCell& c) {
    if (!c.present) return "";
    return format_fixed(c.coef, 4) + significance_stars(c.pval);
}

inline std::string coef_cell_lossless(const TableCell& c) {
    if (!c.present) return "";
    return format_shortest(c.coef) + significance_stars(c.pval);
}

inline std::string group_cell(const FooterGroup& g) {
    if (!g.present) return "No";
    return std::to_string(g.selected) + "/" + std::to_string(g.total);
}

// footer as rows of label + one cell per column
template <class CellFn>
std::vector<std::vector<std::string>> footer_rows(const RegressionTable& t, CellFn ic_fmt) {
    std::vector<std::vector<std::string>> rows;
    auto add = [&](const std::string& label, auto fn) {
        std::vector<std::string> r = {label};
        for (const auto& c : t.cols) r.push_back(fn(c));
        rows.push_back(std::move(r));
    };
    add("Estimator", [](const TableColumn& c) { return c.estimator; });
    add("Airport-Pair Clusters",
        [](const TableColumn& c) { return thousands(c.n_clusters); });
    if (!t.cols.empty())
        for (size_t g = 0; g < t.cols.front().groups.size(); ++g)
            add(t.cols.front().groups[g].name,
                [g](const TableColumn& c) { return group_cell(c.groups[g]); });
    add("AIC", [&](const TableColumn& c) { return ic_fmt(c, c.aic); });
    add("BIC", [&](const TableColumn& c) { return ic_fmt(c, c.bic); });
    add("Adj R2", [](const TableColumn& c) { return format_fixed(c.adj_r2, 4); });
    add("RMSE", [](const TableColumn& c) { return format_fixed(c.rmse, 4); });
    add("Nr Observations", [](const TableColumn& c) { return thousands(c.n_obs); });
    return rows;
}

}  // namespace study_detail

inline std::string render_text(const RegressionTable& t) {
    using namespace study_detail;
    std::vector<std::vector<std::string>> grid;
    {
        std::vector<std::string> head = {""};
        for (const auto& c : t.cols) head.push_back(c.label);
        grid.push_back(std::move(head));
    }
    for (const auto& row : t.rows) {
        std::vector<std::string> r = {row};
        for (const auto& c : t.cols) {
            auto it = c.cells.find(row);
            r.push_back(it == c.cells.end() ? "" : coef_cell(it->second));
        }
        grid.push_back(std::move(r));
    }
    auto ic = [](const TableColumn& c, double v) {
        return c.ic_defined ? thousands(round_half_away_long(v)) : std::string("n/a");
    };
    for (auto& r : footer_rows(t, ic)) grid.push_back(std::move(r));

    std::vector<size_t> width(grid[0].size(), 0);
    for (const auto& r : grid)
        for (size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());

    std::string out;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        const auto& r = grid[gi];
        std::string line;
        for (size_t j = 0; j < r.size(); ++j) {
            if (j == 0) {
                line += r[j];
                line.append(width[j] - r[j].size(), ' ');
            } else {
                line += "  ";
                line.append(width[j] - r[j].size(), ' ');
                line += r[j];
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
        if (gi == 0 || gi == t.rows.size()) {  // rule under the header and the coefficients
            std::string rule(std::accumulate(width.begin(), width.end(), size_t{0}) +
                                 2 * (width.size() - 1),
                             '-');
            out += rule;
            out += '\n';
        }
    }
    return out;
}

inline std::string render_tsv(const RegressionTable& t) {
    using namespace study_detail;
    std::string out;
    out += "regressor";
    for (const auto& c : t.cols) {
        out += '\t';
        out += c.label;
    }
    out += '\n';
    for (const auto& row : t.rows) {
        out += row;
        for (const auto& c : t.cols) {
            out += '\t';
            auto it = c.cells.find(row);
            if (it != c.cells.end()) out += coef_cell_lossless(it->second);
        }
        out += '\n';
    }
    auto ic = [](const TableColumn& c, double v) {
        return c.ic_defined ? format_shortest(v) : std::string("n/a");
    };
    for (const auto& r : footer_rows(t, ic)) {
        for (size_t j = 0; j < r.size(); ++j) {
            if (j) out += '\t';
            out += r[j];
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json table_to_json(const RegressionTable& t) {
    nlohmann::ordered_json j;
    j["rows"] = t.rows;
    auto& cols = j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : t.cols) {
        nlohmann::ordered_json jc;
        jc["label"] = c.label;
        auto& cells = jc["cells"] = nlohmann::ordered_json::object();
        for (const auto& row : t.rows) {
            auto it = c.cells.find(row);
            if (it == c.cells.end() || !it->second.present) continue;
            cells[row] = {{"coef", it->second.coef},
                          {"se", it->second.se},
                          {"t", it->second.tstat},
                          {"p", it->second.pval}};
        }
        nlohmann::ordered_json foot;
        foot["estimator"] = c.estimator;
        foot["clusters"] = c.n_clusters;
        auto& groups = foot["groups"] = nlohmann::ordered_json::array();
        for (const auto& g : c.groups)
            groups.push_back({{"name", g.name},
                              {"present", g.present},
                              {"selected", g.selected},
                              {"total", g.total}});
        if (c.ic_defined) {
            foot["aic"] = c.aic;
            foot["bic"] = c.bic;
        } else {
            foot["aic"] = nullptr;
            foot["bic"] = nullptr;
        }
        foot["adj_r2"] = c.adj_r2;
        foot["rmse"] = c.rmse;
        foot["n"] = c.n_obs;
        jc["footer"] = std::move(foot);
        cols.push_back(std::move(jc));
    }
    return j;
}

inline RegressionTable table_from_json(const nlohmann::json& j) {
    RegressionTable t;
    t.rows = j.at("rows").get<std::vector<std::string>>();
    for (const auto& jc : j.at("columns")) {
        TableColumn c;
        c.label = jc.at("label").get<std::string>();
        for (const auto& [name, cell] : jc.at("cells").items()) {
            TableCell tc;
            tc.present = true;
            tc.coef = cell.at("coef").get<double>();
            tc.se = cell.at("se").get<double>();
            tc.tstat = cell.at("t").get<double>();
            tc.pval = cell.at("p").get<double>();
            c.cells[name] = tc;
        }
        const auto& foot = jc.at("footer");
        c.estimator = foot.at("estimator").get<std::string>();
        c.n_clusters = foot.at("clusters").get<long>();
        for (const auto& g : foot.at("groups")) {
            FooterGroup fg;
            fg.name = g.at("name").get<std::string>();
            fg.present = g.at("present").get<bool>();
            fg.selected = g.at("selected").get<long>();
            fg.total = g.at("total").get<long>();
            c.groups.push_back(std::move(fg));
        }
        c.ic_defined = !foot.at("aic").is_null();
        c.aic = c.ic_defined ? foot.at("aic").get<double>() : std::nan("");
        c.bic = c.ic_defined ? foot.at("bic").get<double>() : std::nan("");
        c.adj_r2 = foot.at("adj_r2").get<double>();
        c.rmse = foot.at("rmse").get<double>();
        c.n_obs = foot.at("n").get<long>();
        t.cols.push_back(std::move(c));
    }
    return t;
}

inline std::string render_table(const RegressionTable& t, const std::string& format) {
    if (format == "text") return render_text(t);
    if (format == "tsv") return render_tsv(t);
    if (format == "json") return table_to_json(t).dump(2) + "\n";
    throw DataError("unknown table format '" + format + "' (expected text, tsv, or json)");
}

// --- recovery check against a truth sidecar -----------------------------------

struct CheckRow {
    std::string name;
    double truth = 0, est = 0, se = 0, z = 0;
    bool ok = false;
};

struct TruthCheck {
    std::vector<CheckRow> rows;
    bool all_ok = true;
    double z_limit = 3.0;
};

inline TruthCheck check_against_truth(const PdsResult& res,
                                      const std::map<std::string, double>& truth,
                                      double z_limit = 3.0) {
    TruthCheck out;
    out.z_limit = z_limit;
    for (const auto& pi : res.interest) {
        auto it = truth.find(pi.name);
        if (it == truth.end()) continue;
        CheckRow r;
        r.name = pi.name;
        r.truth = it->second;
        r.est = pi.coef;
        r.se = pi.se;
        if (!(pi.se > 0)) throw EstimationError("no usable standard error for '" + pi.name + "'");
        r.z = (pi.coef - it->second) / pi.se;
        r.ok = std::abs(r.z) < z_limit;
        out.all_ok = out.all_ok && r.ok;
        out.rows.push_back(std::move(r));
    }
    if (out.rows.empty()) throw DataError("truth file shares no coefficient names with the fit");
    return out;
}

}  // namespace cabinfare
