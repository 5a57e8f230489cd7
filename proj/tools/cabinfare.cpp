// cabinfare: seat-map analysis, synthetic market generation, and the
// fare-estimation pipeline behind a single executable.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 estimation failure.
// Options resolve as: command line > --config file > CABINFARE_<KEY> env.
#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cabinfare/seatmap.hpp"
#include "cabinfare/study.hpp"
#include "cabinfare/synth.hpp"

using namespace cabinfare;

namespace {

namespace fs = std::filesystem;

// command-line misuse that CLI11 cannot see itself (exit 1, like its own errors)
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- option resolution --------------------------------------------------------

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s{trim(line)};
        if (s.empty() || s[0] == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string::npos || trim(s.substr(0, eq)).empty())
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        out[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
    }
    return out;
}

struct Overrides {
    std::map<std::string, std::string> file;

    std::optional<std::string> lookup(const std::string& key) const {
        if (auto it = file.find(key); it != file.end()) return it->second;
        std::string env = "CABINFARE_";
        for (char c : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(env.c_str()); v && *v) return std::string(v);
        return std::nullopt;
    }
};

Overrides overrides_for(const std::string& config_path) {
    Overrides ov;
    if (!config_path.empty()) ov.file = read_config_file(config_path);
    return ov;
}

// flags win; the config file and environment only fill what was not given
void fill_string(const CLI::App& cmd, const Overrides& ov, const std::string& flag,
                 const std::string& key, std::string& slot) {
    if (cmd.count(flag) > 0) return;
    if (auto v = ov.lookup(key)) slot = *v;
}

long parsed_long(const std::string& key, const std::string& text) {
    auto v = parse_long(text);
    if (!v) throw UsageError("option '" + key + "': expected an integer, got '" + text + "'");
    return *v;
}

double parsed_double(const std::string& key, const std::string& text) {
    auto v = parse_double(text);
    if (!v) throw UsageError("option '" + key + "': expected a number, got '" + text + "'");
    return *v;
}

void fill_long(const CLI::App& cmd, const Overrides& ov, const std::string& flag,
               const std::string& key, long& slot) {
    if (cmd.count(flag) > 0) return;
    if (auto v = ov.lookup(key)) slot = parsed_long(key, *v);
}

void fill_double(const CLI::App& cmd, const Overrides& ov, const std::string& flag,
                 const std::string& key, double& slot) {
    if (cmd.count(flag) > 0) return;
    if (auto v = ov.lookup(key)) slot = parsed_double(key, *v);
}

// generator knobs carry no dedicated flags; they come from the file or environment
void apply_market_overrides(MarketConfig& cfg, const Overrides& ov) {
    const std::pair<const char*, long*> longs[] = {
        {"n_routes", &cfg.n_routes},   {"flights_per_route", &cfg.flights_per_route},
        {"n_dates", &cfg.n_dates},     {"n_airports", &cfg.n_airports},
        {"n_hubs", &cfg.n_hubs},       {"adv_cap", &cfg.adv_cap}};
    for (const auto& [key, slot] : longs)
        if (auto v = ov.lookup(key)) *slot = parsed_long(key, *v);

    const std::pair<const char*, double*> doubles[] = {
        {"demand_mean", &cfg.demand_mean},
        {"demand_sigma", &cfg.demand_sigma},
        {"business_share", &cfg.business_share},
        {"slope", &cfg.slope},
        {"sigma", &cfg.sigma},
        {"survey_rate", &cfg.survey_rate},
        {"eta_sigma", &cfg.eta_sigma},
        {"middle_affinity", &cfg.middle_affinity},
        {"fill_speed_sigma", &cfg.fill_speed_sigma},
        {"pref_aisle", &cfg.pref_aisle},
        {"pref_window", &cfg.pref_window},
        {"pref_middle", &cfg.pref_middle},
        {"sigma_date", &cfg.sigma_date},
        {"hour_amp", &cfg.hour_amp},
        {"sigma_airport", &cfg.sigma_airport},
        {"sigma_profile", &cfg.sigma_profile},
        {"fuel_base", &cfg.fuel_base},
        {"fuel_sigma", &cfg.fuel_sigma},
        {"fuel_route_sigma", &cfg.fuel_route_sigma},
        {"theta0", &cfg.theta.theta0},
        {"theta_dist", &cfg.theta.dist},
        {"theta_bsn", &cfg.theta.bsn},
        {"theta_fltime", &cfg.theta.fltime},
        {"theta_shipment", &cfg.theta.shipment},
        {"theta_revpax", &cfg.theta.revpax},
        {"theta_fuelp", &cfg.theta.fuelp},
        {"theta_hub", &cfg.theta.hub},
        {"theta_seatsh", &cfg.theta.seatsh},
        {"theta_rhhi", &cfg.theta.rhhi},
        {"theta_ipitch", &cfg.theta.ipitch},
        {"theta_middle", &cfg.theta.middle}};
    for (const auto& [key, slot] : doubles)
        if (auto v = ov.lookup(key)) *slot = parsed_double(key, *v);
}

AdvBuckets buckets_from(const Overrides& ov) {
    AdvBuckets b;
    if (auto v = ov.lookup("adv_w1")) b.w1 = parsed_long("adv_w1", *v);
    if (auto v = ov.lookup("adv_w2")) b.w2 = parsed_long("adv_w2", *v);
    if (auto v = ov.lookup("adv_w3")) b.w3 = parsed_long("adv_w3", *v);
    if (!(b.w1 >= 1 && b.w1 < b.w2 && b.w2 < b.w3))
        throw UsageError("ADV buckets must satisfy 1 <= adv_w1 < adv_w2 < adv_w3");
    return b;
}

// --- shared loading -------------------------------------------------------------

std::vector<PoolEntry> pool_from_dir(const std::string& dir, const std::string& refs) {
    std::vector<std::string> paths;
    try {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".smap") paths.push_back(entry.path().string());
    } catch (const fs::filesystem_error& e) {
        throw DataError(std::string("cannot read seat-map directory: ") + e.what());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw DataError(dir + ": no .smap files found");
    if (!refs.empty()) return load_pool(paths, refs);
    std::vector<PoolEntry> pool;
    for (const auto& p : paths) {
        PoolEntry e;
        e.map = parse_seatmap_file(p);
        e.id = fs::path(p).stem().string();
        pool.push_back(std::move(e));
    }
    return pool;
}

SeatMap load_map(const std::string& path, const std::string& refs) {
    SeatMap m = parse_seatmap_file(path);
    if (!refs.empty()) apply_refmax(m, load_refmax_csv(refs));
    return m;
}

void write_or_print(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write output file: " + out_path);
    out << text;
}

// right-justified grid with a left-justified label column
std::string render_grid(const std::vector<std::vector<std::string>>& grid) {
    std::vector<size_t> width(grid.at(0).size(), 0);
    for (const auto& r : grid)
        for (size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
    std::string out;
    for (const auto& r : grid) {
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
    }
    return out;
}

// --- cabin subcommands ----------------------------------------------------------

int cmd_cabin_parse(const std::string& path) {
    SeatMap m = parse_seatmap_file(path);

    std::string letters;
    for (size_t i = 0; i < m.letters.size(); ++i) {
        if (i) letters += ' ';
        letters += m.letters[i];
        if (std::find(m.aisles_after.begin(), m.aisles_after.end(), static_cast<int>(i)) !=
            m.aisles_after.end())
            letters += " |";
    }

    std::string comfort_rows, exit_rows;
    for (int r : m.comfort_row_labels()) comfort_rows += (comfort_rows.empty() ? "" : " ") + std::to_string(r);
    for (const auto& r : m.rows)
        if (r.exit) exit_rows += (exit_rows.empty() ? "" : " ") + std::to_string(r.label);

    auto kv = [](const std::string& k, const std::string& v) {
        std::string line = k + ":";
        line.append(line.size() < 16 ? 16 - line.size() : 1, ' ');
        return line + v + "\n";
    };
    std::string out;
    out += kv("aircraft", m.aircraft);
    out += kv("airline", m.airline);
    out += kv("letters", letters);
    out += kv("rows", std::to_string(m.seat_bearing_rows()) + " seat-bearing, last row " +
                          std::to_string(m.last_seat_row()));
    out += kv("seats", std::to_string(m.seat_count()));
    out += kv("comfort seats", m.has_comfort_rows()
                                   ? std::to_string(m.comfort_seat_count()) + " (rows " + comfort_rows + ")"
                                   : "none");
    out += kv("exit rows", exit_rows.empty() ? "none" : exit_rows);
    out += kv("pitch", format_shortest(m.default_pitch_in) + " in default" +
                           (m.pitch_plus_in > 0
                                ? ", " + format_shortest(m.pitch_plus_in) + " in comfort"
                                : ""));
    out += kv("refmax", m.refmax_rows > 0
                            ? std::to_string(m.refmax_rows) + " rows at " +
                                  format_shortest(m.refmax_pitch_in) + " in"
                            : "not set");
    std::cout << out;
    return 0;
}

int cmd_cabin_indexes(const std::string& path, const std::string& refs) {
    SeatMap m = load_map(path, refs);
    DensityReport rep = density_report(m);
    std::cout << "seats:              " << m.seat_count() << "\n"
              << "irowdens:           " << format_shortest(rep.irowdens) << "\n"
              << "ipitch:             " << format_shortest(rep.ipitch) << "\n"
              << "ipitch (weighted):  " << format_shortest(rep.ipitch_seat_weighted) << "\n";
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_cabin_dispersion(const std::string& path) {
    DispersionTable t = load_dispersion_csv(path);
    std::vector<std::vector<std::string>> grid;
    {
        std::vector<std::string> head = {"row"};
        for (char l : t.letters) head.emplace_back(1, l);
        head.emplace_back("total");
        grid.push_back(std::move(head));
    }
    for (size_t i = 0; i < t.rows.size(); ++i) {
        std::vector<std::string> r = {std::to_string(t.rows[i])};
        for (size_t j = 0; j < t.letters.size(); ++j) r.push_back(std::to_string(t.counts[i][j]));
        r.push_back(std::to_string(t.row_totals[i]));
        grid.push_back(std::move(r));
    }
    {
        std::vector<std::string> r = {"total"};
        for (long v : t.letter_totals) r.push_back(std::to_string(v));
        r.push_back(std::to_string(t.grand_total));
        grid.push_back(std::move(r));
        std::vector<std::string> s = {"share%"};
        for (size_t j = 0; j < t.letters.size(); ++j)
            s.push_back(std::to_string(t.letter_share_pct(j)));
        s.push_back("100");
        grid.push_back(std::move(s));
    }
    std::cout << render_grid(grid);
    return 0;
}

int cmd_cabin_capacity(const std::string& zones) {
    std::cout << capacity_from_zones(parse_zones(zones)) << "\n";
    return 0;
}

// --- synth / estimate -------------------------------------------------------------

int cmd_synth_gen(MarketConfig cfg, const std::string& maps, const std::string& refs,
                  const std::string& out_path) {
    cfg.pool = pool_from_dir(maps, refs);
    SynthOutput out = gen_market(cfg);
    emit_dataset(out, out_path);
    std::cout << "wrote " << out_path << " (" << out.passengers.size() << " rows)\n"
              << "wrote " << truth_sidecar_path(out_path) << "\n"
              << "flights " << out.flights.size() << ", seated " << out.total_seated
              << ", spilled " << out.total_spilled << "\n";
    return 0;
}

std::pair<int, int> parse_spec_range(const std::string& s, int max_cols) {
    auto fail = [&]() -> std::pair<int, int> {
        throw UsageError("--spec expects N or A..B within 1.." + std::to_string(max_cols) +
                         ", got '" + s + "'");
    };
    long a = 0, b = 0;
    auto dots = s.find("..");
    if (dots == std::string::npos) {
        auto v = parse_long(trim(s));
        if (!v) return fail();
        a = b = *v;
    } else {
        auto lo = parse_long(trim(s.substr(0, dots)));
        auto hi = parse_long(trim(s.substr(dots + 2)));
        if (!lo || !hi) return fail();
        a = *lo;
        b = *hi;
    }
    if (a < 1 || b > max_cols || a > b) return fail();
    return {static_cast<int>(a), static_cast<int>(b)};
}

StudyVariables load_study(const std::string& data, const std::string& maps,
                          const std::string& refs, const AdvBuckets& buckets,
                          const StudyLoadOptions& opts) {
    auto pool = pool_from_dir(maps, refs);
    StudyTable t = load_study_file(data, opts);
    if (!t.rejects.empty()) {
        std::cerr << "note: rejected " << t.rejects.size() << " of " << t.n_input << " rows\n";
        for (size_t i = 0; i < std::min<size_t>(t.rejects.size(), 5); ++i)
            std::cerr << "  " << t.rejects[i] << "\n";
    }
    return build_variables(t, pool, buckets);
}

int cmd_estimate(const std::string& data, const std::string& maps, const std::string& refs,
                 const std::string& spec, const std::string& format, const std::string& out_path,
                 const AdvBuckets& buckets, const StudyLoadOptions& opts) {
    auto ladder = default_ladder();
    auto [lo, hi] = parse_spec_range(spec, static_cast<int>(ladder.size()));
    std::vector<LadderColumn> slice(ladder.begin() + lo - 1, ladder.begin() + hi);
    StudyVariables sv = load_study(data, maps, refs, buckets, opts);
    RegressionTable table = run_ladder(sv, slice);
    write_or_print(out_path, render_table(table, format));
    return 0;
}

std::map<std::string, double> load_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open truth file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        return j.at("theta").get<std::map<std::string, double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

int cmd_estimate_check(const std::string& data, const std::string& maps, const std::string& refs,
                       const std::string& truth_path, double z_limit, const AdvBuckets& buckets,
                       const StudyLoadOptions& opts) {
    std::map<std::string, double> truth = load_truth(truth_path);
    StudyVariables sv = load_study(data, maps, refs, buckets, opts);
    PdsResult res = run_column(sv, default_ladder().back());
    TruthCheck check = check_against_truth(res, truth, z_limit);

    std::vector<std::vector<std::string>> grid = {{"coefficient", "truth", "estimate", "se", "z", ""}};
    for (const auto& r : check.rows)
        grid.push_back({r.name, format_fixed(r.truth, 4), format_fixed(r.est, 4),
                        format_fixed(r.se, 4), format_fixed(r.z, 2), r.ok ? "ok" : "DEVIANT"});
    std::cout << render_grid(grid);

    long deviant = 0;
    for (const auto& r : check.rows)
        if (!r.ok) ++deviant;
    if (check.all_ok) {
        std::cout << "all " << check.rows.size() << " coefficients within |z| < "
                  << format_shortest(z_limit) << "\n";
        return 0;
    }
    std::cout << deviant << " of " << check.rows.size() << " coefficients deviate at |z| >= "
              << format_shortest(z_limit) << "\n";
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cabinfare: seat-map analysis and airfare estimation"};
    app.require_subcommand(1);
    app.footer("Any long option can also come from a --config file of 'key = value' lines\n"
               "or a CABINFARE_<KEY> environment variable; flags beat the file, the file\n"
               "beats the environment.");

    // cabin ---------------------------------------------------------------
    CLI::App* cabin = app.add_subcommand("cabin", "seat-map utilities");
    cabin->require_subcommand(1);

    std::string parse_path;
    CLI::App* c_parse = cabin->add_subcommand("parse", "parse a .smap file and summarize it");
    c_parse->add_option("file", parse_path, "seat-map (.smap) file")->required();

    std::string idx_path, idx_refs, idx_config;
    CLI::App* c_idx = cabin->add_subcommand("indexes", "print the density indexes of a seat map");
    c_idx->add_option("file", idx_path, "seat-map (.smap) file")->required();
    c_idx->add_option("--refs", idx_refs, "reference-maximum CSV (model,refmax_rows,refmax_pitch_in)");
    c_idx->add_option("--config", idx_config, "key = value option file");

    std::string disp_path;
    CLI::App* c_disp = cabin->add_subcommand("dispersion", "tabulate passengers by seat row and letter");
    c_disp->add_option("file", disp_path, "CSV with header row,letter,count")->required();

    std::string cap_zones, cap_config;
    CLI::App* c_cap = cabin->add_subcommand("capacity", "seat capacity of a zoned cabin layout");
    c_cap->add_option("--zones", cap_zones, "zones as PxRxA[,PxRxA...], e.g. \"34x7x6,31x23x6\"");
    c_cap->add_option("--config", cap_config, "key = value option file");

    // synth ---------------------------------------------------------------
    CLI::App* synth = app.add_subcommand("synth", "synthetic market generation");
    synth->require_subcommand(1);

    std::string gen_config, gen_maps, gen_refs, gen_out;
    long gen_seed = 0;
    CLI::App* s_gen = synth->add_subcommand("gen", "generate a synthetic survey dataset");
    s_gen->add_option("--seed", gen_seed, "generator seed");
    s_gen->add_option("--maps", gen_maps, "directory of .smap files (the aircraft pool)");
    s_gen->add_option("--refs", gen_refs, "reference-maximum CSV applied to the pool");
    s_gen->add_option("--out", gen_out, "output CSV path (a .truth.json sidecar is written next to it)");
    s_gen->add_option("--config", gen_config, "key = value option file (generator knobs live here)");

    // estimate ------------------------------------------------------------
    std::string est_config, est_data, est_maps, est_refs, est_spec, est_format, est_out;
    CLI::App* estimate = app.add_subcommand("estimate", "run the specification ladder on a survey CSV");
    estimate->require_subcommand(0, 1);
    estimate->add_option("--data", est_data, "survey CSV");
    estimate->add_option("--maps", est_maps, "directory of .smap files");
    estimate->add_option("--refs", est_refs, "reference-maximum CSV applied to the pool");
    estimate->add_option("--spec", est_spec, "ladder columns to run: N or A..B (default 1..8)");
    estimate->add_option("--format", est_format, "output format: text, tsv, or json (default text)");
    estimate->add_option("--out", est_out, "write the table here instead of stdout");
    estimate->add_option("--config", est_config, "key = value option file");

    std::string chk_config, chk_data, chk_maps, chk_refs, chk_truth;
    double chk_zlimit = 0.0;
    CLI::App* check = estimate->add_subcommand(
        "check", "re-estimate a synthetic dataset and compare against its truth sidecar");
    check->add_option("--data", chk_data, "survey CSV");
    check->add_option("--maps", chk_maps, "directory of .smap files");
    check->add_option("--refs", chk_refs, "reference-maximum CSV applied to the pool");
    check->add_option("--truth", chk_truth, "truth sidecar (default: <data>.truth.json)");
    check->add_option("--zlimit", chk_zlimit, "per-coefficient |z| acceptance bound (default 3)");
    check->add_option("--config", chk_config, "key = value option file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (c_parse->parsed()) return cmd_cabin_parse(parse_path);

        if (c_idx->parsed()) {
            Overrides ov = overrides_for(idx_config);
            fill_string(*c_idx, ov, "--refs", "refs", idx_refs);
            return cmd_cabin_indexes(idx_path, idx_refs);
        }

        if (c_disp->parsed()) return cmd_cabin_dispersion(disp_path);

        if (c_cap->parsed()) {
            Overrides ov = overrides_for(cap_config);
            fill_string(*c_cap, ov, "--zones", "zones", cap_zones);
            if (cap_zones.empty()) throw UsageError("missing --zones (or config key 'zones')");
            return cmd_cabin_capacity(cap_zones);
        }

        if (s_gen->parsed()) {
            Overrides ov = overrides_for(gen_config);
            fill_string(*s_gen, ov, "--maps", "maps", gen_maps);
            fill_string(*s_gen, ov, "--refs", "refs", gen_refs);
            fill_string(*s_gen, ov, "--out", "out", gen_out);
            if (gen_maps.empty()) throw UsageError("missing --maps (or config key 'maps')");
            if (gen_out.empty()) throw UsageError("missing --out (or config key 'out')");
            MarketConfig cfg;
            apply_market_overrides(cfg, ov);
            long seed = static_cast<long>(cfg.seed);
            fill_long(*s_gen, ov, "--seed", "seed", seed);
            if (s_gen->count("--seed") > 0) seed = gen_seed;
            if (seed < 0) throw UsageError("--seed must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(seed);
            return cmd_synth_gen(std::move(cfg), gen_maps, gen_refs, gen_out);
        }

        if (check->parsed()) {
            Overrides ov = overrides_for(chk_config);
            fill_string(*check, ov, "--data", "data", chk_data);
            fill_string(*check, ov, "--maps", "maps", chk_maps);
            fill_string(*check, ov, "--refs", "refs", chk_refs);
            fill_string(*check, ov, "--truth", "truth", chk_truth);
            if (chk_data.empty()) throw UsageError("missing --data (or config key 'data')");
            if (chk_maps.empty()) throw UsageError("missing --maps (or config key 'maps')");
            if (chk_truth.empty()) chk_truth = truth_sidecar_path(chk_data);
            double zlimit = 3.0;
            fill_double(*check, ov, "--zlimit", "zlimit", zlimit);
            if (check->count("--zlimit") > 0) zlimit = chk_zlimit;
            if (!(zlimit > 0)) throw UsageError("--zlimit must be positive");
            return cmd_estimate_check(chk_data, chk_maps, chk_refs, chk_truth, zlimit,
                                      buckets_from(ov), StudyLoadOptions{});
        }

        if (estimate->parsed()) {
            Overrides ov = overrides_for(est_config);
            fill_string(*estimate, ov, "--data", "data", est_data);
            fill_string(*estimate, ov, "--maps", "maps", est_maps);
            fill_string(*estimate, ov, "--refs", "refs", est_refs);
            fill_string(*estimate, ov, "--spec", "spec", est_spec);
            fill_string(*estimate, ov, "--format", "format", est_format);
            fill_string(*estimate, ov, "--out", "out", est_out);
            if (est_data.empty()) throw UsageError("missing --data (or config key 'data')");
            if (est_maps.empty()) throw UsageError("missing --maps (or config key 'maps')");
            if (est_spec.empty()) est_spec = "1..8";
            if (est_format.empty()) est_format = "text";
            return cmd_estimate(est_data, est_maps, est_refs, est_spec, est_format, est_out,
                                buckets_from(ov), StudyLoadOptions{});
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
