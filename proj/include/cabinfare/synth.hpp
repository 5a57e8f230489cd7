#pragma once

// Seeded synthetic fare market. A known-parameter log-linear pricing process
// runs over simulated routes/flights built from the bundled seat maps; seats
// are assigned by a no-fee preference mechanism, so seat position never enters
// the structural price equation (unless middle_effect is set) yet correlates
// with price through purchase timing. Every random draw comes from a stream
// keyed by (seed, role, indices): output is independent of evaluation order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabinfare/errors.hpp"
#include "cabinfare/rng.hpp"
#include "cabinfare/seatmap.hpp"
#include "cabinfare/util.hpp"

namespace cabinfare {

// Structural coefficients of the price process (applied to logs except the
// 0/1 regressors). These are the recoverable ground truth.
struct ThetaTrue {
    double theta0 = -1.65;    // level
    double dist = 0.35;       // log route distance (km)
    double bsn = 0.38;        // business-purpose flag
    double fltime = 0.10;     // log flight time (min)
    double shipment = 0.03;   // log cargo shipment (kg)
    double revpax = -0.18;    // log route daily revenue passengers
    double fuelp = 0.65;      // log fuel price
    double hub = 0.15;        // hub-endpoint flag
    double seatsh = 0.06;     // log carrier seat share (x100)
    double rhhi = 0.12;       // log route Herfindahl
    double ipitch = 1.10;     // log pitch index of the operating aircraft
    double middle = 0.0;      // structural middle-seat term (default: none)
};

struct PoolEntry {
    std::string id;  // seat-map identifier (file stem)
    SeatMap map;
};

struct MarketConfig {
    std::uint64_t seed = 20260815;
    long n_routes = 180;
    long flights_per_route = 4;
    long n_dates = 130;        // survey dates
    long n_airports = 55;
    long n_hubs = 5;           // first airports act as hubs
    double demand_mean = 0.88; // mean demand as a fraction of capacity
    double demand_sigma = 0.25;
    double business_share = 0.30;
    double slope = 1.20;       // price ramp per unit of load at purchase time
    double sigma = 0.65;       // idiosyncratic log-price noise
    double survey_rate = 0.175;// probability a seated passenger is interviewed
    double eta_sigma = 0.22;   // willingness-to-pay heterogeneity (enters price)
    double middle_affinity = 2.4;  // WTP tilt away from ranking middle first
    double fill_speed_sigma = 0.8; // per-flight spread of the booking-curve timing
    double pref_aisle = 0.46, pref_window = 0.46, pref_middle = 0.08;
    double sigma_date = 0.08;     // survey-date price effects (Laplace scale)
    double hour_amp = 0.08;       // departure-hour price curve amplitude
    double sigma_airport = 0.05;  // per-airport price effects
    double sigma_profile = 0.05;  // per-passenger-profile price effects
    double fuel_base = 2.2, fuel_sigma = 0.15, fuel_route_sigma = 0.05;
    long adv_cap = 90;         // advance-purchase ceiling, days
    ThetaTrue theta;
    std::vector<PoolEntry> pool;

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (pool.empty()) throw DataError("market config: seat-map pool is empty");
        if (!prob(business_share) || !prob(survey_rate))
            throw DataError("market config: probabilities must lie in [0,1]");
        if (!(sigma > 0.0)) throw DataError("market config: sigma must be positive");
        if (n_routes < 1 || flights_per_route < 1 || n_dates < 1 || n_hubs < 0 ||
            n_airports < 2 || n_hubs > n_airports)
            throw DataError("market config: invalid counts");
        if (!(pref_aisle > 0 && pref_window > 0 && pref_middle > 0))
            throw DataError("market config: preference weights must be positive");
        if (!(demand_mean > 0) || !(demand_sigma >= 0))
            throw DataError("market config: invalid demand parameters");
        if (adv_cap < 1) throw DataError("market config: adv_cap must be >= 1");
    }
};

struct RouteSim {
    std::string origin, dest, id;
    double dist_km = 0, fltime_min = 0, revpax = 0;
    int hub = 0;
    std::vector<std::string> carriers;
};

struct FlightSim {
    long route = 0;
    long pool_index = 0;
    std::string carrier;
    long date = 0;
    int hour = 0;
    double shipment_kg = 0, fuelp = 0, seatsh = 0, rhhi = 0;
    long seats = 0, demand = 0, seated = 0, spilled = 0;
    double lf = 0, fill_speed = 1.0;
};

// One surveyed passenger (an emitted dataset row); diagnostic fields that are
// not part of the schema stay here for tests.
struct PassengerDraw {
    long flight = 0;
    long adv_days = 0;
    int bsn = 0;
    int row = 0;
    std::string letter;
    std::string profile;
    double price = 0;
    double load_at_purchase = 0;  // diagnostic
    Lateral lateral = Lateral::Window;  // diagnostic
};

struct SynthOutput {
    MarketConfig cfg;
    std::vector<RouteSim> routes;
    std::vector<FlightSim> flights;
    std::vector<PassengerDraw> passengers;
    long total_seated = 0, total_spilled = 0;
};

namespace synth_detail {

// stream roles
enum : std::uint64_t {
    kRoute = 1,
    kFlight = 2,
    kPax = 3,
    kDateEffect = 4,
    kAirportEffect = 5,
    kProfileEffect = 6,
    kFuelDate = 7,
    kFuelRoute = 8,
};

// departure-hour sampling weights (business-peaked) and the derived price curve
inline const std::array<double, 24>& hour_weights() {
    static const std::array<double, 24> w = {1, 1, 1, 1, 2, 4, 8, 10, 9, 6, 5, 4,
                                             4, 4, 5, 5, 6, 9, 10, 8, 5, 3, 2, 1};
    return w;
}

inline double hour_price_curve(int h) {
    const auto& w = hour_weights();
    return w[h] / 10.0 - 0.5;  // in [-0.4, 0.5], zero-ish mean
}

struct SeatInventory {
    std::vector<std::pair<int, int>> by_class[3];  // (row, letter index) per Lateral
};

inline SeatInventory build_inventory(const SeatMap& m) {
    SeatInventory inv;
    for (const auto& r : m.rows)
        for (size_t li = 0; li < r.cells.size(); ++li) {
            if (r.cells[li] == CellState::Absent) continue;
            Lateral lat = lateral_of(m, static_cast<int>(li));
            inv.by_class[static_cast<int>(lat)].emplace_back(r.label, static_cast<int>(li));
        }
    return inv;
}

inline int sample_class(KeyedRng& rng, double wa, double ww, double wm) {
    // first pick of a Plackett-Luce ranking over {Window, Middle, Aisle}
    double w[3] = {ww, wm, wa};  // indexed by Lateral order
    double total = w[0] + w[1] + w[2];
    double u = rng.next_double() * total;
    if (u < w[0]) return 0;
    if (u < w[0] + w[1]) return 1;
    return 2;
}

}  // namespace synth_detail

inline SynthOutput gen_market(const MarketConfig& cfg) {
    using namespace synth_detail;
    cfg.validate();

    SynthOutput out;
    out.cfg = cfg;
    const std::uint64_t seed = cfg.seed;

    // carriers = distinct airlines present in the pool, with their map indices
    std::map<std::string, std::vector<long>> maps_by_airline;
    for (size_t i = 0; i < cfg.pool.size(); ++i)
        maps_by_airline[cfg.pool[i].map.airline].push_back(static_cast<long>(i));
    std::vector<std::string> airlines;
    for (const auto& [name, _] : maps_by_airline) airlines.push_back(name);

    std::vector<double> log_ipitch(cfg.pool.size());
    std::vector<SeatInventory> inventories(cfg.pool.size());
    for (size_t i = 0; i < cfg.pool.size(); ++i) {
        double ip = ipitch(cfg.pool[i].map);
        if (!(ip > 0)) throw DataError("seat map '" + cfg.pool[i].id + "': pitch index not positive");
        log_ipitch[i] = std::log(ip);
        inventories[i] = build_inventory(cfg.pool[i].map);
    }

    auto airport_name = [](long a) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "apt%02d", static_cast<int>(a) + 1);
        return std::string(buf);
    };
    auto airport_effect = [&](long a) {
        KeyedRng r(mix_key({seed, kAirportEffect, static_cast<std::uint64_t>(a)}));
        return r.next_laplace(cfg.sigma_airport);
    };
    auto date_effect = [&](long d) {
        KeyedRng r(mix_key({seed, kDateEffect, static_cast<std::uint64_t>(d)}));
        return r.next_laplace(cfg.sigma_date);
    };
    auto fuel_of_date = [&](long d) {
        KeyedRng r(mix_key({seed, kFuelDate, static_cast<std::uint64_t>(d)}));
        return cfg.fuel_base * std::exp(cfg.fuel_sigma * r.next_normal());
    };

    // routes
    out.routes.resize(cfg.n_routes);
    std::vector<double> route_fuel_uplift(cfg.n_routes);
    std::vector<long> route_origin(cfg.n_routes), route_dest(cfg.n_routes);
    for (long r = 0; r < cfg.n_routes; ++r) {
        KeyedRng rng(mix_key({seed, kRoute, static_cast<std::uint64_t>(r)}));
        RouteSim& rt = out.routes[r];
        long o = rng.next_below(cfg.n_airports);
        long d = rng.next_below(cfg.n_airports - 1);
        if (d >= o) ++d;
        route_origin[r] = o;
        route_dest[r] = d;
        rt.origin = airport_name(o);
        rt.dest = airport_name(d);
        rt.id = rt.origin + "-" + rt.dest;
        rt.hub = (o < cfg.n_hubs || d < cfg.n_hubs) ? 1 : 0;
        rt.dist_km = std::clamp(std::exp(6.3 + 0.5 * rng.next_normal()), 150.0, 4000.0);
        rt.fltime_min = 30.0 + rt.dist_km / 13.0 * std::exp(0.15 * rng.next_normal());
        rt.revpax = std::max(20.0, std::round(std::exp(5.5 + 0.6 * rng.next_normal())));
        double u = rng.next_double();
        long n_car = u < 0.25 ? 1 : (u < 0.75 ? 2 : 3);
        n_car = std::min<long>(n_car, static_cast<long>(airlines.size()));
        std::vector<long> pickable(airlines.size());
        std::iota(pickable.begin(), pickable.end(), 0);
        for (long c = 0; c < n_car; ++c) {
            long at = rng.next_below(static_cast<long>(pickable.size()));
            rt.carriers.push_back(airlines[pickable[at]]);
            pickable.erase(pickable.begin() + at);
        }
        std::sort(rt.carriers.begin(), rt.carriers.end());
        KeyedRng fr(mix_key({seed, kFuelRoute, static_cast<std::uint64_t>(r)}));
        route_fuel_uplift[r] = std::exp(cfg.fuel_route_sigma * fr.next_normal());
    }

    // flights
    const auto& hw = hour_weights();
    const double hw_total = std::accumulate(hw.begin(), hw.end(), 0.0);
    for (long r = 0; r < cfg.n_routes; ++r) {
        for (long f = 0; f < cfg.flights_per_route; ++f) {
            KeyedRng rng(
                mix_key({seed, kFlight, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(f)}));
            FlightSim fl;
            fl.route = r;
            const auto& carriers = out.routes[r].carriers;
            fl.carrier = carriers[rng.next_below(static_cast<long>(carriers.size()))];
            const auto& maps = maps_by_airline.at(fl.carrier);
            fl.pool_index = maps[rng.next_below(static_cast<long>(maps.size()))];
            fl.seats = cfg.pool[fl.pool_index].map.seat_count();
            fl.date = rng.next_below(cfg.n_dates);
            double hu = rng.next_double() * hw_total;
            int h = 0;
            for (double acc = 0.0; h < 23; ++h) {
                acc += hw[h];
                if (hu < acc) break;
            }
            fl.hour = h;
            fl.shipment_kg = std::max(1.0, std::exp(5.8 + 0.8 * rng.next_normal()));
            double mult =
                std::exp(cfg.demand_sigma * rng.next_normal() - 0.5 * cfg.demand_sigma * cfg.demand_sigma);
            fl.demand = std::max<long>(1, std::lround(fl.seats * cfg.demand_mean * mult));
            fl.fuelp = fuel_of_date(fl.date) * route_fuel_uplift[r];
            // booking-curve timing: some flights sell out early, others late,
            // independently of how full they end up
            fl.fill_speed = std::exp(cfg.fill_speed_sigma * rng.next_normal());
            out.flights.push_back(std::move(fl));
        }
    }

    // carrier seat shares per route -> SEATSH / RHHI
    {
        std::vector<std::map<std::string, long>> seats_by_carrier(cfg.n_routes);
        std::vector<long> route_seats(cfg.n_routes, 0);
        for (const auto& fl : out.flights) {
            seats_by_carrier[fl.route][fl.carrier] += fl.seats;
            route_seats[fl.route] += fl.seats;
        }
        for (auto& fl : out.flights) {
            fl.seatsh = 100.0 * seats_by_carrier[fl.route].at(fl.carrier) / route_seats[fl.route];
            double h = 0.0;
            for (const auto& [c, s] : seats_by_carrier[fl.route]) {
                double sh = static_cast<double>(s) / route_seats[fl.route];
                h += sh * sh;
            }
            fl.rhhi = h;
        }
    }

    // passengers
    struct PaxTmp {
        long adv;
        int bsn;
        double eta, eps;
        int age, income, gender, freq;
        bool surveyed;
    };
    for (size_t fi = 0; fi < out.flights.size(); ++fi) {
        FlightSim& fl = out.flights[fi];
        const RouteSim& rt = out.routes[fl.route];
        const long r = fl.route;
        const long f = static_cast<long>(fi) % cfg.flights_per_route;

        std::vector<PaxTmp> pax;
        std::vector<KeyedRng> pax_rng;
        pax.reserve(fl.demand);
        for (long k = 0; k < fl.demand; ++k) {
            KeyedRng rng(mix_key({seed, kPax, static_cast<std::uint64_t>(r),
                                  static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(k)}));
            PaxTmp p;
            p.bsn = rng.next_double() < cfg.business_share ? 1 : 0;
            double t = p.bsn ? std::exp(1.1 + 0.8 * rng.next_normal())
                             : std::exp(3.0 + 0.7 * rng.next_normal());
            p.adv = std::clamp<long>(static_cast<long>(std::ceil(t * fl.fill_speed)), 1, cfg.adv_cap);
            p.eta = cfg.eta_sigma * rng.next_normal();
            p.age = static_cast<int>(rng.next_below(8));
            p.gender = static_cast<int>(rng.next_below(2));
            p.income = static_cast<int>(std::clamp<long>(
                static_cast<long>(std::floor(1.8 * rng.next_normal() + (p.bsn ? 6.0 : 4.0))), 0, 9));
            p.freq = static_cast<int>(std::clamp<long>(
                static_cast<long>(std::floor(std::exp(0.8 * rng.next_normal() + (p.bsn ? 1.8 : 0.8)))),
                0, 13));
            p.eps = rng.next_normal();
            p.surveyed = rng.next_double() < cfg.survey_rate;
            pax.push_back(p);
            pax_rng.push_back(rng);  // continues for seat-choice draws
        }

        // purchase order: earliest buyers first (largest ADV), stable in k
        std::vector<long> order(pax.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](long a, long b) { return pax[a].adv > pax[b].adv; });

        // class inventories with swap-remove uniform picks
        SeatInventory avail = inventories[fl.pool_index];
        const SeatMap& smap = cfg.pool[fl.pool_index].map;

        const double base_terms = cfg.theta.theta0 + cfg.theta.dist * std::log(rt.dist_km) +
                                  cfg.theta.fltime * std::log(rt.fltime_min) +
                                  cfg.theta.shipment * std::log(fl.shipment_kg) +
                                  cfg.theta.revpax * std::log(rt.revpax) +
                                  cfg.theta.fuelp * std::log(fl.fuelp) + cfg.theta.hub * rt.hub +
                                  cfg.theta.seatsh * std::log(fl.seatsh) +
                                  cfg.theta.rhhi * std::log(fl.rhhi) +
                                  cfg.theta.ipitch * log_ipitch[fl.pool_index] +
                                  date_effect(fl.date) + cfg.hour_amp * hour_price_curve(fl.hour) +
                                  airport_effect(route_origin[r]) + airport_effect(route_dest[r]);

        for (long oi : order) {
            PaxTmp& p = pax[oi];
            KeyedRng& rng = pax_rng[oi];
            if (fl.seated >= fl.seats) {
                ++fl.spilled;
                continue;
            }
            const double load = static_cast<double>(fl.seated) / fl.seats;

            double wm = cfg.pref_middle * std::exp(-cfg.middle_affinity * p.eta);
            int cls = synth_detail::sample_class(rng, cfg.pref_aisle, cfg.pref_window, wm);
            // fall through the remaining ranking when the class is sold out
            if (avail.by_class[cls].empty()) {
                int alt = synth_detail::sample_class(rng, cls == 2 ? 0 : cfg.pref_aisle,
                                                     cls == 0 ? 0 : cfg.pref_window,
                                                     cls == 1 ? 0 : wm);
                cls = avail.by_class[alt].empty() ? -1 : alt;
                if (cls < 0)
                    for (int c = 0; c < 3; ++c)
                        if (!avail.by_class[c].empty()) {
                            cls = c;
                            break;
                        }
            }
            auto& seats = avail.by_class[cls];
            long pick = rng.next_below(static_cast<long>(seats.size()));
            auto [row, li] = seats[pick];
            seats[pick] = seats.back();
            seats.pop_back();

            const bool is_middle = lateral_of(smap, li) == Lateral::Middle;
            std::string profile = "a" + std::to_string(p.age) + "_i" + std::to_string(p.income) +
                                  "_g" + (p.gender ? "M" : "F") + "_f" + std::to_string(p.freq);
            KeyedRng prof_rng(mix_key({seed, kProfileEffect, hash_str(profile)}));
            const double profile_eff = prof_rng.next_laplace(cfg.sigma_profile);

            double lnp = base_terms + cfg.theta.bsn * p.bsn + cfg.slope * load + profile_eff +
                         p.eta + cfg.theta.middle * (is_middle ? 1.0 : 0.0) + cfg.sigma * p.eps;

            ++fl.seated;
            if (p.surveyed) {
                PassengerDraw d;
                d.flight = static_cast<long>(fi);
                d.adv_days = p.adv;
                d.bsn = p.bsn;
                d.row = row;
                d.letter = std::string(1, smap.letters[li]);
                d.profile = std::move(profile);
                d.price = std::exp(lnp);
                d.load_at_purchase = load;
                d.lateral = lateral_of(smap, li);
                out.passengers.push_back(std::move(d));
            }
        }
        fl.lf = static_cast<double>(fl.seated) / fl.seats;
        out.total_seated += fl.seated;
        out.total_spilled += fl.spilled;
    }
    return out;
}

// --- emission ---------------------------------------------------------------

inline std::string truth_sidecar_path(const std::string& csv_path) {
    std::string p = csv_path;
    if (p.size() >= 4 && p.substr(p.size() - 4) == ".csv") p.resize(p.size() - 4);
    return p + ".truth.json";
}

// The sidecar's "theta" block lists only coefficients an estimator can be
// held to: structural parameters whose regressors are exogenous to the
// purchase-timing mechanism. BSN, ADV, LF and the MIDDLE terms are reduced-form
// in any fit on emitted data (business travellers buy late and late purchases
// carry the load premium), so they are recorded under "structural" instead.
inline nlohmann::ordered_json true_params_json(const SynthOutput& out) {
    const ThetaTrue& t = out.cfg.theta;
    nlohmann::ordered_json theta;
    theta["DIST"] = t.dist;
    theta["FLTIME"] = t.fltime;
    theta["SHIPMENT"] = t.shipment;
    theta["REVPAX"] = t.revpax;
    theta["FUELP"] = t.fuelp;
    theta["HUB"] = t.hub;
    theta["SEATSH"] = t.seatsh;
    theta["RHHI"] = t.rhhi;
    theta["IPITCH"] = t.ipitch;
    theta["LASTROW"] = 0.0;
    theta["EMERGEXIT"] = 0.0;
    theta["COMFORT"] = 0.0;
    theta["COMFORT (placebo)"] = 0.0;

    nlohmann::ordered_json structural;
    structural["theta0"] = t.theta0;
    structural["bsn"] = t.bsn;
    structural["slope"] = out.cfg.slope;
    structural["sigma"] = out.cfg.sigma;
    structural["business_share"] = out.cfg.business_share;
    structural["middle_seat_true_effect"] = t.middle;
    structural["eta_sigma"] = out.cfg.eta_sigma;
    structural["seed"] = out.cfg.seed;

    nlohmann::ordered_json j;
    j["theta"] = theta;
    j["structural"] = structural;
    j["n_rows"] = out.passengers.size();
    j["total_seated"] = out.total_seated;
    j["total_spilled"] = out.total_spilled;
    return j;
}

inline const char* kStudyHeader =
    "price,adv_days,dist_km,bsn,fltime_min,shipment_kg,revpax,lf,fuelp,hub,seatsh,rhhi,"
    "row,letter,seatmap_id,airline,route_id,svy_date,dep_hour,pax_profile_id";

inline void emit_dataset(const SynthOutput& out, std::ostream& os) {
    os << kStudyHeader << "\n";
    for (const auto& p : out.passengers) {
        const FlightSim& fl = out.flights[p.flight];
        const RouteSim& rt = out.routes[fl.route];
        char date_buf[32];
        std::snprintf(date_buf, sizeof date_buf, "d%03d", static_cast<int>(fl.date) + 1);
        os << format_shortest(p.price) << ',' << p.adv_days << ',' << format_shortest(rt.dist_km)
           << ',' << p.bsn << ',' << format_shortest(rt.fltime_min) << ','
           << format_shortest(fl.shipment_kg) << ',' << format_shortest(rt.revpax) << ','
           << format_shortest(fl.lf) << ',' << format_shortest(fl.fuelp) << ',' << rt.hub << ','
           << format_shortest(fl.seatsh) << ',' << format_shortest(fl.rhhi) << ',' << p.row << ','
           << p.letter << ',' << out.cfg.pool[fl.pool_index].id << ',' << fl.carrier << ','
           << rt.id << ',' << date_buf << ',' << fl.hour << ',' << p.profile << "\n";
    }
}

inline void emit_dataset(const SynthOutput& out, const std::string& csv_path) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot write '" + csv_path + "'");
    emit_dataset(out, csv);
    if (!csv.good()) throw DataError("write failed on '" + csv_path + "'");

    const std::string truth_path = truth_sidecar_path(csv_path);
    std::ofstream truth(truth_path, std::ios::binary);
    if (!truth) throw DataError("cannot write '" + truth_path + "'");
    truth << true_params_json(out).dump(2) << "\n";
    if (!truth.good()) throw DataError("write failed on '" + truth_path + "'");
}

// Load the seat-map pool + reference maxima in one step (CLI and tests).
inline std::vector<PoolEntry> load_pool(const std::vector<std::string>& paths,
                                        const std::string& refmax_csv) {
    auto refs = load_refmax_csv(refmax_csv);
    std::vector<PoolEntry> pool;
    for (const auto& p : paths) {
        PoolEntry e;
        e.map = parse_seatmap_file(p);
        apply_refmax(e.map, refs);
        size_t slash = p.find_last_of('/');
        std::string stem = slash == std::string::npos ? p : p.substr(slash + 1);
        if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".smap") stem.resize(stem.size() - 5);
        e.id = stem;
        pool.push_back(std::move(e));
    }
    return pool;
}

}  // namespace cabinfare
