// Acceptance harness: every release gate in one binary, one PASS/FAIL line
// each, with the measured quantities printed next to the verdict. Exits with
// the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cabinfare/csv.hpp"
#include "cabinfare/design.hpp"
#include "cabinfare/lasso.hpp"
#include "cabinfare/pds.hpp"
#include "cabinfare/regression.hpp"
#include "cabinfare/seatmap.hpp"
#include "cabinfare/study.hpp"
#include "cabinfare/synth.hpp"

using namespace cabinfare;

namespace {

const std::string kData = CABINFARE_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

template <class Fn>
void criterion(int idx, const char* title, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::printf("%d. %s  %s [%ld ms]\n   %s\n", idx, o.pass ? "PASS" : "FAIL", title,
                static_cast<long>(ms), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

Eigen::MatrixXd random_gaussian(long n, long p, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(n, p);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < p; ++j) X(i, j) = nd(rng);
    return X;
}

std::vector<std::string> pool_paths() {
    std::vector<std::string> out;
    for (const char* f :
         {"avianca_a319_132", "avianca_a320_162", "azul_atr72600_68", "azul_e195_118",
          "gol_b737800_177", "gol_b737800_178", "tam_a320_156", "tam_a320_174"})
        out.push_back(kData + "/seatmaps/" + f + ".smap");
    return out;
}

MarketConfig default_config() {
    static const std::vector<PoolEntry> pool = load_pool(pool_paths(), kData + "/refmax.csv");
    MarketConfig cfg;
    cfg.pool = pool;
    return cfg;
}

StudyVariables study_from_market(const MarketConfig& cfg) {
    SynthOutput out = gen_market(cfg);
    std::ostringstream ss;
    emit_dataset(out, ss);
    std::istringstream in(ss.str());
    StudyTable t = load_study_csv(csv::read_stream(in, "<synthetic>"), {}, "<synthetic>");
    return build_variables(t, cfg.pool);
}

const PdsInterest& row_of(const PdsResult& res, const std::string& name) {
    for (const auto& pi : res.interest)
        if (pi.name == name) return pi;
    throw EstimationError("no interest row named " + name);
}

DesignMatrix plain_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::vector<std::string> names) {
    DesignMatrix dm;
    dm.X = X;
    dm.y = y;
    dm.names = std::move(names);
    dm.origins.assign(dm.names.size(), ColumnOrigin::Raw);
    dm.origins[0] = ColumnOrigin::Intercept;
    dm.response_name = "y";
    dm.kept_rows.resize(X.rows());
    std::iota(dm.kept_rows.begin(), dm.kept_rows.end(), 0);
    return dm;
}

// --- criteria ------------------------------------------------------------------

Outcome c1_fixtures() {
    const std::pair<const char*, long> expect[] = {
        {"avianca_a319_132", 132}, {"avianca_a320_162", 162}, {"azul_atr72600_68", 68},
        {"azul_e195_118", 118},    {"gol_b737800_177", 177},  {"gol_b737800_178", 178},
        {"tam_a320_156", 156},     {"tam_a320_174", 174}};
    std::string counts;
    bool ok = true;
    long comfort = -1;
    for (const auto& [stem, want] : expect) {
        SeatMap m = parse_seatmap_file(kData + "/seatmaps/" + stem + ".smap");
        long got = m.seat_count();
        ok = ok && got == want;
        counts += (counts.empty() ? "" : ",") + std::to_string(got);
        if (std::string(stem) == "gol_b737800_177") comfort = m.comfort_seat_count();
    }
    ok = ok && comfort == 42;
    return {ok, "seat counts {" + counts + "}, Gol 177 comfort seats " +
                    std::to_string(comfort) + " (want 42); gate: exact, < 1 s"};
}

Outcome c2_dispersion() {
    DispersionTable t = load_dispersion_csv(kData + "/table2_dispersion.csv");
    size_t a = 0, d = 0, r1 = 0;
    while (a < t.letters.size() && t.letters[a] != 'A') ++a;
    while (d < t.letters.size() && t.letters[d] != 'D') ++d;
    while (r1 < t.rows.size() && t.rows[r1] != 1) ++r1;
    long share_a = t.letter_share_pct(a);
    long share_1d = t.row_share_pct(r1, d);
    bool ok = t.grand_total == 64768 && share_a == 26 && share_1d == 31;
    return {ok, "grand total " + std::to_string(t.grand_total) + " (want 64768), letter-A " +
                    std::to_string(share_a) + "% (want 26), row-1 D " + std::to_string(share_1d) +
                    "% (want 31)"};
}

Outcome c3_lasso_oracles() {
    // orthonormal closed form, 50x10
    double worst_ortho = 0.0;
    {
        const long n = 50, p = 10;
        Eigen::MatrixXd G = random_gaussian(n, p, 41);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
        Eigen::MatrixXd Z = Q * std::sqrt(static_cast<double>(n));  // (1/n) Z'Z = I
        Eigen::VectorXd y = random_gaussian(n, 1, 42).col(0) * 2.0;
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> ud(0.5, 1.5);
        Eigen::VectorXd psi(p);
        for (long j = 0; j < p; ++j) psi[j] = ud(rng);
        const double lambda = 0.7 * n;
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        LassoConfig cfg;
        cfg.cd_tol = 1e-13;
        coordinate_descent(Z, y, psi, lambda, beta, cfg);
        for (long j = 0; j < p; ++j) {
            double expect = soft_threshold(Z.col(j).dot(y) / n, lambda / n * psi[j]);
            worst_ortho = std::max(worst_ortho, std::fabs(beta[j] - expect));
        }
    }

    // zero penalty equals least squares
    double worst_ols = 0.0;
    {
        const long n = 100, p = 5;
        Eigen::MatrixXd Z = random_gaussian(n, p, 21);
        Eigen::VectorXd truth(p);
        truth << 1.0, -2.0, 0.0, 0.5, 3.0;
        std::mt19937_64 rng(22);
        std::normal_distribution<double> nd;
        Eigen::VectorXd y = Z * truth;
        for (long i = 0; i < n; ++i) y[i] += 0.3 * nd(rng);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        LassoConfig cfg;
        cfg.cd_tol = 1e-12;
        coordinate_descent(Z, y, Eigen::VectorXd::Ones(p), 0.0, beta, cfg);
        Eigen::VectorXd ols = Z.colPivHouseholderQr().solve(y);
        worst_ols = (beta - ols).cwiseAbs().maxCoeff();
    }

    // stationarity on random instances
    double worst_kkt = 0.0;
    bool all_kkt = true;
    {
        std::mt19937_64 rng(51);
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> upsi(0.5, 1.5), ulam(0.3, 1.5);
        LassoConfig cfg;
        cfg.cd_tol = 1e-9;
        for (int rep = 0; rep < 100; ++rep) {
            const long n = 200, p = 20;
            Eigen::MatrixXd Z = random_gaussian(n, p, 1000 + rep);
            standardize_columns(Z);
            Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
            for (long j = 0; j < 4; ++j) truth[(rep + 3 * j) % p] = (j % 2 ? -2.0 : 2.0);
            Eigen::VectorXd y = Z * truth;
            for (long i = 0; i < n; ++i) y[i] += nd(rng);
            y.array() -= y.mean();
            Eigen::VectorXd psi(p);
            for (long j = 0; j < p; ++j) psi[j] = upsi(rng);
            const double lambda =
                plugin_lambda(n, p, 1.1, 0.1 / std::log(static_cast<double>(n))) * ulam(rng);
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
            coordinate_descent(Z, y, psi, lambda, beta, cfg);
            KktReport rep_kkt = kkt_check(Z, y, psi, lambda, beta, 1e-6);
            all_kkt = all_kkt && rep_kkt.ok;
            worst_kkt = std::max(worst_kkt, rep_kkt.max_violation);
        }
    }

    bool ok = worst_ortho <= 1e-8 && worst_ols <= 1e-6 && all_kkt;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "orthonormal gap %.2e (gate 1e-8), lambda=0 vs OLS gap %.2e (gate 1e-6), "
                  "worst KKT violation %.2e over 100 instances (gate 1e-6); < 5 s",
                  worst_ortho, worst_ols, worst_kkt);
    return {ok, buf};
}

Outcome c4_cluster_oracle() {
    std::vector<double> x1 = {0.5, 1.0, -1.2, 2.0, 0.3, -0.7, 1.5, 2.2, -0.4, 0.9, 1.1, -1.8};
    std::vector<double> x2 = {1.0, -1.0, 0.5, 0.25, 2.0, 1.75, -0.5, 0.8, 1.2, -2.0, 0.6, 1.4};
    std::vector<double> yv = {2.0, 1.5, 0.3, 4.2, 2.9, 0.8, 3.1, 5.0, 1.1, 0.2, 2.7, -0.6};
    const long n = 12;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = x1[i];
        X(i, 2) = x2[i];
        y[i] = yv[i];
    }
    DesignMatrix dm = plain_design(X, y, {"(intercept)", "x1", "x2"});

    // frozen from an independent implementation of the sandwich formulas
    const double want_beta[] = {0.8835345381321887, 1.4625903922145258, 0.7832662374092165};
    const double want_cr1[] = {0.18676738251202796, 0.1483305166331306, 0.12494325184724872};
    const double want_hc1[] = {0.19011358245820986, 0.12407645053090308, 0.11993177743129313};

    FitResult fit = ols_fit(dm);
    std::vector<int> clusters = {0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2};
    cluster_cov(fit, dm, clusters, ClusterCorrection::CR1);
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        worst = std::max(worst, std::fabs(fit.coef[j] - want_beta[j]));
        worst = std::max(worst, std::fabs(fit.se[j] - want_cr1[j]));
    }

    FitResult single = ols_fit(dm);
    std::vector<int> singletons(n);
    std::iota(singletons.begin(), singletons.end(), 0);
    cluster_cov(single, dm, singletons, ClusterCorrection::CR1, DofPolicy::NMinusK);
    double worst_hc1 = 0.0;
    for (int j = 0; j < 3; ++j)
        worst_hc1 = std::max(worst_hc1, std::fabs(single.se[j] - want_hc1[j]));

    bool ok = worst <= 1e-10 && worst_hc1 <= 1e-10 && single.n_clusters == 12;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "CR1 sandwich gap %.2e (gate 1e-10), singleton-vs-HC1 gap %.2e (gate 1e-10)",
                  worst, worst_hc1);
    return {ok, buf};
}

Outcome c5_pds_recovery() {
    const long n = 2000, p = 500, kc = 5;  // 5 true confounders among 500 candidates
    const double alpha = 0.5;
    const int reps = 100;
    double sum_abs = 0.0, sum_naive_abs = 0.0;
    int covered = 0;
    std::vector<std::string> wnames;
    for (long j = 0; j < p; ++j) wnames.push_back("w" + std::to_string(j));

    for (int rep = 0; rep < reps; ++rep) {
        std::mt19937_64 rng(500 + rep);
        std::normal_distribution<double> nd;
        Eigen::MatrixXd W(n, p);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < p; ++j) W(i, j) = nd(rng);
        Eigen::VectorXd d(n), y(n);
        for (long i = 0; i < n; ++i) {
            double conf_d = 0.0, conf_y = 0.0;
            for (long j = 0; j < kc; ++j) {
                conf_d += 0.6 * W(i, j);
                conf_y += 0.8 * W(i, j);
            }
            d[i] = conf_d + nd(rng);
            y[i] = alpha * d[i] + conf_y + 0.8 * nd(rng);
        }

        PdsResult res = pds_estimate(y, "y", d, {"d"},
                                     {ControlGroup::from_dense("w", wnames, W)});
        const double err = res.interest[0].coef - alpha;
        sum_abs += std::fabs(err);
        if (std::fabs(err) <= 1.959963984540054 * res.interest[0].se) ++covered;

        Eigen::MatrixXd Xn(n, 2);
        Xn.col(0).setOnes();
        Xn.col(1) = d;
        FitResult naive = ols_fit(plain_design(Xn, y, {"(intercept)", "d"}));
        sum_naive_abs += std::fabs(naive.coef[1] - alpha);
    }

    const double mean_abs = sum_abs / reps;
    const double mean_naive = sum_naive_abs / reps;
    const double coverage = 100.0 * covered / reps;
    bool ok = mean_abs <= 0.02 && coverage >= 90.0 && coverage <= 98.0 &&
              mean_naive >= 5.0 * mean_abs;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "mean |a-0.5| %.4f (gate 0.02), coverage %.0f%% (gate [90,98]), naive bias "
                  "%.3f = %.0fx PDS (gate >= 5x); < 2 min",
                  mean_abs, coverage, mean_naive, mean_naive / mean_abs);
    return {ok, buf};
}

// criteria 6 and 8 share one Monte-Carlo pass over 50 column-(6) fits
struct MechanismCounts {
    int w1_pos_sig = 0, w4_nonpos = 0, placebo_insig = 0, seeds = 0;
};

const MechanismCounts& mechanism_mc() {
    static const MechanismCounts counts = [] {
        MechanismCounts c;
        for (int i = 0; i < 50; ++i) {
            MarketConfig cfg = default_config();
            cfg.seed = 1000 + i;
            StudyVariables sv = study_from_market(cfg);
            PdsResult res = run_column(sv, default_ladder()[5]);
            const PdsInterest& w1 = row_of(res, "MIDDLE x ADV (1w)");
            const PdsInterest& w4 = row_of(res, "MIDDLE x ADV (>3w)");
            const PdsInterest& pl = row_of(res, "COMFORT (placebo)");
            if (w1.coef > 0.0 && w1.pval < 0.05) ++c.w1_pos_sig;
            if (w4.coef <= 0.0) ++c.w4_nonpos;
            if (pl.pval >= 0.05) ++c.placebo_insig;
            ++c.seeds;
        }
        return c;
    }();
    return counts;
}

Outcome c6_mechanism() {
    const MechanismCounts& c = mechanism_mc();
    bool ok = c.w1_pos_sig >= 40 && c.w4_nonpos >= 30;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "MIDDLE x ADV(1w) positive and significant at 5%% in %d/%d seeds (gate >= 40); "
                  ">3w coefficient <= 0 in %d/%d (gate >= 30); true middle effect is zero",
                  c.w1_pos_sig, c.seeds, c.w4_nonpos, c.seeds);
    return {ok, buf};
}

Outcome c7_aic() {
    // back-solve the error sum of squares from the published-scale summary
    const long n = 15634, k = 8;
    const double rmse = 0.7039;
    FitResult fit;
    fit.n = n;
    fit.k = k;
    fit.ssr = rmse * rmse * static_cast<double>(n - k);
    fit.tss = fit.ssr * 4.0;  // irrelevant to the information criteria
    FitStats s = fit_stats(fit);
    bool ok = std::fabs(s.aic - 33398.0) <= 25.0;
    char buf[120];
    std::snprintf(buf, sizeof buf, "AIC(n=15634, RMSE=0.7039, k=8) = %.2f (gate 33398 +- 25)",
                  s.aic);
    return {ok, buf};
}

Outcome c8_placebo() {
    const MechanismCounts& c = mechanism_mc();
    bool ok = c.placebo_insig >= 45;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "COMFORT placebo insignificant at 5%% in %d/%d seeds (gate >= 45); shares the "
                  "criterion-6 Monte-Carlo pass",
                  c.placebo_insig, c.seeds);
    return {ok, buf};
}

Outcome c9_performance() {
    auto t0 = std::chrono::steady_clock::now();
    auto run_once = [] {
        StudyVariables sv = study_from_market(default_config());
        RegressionTable t = run_ladder(sv, default_ladder());
        return render_text(t) + render_tsv(t) + table_to_json(t).dump();
    };
    std::string first = run_once();
    std::string second = run_once();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // recover n and the candidate-control count from the rendered run
    StudyVariables sv = study_from_market(default_config());
    RegressionTable t = run_ladder(sv, {default_ladder().back()});
    long n = t.cols[0].n_obs, candidates = 0;
    for (const auto& g : t.cols[0].groups)
        if (g.present) candidates += g.total;

    bool ok = n >= 15000 && secs < 60.0 && first == second;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "two full 8-column ladders on n=%ld with %ld candidate controls in %.1f s "
                  "(gate < 60 s); outputs byte-identical: %s",
                  n, candidates, secs, first == second ? "yes" : "NO");
    return {ok, buf};
}

}  // namespace

int main() {
    std::printf("acceptance criteria\n===================\n");
    criterion(1, "seat-map fixtures parse with exact seat and comfort counts", c1_fixtures);
    criterion(2, "dispersion table reproduces the published aggregates", c2_dispersion);
    criterion(3, "coordinate-descent lasso matches its oracles", c3_lasso_oracles);
    criterion(4, "cluster-robust covariance matches the hand-computed sandwich",
              c4_cluster_oracle);
    criterion(5, "post-double-selection recovers a confounded effect", c5_pds_recovery);
    criterion(6, "column (6) reproduces the timing-dependent middle-seat premium", c6_mechanism);
    criterion(7, "AIC definition reconciles with the published-scale summary", c7_aic);
    criterion(8, "the comfort placebo stays insignificant", c8_placebo);
    criterion(9, "full ladder runs fast and bit-identically", c9_performance);

    std::printf("===================\n%d/9 criteria passed\n", 9 - failures);
    return failures;
}
