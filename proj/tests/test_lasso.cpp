#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cabinfare/lasso.hpp"

using namespace cabinfare;

namespace {

Eigen::MatrixXd random_gaussian(long n, long p, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(n, p);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < p; ++j) X(i, j) = nd(rng);
    return X;
}

Eigen::VectorXd ols_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return X.colPivHouseholderQr().solve(y);
}

}  // namespace

TEST_CASE("plugin penalty level matches the frozen reference") {
    const double gamma = 0.1 / std::log(100.0);
    CHECK(normal_quantile(1.0 - gamma / (2.0 * 50)) ==
          Catch::Approx(3.518316239323262).margin(1e-12));
    CHECK(plugin_lambda(100, 50, 1.1, gamma) == Catch::Approx(77.40295726511177).epsilon(1e-12));

    // monotone in p (more candidates -> larger penalty) and in n
    CHECK(plugin_lambda(100, 100, 1.1, gamma) > plugin_lambda(100, 50, 1.1, gamma));
    CHECK(plugin_lambda(400, 50, 1.1, gamma) > plugin_lambda(100, 50, 1.1, gamma));
    CHECK_THROWS_AS(plugin_lambda(100, 0, 1.1, gamma), EstimationError);
    CHECK_THROWS_AS(plugin_lambda(100, 50, 1.1, 250.0), EstimationError);  // tail mass >= 1
}

TEST_CASE("penalty loadings match the definition") {
    Eigen::MatrixXd Z(4, 2);
    Z << 1, -2, -1, 0.5, 2, 1, -2, -0.25;
    Eigen::VectorXd e(4);
    e << 0.5, -1.0, 0.25, 2.0;
    Eigen::VectorXd psi = penalty_loadings(Z, e);
    for (long j = 0; j < 2; ++j) {
        double s = 0.0;
        for (long i = 0; i < 4; ++i) s += Z(i, j) * Z(i, j) * e[i] * e[i];
        CHECK(psi[j] == Catch::Approx(std::sqrt(s / 4.0)).epsilon(1e-14));
    }
}

TEST_CASE("homoskedastic unit-variance noise gives loadings near one") {
    const long n = 5000, p = 6;
    Eigen::MatrixXd Z = random_gaussian(n, p, 11);
    standardize_columns(Z);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    Eigen::VectorXd e(n);
    for (long i = 0; i < n; ++i) e[i] = nd(rng);
    Eigen::VectorXd psi = penalty_loadings(Z, e);
    for (long j = 0; j < p; ++j) {
        CHECK(psi[j] > 0.9);
        CHECK(psi[j] < 1.1);
    }
}

TEST_CASE("standardization yields zero mean and unit root-mean-square") {
    Eigen::MatrixXd X = random_gaussian(50, 4, 3);
    X.col(2) = X.col(2) * 40.0;
    X.col(2).array() += 300.0;
    Eigen::MatrixXd Z = X;
    Standardizer st = standardize_columns(Z);
    for (long j = 0; j < 4; ++j) {
        CHECK(std::fabs(Z.col(j).mean()) < 1e-12);
        CHECK(Z.col(j).squaredNorm() / 50.0 == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(st.mean[j] == Catch::Approx(X.col(j).mean()).epsilon(1e-12));
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Ones(5, 1);
    CHECK_THROWS_AS(standardize_columns(C), EstimationError);
}

TEST_CASE("a constant response admits no penalty loadings") {
    Eigen::MatrixXd X = random_gaussian(30, 3, 4);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 5.5);
    CHECK_THROWS_AS(rlasso(X, y), EstimationError);
}

TEST_CASE("coordinate descent with zero penalty matches least squares") {
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
    bool conv = false;
    coordinate_descent(Z, y, Eigen::VectorXd::Ones(p), 0.0, beta, cfg, &conv);
    CHECK(conv);
    Eigen::VectorXd ols = ols_solve(Z, y);
    for (long j = 0; j < p; ++j) CHECK(beta[j] == Catch::Approx(ols[j]).margin(1e-6));
}

TEST_CASE("penalty at or above the null threshold keeps everything at zero") {
    const long n = 80, p = 7;
    Eigen::MatrixXd Z = random_gaussian(n, p, 31);
    standardize_columns(Z);
    Eigen::VectorXd y = random_gaussian(n, 1, 32).col(0);
    y.array() -= y.mean();
    Eigen::VectorXd psi = Eigen::VectorXd::Ones(p) * 0.8;

    double lambda_max = 0.0;
    for (long j = 0; j < p; ++j)
        lambda_max = std::max(lambda_max, std::fabs(Z.col(j).dot(y)) / psi[j]);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    coordinate_descent(Z, y, psi, lambda_max * (1.0 + 1e-9), beta);
    CHECK(beta.cwiseAbs().maxCoeff() == 0.0);

    beta.setZero();
    coordinate_descent(Z, y, psi, lambda_max * 0.98, beta);
    CHECK(beta.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("orthonormal design has the soft-threshold closed form") {
    const long n = 60, p = 8;
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
        CHECK(beta[j] == Catch::Approx(expect).margin(1e-10));
    }
}

TEST_CASE("solutions satisfy the stationarity conditions on random instances") {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> upsi(0.5, 1.5), ulam(0.3, 1.5);
    LassoConfig cfg;
    cfg.cd_tol = 1e-9;

    Eigen::VectorXd active_example;
    Eigen::MatrixXd Z_example;
    Eigen::VectorXd y_example, psi_example;
    double lambda_example = 0.0;
    int example_j = -1;

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
        bool conv = false;
        coordinate_descent(Z, y, psi, lambda, beta, cfg, &conv);
        REQUIRE(conv);
        KktReport rep_kkt = kkt_check(Z, y, psi, lambda, beta, 1e-6);
        CAPTURE(rep, rep_kkt.max_violation);
        REQUIRE(rep_kkt.ok);

        if (example_j < 0) {
            for (long j = 0; j < p; ++j)
                if (beta[j] != 0.0) {
                    example_j = static_cast<int>(j);
                    active_example = beta;
                    Z_example = Z;
                    y_example = y;
                    psi_example = psi;
                    lambda_example = lambda;
                    break;
                }
        }
    }

    // negative control: nudging an active coefficient breaks stationarity
    REQUIRE(example_j >= 0);
    active_example[example_j] += 1e-3;
    KktReport bad = kkt_check(Z_example, y_example, psi_example, lambda_example, active_example, 1e-6);
    CHECK_FALSE(bad.ok);
    CHECK(bad.max_violation > 1e-5);
}

TEST_CASE("the reported solution is the global minimum of the objective") {
    const long n = 150, p = 12;
    Eigen::MatrixXd Z = random_gaussian(n, p, 61);
    standardize_columns(Z);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
    truth[1] = 1.5;
    truth[7] = -2.0;
    Eigen::VectorXd y = Z * truth + random_gaussian(n, 1, 62).col(0);
    y.array() -= y.mean();
    Eigen::VectorXd psi = Eigen::VectorXd::Ones(p);
    const double lambda = 0.4 * n;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    LassoConfig cfg;
    cfg.cd_tol = 1e-10;
    coordinate_descent(Z, y, psi, lambda, beta, cfg);
    const double at_solution = lasso_objective(Z, y, psi, lambda, beta);

    std::mt19937_64 rng(63);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 25; ++rep) {
        Eigen::VectorXd other = beta;
        for (long j = 0; j < p; ++j) other[j] += 0.05 * nd(rng);
        CHECK(at_solution <= lasso_objective(Z, y, psi, lambda, other) + 1e-12);
    }
    CHECK(at_solution <= lasso_objective(Z, y, psi, lambda, Eigen::VectorXd::Zero(p)));
}

TEST_CASE("rlasso is deterministic") {
    Eigen::MatrixXd X = random_gaussian(120, 15, 71);
    Eigen::VectorXd y = X.col(2) * 2.0 - X.col(9) + random_gaussian(120, 1, 72).col(0);
    LassoFit a = rlasso(X, y);
    LassoFit b = rlasso(X, y);
    REQUIRE(a.beta.size() == b.beta.size());
    for (long j = 0; j < a.beta.size(); ++j) CHECK(a.beta[j] == b.beta[j]);
    CHECK(a.intercept == b.intercept);
    CHECK(a.lambda == b.lambda);
    CHECK(a.selected == b.selected);
    CHECK(a.sweeps == b.sweeps);
}

TEST_CASE("dense and sparse backends agree") {
    // three indicator blocks plus a sparse numeric column
    const long n = 300;
    std::mt19937_64 rng(81);
    std::uniform_int_distribution<int> g10(0, 9), g5(0, 4), g3(0, 2);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 10 + 5 + 3 + 1);
    for (long i = 0; i < n; ++i) {
        X(i, g10(rng)) = 1.0;
        X(i, 10 + g5(rng)) = 1.0;
        X(i, 15 + g3(rng)) = 1.0;
        if (i % 7 == 0) X(i, 18) = nd(rng) * 2.0;
    }
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i)
        y[i] = 3.0 * X(i, 0) - 2.0 * X(i, 12) + 1.5 * X(i, 18) + 0.5 * nd(rng);

    LassoFit dense = rlasso(X, y);
    LassoFit sparse = rlasso(SparseColumns::from_dense(X), y);

    CHECK(dense.lambda == sparse.lambda);
    REQUIRE(dense.beta.size() == sparse.beta.size());
    for (long j = 0; j < dense.beta.size(); ++j) {
        CHECK(dense.beta[j] == Catch::Approx(sparse.beta[j]).margin(1e-8));
        CHECK(dense.loadings[j] == Catch::Approx(sparse.loadings[j]).margin(1e-8));
    }
    CHECK(dense.intercept == Catch::Approx(sparse.intercept).margin(1e-8));
    CHECK(dense.selected == sparse.selected);
    CHECK(dense.cd_converged);
    CHECK(sparse.cd_converged);
}

TEST_CASE("rlasso is invariant to regressor scaling") {
    Eigen::MatrixXd X = random_gaussian(200, 10, 91);
    Eigen::VectorXd y =
        2.0 * X.col(1) - 1.0 * X.col(4) + 0.5 * X.col(8) + random_gaussian(200, 1, 92).col(0);

    LassoFit base = rlasso(X, y);
    Eigen::MatrixXd Xs = X;
    Xs.col(4) *= 1000.0;
    LassoFit scaled = rlasso(Xs, y);

    CHECK(base.selected == scaled.selected);
    for (long j = 0; j < 10; ++j) {
        double expect = j == 4 ? base.beta[j] / 1000.0 : base.beta[j];
        CHECK(scaled.beta[j] == Catch::Approx(expect).margin(1e-8));
    }
    CHECK(scaled.intercept == Catch::Approx(base.intercept).margin(1e-8));
}

TEST_CASE("rlasso recovers strong signals without flooding the model") {
    const long n = 2000, p = 50;
    Eigen::MatrixXd X = random_gaussian(n, p, 101);
    Eigen::VectorXd y(n);
    std::mt19937_64 rng(102);
    std::normal_distribution<double> nd;
    for (long i = 0; i < n; ++i) {
        y[i] = nd(rng);
        for (long j = 0; j < 5; ++j) y[i] += 4.0 * X(i, j);
    }
    LassoFit fit = rlasso(X, y);
    CHECK(fit.cd_converged);
    CHECK(fit.loadings_converged);
    for (long j = 0; j < 5; ++j) {
        CAPTURE(j);
        CHECK(std::find(fit.selected.begin(), fit.selected.end(), j) != fit.selected.end());
    }
    CHECK(static_cast<long>(fit.selected.size()) <= 25);
}

TEST_CASE("rlasso with no candidates returns the mean model") {
    Eigen::MatrixXd X(40, 0);
    Eigen::VectorXd y = random_gaussian(40, 1, 111).col(0);
    y.array() += 7.0;
    LassoFit fit = rlasso(X, y);
    CHECK(fit.intercept == Catch::Approx(y.mean()).epsilon(1e-14));
    CHECK(fit.selected.empty());
    CHECK(fit.lambda == 0.0);
}

TEST_CASE("sparse column store validates its inputs") {
    SparseColumns s;
    s.n = 10;
    CHECK_THROWS_AS(s.add({3, 1}, {1.0, 1.0}), EstimationError);       // unsorted
    CHECK_THROWS_AS(s.add({2, 2}, {1.0, 1.0}), EstimationError);       // duplicate
    CHECK_THROWS_AS(s.add({4, 11}, {1.0, 1.0}), EstimationError);      // out of range
    CHECK_THROWS_AS(s.add({1, 2}, {1.0}), EstimationError);            // length mismatch
    s.add_indicator({0, 3, 7});
    CHECK(s.cols() == 1);

    // an indicator that covers every row is constant after centering
    SparseColumns all;
    all.n = 4;
    all.add_indicator({0, 1, 2, 3});
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    CHECK_THROWS_AS(rlasso(all, y), EstimationError);
}
