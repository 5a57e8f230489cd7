#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cabinfare/pds.hpp"

using namespace cabinfare;

namespace {

struct Confounded {
    Eigen::VectorXd y, d;
    Eigen::MatrixXd W;  // candidates; column 0 is the real confounder
    std::vector<std::string> wnames;
    Confounded(long n, long p, unsigned seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        W.resize(n, p);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < p; ++j) W(i, j) = nd(rng);
        d.resize(n);
        y.resize(n);
        for (long i = 0; i < n; ++i) {
            d[i] = 0.8 * W(i, 0) + 0.9 * nd(rng);
            y[i] = 0.5 * d[i] + 1.0 * W(i, 0) + nd(rng);
        }
        for (long j = 0; j < p; ++j) wnames.push_back("w" + std::to_string(j));
    }
};

double naive_slope(const Eigen::VectorXd& y, const Eigen::VectorXd& d) {
    DesignMatrix dm;
    const long n = y.size();
    dm.X.resize(n, 2);
    dm.X.col(0).setOnes();
    dm.X.col(1) = d;
    dm.y = y;
    dm.names = {"(intercept)", "d"};
    dm.origins = {ColumnOrigin::Intercept, ColumnOrigin::Raw};
    dm.kept_rows.resize(n);
    std::iota(dm.kept_rows.begin(), dm.kept_rows.end(), 0);
    return ols_fit(dm).coef[1];
}

}  // namespace

TEST_CASE("with no candidate controls the estimator is plain OLS") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    const long n = 120;
    Eigen::MatrixXd D(n, 1);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
        D(i, 0) = nd(rng);
        y[i] = 1.0 + 0.5 * D(i, 0) + 0.3 * nd(rng);
    }
    PdsResult res = pds_estimate(y, "y", D, {"d"}, {});

    DesignMatrix dm;
    dm.X.resize(n, 2);
    dm.X.col(0).setOnes();
    dm.X.col(1) = D.col(0);
    dm.y = y;
    dm.names = {"(intercept)", "d"};
    dm.origins = {ColumnOrigin::Intercept, ColumnOrigin::Raw};
    dm.kept_rows.resize(n);
    std::iota(dm.kept_rows.begin(), dm.kept_rows.end(), 0);
    FitResult direct = ols_fit(dm);
    std::vector<long> singles(n);
    std::iota(singles.begin(), singles.end(), 0);
    cluster_cov(direct, dm, singles, ClusterCorrection::CR1, DofPolicy::NMinusK);

    CHECK(res.interest[0].coef == direct.coef[1]);
    CHECK(res.interest[0].se == direct.se[1]);
    CHECK(res.union_selected.empty());
    CHECK(res.y_selected == 0);
    CHECK(res.fit.k == 2);
}

TEST_CASE("pure noise candidates do not disturb the estimate") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    const long n = 400, p = 30;
    Eigen::MatrixXd D(n, 1), W(n, p);
    Eigen::VectorXd y(n);
    std::vector<std::string> wn;
    for (long j = 0; j < p; ++j) wn.push_back("n" + std::to_string(j));
    for (long i = 0; i < n; ++i) {
        D(i, 0) = nd(rng);
        for (long j = 0; j < p; ++j) W(i, j) = nd(rng);
        y[i] = 1.0 + 0.5 * D(i, 0) + nd(rng);
    }
    PdsResult res =
        pds_estimate(y, "y", D, {"d"}, {ControlGroup::from_dense("noise", wn, W)});
    CHECK(res.all_converged);
    CHECK(static_cast<long>(res.union_selected.size()) <= 3);
    CHECK(std::fabs(res.interest[0].coef - 0.5) < 3.5 * res.interest[0].se);
}

TEST_CASE("double selection removes confounding that naive OLS absorbs") {
    Confounded data(2000, 200, 23);
    PdsResult res = pds_estimate(data.y, "y", data.d, {"d"},
                                 {ControlGroup::from_dense("w", data.wnames, data.W)});

    const double naive = naive_slope(data.y, data.d);
    // omitted-variable bias: theta_c * cov(d, c) / var(d) = 0.8/(0.64+0.81)
    const double expected_bias = 0.8 / (0.64 + 0.81);
    CHECK(std::fabs(naive - 0.5 - expected_bias) < 0.1);

    CHECK(res.all_converged);
    CHECK(std::fabs(res.interest[0].coef - 0.5) < 0.08);
    CHECK(std::fabs(res.interest[0].coef - 0.5) < std::fabs(naive - 0.5) / 5.0);

    // the confounder must be in the pooled selection
    CHECK(std::find(res.union_names.begin(), res.union_names.end(), "w0") !=
          res.union_names.end());
    REQUIRE(res.group_counts.size() == 1);
    CHECK(res.group_counts[0].total == 200);
    CHECK(res.group_counts[0].selected ==
          static_cast<long>(res.union_selected.size()));
}

TEST_CASE("interest stays put when a control column is rescaled") {
    Confounded data(600, 40, 31);
    auto run = [&](double scale) {
        Eigen::MatrixXd W = data.W;
        W.col(7) *= scale;
        return pds_estimate(data.y, "y", data.d, {"d"},
                            {ControlGroup::from_dense("w", data.wnames, W)});
    };
    PdsResult a = run(1.0), b = run(100.0);
    CHECK(a.interest[0].coef == Catch::Approx(b.interest[0].coef).margin(1e-8));
    CHECK(a.interest[0].se == Catch::Approx(b.interest[0].se).margin(1e-8));
    CHECK(a.union_names == b.union_names);
}

TEST_CASE("an exact duplicate of a control changes nothing") {
    Confounded data(600, 40, 37);
    PdsResult base = pds_estimate(data.y, "y", data.d, {"d"},
                                  {ControlGroup::from_dense("w", data.wnames, data.W)});

    ControlGroup dup = ControlGroup::from_dense("dup", {"w0_copy"}, data.W.col(0));
    PdsResult with_dup =
        pds_estimate(data.y, "y", data.d, {"d"},
                     {ControlGroup::from_dense("w", data.wnames, data.W), dup});

    CHECK(with_dup.interest[0].coef == Catch::Approx(base.interest[0].coef).margin(1e-8));
    CHECK(with_dup.interest[0].se == Catch::Approx(base.interest[0].se).margin(1e-8));
    // if the copy ever made it into the union, the rank filter must have cut it
    bool in_union = std::find(with_dup.union_names.begin(), with_dup.union_names.end(),
                              "w0_copy") != with_dup.union_names.end();
    bool dropped = std::find(with_dup.dropped_collinear.begin(),
                             with_dup.dropped_collinear.end(),
                             "w0_copy") != with_dup.dropped_collinear.end();
    CHECK((!in_union || dropped));
}

TEST_CASE("one-pass versus iterated loadings move the estimate only marginally") {
    Confounded data(2000, 120, 41);
    PdsOptions one;
    one.lasso.max_loading_iter = 1;
    PdsResult quick = pds_estimate(data.y, "y", data.d, {"d"},
                                   {ControlGroup::from_dense("w", data.wnames, data.W)},
                                   std::vector<long>{}, one);
    PdsResult full = pds_estimate(data.y, "y", data.d, {"d"},
                                  {ControlGroup::from_dense("w", data.wnames, data.W)});
    CHECK(std::fabs(quick.interest[0].coef - full.interest[0].coef) <
          2.0 * full.interest[0].se);
}

TEST_CASE("indicator groups: construction, counts and report formatting") {
    const long n = 500;
    std::mt19937_64 rng(47);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<std::string> lab(n);
    const char* levels[] = {"a", "b", "c", "d"};
    Eigen::MatrixXd D(n, 1), W(n, 3);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
        int l = pick(rng);
        lab[i] = levels[l];
        D(i, 0) = nd(rng);
        for (long j = 0; j < 3; ++j) W(i, j) = nd(rng);
        y[i] = 0.5 * D(i, 0) + 3.0 * (l == 1) + nd(rng);
    }
    // mixing a sparse indicator group with a dense group exercises pooling
    std::vector<ControlGroup> groups = {
        ControlGroup::indicators("cat", lab),
        ControlGroup::from_dense("noise", {"n0", "n1", "n2"}, W)};
    CHECK(groups[0].columns ==
          std::vector<std::string>{"cat=a", "cat=b", "cat=c", "cat=d"});

    PdsResult res = pds_estimate(y, "y", D, {"d"}, groups);
    REQUIRE(res.group_counts.size() == 2);
    CHECK(res.group_counts[0].total == 4);
    CHECK(res.group_counts[1].total == 3);
    CHECK(res.group_counts[0].selected >= 1);  // cat=b carries real signal
    bool has_b = std::find(res.union_names.begin(), res.union_names.end(), "cat=b") !=
                 res.union_names.end();
    CHECK(has_b);
    CHECK(std::fabs(res.interest[0].coef - 0.5) < 3.5 * res.interest[0].se);

    std::string report = report_selected_counts(res);
    CHECK(report.find("cat: ") != std::string::npos);
    CHECK(report.find("/4") != std::string::npos);
    CHECK(report.find("noise: ") != std::string::npos);
    CHECK(report.find("/3") != std::string::npos);
}

TEST_CASE("multi-hot indicators add one column per level across label sets") {
    std::vector<std::string> origin = {"gru", "gig", "bsb", "gru"};
    std::vector<std::string> dest = {"gig", "gru", "gru", "gru"};
    std::vector<const std::vector<std::string>*> sets = {&origin, &dest};
    ControlGroup g = ControlGroup::indicators("apt", sets);
    REQUIRE(g.columns == std::vector<std::string>{"apt=bsb", "apt=gig", "apt=gru"});
    REQUIRE(g.is_sparse());

    // row 3 has gru on both sides and must score 2
    const auto& idx = g.sparse_cols.idx[2];
    const auto& val = g.sparse_cols.val[2];
    REQUIRE(idx == std::vector<long>{0, 1, 2, 3});
    CHECK(val[0] == 1.0);
    CHECK(val[3] == 2.0);
    // bsb appears once, on row 2
    CHECK(g.sparse_cols.idx[0] == std::vector<long>{2});
}

TEST_CASE("a constant interest regressor is rejected by name") {
    const long n = 50;
    Eigen::MatrixXd D = Eigen::MatrixXd::Constant(n, 1, 1.3);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    try {
        pds_estimate(y, "y", D, {"flat"}, {});
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("'flat'") != std::string::npos);
    }
}

TEST_CASE("clustered inference flows through to the interest rows") {
    Confounded data(400, 20, 53);
    std::vector<std::string> labels(400);
    for (long i = 0; i < 400; ++i) labels[i] = "r" + std::to_string(i % 40);
    PdsResult res = pds_estimate(data.y, "y", data.d, {"d"},
                                 {ControlGroup::from_dense("w", data.wnames, data.W)}, labels);
    CHECK(res.n_clusters == 40);
    CHECK(res.dof == 39.0);
    CHECK(res.interest[0].se > 0.0);
    CHECK(res.interest[0].pval == Catch::Approx(t_pvalue(res.interest[0].tstat, 39.0)));
    // unclustered run on the same data uses n - k degrees of freedom
    PdsResult plain = pds_estimate(data.y, "y", data.d, {"d"},
                                   {ControlGroup::from_dense("w", data.wnames, data.W)});
    CHECK(plain.dof == static_cast<double>(plain.fit.n - plain.fit.k));
}
