#pragma once

// OLS via column-pivoted Householder QR, cluster-robust (Liang-Zeger)
// covariance with CR0/CR1 small-sample corrections, and Gaussian-likelihood
// fit statistics.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cabinfare/design.hpp"
#include "cabinfare/errors.hpp"
#include "cabinfare/stats.hpp"

namespace cabinfare {

struct FitStats {
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double rmse = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    bool ic_defined = true;  // false when SSR == 0 (log-likelihood degenerates)
};

enum class ClusterCorrection { CR0, CR1 };
enum class DofPolicy { ClustersMinus1, NMinusK };

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    double tss = 0.0;
    long n = 0;
    long k = 0;

    // filled by cluster_cov()
    Eigen::MatrixXd cov;
    Eigen::VectorXd se, tstat, pval;
    long n_clusters = 0;
    double dof = 0.0;

    bool has_cov() const { return cov.size() > 0; }
    int index_of(const std::string& name) const {
        for (size_t j = 0; j < names.size(); ++j)
            if (names[j] == name) return static_cast<int>(j);
        return -1;
    }
};

namespace detail {

// Name the dependency: regress each redundant column on the independent set
// so the error can say which columns move together.
[[noreturn]] inline void report_rank_deficiency(const Eigen::MatrixXd& X,
                                                const std::vector<std::string>& names,
                                                const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
    const long k = X.cols();
    const long r = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    std::vector<long> indep(perm.data(), perm.data() + r);
    std::string msg = "design matrix is rank deficient (rank " + std::to_string(r) + " of " +
                      std::to_string(k) + "):";
    Eigen::MatrixXd Xi(X.rows(), r);
    for (long j = 0; j < r; ++j) Xi.col(j) = X.col(indep[j]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qri(Xi);
    for (long j = r; j < k; ++j) {
        const long dep = perm[j];
        Eigen::VectorXd beta = qri.solve(X.col(dep));
        msg += " '" + names[dep] + "' depends on {";
        bool first = true;
        double scale = beta.cwiseAbs().maxCoeff();
        for (long i = 0; i < r; ++i) {
            if (std::fabs(beta[i]) > 1e-6 * std::max(1.0, scale)) {
                if (!first) msg += ", ";
                msg += "'" + names[indep[i]] + "'";
                first = false;
            }
        }
        msg += "}";
    }
    throw EstimationError(msg);
}

}  // namespace detail

inline FitResult ols_fit(const DesignMatrix& dm) {
    const long n = dm.n(), k = dm.k();
    if (n <= k)
        throw EstimationError("need n > k, got n=" + std::to_string(n) + ", k=" + std::to_string(k));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dm.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) detail::report_rank_deficiency(dm.X, dm.names, qr);

    FitResult fit;
    fit.names = dm.names;
    fit.coef = qr.solve(dm.y);
    fit.residuals = dm.y - dm.X * fit.coef;
    fit.ssr = fit.residuals.squaredNorm();
    const double ybar = dm.y.mean();
    fit.tss = (dm.y.array() - ybar).matrix().squaredNorm();
    fit.n = n;
    fit.k = k;
    return fit;
}

template <class Label>
inline void cluster_cov(FitResult& fit, const DesignMatrix& dm, const std::vector<Label>& clusters,
                        ClusterCorrection correction = ClusterCorrection::CR1,
                        DofPolicy dof_policy = DofPolicy::ClustersMinus1) {
    const long n = fit.n, k = fit.k;
    if (static_cast<long>(clusters.size()) != n)
        throw EstimationError("cluster labels: expected " + std::to_string(n) + " entries, got " +
                              std::to_string(clusters.size()));

    std::map<Label, long> code;
    std::vector<long> g(n);
    for (long i = 0; i < n; ++i)
        g[i] = code.emplace(clusters[i], static_cast<long>(code.size())).first->second;
    const long G = static_cast<long>(code.size());
    if (G < 2) throw EstimationError("cluster-robust covariance needs at least 2 clusters");

    Eigen::MatrixXd XtX = dm.X.transpose() * dm.X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(XtX);
    if (ldlt.info() != Eigen::Success)
        throw EstimationError("X'X factorization failed in cluster covariance");
    Eigen::MatrixXd bread = ldlt.solve(Eigen::MatrixXd::Identity(k, k));

    // meat = sum_g (X_g' u_g)(X_g' u_g)'
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(G, k);
    for (long i = 0; i < n; ++i) scores.row(g[i]) += fit.residuals[i] * dm.X.row(i);
    Eigen::MatrixXd meat = scores.transpose() * scores;

    double c = 1.0;
    if (correction == ClusterCorrection::CR1)
        c = (static_cast<double>(G) / (G - 1)) * (static_cast<double>(n - 1) / (n - k));

    fit.cov = c * bread * meat * bread;
    fit.n_clusters = G;
    fit.dof = dof_policy == DofPolicy::ClustersMinus1 ? static_cast<double>(G - 1)
                                                      : static_cast<double>(n - k);
    fit.se.resize(k);
    fit.tstat.resize(k);
    fit.pval.resize(k);
    for (long j = 0; j < k; ++j) {
        fit.se[j] = std::sqrt(fit.cov(j, j));
        fit.tstat[j] = fit.coef[j] / fit.se[j];
        fit.pval[j] = t_pvalue(fit.tstat[j], fit.dof);
    }
}

inline FitStats fit_stats(const FitResult& fit) {
    const long n = fit.n, k = fit.k;
    if (n <= k) throw EstimationError("fit statistics need n > k");
    FitStats s;
    s.r2 = fit.tss > 0 ? 1.0 - fit.ssr / fit.tss : 1.0;
    s.adj_r2 = 1.0 - (1.0 - s.r2) * (static_cast<double>(n - 1) / (n - k));
    s.rmse = std::sqrt(fit.ssr / (n - k));
    if (fit.ssr <= 1e-12 * std::max(fit.tss, 1.0)) {
        s.ic_defined = false;  // (numerically) perfect fit: ln(SSR/n) degenerates
        s.aic = s.bic = std::nan("");
        return s;
    }
    const double ll2 = n * (1.0 + std::log(2.0 * M_PI)) + n * std::log(fit.ssr / n);  // -2 lnL
    s.aic = ll2 + 2.0 * (k + 1);
    s.bic = ll2 + std::log(static_cast<double>(n)) * (k + 1);
    return s;
}

}  // namespace cabinfare
