#pragma once

// L1-penalized least squares by cyclic coordinate descent with an active-set
// strategy, plus the plugin penalty level and data-driven penalty loadings.
//
// Objective, for standardized columns z_j and centered response:
//     (1/2n) ||y - Z b||^2 + (lambda/n) sum_j psi_j |b_j|
// lambda = 2 c sqrt(n) Phi^-1(1 - gamma/(2p)),  gamma defaulting to 0.1/ln n.
// Loadings psi_j = sqrt((1/n) sum_i z_ij^2 e_i^2) start from e = y - ybar and
// are refreshed from fit residuals until they settle.
//
// Two interchangeable backends drive the same descent loop: a dense matrix
// (standardized explicitly) and a sparse column store (standardization applied
// implicitly, so indicator columns never materialize dense centered copies).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cabinfare/errors.hpp"
#include "cabinfare/stats.hpp"

namespace cabinfare {

struct LassoConfig {
    double c = 1.1;
    double gamma = 0.0;        // <= 0 means 0.1 / ln(n)
    int max_loading_iter = 15;
    double loading_tol = 1e-4;
    double cd_tol = 1e-7;      // max coefficient change per full sweep
    long max_sweeps = 10000;
};

inline double soft_threshold(double u, double t) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

inline double plugin_lambda(long n, long p, double c, double gamma) {
    if (n < 2 || p < 1) throw EstimationError("plugin penalty needs n >= 2 and p >= 1");
    double tail = gamma / (2.0 * p);
    if (!(tail > 0.0 && tail < 1.0)) throw EstimationError("plugin penalty: gamma out of range");
    return 2.0 * c * std::sqrt(static_cast<double>(n)) * normal_quantile(1.0 - tail);
}

// psi_j = sqrt((1/n) sum_i z_ij^2 e_i^2)
inline Eigen::VectorXd penalty_loadings(const Eigen::MatrixXd& Z, const Eigen::VectorXd& e) {
    Eigen::VectorXd psi(Z.cols());
    for (long j = 0; j < Z.cols(); ++j)
        psi[j] = std::sqrt((Z.col(j).array().square() * e.array().square()).sum() / Z.rows());
    return psi;
}

struct Standardizer {
    Eigen::VectorXd mean, scale;
};

// center each column and scale to unit root-mean-square, in place
inline Standardizer standardize_columns(Eigen::MatrixXd& X) {
    const long n = X.rows(), p = X.cols();
    Standardizer s;
    s.mean.resize(p);
    s.scale.resize(p);
    for (long j = 0; j < p; ++j) {
        s.mean[j] = X.col(j).mean();
        X.col(j).array() -= s.mean[j];
        double var = X.col(j).squaredNorm() / n;
        if (var <= 0.0)
            throw EstimationError("column " + std::to_string(j) + " is constant; cannot standardize");
        s.scale[j] = std::sqrt(var);
        X.col(j) /= s.scale[j];
    }
    return s;
}

// Column store for sparse regressors (indicator blocks, mostly-zero columns).
struct SparseColumns {
    long n = 0;
    std::vector<std::vector<long>> idx;     // per column, sorted row indices
    std::vector<std::vector<double>> val;   // matching values

    long cols() const { return static_cast<long>(idx.size()); }

    void add(std::vector<long> rows, std::vector<double> values) {
        if (rows.size() != values.size())
            throw EstimationError("sparse column: index/value length mismatch");
        long prev = -1;
        for (long r : rows) {
            if (r <= prev || r >= n)
                throw EstimationError("sparse column: row indices must be sorted, unique, in [0,n)");
            prev = r;
        }
        idx.push_back(std::move(rows));
        val.push_back(std::move(values));
    }

    void add_indicator(std::vector<long> rows) {
        std::vector<double> ones(rows.size(), 1.0);
        add(std::move(rows), std::move(ones));
    }

    static SparseColumns from_dense(const Eigen::MatrixXd& X) {
        SparseColumns s;
        s.n = X.rows();
        for (long j = 0; j < X.cols(); ++j) {
            std::vector<long> rows;
            std::vector<double> vals;
            for (long i = 0; i < X.rows(); ++i)
                if (X(i, j) != 0.0) {
                    rows.push_back(i);
                    vals.push_back(X(i, j));
                }
            s.add(std::move(rows), std::move(vals));
        }
        return s;
    }
};

struct LassoFit {
    Eigen::VectorXd beta;       // original-scale coefficients
    Eigen::VectorXd beta_std;   // standardized-column coefficients
    double intercept = 0.0;
    Eigen::VectorXd loadings;   // final psi
    double lambda = 0.0;
    double gamma = 0.0;
    Eigen::VectorXd residuals;
    std::vector<long> selected;  // indices with nonzero coefficient
    long sweeps = 0;
    int loading_passes = 0;
    bool cd_converged = true;
    bool loadings_converged = true;
};

struct KktReport {
    double max_violation = 0.0;
    bool ok = true;
};

namespace detail {

// One descent pass over `cols`; returns the largest coefficient move.
// Backend contract: n(), p(), a(j) = (1/n)||z_j||^2, grad(j) = (1/n) z_j'r,
// update(j, d) applies r -= d * z_j.
template <class Backend>
double cd_sweep(Backend& b, const std::vector<long>& cols, const Eigen::VectorXd& psi,
                double lam_over_n, Eigen::VectorXd& beta) {
    double worst = 0.0;
    for (long j : cols) {
        const double aj = b.a(j);
        if (aj <= 0.0) continue;
        const double u = beta[j] * aj + b.grad(j);
        const double bj = soft_threshold(u, lam_over_n * psi[j]) / aj;
        const double d = bj - beta[j];
        if (d != 0.0) {
            b.update(j, d);
            beta[j] = bj;
            const double move = std::fabs(d);
            if (move > worst) worst = move;
        }
    }
    return worst;
}

// Full sweep, then refine over the nonzero set, then certify with another
// full sweep; repeat until a full sweep moves nothing beyond cd_tol.
template <class Backend>
long cd_engine(Backend& b, const Eigen::VectorXd& psi, double lam_over_n, Eigen::VectorXd& beta,
               const LassoConfig& cfg, bool& converged) {
    const long p = b.p();
    converged = true;
    if (p == 0) return 0;
    std::vector<long> all(p);
    std::iota(all.begin(), all.end(), 0);
    std::vector<long> active;
    long sweeps = 0;
    converged = false;
    while (sweeps < cfg.max_sweeps) {
        ++sweeps;
        if (cd_sweep(b, all, psi, lam_over_n, beta) < cfg.cd_tol) {
            converged = true;
            break;
        }
        active.clear();
        for (long j = 0; j < p; ++j)
            if (beta[j] != 0.0) active.push_back(j);
        while (!active.empty() && sweeps < cfg.max_sweeps) {
            ++sweeps;
            if (cd_sweep(b, active, psi, lam_over_n, beta) < cfg.cd_tol) break;
        }
    }
    return sweeps;
}

class DenseStdBackend {
public:
    explicit DenseStdBackend(const Eigen::MatrixXd& X) : Z_(X) { std_ = standardize_columns(Z_); }

    void init(const Eigen::VectorXd& y_centered) { r_ = y_centered; }
    long n() const { return Z_.rows(); }
    long p() const { return Z_.cols(); }
    double a(long) const { return 1.0; }
    double grad(long j) const { return Z_.col(j).dot(r_) / Z_.rows(); }
    void update(long j, double d) { r_ -= d * Z_.col(j); }
    Eigen::VectorXd loadings() const { return penalty_loadings(Z_, r_); }
    Eigen::VectorXd residuals() const { return r_; }
    const Standardizer& standardizer() const { return std_; }

private:
    Eigen::MatrixXd Z_;
    Standardizer std_;
    Eigen::VectorXd r_;
};

// Implicit standardization: z_j = (x_j - mu_j)/s_j, residual kept as
// r = v + shift so penalized updates touch only the nonzeros of x_j.
class SparseStdBackend {
public:
    explicit SparseStdBackend(const SparseColumns& X) : X_(&X) {
        const long n = X.n, p = X.cols();
        if (n < 1) throw EstimationError("sparse columns: n not set");
        colsum_.resize(p);
        std_.mean.resize(p);
        std_.scale.resize(p);
        for (long j = 0; j < p; ++j) {
            double s = 0.0, s2 = 0.0;
            for (double v : X.val[j]) {
                s += v;
                s2 += v * v;
            }
            colsum_[j] = s;
            std_.mean[j] = s / n;
            double var = s2 / n - std_.mean[j] * std_.mean[j];
            if (var <= 0.0)
                throw EstimationError("column " + std::to_string(j) + " is constant; cannot standardize");
            std_.scale[j] = std::sqrt(var);
        }
    }

    void init(const Eigen::VectorXd& y_centered) {
        v_ = y_centered;
        shift_ = 0.0;
        sum_v_ = v_.sum();
    }
    long n() const { return X_->n; }
    long p() const { return X_->cols(); }
    double a(long) const { return 1.0; }

    double grad(long j) const {
        const auto& I = X_->idx[j];
        const auto& V = X_->val[j];
        double dot = 0.0;
        for (size_t t = 0; t < I.size(); ++t) dot += V[t] * v_[I[t]];
        const double nn = static_cast<double>(n());
        return (dot + shift_ * colsum_[j] - std_.mean[j] * (sum_v_ + nn * shift_)) /
               (nn * std_.scale[j]);
    }

    void update(long j, double d) {
        const double q = d / std_.scale[j];
        const auto& I = X_->idx[j];
        const auto& V = X_->val[j];
        for (size_t t = 0; t < I.size(); ++t) v_[I[t]] -= q * V[t];
        sum_v_ -= q * colsum_[j];
        shift_ += q * std_.mean[j];
    }

    Eigen::VectorXd loadings() const {
        const double nn = static_cast<double>(n());
        double r2_total = 0.0;
        for (long i = 0; i < n(); ++i) {
            const double r = v_[i] + shift_;
            r2_total += r * r;
        }
        Eigen::VectorXd psi(p());
        for (long j = 0; j < p(); ++j) {
            const auto& I = X_->idx[j];
            const auto& V = X_->val[j];
            double a = 0.0, b = 0.0;  // sum x^2 r^2, sum x r^2 over nonzeros
            for (size_t t = 0; t < I.size(); ++t) {
                const double r = v_[I[t]] + shift_;
                a += V[t] * V[t] * r * r;
                b += V[t] * r * r;
            }
            const double mu = std_.mean[j], s = std_.scale[j];
            psi[j] = std::sqrt((a - 2.0 * mu * b + mu * mu * r2_total) / (nn * s * s));
        }
        return psi;
    }

    Eigen::VectorXd residuals() const { return v_.array() + shift_; }
    const Standardizer& standardizer() const { return std_; }

private:
    const SparseColumns* X_;
    Eigen::VectorXd colsum_;
    Standardizer std_;
    Eigen::VectorXd v_;
    double shift_ = 0.0;
    double sum_v_ = 0.0;
};

template <class Backend>
LassoFit rlasso_impl(Backend& b, const Eigen::VectorXd& y, const LassoConfig& cfg) {
    const long n = b.n(), p = b.p();
    if (y.size() != n) throw EstimationError("lasso: response length does not match design");

    const double ybar = y.mean();
    Eigen::VectorXd y_c = y.array() - ybar;
    if (p > 0 && y_c.cwiseAbs().maxCoeff() <= 0.0)
        throw EstimationError("response has no variation; penalty loadings undefined");
    b.init(y_c);

    LassoFit fit;
    fit.gamma = cfg.gamma > 0.0 ? cfg.gamma : 0.1 / std::log(std::max<double>(n, 3.0));
    if (p == 0) {
        fit.intercept = ybar;
        fit.residuals = y_c;
        return fit;
    }
    fit.lambda = plugin_lambda(n, p, cfg.c, fit.gamma);
    const double lam_over_n = fit.lambda / n;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd psi = b.loadings();  // from e0 = y - ybar
    bool conv = false;
    fit.loadings_converged = false;
    for (int pass = 1; pass <= cfg.max_loading_iter; ++pass) {
        fit.loading_passes = pass;
        fit.sweeps += cd_engine(b, psi, lam_over_n, beta, cfg, conv);
        Eigen::VectorXd fresh = b.loadings();
        double rel = 0.0;
        for (long j = 0; j < p; ++j)
            rel = std::max(rel, std::fabs(fresh[j] - psi[j]) / std::max(psi[j], 1e-12));
        psi = fresh;
        if (rel < cfg.loading_tol) {
            fit.loadings_converged = true;
            break;
        }
    }
    // make the reported solution exact for the reported loadings
    fit.sweeps += cd_engine(b, psi, lam_over_n, beta, cfg, conv);
    fit.cd_converged = conv;

    const Standardizer& st = b.standardizer();
    fit.beta_std = beta;
    fit.loadings = psi;
    fit.beta.resize(p);
    fit.intercept = ybar;
    for (long j = 0; j < p; ++j) {
        fit.beta[j] = beta[j] / st.scale[j];
        fit.intercept -= fit.beta[j] * st.mean[j];
    }
    fit.residuals = b.residuals();
    for (long j = 0; j < p; ++j)
        if (beta[j] != 0.0) fit.selected.push_back(j);
    return fit;
}

}  // namespace detail

// Raw engine: minimize (1/2n)||y - Z b||^2 + (lambda/n) sum psi_j |b_j| over
// the given columns as-is (no centering, no intercept). `beta` is the warm
// start and receives the solution; returns sweep count.
inline long coordinate_descent(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& psi, double lambda, Eigen::VectorXd& beta,
                               const LassoConfig& cfg = {}, bool* converged = nullptr) {
    const long n = Z.rows(), p = Z.cols();
    if (y.size() != n || psi.size() != p || beta.size() != p)
        throw EstimationError("coordinate_descent: dimension mismatch");

    struct RawBackend {
        const Eigen::MatrixXd& Z;
        Eigen::VectorXd r;
        Eigen::VectorXd a_;
        long n() const { return Z.rows(); }
        long p() const { return Z.cols(); }
        double a(long j) const { return a_[j]; }
        double grad(long j) const { return Z.col(j).dot(r) / Z.rows(); }
        void update(long j, double d) { r -= d * Z.col(j); }
    } b{Z, y - Z * beta, Z.colwise().squaredNorm().transpose() / double(n)};

    bool conv = false;
    long sweeps = detail::cd_engine(b, psi, lambda / n, beta, cfg, conv);
    if (converged) *converged = conv;
    return sweeps;
}

// Stationarity check for the raw-engine objective.
inline KktReport kkt_check(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& psi, double lambda, const Eigen::VectorXd& beta,
                           double tol = 1e-6) {
    const long n = Z.rows();
    Eigen::VectorXd r = y - Z * beta;
    KktReport rep;
    for (long j = 0; j < Z.cols(); ++j) {
        const double g = Z.col(j).dot(r) / n;
        const double bound = lambda / n * psi[j];
        double viol;
        if (beta[j] != 0.0)
            viol = std::fabs(g - bound * (beta[j] > 0 ? 1.0 : -1.0));
        else
            viol = std::max(0.0, std::fabs(g) - bound);
        rep.max_violation = std::max(rep.max_violation, viol);
    }
    rep.ok = rep.max_violation <= tol;
    return rep;
}

inline double lasso_objective(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& psi, double lambda,
                              const Eigen::VectorXd& beta) {
    const long n = Z.rows();
    const double rss = (y - Z * beta).squaredNorm();
    return rss / (2.0 * n) + lambda / n * psi.cwiseAbs().dot(beta.cwiseAbs());
}

// Plugin-penalty lasso with iterated loadings (dense backend).
inline LassoFit rlasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const LassoConfig& cfg = {}) {
    detail::DenseStdBackend b(X);
    return detail::rlasso_impl(b, y, cfg);
}

// Same estimator over sparse columns.
inline LassoFit rlasso(const SparseColumns& X, const Eigen::VectorXd& y,
                       const LassoConfig& cfg = {}) {
    detail::SparseStdBackend b(X);
    return detail::rlasso_impl(b, y, cfg);
}

}  // namespace cabinfare
