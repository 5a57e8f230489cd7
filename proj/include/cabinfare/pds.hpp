#pragma once

// Post-double-selection estimation: run the plugin lasso of the response and
// of every interest regressor on the candidate controls, pool everything that
// was ever selected, then refit the interest regressors plus the pooled
// controls by OLS with cluster-robust inference. Interest regressors are never
// penalized and never dropped.

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cabinfare/lasso.hpp"
#include "cabinfare/regression.hpp"

namespace cabinfare {

// A named block of candidate controls; either a dense matrix or sparse
// indicator-style columns. Selection counts are reported per group.
struct ControlGroup {
    std::string name;
    std::vector<std::string> columns;
    Eigen::MatrixXd dense;   // used when sparse_cols.n == 0
    SparseColumns sparse_cols;

    bool is_sparse() const { return sparse_cols.n > 0; }
    long cols() const { return static_cast<long>(columns.size()); }

    static ControlGroup from_dense(std::string name, std::vector<std::string> col_names,
                                   Eigen::MatrixXd X) {
        if (static_cast<long>(col_names.size()) != X.cols())
            throw EstimationError("control group '" + name + "': name/column count mismatch");
        ControlGroup g;
        g.name = std::move(name);
        g.columns = std::move(col_names);
        g.dense = std::move(X);
        return g;
    }

    // One indicator column per distinct level, all levels kept. Several label
    // vectors may be given (multi-hot): a row scores the number of vectors
    // matching the level.
    static ControlGroup indicators(std::string name,
                                   const std::vector<const std::vector<std::string>*>& label_sets) {
        if (label_sets.empty()) throw EstimationError("indicator group needs label vectors");
        const size_t n = label_sets.front()->size();
        for (const auto* v : label_sets)
            if (v->size() != n) throw EstimationError("indicator group: label vectors differ in length");

        std::map<std::string, std::map<long, double>> levels;  // level -> row -> weight
        for (const auto* v : label_sets)
            for (size_t i = 0; i < n; ++i) levels[(*v)[i]][static_cast<long>(i)] += 1.0;

        ControlGroup g;
        g.name = name;
        g.sparse_cols.n = static_cast<long>(n);
        for (auto& [level, cells] : levels) {
            std::vector<long> rows;
            std::vector<double> vals;
            rows.reserve(cells.size());
            for (auto& [row, w] : cells) {
                rows.push_back(row);
                vals.push_back(w);
            }
            g.columns.push_back(name + "=" + level);
            g.sparse_cols.add(std::move(rows), std::move(vals));
        }
        return g;
    }

    static ControlGroup indicators(std::string name, const std::vector<std::string>& labels) {
        return indicators(std::move(name), std::vector<const std::vector<std::string>*>{&labels});
    }
};

struct PdsOptions {
    LassoConfig lasso;
    ClusterCorrection correction = ClusterCorrection::CR1;
};

struct PdsInterest {
    std::string name;
    double coef = 0.0, se = 0.0, tstat = 0.0, pval = 0.0;
    long n_selected = 0;  // controls picked by this regressor's selection equation
};

struct PdsGroupCount {
    std::string group;
    long selected = 0;
    long total = 0;
};

struct PdsResult {
    std::vector<PdsInterest> interest;
    long y_selected = 0;
    std::vector<long> union_selected;        // indices into the pooled candidate list
    std::vector<std::string> union_names;
    std::vector<PdsGroupCount> group_counts;
    std::vector<std::string> dropped_collinear;
    bool all_converged = true;
    FitResult fit;       // final OLS over interest + pooled controls
    FitStats stats;
    double dof = 0.0;
    long n_clusters = 0;
};

namespace detail {

// All candidate columns pooled in declaration order; sparse storage only when
// every group is sparse, otherwise one dense matrix.
struct CandidatePool {
    std::vector<std::string> names;
    std::vector<std::pair<long, long>> spans;  // [begin,end) per group
    bool sparse = false;
    SparseColumns sp;
    Eigen::MatrixXd dn;
    long n = 0;

    long cols() const { return static_cast<long>(names.size()); }

    Eigen::VectorXd column(long j) const {
        if (!sparse) return dn.col(j);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (size_t t = 0; t < sp.idx[j].size(); ++t) x[sp.idx[j][t]] = sp.val[j][t];
        return x;
    }
};

inline CandidatePool pool_candidates(const std::vector<ControlGroup>& groups, long n) {
    CandidatePool pool;
    pool.n = n;
    pool.sparse = !groups.empty();
    long total = 0;
    for (const auto& g : groups) {
        if (!g.is_sparse()) pool.sparse = false;
        total += g.cols();
        if (g.is_sparse()) {
            if (g.sparse_cols.n != n)
                throw EstimationError("control group '" + g.name + "': row count mismatch");
        } else if (g.dense.rows() != n) {
            throw EstimationError("control group '" + g.name + "': row count mismatch");
        }
    }
    long at = 0;
    if (pool.sparse) {
        pool.sp.n = n;
    } else {
        pool.dn.resize(n, total);
    }
    for (const auto& g : groups) {
        pool.spans.emplace_back(at, at + g.cols());
        for (long j = 0; j < g.cols(); ++j) {
            pool.names.push_back(g.columns[j]);
            if (pool.sparse) {
                pool.sp.idx.push_back(g.sparse_cols.idx[j]);
                pool.sp.val.push_back(g.sparse_cols.val[j]);
            } else if (g.is_sparse()) {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                for (size_t t = 0; t < g.sparse_cols.idx[j].size(); ++t)
                    x[g.sparse_cols.idx[j][t]] = g.sparse_cols.val[j][t];
                pool.dn.col(at) = x;
            } else {
                pool.dn.col(at) = g.dense.col(j);
            }
            ++at;
        }
    }
    return pool;
}

inline LassoFit select_controls(const CandidatePool& pool, const Eigen::VectorXd& r,
                                const LassoConfig& cfg) {
    return pool.sparse ? rlasso(pool.sp, r, cfg) : rlasso(pool.dn, r, cfg);
}

// Greedy left-to-right rank filter: keep a column only if it adds to the span
// of those already kept. Required columns (intercept, interest) must survive.
struct RankFilter {
    Eigen::MatrixXd Q;
    long r = 0;
    explicit RankFilter(long n, long max_cols) : Q(n, max_cols) {}

    bool admit(const Eigen::VectorXd& col) {
        Eigen::VectorXd x = col;
        const double base = x.norm();
        if (base <= 0.0) return false;
        for (int pass = 0; pass < 2; ++pass)
            for (long j = 0; j < r; ++j) x -= Q.col(j).dot(x) * Q.col(j);
        const double left = x.norm();
        if (left <= 1e-8 * base) return false;
        Q.col(r++) = x / left;
        return true;
    }
};

}  // namespace detail

inline std::string report_selected_counts(const PdsResult& res) {
    std::string out;
    for (size_t i = 0; i < res.group_counts.size(); ++i) {
        if (i) out += ", ";
        out += res.group_counts[i].group + ": " + std::to_string(res.group_counts[i].selected) +
               "/" + std::to_string(res.group_counts[i].total);
    }
    return out;
}

template <class Label>
PdsResult pds_estimate(const Eigen::VectorXd& y, const std::string& y_name,
                       const Eigen::MatrixXd& D, const std::vector<std::string>& interest_names,
                       const std::vector<ControlGroup>& groups,
                       const std::vector<Label>& cluster_labels, const PdsOptions& opts = {}) {
    const long n = y.size();
    const long m = D.cols();
    if (m < 1) throw EstimationError("post-double-selection needs at least one interest regressor");
    if (D.rows() != n) throw EstimationError("interest matrix row count does not match response");
    if (static_cast<long>(interest_names.size()) != m)
        throw EstimationError("interest names do not match interest columns");

    detail::CandidatePool pool = detail::pool_candidates(groups, n);
    const long p = pool.cols();

    PdsResult res;
    std::vector<char> in_union(p, 0);

    if (p > 0) {
        LassoFit fy = detail::select_controls(pool, y, opts.lasso);
        res.y_selected = static_cast<long>(fy.selected.size());
        res.all_converged = res.all_converged && fy.cd_converged && fy.loadings_converged;
        for (long j : fy.selected) in_union[j] = 1;

        for (long d = 0; d < m; ++d) {
            LassoFit fd = detail::select_controls(pool, D.col(d), opts.lasso);
            res.all_converged = res.all_converged && fd.cd_converged && fd.loadings_converged;
            PdsInterest pi;
            pi.name = interest_names[d];
            pi.n_selected = static_cast<long>(fd.selected.size());
            res.interest.push_back(pi);
            for (long j : fd.selected) in_union[j] = 1;
        }
    } else {
        for (long d = 0; d < m; ++d) {
            PdsInterest pi;
            pi.name = interest_names[d];
            res.interest.push_back(pi);
        }
    }

    for (long j = 0; j < p; ++j)
        if (in_union[j]) {
            res.union_selected.push_back(j);
            res.union_names.push_back(pool.names[j]);
        }
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        PdsGroupCount gc;
        gc.group = groups[gi].name;
        gc.total = groups[gi].cols();
        for (long j = pool.spans[gi].first; j < pool.spans[gi].second; ++j)
            gc.selected += in_union[j];
        res.group_counts.push_back(gc);
    }

    // final OLS design: intercept, interest, pooled controls (rank-filtered)
    const long max_cols = 1 + m + static_cast<long>(res.union_selected.size());
    detail::RankFilter filter(n, max_cols);
    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> cols;

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    if (!filter.admit(ones)) throw EstimationError("empty design");
    names.push_back("(intercept)");
    cols.push_back(ones);
    for (long d = 0; d < m; ++d) {
        if (!filter.admit(D.col(d)))
            throw EstimationError("interest regressor '" + interest_names[d] +
                                  "' is collinear with the intercept or earlier interest columns");
        names.push_back(interest_names[d]);
        cols.push_back(D.col(d));
    }
    for (long j : res.union_selected) {
        Eigen::VectorXd x = pool.column(j);
        if (!filter.admit(x)) {
            res.dropped_collinear.push_back(pool.names[j]);
            continue;
        }
        names.push_back(pool.names[j]);
        cols.push_back(std::move(x));
    }

    DesignMatrix dm;
    dm.X.resize(n, static_cast<long>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) dm.X.col(static_cast<long>(j)) = cols[j];
    dm.y = y;
    dm.names = names;
    dm.origins.assign(names.size(), ColumnOrigin::Raw);
    dm.origins[0] = ColumnOrigin::Intercept;
    dm.response_name = y_name;
    dm.kept_rows.resize(n);
    std::iota(dm.kept_rows.begin(), dm.kept_rows.end(), 0);

    res.fit = ols_fit(dm);
    if (cluster_labels.empty()) {
        std::vector<long> singletons(n);
        std::iota(singletons.begin(), singletons.end(), 0);
        cluster_cov(res.fit, dm, singletons, opts.correction, DofPolicy::NMinusK);
    } else {
        cluster_cov(res.fit, dm, cluster_labels, opts.correction, DofPolicy::ClustersMinus1);
    }
    res.stats = fit_stats(res.fit);
    res.dof = res.fit.dof;
    res.n_clusters = res.fit.n_clusters;

    for (long d = 0; d < m; ++d) {
        const long j = 1 + d;  // position after intercept
        res.interest[d].coef = res.fit.coef[j];
        res.interest[d].se = res.fit.se[j];
        res.interest[d].tstat = res.fit.tstat[j];
        res.interest[d].pval = res.fit.pval[j];
    }
    return res;
}

// convenience: unclustered (heteroskedasticity-robust) inference
inline PdsResult pds_estimate(const Eigen::VectorXd& y, const std::string& y_name,
                              const Eigen::MatrixXd& D,
                              const std::vector<std::string>& interest_names,
                              const std::vector<ControlGroup>& groups,
                              const PdsOptions& opts = {}) {
    return pds_estimate(y, y_name, D, interest_names, groups, std::vector<long>{}, opts);
}

}  // namespace cabinfare
