#pragma once

// Thin wrappers over Boost.Math so distribution choices live in one place.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "cabinfare/errors.hpp"

namespace cabinfare {

inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw EstimationError("normal quantile needs p in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double normal_cdf(double x) {
    return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

// two-sided p-value for a t statistic with df degrees of freedom
inline double t_pvalue(double t, double df) {
    if (!(df > 0)) throw EstimationError("t p-value needs positive degrees of freedom");
    if (!std::isfinite(t)) return std::isnan(t) ? std::nan("") : 0.0;
    boost::math::students_t_distribution<double> dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

inline const char* significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    return "";
}

}  // namespace cabinfare
