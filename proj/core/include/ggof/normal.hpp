#pragma once

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

namespace ggof {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Standard normal density.
inline double norm_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Standard normal CDF.
inline double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

// Standard normal survival function (upper tail), accurate for large z.
inline double norm_sf(double z) {
    return 0.5 * std::erfc(z / kSqrt2);
}

// Standard normal quantile. p outside (0,1) maps to +/-infinity.
inline double norm_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

// Upper-tail quantile: z with P(Z > z) = p.
inline double norm_upper_quantile(double p) {
    return -norm_quantile(p);
}

}  // namespace ggof
