#ifndef GSAUDIT_STATS_HPP
#define GSAUDIT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

/**
 * @file stats.hpp
 * @brief Small numerical helpers shared across modules.
 */

namespace gsaudit::stats {

inline double median(std::vector<double> values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double upper = values[mid];
    if (n % 2 == 1) {
        return upper;
    }
    double lower = *std::max_element(values.begin(), values.begin() + mid);
    return (lower + upper) / 2;
}

inline double mean(std::span<const double> values) {
    double sum = 0;
    for (auto v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

/**
 * Sum of squared deviations from `centre`.
 */
inline double sum_squares(std::span<const double> values, double centre) {
    double ss = 0;
    for (auto v : values) {
        double d = v - centre;
        ss += d * d;
    }
    return ss;
}

/**
 * Two-sided normal tail probability `2 * Phi(-|z|)`.
 */
inline double normal_two_sided(double z) {
    if (std::isnan(z)) {
        return 1;
    }
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

/**
 * Two-sided Student-t tail probability with `df` degrees of freedom.
 */
inline double t_two_sided(double t, double df) {
    if (std::isnan(t)) {
        return 1;
    }
    if (std::isinf(t)) {
        return 0;
    }
    boost::math::students_t dist(df);
    double p = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return std::min(1.0, p);
}

inline double log_choose(long long n, long long k) {
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) - std::lgamma(static_cast<double>(n - k) + 1);
}

/**
 * `log(exp(a) + exp(b))` without overflow.
 */
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}

#endif
