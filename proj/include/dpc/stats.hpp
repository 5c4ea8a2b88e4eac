#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "dpc/error.hpp"

namespace dpc::stats {

/// Two-sided normal quantile for 95% intervals.
inline constexpr double z95 = 1.96;

/// Streaming mean and variance.
class welford {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }
    double ci_halfwidth() const { return z95 * standard_error(); }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Normal-approximation half-width for a Bernoulli proportion.
inline double proportion_ci(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return z95 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

struct gof_result {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square goodness of fit of integer counts to Poisson(mean).
/// Consecutive values are grouped greedily into cells with expected count at
/// least min_expected; the upper tail is folded into the last cell.
inline gof_result poisson_chi_square(std::span<const long> counts, double mean, double min_expected = 5.0) {
    detail::require(!counts.empty(), "poisson_chi_square: no samples");
    detail::require(mean > 0.0, "poisson_chi_square: mean must be positive");
    const double n = static_cast<double>(counts.size());
    boost::math::poisson_distribution<double> pois(mean);
    // upper[c] = largest value in cell c; the last cell is open-ended.
    std::vector<long> upper;
    std::vector<double> expected;
    double acc = 0.0;
    for (long k = 0;; ++k) {
        acc += n * boost::math::pdf(pois, static_cast<double>(k));
        const double rest = n * boost::math::cdf(boost::math::complement(pois, static_cast<double>(k)));
        if (acc >= min_expected) {
            upper.push_back(k);
            expected.push_back(acc);
            acc = 0.0;
        }
        if (rest < min_expected) {
            if (expected.empty()) {
                upper.push_back(k);
                expected.push_back(acc);
            }
            expected.back() += acc + rest;
            break;
        }
    }
    detail::require(expected.size() >= 2, "poisson_chi_square: too few samples for a meaningful test");
    std::vector<double> observed(expected.size(), 0.0);
    for (long c : counts) {
        const auto it = std::lower_bound(upper.begin(), upper.end(), c);
        const std::size_t cell = it == upper.end() ? upper.size() - 1 : static_cast<std::size_t>(it - upper.begin());
        observed[cell] += 1.0;
    }
    gof_result r;
    for (std::size_t c = 0; c < expected.size(); ++c)
        r.statistic += (observed[c] - expected[c]) * (observed[c] - expected[c]) / expected[c];
    r.dof = expected.size() - 1;
    boost::math::chi_squared_distribution<double> chi(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
    return r;
}

/// Kolmogorov distribution tail Q(x) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 x^2).
inline double kolmogorov_q(double x) {
    if (x < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * x * x);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct ks_result {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction on the effective size).
inline ks_result ks_two_sample(std::vector<double> a, std::vector<double> b) {
    detail::require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

} // namespace dpc::stats
