#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "dpc/error.hpp"
#include "dpc/geometry.hpp"
#include "dpc/rng.hpp"

namespace dpc {

struct link_draw {
    double distance = 1.0;
    double fading = 1.0;
    double power = 1.0;
};

struct interferer {
    point location;
    double power = 1.0;
    double fading = 1.0;
};

/// Sum of P_k H_k r_k^-alpha for a receiver at the origin, skipping interferers
/// at distance <= exclusion_radius.
inline double compute_interference(std::span<const interferer> interferers, double alpha,
                                   double exclusion_radius = 0.0) {
    detail::require(alpha > 2.0, "compute_interference: alpha must exceed 2");
    detail::require(exclusion_radius >= 0.0, "compute_interference: negative exclusion radius");
    double sum = 0.0;
    for (const auto& k : interferers) {
        const double r = k.location.norm();
        if (r <= exclusion_radius) continue;
        sum += k.power * k.fading * std::pow(r, -alpha);
    }
    return sum;
}

/// SIR of the reference link, or nullopt when there is no interference at all
/// (the model has no noise floor, so the caller must resample).
inline std::optional<double> compute_sir(const link_draw& link, double interference, double alpha) {
    detail::require(link.distance > 0.0, "compute_sir: link distance must be positive");
    if (!(interference > 0.0)) return std::nullopt;
    return link.power * link.fading * std::pow(link.distance, -alpha) / interference;
}

/// Closed-form mean interference from a unit-power PPP outside the unit disc.
inline double mean_interference_unit_exclusion(double lambda, double alpha) {
    detail::require(alpha > 2.0, "mean interference: alpha must exceed 2");
    return 2.0 * std::numbers::pi * lambda / (alpha - 2.0);
}

struct rho0_estimate {
    double mean_I = 0.0;
    double mean_inv_I = 0.0;
    double rho0 = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t trials = 0;
    std::size_t empty_realizations = 0;
};

/// rho0 = mean_I * mean(1/I) from interference samples. Welford accumulation in
/// sample order.
inline rho0_estimate rho0_from_samples(std::span<const double> samples, double mean_I) {
    rho0_estimate out;
    out.mean_I = mean_I;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double I : samples) {
        if (!(I > 0.0)) {
            ++out.empty_realizations;
            continue;
        }
        const double x = 1.0 / I;
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    if (n == 0)
        throw insufficient_samples("estimate_rho0: every realization had zero interference; enlarge the window");
    out.trials = n;
    out.mean_inv_I = mean;
    out.rho0 = mean_I * mean;
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    out.ci_halfwidth = 1.96 * mean_I * std::sqrt(var / static_cast<double>(n));
    return out;
}

/// Interference at the origin from one unit-power PPP realization with
/// Rayleigh fading, ignoring points inside exclusion_radius.
template <class URBG>
double sample_unit_interference(double lambda, double alpha, double window_radius, double exclusion_radius,
                                URBG& g) {
    const point_set pts = sample_ppp(lambda, window_radius, g);
    double sum = 0.0;
    for (const auto& p : pts.points) {
        const double r = p.norm();
        if (r <= exclusion_radius) continue;
        sum += exponential1(g) * std::pow(r, -alpha);
    }
    return sum;
}

/// Monte Carlo estimate of rho0 = E[I0(1)] E[1/I0(1)] with the unit exclusion disc.
inline rho0_estimate estimate_rho0(double lambda, double alpha, double exclusion_radius, std::size_t trials,
                                   std::uint64_t seed, double window_radius = 0.0) {
    detail::require(lambda > 0.0 && std::isfinite(lambda), "estimate_rho0: lambda must be positive");
    detail::require(alpha > 2.0, "estimate_rho0: alpha must exceed 2");
    detail::require(trials >= 1000, "estimate_rho0: at least 1000 trials required");
    // E[I] diverges without an exclusion disc.
    detail::require(exclusion_radius > 0.0, "estimate_rho0: exclusion radius must be positive");
    const double window = window_radius > 0.0 ? window_radius : simulation_window_radius(alpha);
    std::vector<double> samples(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        auto g = make_engine(seed, t, stream::interferers);
        samples[t] = sample_unit_interference(lambda, alpha, window, exclusion_radius, g);
    }
    return rho0_from_samples(samples, mean_interference_unit_exclusion(lambda, alpha) *
                                          std::pow(exclusion_radius, 2.0 - alpha));
}

} // namespace dpc
