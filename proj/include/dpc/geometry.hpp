#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpc/error.hpp"
#include "dpc/rng.hpp"

namespace dpc {

struct point {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
    friend bool operator==(const point&, const point&) = default;
};

/// Realization of a homogeneous PPP restricted to a disc centered at the origin.
struct point_set {
    std::vector<point> points;
    double window_radius = 0.0;
    double intensity = 0.0;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    friend bool operator==(const point_set&, const point_set&) = default;
};

/// Uniform point on the disc of the given radius.
template <class URBG>
point sample_uniform_disc(double radius, URBG& g) {
    const double r = radius * std::sqrt(uniform01(g));
    const double theta = 2.0 * std::numbers::pi * uniform01(g);
    return {r * std::cos(theta), r * std::sin(theta)};
}

template <class URBG>
point_set sample_ppp(double intensity, double window_radius, URBG& g) {
    detail::require(std::isfinite(intensity) && intensity >= 0.0,
                    "sample_ppp: intensity must be finite and nonnegative");
    detail::require(std::isfinite(window_radius) && window_radius > 0.0,
                    "sample_ppp: window radius must be finite and positive");
    point_set out;
    out.window_radius = window_radius;
    out.intensity = intensity;
    const double mean = intensity * std::numbers::pi * window_radius * window_radius;
    if (mean <= 0.0) return out;
    std::poisson_distribution<long> count(mean);
    const long n = count(g);
    out.points.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) out.points.push_back(sample_uniform_disc(window_radius, g));
    return out;
}

inline point_set sample_ppp(double intensity, double window_radius, std::uint64_t seed) {
    auto g = make_engine(seed, 0, stream::interferers);
    return sample_ppp(intensity, window_radius, g);
}

/// Applies T = sqrt(factor) * I2. Intensity becomes intensity / factor.
inline point_set scale_points(const point_set& in, double factor) {
    detail::require(std::isfinite(factor) && factor > 0.0, "scale_points: factor must be positive");
    if (factor == 1.0) return in;
    const double k = std::sqrt(factor);
    point_set out;
    out.window_radius = in.window_radius * k;
    out.intensity = in.intensity / factor;
    out.points.reserve(in.points.size());
    for (const auto& p : in.points) out.points.push_back({p.x * k, p.y * k});
    return out;
}

/// Count of points inside the disc of radius r around c (closed disc).
inline std::size_t count_in_disc(const point_set& s, point c, double r) {
    return static_cast<std::size_t>(std::count_if(s.points.begin(), s.points.end(), [&](const point& p) {
        return std::hypot(p.x - c.x, p.y - c.y) <= r;
    }));
}

/// Independent thinning with retention probability keep.
template <class URBG>
point_set thin(const point_set& in, double keep, URBG& g) {
    detail::require(keep >= 0.0 && keep <= 1.0, "thin: retention probability outside [0,1]");
    point_set out;
    out.window_radius = in.window_radius;
    out.intensity = in.intensity * keep;
    for (const auto& p : in.points)
        if (uniform01(g) < keep) out.points.push_back(p);
    return out;
}

/// Simulation window: smallest radius whose neglected mean interference tail
/// (beyond the window, unit exclusion disc convention) is below tail_fraction of
/// the included mean, floored at min_radius.
inline double simulation_window_radius(double alpha, double tail_fraction = 1e-3, double min_radius = 500.0) {
    detail::require(alpha > 2.0, "simulation_window_radius: alpha must exceed 2");
    // R^(2-a) / (1 - R^(2-a)) < f  <=>  R^(2-a) < f / (1 + f)
    const double target = tail_fraction / (1.0 + tail_fraction);
    const double r = std::pow(target, 1.0 / (2.0 - alpha));
    return std::max(min_radius, r);
}

/// Default window for intensity lambda: the fixed-radius rule above, widened so the
/// disc holds enough expected interferers that the truncated far field (which scales
/// like n^(1 - a/2)) stays below tail_fraction. The count is capped at max_count.
inline double intensity_window_radius(double alpha, double lambda, double tail_fraction = 5e-3,
                                      double max_count = 2e4) {
    detail::require(alpha > 2.0, "intensity_window_radius: alpha must exceed 2");
    const double base = simulation_window_radius(alpha);
    if (!(lambda > 0.0)) return base;
    const double n = std::min(max_count, std::pow(tail_fraction, -1.0 / (alpha / 2.0 - 1.0)));
    return std::max(base, std::sqrt(n / (std::numbers::pi * lambda)));
}

enum class partition_kind { annular_uniform, discrete_locations };

/// N-layer tessellation of a cluster of radius s.
///
/// For annular-uniform partitions the intended receiver is uniform (in area) on
/// the annulus (boundaries[0], s]; layer i is (boundaries[i], boundaries[i+1]].
/// For discrete partitions the receiver sits at locations[i] with probability
/// probs[i], and the boundaries are {0, r_1, ..., r_{N-1}, s}.
class layer_partition {
public:
    static constexpr double sum_tolerance = 1e-12;

    layer_partition() = default;

    static layer_partition equal_width(double s, std::size_t n) {
        detail::require(std::isfinite(s) && s > 0.0, "build_partition: cluster radius must be positive");
        detail::require(n >= 1, "build_partition: N must be at least 1");
        layer_partition p;
        p.kind_ = partition_kind::annular_uniform;
        p.boundaries_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) p.boundaries_[i] = s * static_cast<double>(i) / static_cast<double>(n);
        p.boundaries_[n] = s;
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        p.probs_.resize(n);
        for (std::size_t i = 0; i < n; ++i) p.probs_[i] = static_cast<double>(2 * i + 1) / n2;
        p.validate();
        return p;
    }

    /// boundaries = {a_0 < a_1 < ... < a_N = s}, a_0 >= 0.
    static layer_partition explicit_boundaries(std::vector<double> boundaries) {
        detail::require(boundaries.size() >= 2, "build_partition: need at least two boundaries");
        for (double b : boundaries) detail::require(std::isfinite(b) && b >= 0.0, "build_partition: boundaries must be finite and >= 0");
        for (std::size_t i = 1; i < boundaries.size(); ++i)
            detail::require(boundaries[i] > boundaries[i - 1], "build_partition: boundaries must be strictly increasing");
        layer_partition p;
        p.kind_ = partition_kind::annular_uniform;
        p.boundaries_ = std::move(boundaries);
        const double a0 = p.boundaries_.front();
        const double s = p.boundaries_.back();
        const double area = s * s - a0 * a0;
        p.probs_.resize(p.boundaries_.size() - 1);
        for (std::size_t i = 0; i + 1 < p.boundaries_.size(); ++i) {
            const double a = p.boundaries_[i];
            const double b = p.boundaries_[i + 1];
            p.probs_[i] = (b * b - a * a) / area;
        }
        p.validate();
        return p;
    }

    /// Equal-width layers on (inner, s].
    static layer_partition equal_width_annulus(double inner, double s, std::size_t n) {
        detail::require(n >= 1, "build_partition: N must be at least 1");
        detail::require(inner >= 0.0 && inner < s, "build_partition: inner radius must lie in [0, s)");
        std::vector<double> b(n + 1);
        for (std::size_t i = 0; i <= n; ++i) b[i] = inner + (s - inner) * static_cast<double>(i) / static_cast<double>(n);
        b[n] = s;
        return explicit_boundaries(std::move(b));
    }

    /// Discrete receiver locations r_1 < ... < r_N <= s. Equal probabilities unless given.
    static layer_partition discrete(std::vector<double> locations, double s,
                                    std::optional<std::vector<double>> probs = std::nullopt) {
        detail::require(!locations.empty(), "build_partition: empty location list");
        detail::require(std::isfinite(s) && s > 0.0, "build_partition: cluster radius must be positive");
        for (std::size_t i = 0; i < locations.size(); ++i) {
            detail::require(locations[i] > 0.0 && locations[i] <= s, "build_partition: locations must lie in (0, s]");
            if (i > 0) detail::require(locations[i] > locations[i - 1], "build_partition: locations must be strictly increasing");
        }
        const std::size_t n = locations.size();
        layer_partition p;
        p.kind_ = partition_kind::discrete_locations;
        p.locations_ = std::move(locations);
        p.boundaries_.resize(n + 1);
        p.boundaries_[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) p.boundaries_[i] = p.locations_[i - 1];
        p.boundaries_[n] = s;
        if (n > 1) detail::require(p.boundaries_[n] > p.boundaries_[n - 1], "build_partition: locations must be strictly increasing");
        if (probs) {
            detail::require(probs->size() == n, "build_partition: one probability per location required");
            p.probs_ = std::move(*probs);
        } else {
            p.probs_.assign(n, 1.0 / static_cast<double>(n));
        }
        p.validate();
        return p;
    }

    partition_kind kind() const { return kind_; }
    std::size_t size() const { return probs_.size(); }
    double cluster_radius() const { return boundaries_.back(); }
    double inner(std::size_t i) const { return boundaries_.at(i); }
    double outer(std::size_t i) const { return boundaries_.at(i + 1); }
    double prob(std::size_t i) const { return probs_.at(i); }
    const std::vector<double>& boundaries() const { return boundaries_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<double>& locations() const { return locations_; }
    double location(std::size_t i) const { return locations_.at(i); }

    /// Index of the layer containing distance r, or nullopt outside (boundaries[0], s].
    std::optional<std::size_t> layer_of(double r) const {
        if (r <= boundaries_.front() || r > boundaries_.back()) return std::nullopt;
        auto it = std::lower_bound(boundaries_.begin() + 1, boundaries_.end(), r);
        return static_cast<std::size_t>(it - boundaries_.begin() - 1);
    }

    /// Receiver distance cdf for annular-uniform partitions.
    double distance_cdf(double r) const {
        const double a0 = boundaries_.front();
        const double s = boundaries_.back();
        if (r <= a0) return 0.0;
        if (r >= s) return 1.0;
        return (r * r - a0 * a0) / (s * s - a0 * a0);
    }

    friend bool operator==(const layer_partition&, const layer_partition&) = default;

private:
    void validate() const {
        double sum = 0.0;
        for (double q : probs_) {
            if (!(q > 0.0 && q <= 1.0)) throw invariant_violation("layer_partition: each probability must lie in (0, 1]");
            sum += q;
        }
        if (std::abs(sum - 1.0) > sum_tolerance)
            throw invariant_violation("layer_partition: probabilities sum to " + std::to_string(sum) + ", not 1");
    }

    partition_kind kind_ = partition_kind::annular_uniform;
    std::vector<double> boundaries_;
    std::vector<double> probs_;
    std::vector<double> locations_;
};

namespace partition_rule {
struct equal_width {};
struct explicit_boundaries {
    std::vector<double> boundaries;
};
struct discrete {
    std::vector<double> locations;
    std::optional<std::vector<double>> probs;
};
} // namespace partition_rule

using partition_rule_t = std::variant<partition_rule::equal_width, partition_rule::explicit_boundaries,
                                      partition_rule::discrete>;

inline layer_partition build_partition(double s, std::size_t n, const partition_rule_t& rule) {
    struct visitor {
        double s;
        std::size_t n;
        layer_partition operator()(const partition_rule::equal_width&) const {
            return layer_partition::equal_width(s, n);
        }
        layer_partition operator()(const partition_rule::explicit_boundaries& r) const {
            detail::require(r.boundaries.size() == n + 1, "build_partition: expected N+1 boundaries");
            detail::require(!r.boundaries.empty() && r.boundaries.back() == s, "build_partition: last boundary must equal s");
            return layer_partition::explicit_boundaries(r.boundaries);
        }
        layer_partition operator()(const partition_rule::discrete& r) const {
            detail::require(r.locations.size() == n, "build_partition: expected N locations");
            return layer_partition::discrete(r.locations, s, r.probs);
        }
    };
    return std::visit(visitor{s, n}, rule);
}

struct cluster_spec {
    double radius = 0.0;
    double mean_receivers = 1.0;
    layer_partition partition;

    void validate() const {
        detail::require(radius > 0.0, "cluster_spec: radius must be positive");
        detail::require(mean_receivers >= 1.0, "cluster_spec: mean receivers must be at least 1");
        detail::require(partition.size() > 0 && partition.cluster_radius() == radius,
                        "cluster_spec: partition radius must match the cluster radius");
    }
};

struct receiver_draw {
    double distance = 0.0;
    std::size_t layer = 0;
};

/// Distance of a receiver conditioned on lying in layer i.
template <class URBG>
double sample_distance_in_layer(const layer_partition& p, std::size_t i, URBG& g) {
    if (p.kind() == partition_kind::discrete_locations) return p.location(i);
    const double a = p.inner(i);
    const double b = p.outer(i);
    const double u = uniform01(g);
    return std::sqrt(a * a + u * (b * b - a * a));
}

/// Layer index drawn from the partition probabilities by inversion of u in [0,1).
inline std::size_t pick_index(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

template <class URBG>
receiver_draw sample_receiver(const layer_partition& p, URBG& g) {
    if (p.kind() == partition_kind::discrete_locations) {
        const std::size_t i = pick_index(p.probs(), uniform01(g));
        return {p.location(i), i};
    }
    // Area-uniform on (a0, s]; the layer follows from the distance.
    const double a0 = p.boundaries().front();
    const double s = p.cluster_radius();
    const double r = std::sqrt(a0 * a0 + uniform01(g) * (s * s - a0 * a0));
    const auto layer = p.layer_of(r);
    return {r, layer.value_or(0)};
}

inline receiver_draw sample_receiver(const layer_partition& p, std::uint64_t seed) {
    auto g = make_engine(seed, 0, stream::receiver);
    return sample_receiver(p, g);
}

} // namespace dpc
