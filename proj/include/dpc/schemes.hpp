#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "dpc/error.hpp"
#include "dpc/geometry.hpp"

namespace dpc {

namespace scheme {

/// Every transmitter uses the same power.
struct no_pc {
    double power = 1.0;
};

/// Power 1/H, inverting the transmitter's own link fading.
struct channel_inversion {};

/// Power H^-exponent.
struct fractional {
    double exponent = 0.5;
};

/// Power p1 with probability eta1, p2 with probability eta2, independent of location.
struct two_level {
    double p1 = 1.0;
    double p2 = 1.0;
    double eta1 = 0.5;
    double eta2 = 0.5;
};

/// Power powers[i] when the intended receiver lies in layer i of the partition.
struct n_layer_dpc {
    std::vector<double> powers;
    layer_partition partition;
};

} // namespace scheme

using power_scheme = std::variant<scheme::no_pc, scheme::channel_inversion, scheme::fractional,
                                  scheme::two_level, scheme::n_layer_dpc>;

/// Fading gains below this are clamped before inversion.
inline constexpr double fading_floor = 1e-6;

inline void validate(const power_scheme& s) {
    struct visitor {
        void operator()(const scheme::no_pc& v) const {
            detail::require(v.power > 0.0 && std::isfinite(v.power), "no_pc: power must be positive");
        }
        void operator()(const scheme::channel_inversion&) const {}
        void operator()(const scheme::fractional& v) const {
            detail::require(v.exponent >= 0.0 && v.exponent <= 1.0, "fractional: exponent must lie in [0,1]");
        }
        void operator()(const scheme::two_level& v) const {
            detail::require(v.p1 > 0.0 && v.p2 > 0.0, "two_level: powers must be positive");
            detail::require(v.eta1 > 0.0 && v.eta2 > 0.0, "two_level: probabilities must be positive");
            if (std::abs(v.eta1 + v.eta2 - 1.0) > 1e-12)
                throw invariant_violation("two_level: eta1 + eta2 must equal 1");
        }
        void operator()(const scheme::n_layer_dpc& v) const {
            detail::require(v.powers.size() == v.partition.size(), "n_layer_dpc: one power per layer required");
            for (double p : v.powers) detail::require(p > 0.0 && std::isfinite(p), "n_layer_dpc: powers must be positive");
        }
    };
    std::visit(visitor{}, s);
}

/// Short tag used in result tables.
inline std::string scheme_tag(const power_scheme& s) {
    struct visitor {
        std::string operator()(const scheme::no_pc&) const { return "no_pc"; }
        std::string operator()(const scheme::channel_inversion&) const { return "channel_inversion"; }
        std::string operator()(const scheme::fractional&) const { return "fractional"; }
        std::string operator()(const scheme::two_level&) const { return "two_level"; }
        std::string operator()(const scheme::n_layer_dpc&) const { return "n_layer_dpc"; }
    };
    return std::visit(visitor{}, s);
}

/// Selection classes of a scheme: the power levels of two_level, the layers of
/// n_layer_dpc, otherwise the layers of the receiver partition.
inline std::vector<double> class_probs(const power_scheme& s, const layer_partition& receivers) {
    if (const auto* t = std::get_if<scheme::two_level>(&s)) return {t->eta1, t->eta2};
    if (const auto* d = std::get_if<scheme::n_layer_dpc>(&s)) return d->partition.probs();
    return receivers.probs();
}

/// Partition that governs the reference link distance for a scheme.
inline const layer_partition& receiver_partition(const power_scheme& s, const layer_partition& receivers) {
    if (const auto* d = std::get_if<scheme::n_layer_dpc>(&s)) return d->partition;
    return receivers;
}

/// Transmit power for a transmitter in selection class cls with own-link fading h.
inline double class_power(const power_scheme& s, std::size_t cls, double h) {
    struct visitor {
        std::size_t cls;
        double h;
        double operator()(const scheme::no_pc& v) const { return v.power; }
        double operator()(const scheme::channel_inversion&) const { return 1.0 / std::max(h, fading_floor); }
        double operator()(const scheme::fractional& v) const { return std::pow(std::max(h, fading_floor), -v.exponent); }
        double operator()(const scheme::two_level& v) const { return cls == 0 ? v.p1 : v.p2; }
        double operator()(const scheme::n_layer_dpc& v) const { return v.powers.at(cls); }
    };
    return std::visit(visitor{cls, h}, s);
}

/// Power for a link whose receiver is in `layer` with fading h at distance r.
/// `selector` in [0,1) chooses the two_level branch (P1 when selector < eta1).
inline double assign_power(const power_scheme& s, std::size_t layer, double h, double /*distance*/,
                           double selector = 0.0) {
    if (const auto* t = std::get_if<scheme::two_level>(&s)) return selector < t->eta1 ? t->p1 : t->p2;
    return class_power(s, layer, h);
}

struct condition_report {
    std::vector<double> margins;
    double threshold = 1.0;
    bool holds = false;
    /// Relaxed form with threshold 1 (lower outage only).
    bool relaxed_holds = false;
};

/// margin_i = sum_j eta_j^(alpha/2) P_j / P_i, compared against 1/rho0.
inline condition_report dpc_condition(const std::vector<double>& powers, const std::vector<double>& probs,
                                      double alpha, double rho0) {
    detail::require(powers.size() == probs.size() && !powers.empty(), "dpc_condition: size mismatch");
    detail::require(rho0 >= 1.0, "dpc_condition: rho0 must be >= 1");
    double weighted = 0.0;
    for (std::size_t j = 0; j < powers.size(); ++j) weighted += std::pow(probs[j], alpha / 2.0) * powers[j];
    condition_report r;
    r.threshold = 1.0 / rho0;
    r.margins.resize(powers.size());
    r.holds = true;
    r.relaxed_holds = true;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        r.margins[i] = weighted / powers[i];
        r.holds = r.holds && r.margins[i] < r.threshold;
        r.relaxed_holds = r.relaxed_holds && r.margins[i] < 1.0;
    }
    return r;
}

struct ratio_interval {
    double lower = 0.0;
    double upper = 0.0;

    bool empty() const { return !(lower <= upper) || upper <= 0.0; }
    bool contains(double x) const { return !empty() && x >= lower && x <= upper; }
};

/// Feasible P1/P2 for two power levels.
inline ratio_interval two_power_region(double eta1, double eta2, double alpha, double rho0) {
    if (std::abs(eta1 + eta2 - 1.0) > 1e-12) throw invariant_violation("two_power_region: eta1 + eta2 must equal 1");
    const double inv = 1.0 / rho0;
    const double w1 = std::pow(eta1, alpha / 2.0);
    const double w2 = std::pow(eta2, alpha / 2.0);
    if (inv <= w1 || inv <= w2) return {1.0, 0.0};
    return {w2 / (inv - w1), (inv - w2) / w1};
}

enum class power_design { thm3_lower, thm3_upper, thm5 };

/// Ratio-based power designs anchored at P_1 = anchor.
///  thm3_lower: P_j/P_i = [(b_j^2 + a_j^2)/(b_i^2 + a_i^2)]^(alpha/2)
///  thm3_upper: P_j/P_i = (a_j/a_i)^alpha, needs every inner radius > 0
///  thm5:       P_j/P_i = (r_j/r_i)^alpha for discrete locations
inline std::vector<double> design_powers(const layer_partition& p, double alpha, power_design variant,
                                         double anchor = 1.0) {
    detail::require(alpha > 2.0, "design_powers: alpha must exceed 2");
    detail::require(anchor > 0.0, "design_powers: anchor must be positive");
    const std::size_t n = p.size();
    std::vector<double> out(n);
    switch (variant) {
    case power_design::thm3_lower: {
        auto key = [&](std::size_t i) { return p.outer(i) * p.outer(i) + p.inner(i) * p.inner(i); };
        for (std::size_t i = 0; i < n; ++i) out[i] = anchor * std::pow(key(i) / key(0), alpha / 2.0);
        break;
    }
    case power_design::thm3_upper: {
        if (p.inner(0) <= 0.0)
            throw degenerate_layer("design_powers: thm3-upper needs a positive inner radius for layer 1; "
                                   "build the partition on (inner, s] with inner > 0");
        for (std::size_t i = 0; i < n; ++i) out[i] = anchor * std::pow(p.inner(i) / p.inner(0), alpha);
        break;
    }
    case power_design::thm5: {
        detail::require(p.kind() == partition_kind::discrete_locations,
                        "design_powers: thm5 requires a discrete-locations partition");
        for (std::size_t i = 0; i < n; ++i) out[i] = anchor * std::pow(p.location(i) / p.location(0), alpha);
        break;
    }
    }
    return out;
}

/// Default inner radius used when a thm3-upper design needs inf(L_1) > 0.
inline double default_inner_radius(double s, std::size_t n) { return s / (10.0 * static_cast<double>(n)); }

} // namespace dpc
