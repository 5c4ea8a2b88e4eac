#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

#include "dpc/error.hpp"
#include "dpc/geometry.hpp"

namespace dpc {

/// Rayleigh/PPP outage constant pi Gamma(1 + 2/alpha) Gamma(1 - 2/alpha).
inline double kappa_alpha(double alpha) {
    detail::require(alpha > 2.0 && std::isfinite(alpha), "kappa_alpha: alpha must exceed 2");
    const double d = 2.0 / alpha;
    return std::numbers::pi * std::tgamma(1.0 + d) * std::tgamma(1.0 - d);
}

struct tc_params {
    double epsilon = 0.1;
    double beta = 1.0;
    double gamma = 1.0;
    double alpha = 3.5;

    void validate() const {
        detail::require(epsilon > 0.0 && epsilon < 1.0, "tc_params: epsilon must lie in (0,1)");
        detail::require(beta > 0.0, "tc_params: beta must be positive");
        detail::require(gamma > 0.0, "tc_params: gamma must be positive");
        detail::require(alpha > 2.0, "tc_params: alpha must exceed 2");
    }
};

/// T_i = kappa * sum_j eta_j (P_j / P_i)^(2/alpha).
inline double interference_factor(const std::vector<double>& powers, const std::vector<double>& probs, double alpha,
                                  std::size_t i) {
    detail::require(powers.size() == probs.size() && i < powers.size(), "interference_factor: size mismatch");
    const double d = 2.0 / alpha;
    double sum = 0.0;
    for (std::size_t j = 0; j < powers.size(); ++j) sum += probs[j] * std::pow(powers[j] / powers[i], d);
    return kappa_alpha(alpha) * sum;
}

/// 1 - exp(-lambda T beta^(2/alpha) r^2).
inline double fixed_distance_outage(double lambda, double t, double beta, double alpha, double r) {
    detail::require(r >= 0.0, "fixed_distance_outage: negative distance");
    return -std::expm1(-lambda * t * std::pow(beta, 2.0 / alpha) * r * r);
}

/// Outage averaged over a receiver uniform (in area) on the annulus [a, b]:
/// 1 - [e^(-x a^2) - e^(-x b^2)] / (x (b^2 - a^2)),  x = lambda T beta^(2/alpha).
/// Falls back to the fixed-distance form when a == b.
inline double uniform_annulus_outage(double lambda, double t, double beta, double alpha, double a, double b) {
    detail::require(lambda >= 0.0, "uniform_annulus_outage: lambda must be nonnegative");
    detail::require(a >= 0.0 && b >= a, "uniform_annulus_outage: need 0 <= a <= b");
    const double x = lambda * t * std::pow(beta, 2.0 / alpha);
    if (x == 0.0) return 0.0;
    if (b == a) return -std::expm1(-x * a * a);
    const double span = b * b - a * a;
    // e^(-x a^2) (1 - e^(-x span)) / (x span)
    const double mean_success = std::exp(-x * a * a) * (-std::expm1(-x * span)) / (x * span);
    return 1.0 - mean_success;
}

enum class outage_mode { exact, small_lambda, no_pc };

/// Layer outage with receivers area-uniform on layer i.
///  exact:        uniform_annulus_outage with T_i
///  small_lambda: x (b^2 + a^2) / 2
///  no_pc:        exact form with T_i = kappa
inline double layer_outage_uniform(double lambda, const layer_partition& p, const std::vector<double>& powers,
                                   double beta, double alpha, std::size_t i, outage_mode mode = outage_mode::exact) {
    detail::require(lambda >= 0.0, "layer_outage_uniform: lambda must be nonnegative");
    detail::require(i < p.size(), "layer_outage_uniform: layer out of range");
    const double t = mode == outage_mode::no_pc ? kappa_alpha(alpha) : interference_factor(powers, p.probs(), alpha, i);
    const double a = p.inner(i);
    const double b = p.outer(i);
    if (mode == outage_mode::small_lambda) return 0.5 * lambda * t * std::pow(beta, 2.0 / alpha) * (b * b + a * a);
    return uniform_annulus_outage(lambda, t, beta, alpha, a, b);
}

/// Proof bounds on the layer outage: x a^2/(1 + x a^2) <= q_i <= x (b^2 + a^2)/2.
struct outage_bounds {
    double lower = 0.0;
    double upper = 0.0;
};

inline outage_bounds layer_outage_bounds(double lambda, const layer_partition& p, const std::vector<double>& powers,
                                         double beta, double alpha, std::size_t i) {
    const double t = interference_factor(powers, p.probs(), alpha, i);
    const double x = lambda * t * std::pow(beta, 2.0 / alpha);
    const double a = p.inner(i);
    const double b = p.outer(i);
    return {x * a * a / (1.0 + x * a * a), 0.5 * x * (b * b + a * a)};
}

/// Outage per layer for either partition kind: discrete locations use the
/// fixed-distance form, annular layers the exact uniform form.
inline std::vector<double> layer_outages(double lambda, const layer_partition& p, const std::vector<double>& powers,
                                         double beta, double alpha) {
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.kind() == partition_kind::discrete_locations) {
            q[i] = fixed_distance_outage(lambda, interference_factor(powers, p.probs(), alpha, i), beta, alpha,
                                         p.location(i));
        } else {
            q[i] = layer_outage_uniform(lambda, p, powers, beta, alpha, i, outage_mode::exact);
        }
    }
    return q;
}

/// gamma * lambda * sum_i eta_i (1 - q_i(lambda)).
inline double throughput_at(double lambda, const layer_partition& p, const std::vector<double>& powers, double beta,
                            double alpha, double gamma) {
    const auto q = layer_outages(lambda, p, powers, beta, alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) sum += p.prob(i) * (1.0 - q[i]);
    return gamma * lambda * sum;
}

/// sup{lambda : max_i q_i(lambda) <= eps} from the exact per-layer formulas, by bisection.
inline double max_contention_exact(const layer_partition& p, const std::vector<double>& powers, double eps,
                                   double beta, double alpha, double rel_tol = 1e-12) {
    detail::require(eps > 0.0 && eps < 1.0, "max_contention_exact: eps must lie in (0,1)");
    auto worst = [&](double lambda) {
        const auto q = layer_outages(lambda, p, powers, beta, alpha);
        double m = 0.0;
        for (double v : q) m = std::max(m, v);
        return m;
    };
    double lo = 0.0;
    double hi = 1e-6;
    int grow = 0;
    while (worst(hi) <= eps) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 200) throw bracketing_error("max_contention_exact: could not bracket");
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (worst(mid) <= eps) lo = mid;
        else hi = mid;
    }
    return lo;
}

struct contention_bound_pair {
    double lower = 0.0;
    double upper = 0.0;
    /// False when every inner radius is zero and the upper bound is +inf.
    bool upper_finite = true;
};

/// Bounds on the maximum contention intensity for annular-uniform receivers:
///  lower (thm3-lower powers): 2 eps / (kappa beta^(2/a) sum_j eta_j (b_j^2 + a_j^2))
///  upper (any powers):        eps / ((1 - eps) kappa beta^(2/a) sum_j eta_j a_j^2)
/// With eta_j = (b_j^2 - a_j^2)/s^2 these are the telescoped s^2 forms.
inline contention_bound_pair contention_bounds(const layer_partition& p, double eps, double beta, double alpha) {
    detail::require(p.kind() == partition_kind::annular_uniform, "contention_bounds: annular-uniform partition required");
    detail::require(eps > 0.0 && eps < 1.0, "contention_bounds: eps must lie in (0,1)");
    const double kb = kappa_alpha(alpha) * std::pow(beta, 2.0 / alpha);
    double sum_lower = 0.0;
    double sum_upper = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double a = p.inner(j);
        const double b = p.outer(j);
        sum_lower += p.prob(j) * (b * b + a * a);
        sum_upper += p.prob(j) * a * a;
    }
    contention_bound_pair out;
    out.lower = 2.0 * eps / (kb * sum_lower);
    if (sum_upper > 0.0) {
        out.upper = eps / ((1.0 - eps) * kb * sum_upper);
    } else {
        out.upper = std::numeric_limits<double>::infinity();
        out.upper_finite = false;
    }
    return out;
}

/// The literal s^2 forms, valid for partitions of [0, s]:
///  lower = 2 eps s^2 / (kappa beta^(2/a) sum_j (b_j^4 - a_j^4))
///  upper = eps s^2 / ((1 - eps) kappa beta^(2/a) sum_j (b_j^2 a_j^2 - a_j^4))
inline contention_bound_pair contention_bounds_literal(const layer_partition& p, double eps, double beta, double alpha) {
    detail::require(p.kind() == partition_kind::annular_uniform, "contention_bounds: annular-uniform partition required");
    detail::require(eps > 0.0 && eps < 1.0, "contention_bounds: eps must lie in (0,1)");
    const double kb = kappa_alpha(alpha) * std::pow(beta, 2.0 / alpha);
    const double s2 = p.cluster_radius() * p.cluster_radius();
    double quartic = 0.0;
    double mixed = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double a = p.inner(j);
        const double b = p.outer(j);
        quartic += b * b * b * b - a * a * a * a;
        mixed += b * b * a * a - a * a * a * a;
    }
    contention_bound_pair out;
    out.lower = 2.0 * eps * s2 / (kb * quartic);
    if (mixed > 0.0) {
        out.upper = eps * s2 / ((1.0 - eps) * kb * mixed);
    } else {
        out.upper = std::numeric_limits<double>::infinity();
        out.upper_finite = false;
    }
    return out;
}

/// sum_j (b_j^4 - a_j^4); equals s^4 for any partition of [0, s].
inline double quartic_layer_sum(const layer_partition& p) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double a = p.inner(j);
        const double b = p.outer(j);
        sum += b * b * b * b - a * a * a * a;
    }
    return sum;
}

namespace tc_model {
struct thm5 {
    std::vector<double> locations;
    std::vector<double> probs;
};
struct vb_lower {
    double s;
};
struct vb_upper {
    double s;
    std::size_t n;
};
struct npc_discrete {
    std::vector<double> locations;
    std::vector<double> probs;
};
} // namespace tc_model

using tc_model_t = std::variant<tc_model::thm5, tc_model::vb_lower, tc_model::vb_upper, tc_model::npc_discrete>;

struct tc_result {
    double lambda_eps = 0.0;
    double capacity = 0.0;
};

/// 1 - 4/(3N) + 1/(3N^3).
inline double vb_upper_factor(std::size_t n) {
    const double nn = static_cast<double>(n);
    return 1.0 - 4.0 / (3.0 * nn) + 1.0 / (3.0 * nn * nn * nn);
}

inline tc_result tc_closed_form(const tc_params& prm, const tc_model_t& model) {
    prm.validate();
    const double kb = kappa_alpha(prm.alpha) * std::pow(prm.beta, 2.0 / prm.alpha);
    const double eps = prm.epsilon;
    struct visitor {
        const tc_params& prm;
        double kb;
        double eps;
        tc_result operator()(const tc_model::thm5& m) const {
            detail::require(m.locations.size() == m.probs.size() && !m.locations.empty(), "tc_closed_form: size mismatch");
            double s2 = 0.0;
            for (std::size_t i = 0; i < m.locations.size(); ++i) s2 += m.probs[i] * m.locations[i] * m.locations[i];
            const double lambda = -std::log1p(-eps) / (kb * s2);
            return {lambda, prm.gamma * (1.0 - eps) * lambda};
        }
        tc_result operator()(const tc_model::vb_lower& m) const {
            detail::require(m.s > 0.0, "tc_closed_form: s must be positive");
            const double lambda = 2.0 * eps / (kb * m.s * m.s);
            return {lambda, prm.gamma * (1.0 - eps) * lambda};
        }
        tc_result operator()(const tc_model::vb_upper& m) const {
            detail::require(m.s > 0.0, "tc_closed_form: s must be positive");
            detail::require(m.n > 1, "tc_closed_form: the upper TC bound needs N > 1");
            const double c = 2.0 * prm.gamma * eps / (kb * m.s * m.s * vb_upper_factor(m.n));
            return {c / (prm.gamma * (1.0 - eps)), c};
        }
        tc_result operator()(const tc_model::npc_discrete& m) const {
            detail::require(m.locations.size() == m.probs.size() && !m.locations.empty(), "tc_closed_form: size mismatch");
            const double rn2 = m.locations.back() * m.locations.back();
            const double lambda = -std::log1p(-eps) / (kb * rn2);
            double sum = 0.0;
            for (std::size_t i = 0; i < m.locations.size(); ++i)
                sum += m.probs[i] * std::pow(1.0 - eps, m.locations[i] * m.locations[i] / rn2);
            return {lambda, prm.gamma * lambda * sum};
        }
    };
    return std::visit(visitor{prm, kb, eps}, model);
}

/// No-PC transmission capacity for a uniform cluster with every transmitter
/// provisioned for the worst-case distance s, to first order in eps:
/// gamma eps (1 - eps) / (kappa beta^(2/alpha) s^2).
inline double npc_small_eps_capacity(const tc_params& prm, double s) {
    prm.validate();
    const double kb = kappa_alpha(prm.alpha) * std::pow(prm.beta, 2.0 / prm.alpha);
    return prm.gamma * prm.epsilon * (1.0 - prm.epsilon) / (kb * s * s);
}

struct improvement_condition {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// r_N^2 / sum eta r^2  >  sum eta_i (1 - eps)^(r_i^2/r_N^2 - 1).
inline improvement_condition tc_improvement_condition(const std::vector<double>& r, const std::vector<double>& probs,
                                                      double eps) {
    detail::require(r.size() == probs.size() && !r.empty(), "tc_improvement_condition: size mismatch");
    const double rn2 = r.back() * r.back();
    double s2 = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        s2 += probs[i] * r[i] * r[i];
        rhs += probs[i] * std::pow(1.0 - eps, r[i] * r[i] / rn2 - 1.0);
    }
    improvement_condition c;
    c.lhs = rn2 / s2;
    c.rhs = rhs;
    c.holds = c.lhs > c.rhs;
    return c;
}

/// Jensen lower bound on the no-PC spatial reuse factor:
/// pi lambda Gamma(1 + 2/alpha) beta^(-2/alpha) ((alpha - 2)/(2 pi lambda))^(2/alpha).
inline double spatial_reuse_np_lower(double lambda, double alpha, double beta) {
    detail::require(lambda > 0.0, "spatial_reuse_np_lower: lambda must be positive");
    detail::require(alpha > 2.0, "spatial_reuse_np_lower: alpha must exceed 2");
    const double d = 2.0 / alpha;
    return std::numbers::pi * lambda * std::tgamma(1.0 + d) * std::pow(beta, -d) *
           std::pow((alpha - 2.0) / (2.0 * std::numbers::pi * lambda), d);
}

/// Spatial reuse factor of a link using power P_i among interferers whose
/// powers follow (powers, probs), on the infinite plane without exclusion:
/// pi lambda E[(P_i H / (beta I))^(2/alpha)] = pi beta^(-2/alpha) / T_i.
/// With a single power level T_i = kappa_alpha, giving the equal-power value.
inline double spatial_reuse_exact(const std::vector<double>& powers, const std::vector<double>& probs, double alpha,
                                  double beta, std::size_t i) {
    detail::require(beta > 0.0, "spatial_reuse_exact: beta must be positive");
    return std::numbers::pi * std::pow(beta, -2.0 / alpha) / interference_factor(powers, probs, alpha, i);
}

} // namespace dpc
