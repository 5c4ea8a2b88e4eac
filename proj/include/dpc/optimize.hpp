#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpc/detail/lp.hpp"
#include "dpc/error.hpp"
#include "dpc/geometry.hpp"

namespace dpc {

enum class constraint_form {
    /// sum_j u_j <= u_i / (rho0 eta_i) with u = c^(2/alpha) (literal form).
    paper_eq28,
    /// sum_j eta_j^(alpha/2) P_j <= P_i / rho0, the mean-SIR condition in powers.
    eq4_derived,
};

struct power_design_problem {
    std::vector<double> probs;
    double alpha = 3.5;
    double rho0 = 1.29;
    double p_max = 1.0;
    constraint_form form = constraint_form::eq4_derived;

    void validate() const {
        detail::require(!probs.empty(), "power_design_problem: empty probability list");
        double sum = 0.0;
        for (double q : probs) {
            detail::require(q > 0.0 && q <= 1.0, "power_design_problem: probabilities must lie in (0,1]");
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw invariant_violation("power_design_problem: probabilities must sum to 1");
        detail::require(alpha > 2.0, "power_design_problem: alpha must exceed 2");
        detail::require(rho0 >= 1.0, "power_design_problem: rho0 must be >= 1");
        detail::require(p_max > 0.0 && std::isfinite(p_max), "power_design_problem: P_max must be positive");
    }
};

struct design_result {
    std::vector<double> coefficients;
    std::vector<double> powers;
    double objective = 0.0;
    bool feasible = false;
    std::string method;
    double kkt_residual = 0.0;
    /// Layer held at P_max by the normalization.
    std::size_t pinned = 0;
};

/// Closed form, taken verbatim:
///   P_i = min{ ((2 eta_i / alpha) sum_k (rho0 eta_k - 1)/(2 - rho0 eta_k))^(alpha/(alpha-2)), 1 } P_max.
/// Throws infeasible_closed_form when the inner sum is not positive.
inline design_result closed_form_powers(const power_design_problem& prob) {
    prob.validate();
    double inner = 0.0;
    for (double eta : prob.probs) inner += (prob.rho0 * eta - 1.0) / (2.0 - prob.rho0 * eta);
    if (!(inner > 0.0))
        throw infeasible_closed_form("closed_form_powers: the power base (2 eta_i/alpha) * " + std::to_string(inner) +
                                         " is not positive",
                                     inner);
    design_result r;
    r.method = "closed_form";
    const double a = prob.alpha;
    for (double eta : prob.probs) {
        const double base = 2.0 * eta / a * inner;
        const double p = std::min(std::pow(base, a / (a - 2.0)), 1.0) * prob.p_max;
        r.powers.push_back(p);
        r.coefficients.push_back(p * std::pow(eta, a / 2.0));
        r.objective += p;
    }
    r.feasible = true;
    return r;
}

namespace detail {

/// Sum of eta_j^(alpha/2).
inline double weight_sum(const std::vector<double>& probs, double alpha) {
    double w = 0.0;
    for (double q : probs) w += std::pow(q, alpha / 2.0);
    return w;
}

} // namespace detail

/// Relative tightening applied to rho0 so the returned design satisfies the
/// strict inequality of the mean-SIR condition rather than sitting on it.
inline constexpr double strict_margin = 1e-10;

/// min sum_i P_i over 0 < P_i <= P_max with max_i P_i = P_max, subject to the
/// selected constraint form. Each choice of the layer pinned at P_max is an LP
/// solved by the simplex method; the cheapest feasible one is returned.
inline design_result numeric_powers(const power_design_problem& prob) {
    prob.validate();
    const std::size_t n = prob.probs.size();
    const double a = prob.alpha;
    const auto& eta = prob.probs;

    if (prob.form == constraint_form::paper_eq28 && prob.rho0 > 1.0) {
        // Summing every row with weight 1: sum_i (rho0 eta_i sum u - u_i) = (rho0 - 1) sum u > 0.
        throw infeasible_design("numeric_powers: the v-space constraint set is empty for rho0 > 1",
                                std::vector<double>(n, 1.0), prob.rho0 - 1.0);
    }
    if (prob.form == constraint_form::eq4_derived) {
        const double w = detail::weight_sum(eta, a);
        if (prob.rho0 * w >= 1.0) {
            // Weights y_i = eta_i^(alpha/2): sum_i y_i (rho0 sum_j w_j P_j - P_i) = (rho0 W - 1) sum_j w_j P_j >= 0.
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(eta[i], a / 2.0);
            throw infeasible_design("numeric_powers: rho0 * sum eta^(alpha/2) >= 1, no power set satisfies the condition",
                                    y, prob.rho0 * w - 1.0);
        }
    }

    const double rho = prob.rho0 * (1.0 + strict_margin);
    std::optional<design_result> best;
    for (std::size_t k = 0; k < n; ++k) {
        // Variables: P (eq4-derived) or u = eta P^(2/alpha) (v-space form).
        std::vector<double> cost(n, 1.0);
        detail::matrix rows;
        std::vector<double> rhs;
        double cap = prob.p_max;
        std::vector<double> caps(n, prob.p_max);
        if (prob.form == constraint_form::eq4_derived) {
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> row(n);
                for (std::size_t j = 0; j < n; ++j) row[j] = rho * std::pow(eta[j], a / 2.0);
                row[i] -= 1.0;
                rows.push_back(row);
                rhs.push_back(0.0);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> row(n);
                for (std::size_t j = 0; j < n; ++j) row[j] = prob.rho0 * eta[i];
                row[i] -= 1.0;
                rows.push_back(row);
                rhs.push_back(0.0);
                caps[i] = eta[i] * std::pow(prob.p_max, 2.0 / a);
                // Increasing in u, so the least element minimizes the power sum too.
                cost[i] = 1.0 / eta[i];
            }
            cap = caps[k];
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            rows.push_back(row);
            rhs.push_back(caps[j]);
        }
        std::vector<double> pin(n, 0.0);
        pin[k] = -1.0;
        rows.push_back(pin);
        rhs.push_back(-cap);

        const auto lp = detail::solve_lp(cost, rows, rhs);
        if (lp.status != detail::lp_status::optimal) continue;

        design_result r;
        r.method = prob.form == constraint_form::eq4_derived ? "lp_eq4_derived" : "lp_paper_eq28";
        r.pinned = k;
        r.kkt_residual = lp.kkt_residual;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = prob.form == constraint_form::eq4_derived ? lp.x[i]
                                                                        : std::pow(lp.x[i] / eta[i], a / 2.0);
            r.powers.push_back(p);
            r.coefficients.push_back(p * std::pow(eta[i], a / 2.0));
            r.objective += p;
        }
        r.feasible = true;
        for (double p : r.powers) r.feasible = r.feasible && p > 0.0;
        if (!r.feasible) continue;
        if (!best || r.objective < best->objective) best = r;
    }
    if (!best) throw infeasible_design("numeric_powers: no pinned layer admits a feasible design", {}, 0.0);
    return *best;
}

/// Least element of the eq4-derived set with layer k pinned at P_max:
/// every other layer gets t = rho0 w_k P_max / (1 - rho0 (W - w_k)).
inline std::optional<std::vector<double>> pinned_least_powers(const power_design_problem& prob, std::size_t k) {
    const std::size_t n = prob.probs.size();
    const double a = prob.alpha;
    const double w_total = detail::weight_sum(prob.probs, a);
    const double wk = std::pow(prob.probs[k], a / 2.0);
    const double denom = 1.0 - prob.rho0 * (w_total - wk);
    if (!(denom > 0.0)) return std::nullopt;
    const double t = prob.rho0 * wk * prob.p_max / denom;
    if (t > prob.p_max) return std::nullopt;
    std::vector<double> p(n, t);
    p[k] = prob.p_max;
    return p;
}

/// Maximum relative violation of the selected constraint set by a power vector.
inline double constraint_violation(const power_design_problem& prob, const std::vector<double>& powers) {
    const std::size_t n = prob.probs.size();
    const double a = prob.alpha;
    double worst = 0.0;
    for (double p : powers) worst = std::max({worst, -p, (p - prob.p_max) / prob.p_max});
    if (prob.form == constraint_form::eq4_derived) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::pow(prob.probs[j], a / 2.0) * powers[j];
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, (s - powers[i] / prob.rho0) / powers[i]);
    } else {
        std::vector<double> u(n);
        double su = 0.0;
        for (std::size_t i = 0; i < n; ++i) su += u[i] = prob.probs[i] * std::pow(powers[i], 2.0 / a);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, (su - u[i] / (prob.rho0 * prob.probs[i])) / su);
    }
    return worst;
}

namespace coefficient_rule {
/// u_i = eta_i (b_i^2 + a_i^2), proportional to the thm3 lower-bound design.
struct thm3_lower {};
/// u_i = (3/2)(2i-1)(i-1)^2 with u_1 = 1/2 (the formula gives 0 there).
struct vb_interior {};
/// u_i = eta_i P_i^(2/alpha) from numeric_powers.
struct numeric {
    double rho0 = 1.29;
    double p_max = 1.0;
};
} // namespace coefficient_rule

using coefficient_rule_t = std::variant<coefficient_rule::thm3_lower, coefficient_rule::vb_interior,
                                        coefficient_rule::numeric>;

/// u_i = c_i^(2/alpha) for the given rule.
inline std::vector<double> coefficient_powers(const layer_partition& p, double alpha, const coefficient_rule_t& rule) {
    const std::size_t n = p.size();
    std::vector<double> u(n);
    if (std::holds_alternative<coefficient_rule::thm3_lower>(rule)) {
        for (std::size_t i = 0; i < n; ++i) u[i] = p.prob(i) * (p.outer(i) * p.outer(i) + p.inner(i) * p.inner(i));
    } else if (std::holds_alternative<coefficient_rule::vb_interior>(rule)) {
        for (std::size_t i = 0; i < n; ++i) {
            const double k = static_cast<double>(i + 1);
            u[i] = 1.5 * (2.0 * k - 1.0) * (k - 1.0) * (k - 1.0);
        }
        u[0] = 0.5;
    } else {
        const auto& r = std::get<coefficient_rule::numeric>(rule);
        power_design_problem prob{p.probs(), alpha, r.rho0, r.p_max, constraint_form::eq4_derived};
        const auto d = numeric_powers(prob);
        for (std::size_t i = 0; i < n; ++i) u[i] = p.prob(i) * std::pow(d.powers[i], 2.0 / alpha);
    }
    return u;
}

/// Powers P_i = (u_i / eta_i)^(alpha/2) scaled so the largest equals p_max.
inline std::vector<double> powers_from_coefficients(const layer_partition& p, const std::vector<double>& u,
                                                    double alpha, double p_max = 1.0) {
    std::vector<double> out(u.size());
    double mx = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mx = std::max(mx, out[i] = std::pow(u[i] / p.prob(i), alpha / 2.0));
    for (double& v : out) v *= p_max / mx;
    return out;
}

/// J(N) = (sum_j u_j) (sum_i eta_i^2 (b_i^2 + a_i^2) / u_i).
inline double optimal_n_objective(const layer_partition& p, const std::vector<double>& u) {
    detail::require(u.size() == p.size(), "optimal_n_objective: size mismatch");
    double su = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        detail::require(u[i] > 0.0, "optimal_n_objective: coefficients must be positive");
        su += u[i];
        const double a = p.inner(i);
        const double b = p.outer(i);
        acc += p.prob(i) * p.prob(i) * (b * b + a * a) / u[i];
    }
    return su * acc;
}

struct n_search_point {
    std::size_t n = 0;
    double objective = std::numeric_limits<double>::quiet_NaN();
    bool skipped = false;
    std::string diagnostic;
};

struct n_search_result {
    std::size_t best_n = 0;
    std::vector<n_search_point> curve;
};

/// Exhaustive sweep of J(N) over N = 1..n_max.
inline n_search_result search_optimal_n(const std::function<layer_partition(std::size_t)>& partition_rule,
                                        std::size_t n_max, double alpha, const coefficient_rule_t& rule) {
    detail::require(n_max >= 1, "search_optimal_n: N_max must be at least 1");
    n_search_result out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= n_max; ++n) {
        n_search_point pt;
        pt.n = n;
        try {
            const auto part = partition_rule(n);
            const auto u = coefficient_powers(part, alpha, rule);
            for (double v : u)
                if (!(v > 0.0)) throw invalid_parameter("non-positive coefficient");
            pt.objective = optimal_n_objective(part, u);
            if (pt.objective < best) {
                best = pt.objective;
                out.best_n = n;
            }
        } catch (const std::exception& e) {
            pt.skipped = true;
            pt.diagnostic = e.what();
        }
        out.curve.push_back(pt);
    }
    return out;
}

/// Convenience overload for the equal-width rule on a cluster of radius s.
inline n_search_result search_optimal_n(double s, std::size_t n_max, double alpha, const coefficient_rule_t& rule) {
    return search_optimal_n([s](std::size_t n) { return layer_partition::equal_width(s, n); }, n_max, alpha, rule);
}

} // namespace dpc
