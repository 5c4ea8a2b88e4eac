// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dpc/dpc.hpp"

using namespace dpc;

namespace {

struct verdict {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        detail << (ok ? "" : "[x] ") << what << "; ";
    }
};

int failures = 0;

template <class F>
void criterion(const char* id, const char* title, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("%s %s %s (%.1fs) -- %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.detail.str().c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

network_config fixed_link(double r, double lambda) {
    network_config cfg;
    cfg.lambda = lambda;
    cfg.receivers = layer_partition::discrete({r}, r);
    return cfg;
}

} // namespace

int main() {
    const double alpha = 3.5;
    const double kappa = kappa_alpha(alpha);

    criterion("AC-1", "rho0 at lambda=5e-4, alpha=3.5 is 1.29 +- 0.05", [&](verdict& v) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = estimate_rho0(5e-4, alpha, 1.0, 20000, 1);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.check(std::abs(r.rho0 - 1.29) <= 0.05, fmt("rho0 = %.4g +- %.3g", r.rho0, r.ci_halfwidth));
        v.check(secs <= 120.0, fmt("runtime %.1fs <= 120s", secs));
    });

    criterion("AC-2", "no-PC outage at R=20, lambda=1e-4 matches the kappa formula", [&](verdict& v) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = estimate_outage(fixed_link(20.0, 1e-4), scheme::no_pc{}, 20000, 2);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double q = fixed_distance_outage(1e-4, kappa, 1.0, alpha, 20.0);
        v.check(std::abs(q - 0.2066) < 5e-4, fmt("formula %.5f", q));
        v.check(std::abs(r.q[0] - q) <= r.ci[0], fmt("MC %.5f +- %.5f vs %.5f", r.q[0], r.ci[0], q));
        v.check(secs <= 60.0, fmt("runtime %.1fs <= 60s", secs));
    });

    criterion("AC-3", "annulus outage formula vs MC on a 3x3 (lambda, N) grid", [&](verdict& v) {
        const auto t0 = std::chrono::steady_clock::now();
        int inside = 0;
        std::uint64_t seed = 300;
        for (double lambda : {3e-5, 1e-4, 3e-4}) {
            for (std::size_t n : {1u, 3u, 5u}) {
                const auto p = layer_partition::equal_width(20.0, n);
                const auto pw = design_powers(p, alpha, power_design::thm3_lower);
                network_config cfg;
                cfg.lambda = lambda;
                const auto r = estimate_outage(cfg, scheme::n_layer_dpc{pw, p}, 20000, seed++);
                double exact = 0.0;
                for (std::size_t i = 0; i < n; ++i) exact += p.prob(i) * layer_outage_uniform(lambda, p, pw, 1.0, alpha, i);
                const bool ok = std::abs(r.mixture - exact) <= r.mixture_ci;
                inside += ok;
                v.detail << (ok ? "" : "miss ") << "l=" << lambda << ",N=" << n << ":" << r.mixture << "/" << exact
                         << " ";
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.check(inside >= 8, fmt("%g of 9 cells inside the 95%% CI", inside));
        v.check(secs <= 600.0, fmt("runtime %.1fs <= 600s", secs));
    });

    criterion("AC-4", "two-level (1.5; 0.4, 0.6) outage strictly below no-PC on a 10-point sweep", [&](verdict& v) {
        int below_level1 = 0, below_level2 = 0, below_mix = 0;
        for (int k = 0; k < 10; ++k) {
            const double lambda = 1e-5 * std::pow(100.0, k / 9.0);
            const auto r = estimate_outage(fixed_link(20.0, lambda),
                                           std::vector<power_scheme>{scheme::no_pc{}, scheme::two_level{1.5, 1.0, 0.4, 0.6}},
                                           20000, 4);
            const double np = r[0].q[0];
            below_level1 += r[1].q[0] < np;
            below_level2 += r[1].q[1] < np;
            below_mix += r[1].mixture < np;
            if (k == 9)
                v.detail << "at 1e-3: noPC " << np << ", P1 " << r[1].q[0] << ", P2 " << r[1].q[1] << ", mix "
                         << r[1].mixture << "; ";
        }
        v.check(below_level1 == 10, fmt("level P1 below at %g/10", below_level1));
        v.check(below_level2 == 10, fmt("level P2 below at %g/10", below_level2));
        v.check(below_mix == 10, fmt("mixture below at %g/10", below_mix));
    });

    criterion("AC-5", "max contention of thm3 designs inside [lower, upper] bounds", [&](verdict& v) {
        const double s = 20.0;
        const std::size_t n = 5;
        const auto p_low = layer_partition::equal_width(s, n);
        const auto p_up = layer_partition::equal_width_annulus(s / (10.0 * n), s, n);
        const std::vector<power_scheme> schemes{
            scheme::n_layer_dpc{design_powers(p_low, alpha, power_design::thm3_lower), p_low},
            scheme::n_layer_dpc{design_powers(p_up, alpha, power_design::thm3_upper), p_up}};
        const char* names[] = {"thm3-lower", "thm3-upper"};
        const layer_partition* parts[] = {&p_low, &p_up};
        for (double eps : {0.05, 0.1}) {
            contention_options opt;
            opt.epsilon = eps;
            opt.trials = 400000;
            const auto r = estimate_max_contention(network_config{}, schemes, opt, 5);
            for (int k = 0; k < 2; ++k) {
                const auto b = contention_bounds(*parts[k], eps, 1.0, alpha);
                const double l = r[k].lambda_eps;
                std::ostringstream what;
                what << names[k] << " eps=" << eps << ": " << l << " in [" << b.lower << ", " << b.upper << "]";
                v.check(l >= b.lower && l <= b.upper, what.str());
                if (k == 0 && l <= 1e-4) {
                    const double slack = l / b.lower - 1.0;
                    v.check(slack <= 0.05, fmt("thm3-lower eps=%g slack %.2f%% <= 5%%", eps, 100.0 * slack));
                }
            }
        }
    });

    criterion("AC-6", "thm5 closed form, MC match, identity and large-N TC ratio", [&](verdict& v) {
        const tc_params prm{0.1, 1.0, 1.0, alpha};
        const std::vector<double> r{3, 6, 9, 12, 15};
        const std::vector<double> eta(5, 0.2);
        const auto t = tc_closed_form(prm, tc_model::thm5{r, eta});
        // Independent evaluation: sum eta r^2 = 99.
        const double oracle = -std::log(0.9) / (kappa * 99.0);
        v.check(std::abs(t.lambda_eps / oracle - 1.0) < 1e-12 && std::abs(t.lambda_eps / 1.84e-4 - 1.0) < 0.005,
                fmt("closed form %.5g (oracle %.5g)", t.lambda_eps, oracle));
        const auto p = layer_partition::discrete(r, 15.0);
        contention_options opt;
        opt.trials = 100000;
        const auto mc = estimate_max_contention(network_config{}, scheme::n_layer_dpc{design_powers(p, alpha, power_design::thm5), p},
                                                opt, 6);
        v.check(std::abs(mc.lambda_eps / t.lambda_eps - 1.0) <= 0.05, fmt("MC %.5g vs %.5g", mc.lambda_eps, t.lambda_eps));
        double ratio = 0.0;
        for (std::size_t i = 0; i < 5; ++i) ratio += eta[i] * (r[i] / 15.0) * (r[i] / 15.0);
        v.check(std::abs(ratio - 0.44) < 1e-12 && std::abs(ratio - 1.2 * 2.2 / 6.0) < 1e-12,
                fmt("sum eta (r/rN)^2 = %.15g", ratio));
        const std::size_t big = 50;
        std::vector<double> rb(big), eb(big, 1.0 / big);
        for (std::size_t i = 0; i < big; ++i) rb[i] = 15.0 * static_cast<double>(i + 1) / big;
        const double tc_ratio = tc_closed_form(prm, tc_model::thm5{rb, eb}).capacity /
                                tc_closed_form(prm, tc_model::npc_discrete{rb, eb}).capacity;
        v.check(tc_ratio >= 2.7 && tc_ratio <= 3.0, fmt("N=50 TC ratio %.4f in [2.7, 3.0]", tc_ratio));
    });

    criterion("AC-7", "uniform-cluster TC bounds vs no-PC", [&](verdict& v) {
        const tc_params prm{0.1, 1.0, 1.0, alpha};
        const double s = 15.0;
        const double lower = tc_closed_form(prm, tc_model::vb_lower{s}).capacity;
        const double twice = lower / npc_small_eps_capacity(prm, s);
        v.check(std::abs(twice - 2.0) <= 1e-12, fmt("C_lower / C_np = %.15g", twice));
        const double unit = prm.gamma * prm.epsilon / (kappa * s * s);
        const double at2 = tc_closed_form(prm, tc_model::vb_upper{s, 2}).capacity / unit;
        v.check(std::abs(at2 - 16.0 / 3.0) <= 1e-12, fmt("C_upper(2) / C_np = %.15g", at2));
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t n = 2; n <= 32; ++n) {
            const double c = tc_closed_form(prm, tc_model::vb_upper{s, n}).capacity;
            if (c > best) {
                best = c;
                arg = n;
            }
        }
        v.check(arg == 2, fmt("C_upper maximized at N=%g", static_cast<double>(arg)));
    });

    criterion("AC-8", "optimizer: certificate, closed-form infeasibility, sum-power and TC vs baseline", [&](verdict& v) {
        std::vector<double> eta5;
        for (int i = 1; i <= 5; ++i) eta5.push_back((2.0 * i - 1.0) / 25.0);
        try {
            numeric_powers({eta5, alpha, 1.29, 1.0, constraint_form::paper_eq28});
            v.check(false, "(a) v-space set not reported empty");
        } catch (const infeasible_design& e) {
            double combined = 0.0;
            bool nonneg = true;
            for (std::size_t i = 0; i < eta5.size(); ++i) {
                combined += e.certificate()[i] * 1.29 * eta5[i];
                nonneg = nonneg && e.certificate()[i] >= 0.0;
            }
            v.check(nonneg && std::abs(combined - 1.0 - e.certificate_value()) < 1e-12 && e.certificate_value() > 0.0,
                    fmt("(a) certificate value %.4g", e.certificate_value()));
        }
        try {
            closed_form_powers({eta5, alpha, 1.29, 1.0});
            v.check(false, "(b) closed form returned powers");
        } catch (const infeasible_closed_form& e) {
            v.check(true, fmt("(b) closed form infeasible, inner sum %.4g", e.inner_sum()));
        }
        const double s = 15.0;
        for (std::size_t n : {2u, 5u, 10u, 20u}) {
            const auto p = layer_partition::equal_width(s, n);
            const auto base = powers_from_coefficients(p, coefficient_powers(p, alpha, coefficient_rule::vb_interior{}), alpha);
            const auto opt = numeric_powers({p.probs(), alpha, 1.29, 1.0});
            double sum_base = 0.0;
            for (double x : base) sum_base += x;
            const double ratio = opt.objective / sum_base;
            v.check(ratio >= 0.70 && ratio <= 0.85, fmt("(c) N=%g sum power %.1f%% of baseline", double(n), 100.0 * ratio));
            network_config cfg;
            cfg.lambda = 1e-4;
            const auto r = estimate_outage(cfg,
                                           std::vector<power_scheme>{scheme::n_layer_dpc{opt.powers, p},
                                                                     scheme::n_layer_dpc{base, p}},
                                           20000, 8);
            const double tc_opt = cfg.lambda * (1.0 - r[0].mixture);
            const double tc_base = cfg.lambda * (1.0 - r[1].mixture);
            const double ci = cfg.lambda * std::hypot(r[0].mixture_ci, r[1].mixture_ci);
            v.check(std::abs(tc_opt - tc_base) <= ci,
                    fmt("(c) N=%g TC %.4g vs %.4g", double(n), tc_opt, tc_base));
        }
    });

    criterion("AC-9", "telescoping identities for N = 1..32", [&](verdict& v) {
        double worst_quartic = 0.0;
        double worst_j = 0.0;
        for (double s : {1.0, 15.0, 20.0}) {
            for (std::size_t n = 1; n <= 32; ++n) {
                const auto p = layer_partition::equal_width(s, n);
                worst_quartic = std::max(worst_quartic, std::abs(quartic_layer_sum(p) / std::pow(s, 4) - 1.0));
                const auto u = coefficient_powers(p, alpha, coefficient_rule::thm3_lower{});
                worst_j = std::max(worst_j, std::abs(optimal_n_objective(p, u) / (s * s) - 1.0));
            }
        }
        v.check(worst_quartic <= 1e-9, fmt("max rel error sum(b^4-a^4) vs s^4: %.3g", worst_quartic));
        v.check(worst_j <= 1e-9, fmt("max rel error J(N) vs s^2: %.3g", worst_j));
    });

    criterion("AC-10", "conservation goodness of fit and thinning KS equivalence", [&](verdict& v) {
        const double lambda = 1e-3;
        {
            const double a = 4.0;
            const point centre{30.0, -20.0};
            const double radius = 40.0;
            std::vector<long> counts;
            for (std::uint64_t seed = 0; seed < 10000; ++seed) {
                auto g = make_engine(10, seed, stream::interferers);
                counts.push_back(static_cast<long>(count_in_disc(scale_points(sample_ppp(lambda, 100.0, g), a), centre, radius)));
            }
            const auto gof = stats::poisson_chi_square(counts, lambda / a * std::numbers::pi * radius * radius);
            v.check(gof.p_value > 0.01, fmt("conservation chi2 = %.3g, p = %.3g", gof.statistic, gof.p_value));
        }
        {
            const double eta = 0.3;
            const double power = 2.0;
            const double window = 400.0;
            std::vector<double> thinned, scaled;
            for (std::size_t t = 0; t < 10000; ++t) {
                auto g = make_engine(11, t, stream::interferers);
                const auto full = sample_ppp(lambda, window, g);
                auto sel = make_engine(11, t, stream::selection);
                const auto kept = thin(full, eta, sel);
                double I = 0.0;
                for (const auto& pt : kept.points) I += power * exponential1(sel) * std::pow(pt.norm(), -alpha);
                thinned.push_back(I);
                auto h = make_engine(12, t, stream::interferers);
                scaled.push_back(std::pow(eta, alpha / 2.0) * power *
                                 sample_unit_interference(lambda, alpha, window * std::sqrt(eta), 0.0, h));
            }
            const auto ks = stats::ks_two_sample(thinned, scaled);
            v.check(ks.p_value > 0.01, fmt("KS D = %.4g, p = %.3g", ks.statistic, ks.p_value));
        }
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
