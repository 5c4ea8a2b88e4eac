#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dpc/analytic.hpp"
#include "dpc/error.hpp"
#include "dpc/geometry.hpp"
#include "dpc/rng.hpp"
#include "dpc/schemes.hpp"
#include "dpc/stats.hpp"

namespace dpc {

struct network_config {
    double lambda = 1e-4;
    double alpha = 3.5;
    double beta = 1.0;
    double gamma = 1.0;
    /// Law of the intended-receiver distance for schemes that carry no partition
    /// of their own. A single discrete location models a fixed link distance.
    layer_partition receivers = layer_partition::equal_width(20.0, 1);
    /// 0 selects intensity_window_radius(alpha, lambda).
    double window_radius = 0.0;
    /// 0 selects std::thread::hardware_concurrency().
    std::size_t threads = 0;

    void validate() const {
        detail::require(std::isfinite(lambda) && lambda >= 0.0, "network_config: lambda must be finite and >= 0");
        detail::require(alpha > 2.0, "network_config: alpha must exceed 2");
        detail::require(beta >= 0.0 && std::isfinite(beta), "network_config: beta must be finite and >= 0");
        detail::require(gamma > 0.0, "network_config: gamma must be positive");
        detail::require(receivers.size() > 0, "network_config: empty receiver partition");
        detail::require(window_radius >= 0.0, "network_config: negative window radius");
        if (window_radius > 0.0)
            detail::require(window_radius > 10.0 * receivers.cluster_radius(),
                            "network_config: simulation window must be much larger than the cluster");
    }
    double window() const { return window_radius > 0.0 ? window_radius : intensity_window_radius(alpha, lambda); }
};

namespace detail {

inline std::size_t thread_count(std::size_t requested, std::size_t work) {
    std::size_t t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(t, work / 256 + 1));
}

/// Runs body(trial, row) for trial = 0..trials-1 where row is that trial's slice
/// of a trials x width table. Blocks are contiguous per thread, so the table is
/// identical for any thread count.
inline std::vector<double> run_trials(std::size_t trials, std::size_t width, std::size_t threads,
                                      const std::function<void(std::size_t, std::span<double>)>& body) {
    std::vector<double> table(trials * width, 0.0);
    const std::size_t nt = thread_count(threads, trials);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) body(t, std::span<double>(table.data() + t * width, width));
    };
    if (nt == 1) {
        work(0, trials);
        return table;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + nt - 1) / nt;
    for (std::size_t k = 0; k < nt; ++k) {
        const std::size_t b = k * chunk;
        const std::size_t e = std::min(trials, b + chunk);
        if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
    return table;
}

/// Interferer marks in draw order: position, selection uniform, fading to the
/// reference receiver, fading of the interferer's own link.
struct interferer_marks {
    std::vector<double> gain;  // r^-alpha
    std::vector<double> select;
    std::vector<double> fading;
    std::vector<double> own;
};

template <class URBG>
void draw_marks(interferer_marks& m, double lambda, double alpha, double window, URBG& g) {
    m.gain.clear();
    m.select.clear();
    m.fading.clear();
    m.own.clear();
    const double mean = lambda * std::numbers::pi * window * window;
    if (mean <= 0.0) return;
    std::poisson_distribution<long> count(mean);
    const long n = count(g);
    for (long k = 0; k < n; ++k) {
        const point p = sample_uniform_disc(window, g);
        const double r2 = p.x * p.x + p.y * p.y;
        m.gain.push_back(std::pow(r2, -alpha / 2.0));
        m.select.push_back(uniform01(g));
        m.fading.push_back(exponential1(g));
        m.own.push_back(exponential1(g));
    }
}

/// Per-scheme view used inside the trial loop.
struct scheme_view {
    const power_scheme* scheme;
    std::vector<double> probs;
    const layer_partition* distances;
    bool location_free;  // two_level: distance drawn from the whole cluster
};

inline std::vector<scheme_view> make_views(const std::vector<power_scheme>& schemes, const layer_partition& receivers) {
    std::vector<scheme_view> v;
    for (const auto& s : schemes) {
        validate(s);
        v.push_back({&s, class_probs(s, receivers), &receiver_partition(s, receivers),
                     std::holds_alternative<scheme::two_level>(s)});
    }
    return v;
}

inline double scheme_interference(const scheme_view& v, const interferer_marks& m) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m.gain.size(); ++k) {
        const std::size_t cls = pick_index(v.probs, m.select[k]);
        sum += class_power(*v.scheme, cls, m.own[k]) * m.fading[k] * m.gain[k];
    }
    return sum;
}

/// Reference link distance for class c from the uniform u.
inline double reference_distance(const scheme_view& v, std::size_t c, double u) {
    const layer_partition& p = *v.distances;
    if (p.kind() == partition_kind::discrete_locations) {
        return p.location(v.location_free ? pick_index(p.probs(), u) : c);
    }
    if (v.location_free) {
        const double a0 = p.boundaries().front();
        const double s = p.cluster_radius();
        return std::sqrt(a0 * a0 + u * (s * s - a0 * a0));
    }
    const double a = p.inner(c);
    const double b = p.outer(c);
    return std::sqrt(a * a + u * (b * b - a * a));
}

inline std::size_t max_classes(const std::vector<scheme_view>& views) {
    std::size_t m = 0;
    for (const auto& v : views) m = std::max(m, v.probs.size());
    return m;
}

/// Reference draws: (distance uniform, fading) per class, in class order.
template <class URBG>
void draw_reference(std::vector<double>& u, std::vector<double>& h, std::size_t classes, URBG& g) {
    u.resize(classes);
    h.resize(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        u[c] = uniform01(g);
        h[c] = exponential1(g);
    }
}

} // namespace detail

struct outage_report {
    std::string scheme;
    std::vector<double> probs;
    std::vector<double> q;
    std::vector<double> ci;
    /// eta-weighted average outage.
    double mixture = 0.0;
    double mixture_ci = 0.0;
    std::size_t trials = 0;
    /// Realizations redrawn because they produced no interference.
    std::size_t resampled = 0;
};

/// Per-class outage for several schemes on common random numbers. Every trial
/// evaluates a reference link for each class against the same interferer
/// realization.
inline std::vector<outage_report> estimate_outage(const network_config& cfg, const std::vector<power_scheme>& schemes,
                                                  std::size_t trials, std::uint64_t seed) {
    cfg.validate();
    detail::require(trials >= 1000, "estimate_outage: at least 1000 trials required");
    detail::require(!schemes.empty(), "estimate_outage: no schemes");
    const auto views = detail::make_views(schemes, cfg.receivers);
    const std::size_t classes = detail::max_classes(views);
    // Layout per trial: [attempts] then for each scheme its classes.
    std::size_t width = 1;
    std::vector<std::size_t> offset;
    for (const auto& v : views) {
        offset.push_back(width);
        width += v.probs.size();
    }
    const double window = cfg.window();
    const auto table = detail::run_trials(trials, width, cfg.threads, [&](std::size_t t, std::span<double> row) {
        detail::interferer_marks m;
        std::uint64_t attempt = 0;
        while (true) {
            auto g = make_engine(seed, t, stream::interferers, attempt);
            detail::draw_marks(m, cfg.lambda, cfg.alpha, window, g);
            if (!m.gain.empty() || cfg.lambda == 0.0) break;
            ++attempt;
        }
        row[0] = static_cast<double>(attempt);
        auto gr = make_engine(seed, t, stream::reference);
        std::vector<double> u, h;
        detail::draw_reference(u, h, classes, gr);
        for (std::size_t s = 0; s < views.size(); ++s) {
            const auto& v = views[s];
            const double interference = detail::scheme_interference(v, m);
            for (std::size_t c = 0; c < v.probs.size(); ++c) {
                const double r = detail::reference_distance(v, c, u[c]);
                const double signal = class_power(*v.scheme, c, h[c]) * h[c] * std::pow(r, -cfg.alpha);
                // SIR < beta  <=>  signal < beta I  (I = 0 only at lambda = 0: no outage)
                row[offset[s] + c] = signal < cfg.beta * interference ? 1.0 : 0.0;
            }
        }
    });

    std::vector<outage_report> out;
    for (std::size_t s = 0; s < views.size(); ++s) {
        const auto& v = views[s];
        outage_report r;
        r.scheme = scheme_tag(schemes[s]);
        r.probs = v.probs;
        r.trials = trials;
        std::vector<double> hits(v.probs.size(), 0.0);
        stats::welford mix;
        for (std::size_t t = 0; t < trials; ++t) {
            double z = 0.0;
            for (std::size_t c = 0; c < v.probs.size(); ++c) {
                const double x = table[t * width + offset[s] + c];
                hits[c] += x;
                z += v.probs[c] * x;
            }
            mix.add(z);
        }
        for (std::size_t c = 0; c < v.probs.size(); ++c) {
            const double q = hits[c] / static_cast<double>(trials);
            r.q.push_back(q);
            r.ci.push_back(stats::proportion_ci(q, trials));
        }
        r.mixture = mix.mean();
        r.mixture_ci = mix.ci_halfwidth();
        for (std::size_t t = 0; t < trials; ++t) r.resampled += static_cast<std::size_t>(table[t * width]);
        out.push_back(std::move(r));
    }
    return out;
}

inline outage_report estimate_outage(const network_config& cfg, const power_scheme& scheme, std::size_t trials,
                                     std::uint64_t seed) {
    return estimate_outage(cfg, std::vector<power_scheme>{scheme}, trials, seed).front();
}

struct estimate_ci {
    double estimate = 0.0;
    double ci = 0.0;
};

struct spatial_reuse_report {
    std::string scheme;
    std::vector<double> probs;
    /// delta for each power level / layer class.
    std::vector<estimate_ci> per_class;
    /// eta-weighted average of per_class.
    estimate_ci mixture;
    /// Equal unit powers on the same realizations.
    estimate_ci no_pc;
    std::size_t trials = 0;
};

/// pi lambda mean((S_k / (beta I_k))^(2/alpha)) over paired samples.
inline estimate_ci spatial_reuse_from_samples(double lambda, double alpha, double beta, std::span<const double> signal,
                                              std::span<const double> interference) {
    detail::require(signal.size() == interference.size() && !signal.empty(), "spatial_reuse: sample size mismatch");
    detail::require(beta > 0.0, "spatial_reuse: beta must be positive");
    stats::welford w;
    for (std::size_t k = 0; k < signal.size(); ++k) {
        detail::require(interference[k] > 0.0, "spatial_reuse: interference must be positive");
        w.add(std::pow(signal[k] / (beta * interference[k]), 2.0 / alpha));
    }
    const double scale = std::numbers::pi * lambda;
    return {scale * w.mean(), scale * w.ci_halfwidth()};
}

/// Outage-free spatial reuse factor per class, its eta-weighted average and the
/// equal-power baseline, on common random numbers.
inline std::vector<spatial_reuse_report> estimate_spatial_reuse(const network_config& cfg,
                                                                const std::vector<power_scheme>& schemes,
                                                                std::size_t trials, std::uint64_t seed) {
    cfg.validate();
    detail::require(trials >= 1000, "estimate_spatial_reuse: at least 1000 trials required");
    detail::require(cfg.lambda > 0.0, "estimate_spatial_reuse: lambda must be positive");
    detail::require(cfg.beta > 0.0, "estimate_spatial_reuse: beta must be positive");
    const auto views = detail::make_views(schemes, cfg.receivers);
    const std::size_t classes = detail::max_classes(views);
    std::size_t width = 1;  // slot 0: no-PC baseline
    std::vector<std::size_t> offset;
    for (const auto& v : views) {
        offset.push_back(width);
        width += v.probs.size();
    }
    const double window = cfg.window();
    const double d = 2.0 / cfg.alpha;
    const auto table = detail::run_trials(trials, width, cfg.threads, [&](std::size_t t, std::span<double> row) {
        detail::interferer_marks m;
        for (std::uint64_t attempt = 0;; ++attempt) {
            auto g = make_engine(seed, t, stream::interferers, attempt);
            detail::draw_marks(m, cfg.lambda, cfg.alpha, window, g);
            if (!m.gain.empty()) break;
        }
        auto gr = make_engine(seed, t, stream::reference);
        std::vector<double> u, h;
        detail::draw_reference(u, h, std::max<std::size_t>(classes, 1), gr);
        double unit = 0.0;
        for (std::size_t k = 0; k < m.gain.size(); ++k) unit += m.fading[k] * m.gain[k];
        row[0] = std::pow(h[0] / (cfg.beta * unit), d);
        for (std::size_t s = 0; s < views.size(); ++s) {
            const auto& v = views[s];
            const double interference = detail::scheme_interference(v, m);
            for (std::size_t c = 0; c < v.probs.size(); ++c) {
                const double signal = class_power(*v.scheme, c, h[c]) * h[c];
                row[offset[s] + c] = std::pow(signal / (cfg.beta * interference), d);
            }
        }
    });

    const double scale = std::numbers::pi * cfg.lambda;
    auto column = [&](std::size_t col) {
        stats::welford w;
        for (std::size_t t = 0; t < trials; ++t) w.add(table[t * width + col]);
        return estimate_ci{scale * w.mean(), scale * w.ci_halfwidth()};
    };
    const estimate_ci np = column(0);
    std::vector<spatial_reuse_report> out;
    for (std::size_t s = 0; s < views.size(); ++s) {
        const auto& v = views[s];
        spatial_reuse_report r;
        r.scheme = scheme_tag(schemes[s]);
        r.probs = v.probs;
        r.trials = trials;
        r.no_pc = np;
        for (std::size_t c = 0; c < v.probs.size(); ++c) r.per_class.push_back(column(offset[s] + c));
        stats::welford mix;
        for (std::size_t t = 0; t < trials; ++t) {
            double z = 0.0;
            for (std::size_t c = 0; c < v.probs.size(); ++c) z += v.probs[c] * table[t * width + offset[s] + c];
            mix.add(z);
        }
        r.mixture = {scale * mix.mean(), scale * mix.ci_halfwidth()};
        out.push_back(std::move(r));
    }
    return out;
}

inline spatial_reuse_report estimate_spatial_reuse(const network_config& cfg, const power_scheme& scheme,
                                                   std::size_t trials, std::uint64_t seed) {
    return estimate_spatial_reuse(cfg, std::vector<power_scheme>{scheme}, trials, seed).front();
}

struct tc_report {
    std::string scheme;
    std::vector<double> probs;
    double lambda_eps = 0.0;
    /// Final bisection bracket; q_hat(lower) <= eps < q_hat(upper) for the worst class.
    double lower = 0.0;
    double upper = 0.0;
    /// gamma lambda_eps sum_i eta_i (1 - q_i(lambda_eps)).
    double capacity = 0.0;
    double capacity_ci = 0.0;
    std::vector<double> q;
    std::vector<double> ci;
    std::size_t trials = 0;
    /// Intensity up to which interferers were generated.
    double cap = 0.0;
};

struct contention_options {
    double epsilon = 0.1;
    /// Relative bracket width at which bisection stops.
    double tolerance = 1e-4;
    std::size_t trials = 20000;
    /// Initial generation cap; 0 picks ten times the fixed-distance no-PC value at the cluster edge.
    double initial_cap = 0.0;
    std::size_t max_doublings = 20;
};

/// Maximum contention intensity by bisection on a coupled outage estimator.
///
/// Each trial draws interferers as a Poisson process in intensity: arrivals at
/// increasing levels lambda_1 < lambda_2 < ... with i.i.d. positions and marks, so
/// the realization at intensity lambda is the prefix of arrivals below lambda
/// (a thinning of the process at any larger intensity). This gives, per trial
/// and class, the exact critical intensity at which the link goes into outage,
/// and q_hat(lambda) = fraction of trials whose critical intensity is below
/// lambda is monotone in lambda by construction.
inline std::vector<tc_report> estimate_max_contention(const network_config& cfg,
                                                      const std::vector<power_scheme>& schemes,
                                                      const contention_options& opt, std::uint64_t seed) {
    cfg.validate();
    detail::require(opt.epsilon > 0.0 && opt.epsilon < 1.0, "estimate_max_contention: eps must lie in (0,1)");
    detail::require(opt.tolerance > 0.0, "estimate_max_contention: tolerance must be positive");
    detail::require(opt.trials >= 1000, "estimate_max_contention: at least 1000 trials required");
    const auto views = detail::make_views(schemes, cfg.receivers);
    const std::size_t classes = detail::max_classes(views);
    const double inf = std::numeric_limits<double>::infinity();

    double cap = opt.initial_cap;
    if (!(cap > 0.0)) {
        const double s = cfg.receivers.cluster_radius();
        cap = 10.0 * -std::log1p(-opt.epsilon) /
              (kappa_alpha(cfg.alpha) * std::pow(std::max(cfg.beta, 1e-12), 2.0 / cfg.alpha) * s * s);
    }
    // Window sized for the expected critical intensity (~cap/10) and kept across doublings.
    const double window = cfg.window_radius > 0.0 ? cfg.window_radius : intensity_window_radius(cfg.alpha, cap / 10.0);
    const double area = std::numbers::pi * window * window;

    std::size_t width = 0;
    std::vector<std::size_t> offset;
    for (const auto& v : views) {
        offset.push_back(width);
        width += v.probs.size();
    }

    // Critical intensities (inf above the cap) for trials 0..n-1; entries below the
    // cap do not depend on it, so a pilot on a prefix of the trials can set it.
    auto simulate = [&](std::size_t n, double cap) {
        return detail::run_trials(n, width, cfg.threads, [&](std::size_t t, std::span<double> row) {
            auto gr = make_engine(seed, t, stream::reference);
            std::vector<double> u, h;
            detail::draw_reference(u, h, classes, gr);
            // Thresholds beta^-1 S per (scheme, class) and the running interference per scheme.
            std::vector<double> threshold(width);
            std::vector<double> interference(views.size(), 0.0);
            std::size_t open = width;
            for (std::size_t s = 0; s < views.size(); ++s) {
                const auto& v = views[s];
                for (std::size_t c = 0; c < v.probs.size(); ++c) {
                    const double r = detail::reference_distance(v, c, u[c]);
                    const double signal = class_power(*v.scheme, c, h[c]) * h[c] * std::pow(r, -cfg.alpha);
                    threshold[offset[s] + c] = cfg.beta > 0.0 ? signal / cfg.beta : 0.0;
                    row[offset[s] + c] = inf;
                }
            }
            auto g = make_engine(seed, t, stream::interferers);
            double level = 0.0;
            while (open > 0) {
                level += exponential1(g) / area;
                if (level > cap) break;
                const point p = sample_uniform_disc(window, g);
                const double gain = std::pow(p.x * p.x + p.y * p.y, -cfg.alpha / 2.0);
                const double sel = uniform01(g);
                const double fade = exponential1(g);
                const double own = exponential1(g);
                for (std::size_t s = 0; s < views.size(); ++s) {
                    const auto& v = views[s];
                    interference[s] += class_power(*v.scheme, pick_index(v.probs, sel), own) * fade * gain;
                    for (std::size_t c = 0; c < v.probs.size(); ++c) {
                        double& slot = row[offset[s] + c];
                        if (slot == inf && interference[s] > threshold[offset[s] + c]) {
                            slot = level;
                            --open;
                        }
                    }
                }
            }
        });
    };

    auto sorted_critical = [&](const std::vector<double>& table, std::size_t n) {
        std::vector<std::vector<double>> crit(width);
        for (std::size_t col = 0; col < width; ++col) {
            crit[col].resize(n);
            for (std::size_t t = 0; t < n; ++t) crit[col][t] = table[t * width + col];
            std::sort(crit[col].begin(), crit[col].end());
        }
        return crit;
    };

    if (!(opt.initial_cap > 0.0) && opt.trials >= 20000) {
        // Pilot: the worst-class eps-quantile of the critical intensities, per scheme.
        const std::size_t n = opt.trials / 20;
        const auto crit = sorted_critical(simulate(n, cap), n);
        const auto k = static_cast<std::size_t>(opt.epsilon * static_cast<double>(n));
        double need = 0.0;
        for (std::size_t sc = 0; sc < views.size(); ++sc) {
            double first = inf;
            for (std::size_t c = 0; c < views[sc].probs.size(); ++c) first = std::min(first, crit[offset[sc] + c][k]);
            need = std::max(need, first);
        }
        if (std::isfinite(need)) cap = std::min(cap, 2.0 * need);
    }

    for (std::size_t doubling = 0; doubling <= opt.max_doublings; ++doubling, cap *= 2.0) {
        const auto table = simulate(opt.trials, cap);
        const auto crit = sorted_critical(table, opt.trials);
        auto q_at = [&](std::size_t col, double lambda) {
            const auto it = std::lower_bound(crit[col].begin(), crit[col].end(), lambda);
            return static_cast<double>(it - crit[col].begin()) / static_cast<double>(opt.trials);
        };

        bool bracketed = true;
        for (std::size_t s = 0; s < views.size() && bracketed; ++s) {
            double worst = 0.0;
            for (std::size_t c = 0; c < views[s].probs.size(); ++c) worst = std::max(worst, q_at(offset[s] + c, cap));
            bracketed = worst > opt.epsilon;
        }
        if (!bracketed) continue;

        std::vector<tc_report> out;
        for (std::size_t s = 0; s < views.size(); ++s) {
            const auto& v = views[s];
            auto worst = [&](double lambda) {
                double w = 0.0;
                for (std::size_t c = 0; c < v.probs.size(); ++c) w = std::max(w, q_at(offset[s] + c, lambda));
                return w;
            };
            double lo = 0.0;
            double hi = cap;
            while (hi - lo > opt.tolerance * hi) {
                const double mid = 0.5 * (lo + hi);
                if (worst(mid) <= opt.epsilon) lo = mid;
                else hi = mid;
            }
            tc_report r;
            r.scheme = scheme_tag(schemes[s]);
            r.probs = v.probs;
            r.lambda_eps = lo;
            r.lower = lo;
            r.upper = hi;
            r.trials = opt.trials;
            r.cap = cap;
            stats::welford mix;
            for (std::size_t t = 0; t < opt.trials; ++t) {
                double z = 0.0;
                for (std::size_t c = 0; c < v.probs.size(); ++c)
                    z += v.probs[c] * (table[t * width + offset[s] + c] < lo ? 0.0 : 1.0);
                mix.add(z);
            }
            for (std::size_t c = 0; c < v.probs.size(); ++c) {
                const double q = q_at(offset[s] + c, lo);
                r.q.push_back(q);
                r.ci.push_back(stats::proportion_ci(q, opt.trials));
            }
            r.capacity = cfg.gamma * lo * mix.mean();
            r.capacity_ci = cfg.gamma * lo * mix.ci_halfwidth();
            out.push_back(std::move(r));
        }
        return out;
    }
    throw bracketing_error("estimate_max_contention: outage stays below eps up to the generation cap");
}

inline tc_report estimate_max_contention(const network_config& cfg, const power_scheme& scheme,
                                         const contention_options& opt, std::uint64_t seed) {
    return estimate_max_contention(cfg, std::vector<power_scheme>{scheme}, opt, seed).front();
}

} // namespace dpc
