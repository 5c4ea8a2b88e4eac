#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpc/analytic.hpp"
#include "dpc/error.hpp"
#include "dpc/geometry.hpp"
#include "dpc/montecarlo.hpp"
#include "dpc/optimize.hpp"
#include "dpc/schemes.hpp"

namespace dpc {

/// Problem in the experiment description itself (unknown preset or key, bad value).
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class experiment_kind { feasibility, outage, spatial_reuse, throughput, contention };

struct experiment_spec {
    std::string preset;
    experiment_kind kind = experiment_kind::outage;
    double lambda_min = 1e-5;
    double lambda_max = 1e-3;
    std::size_t lambda_points = 10;
    bool lambda_log = true;
    std::vector<std::string> schemes;
    double epsilon = 0.1;
    std::vector<double> epsilons;
    double beta = 1.0;
    double gamma = 1.0;
    double alpha = 3.5;
    double s = 20.0;
    std::string receivers = "uniform";
    double distance = 20.0;
    std::vector<double> locations;
    double rho0 = 1.29;
    double eta_min = 0.05;
    double eta_max = 0.95;
    std::size_t eta_points = 19;
    std::size_t trials = 20000;
    std::uint64_t seed = 1;
    double window_radius = 0.0;
    std::size_t threads = 0;
    std::string output;

    std::vector<double> lambda_grid() const {
        std::vector<double> g(lambda_points);
        for (std::size_t i = 0; i < lambda_points; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(lambda_points - 1);
            g[i] = lambda_log ? lambda_min * std::pow(lambda_max / lambda_min, f)
                              : lambda_min + f * (lambda_max - lambda_min);
        }
        if (!g.empty()) g.back() = lambda_max;
        if (!g.empty()) g.front() = lambda_min;
        return g;
    }

    layer_partition receiver_partition() const {
        if (receivers == "uniform") return layer_partition::equal_width(s, 1);
        if (receivers == "fixed") return layer_partition::discrete({distance}, std::max(s, distance));
        if (receivers == "discrete") return layer_partition::discrete(locations, s);
        throw config_error("receivers must be one of uniform, fixed, discrete");
    }
};

struct result_row {
    std::string sweep_name;
    double sweep_value = 0.0;
    std::string scheme;
    std::string metric;
    double estimate = 0.0;
    double ci_halfwidth = 0.0;
    std::optional<double> analytic;

    friend bool operator==(const result_row&, const result_row&) = default;
};

struct result_table {
    std::vector<result_row> rows;
    friend bool operator==(const result_table&, const result_table&) = default;
};

namespace detail {

/// Value as it will appear after a %.10g round trip.
inline double round10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::strtod(buf, nullptr);
}

inline std::string format10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::vector<double> parse_args(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) throw config_error("empty argument in scheme descriptor");
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size())
            throw config_error("bad number '" + item + "' in scheme descriptor");
        out.push_back(v);
    }
    return out;
}

inline std::size_t as_count(double v, const std::string& what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 4096) throw config_error(what + ": N must be a positive integer");
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// A parsed scheme together with the label used in result tables.
struct named_scheme {
    std::string label;
    power_scheme scheme;
    /// Layer count for layered designs, 0 otherwise.
    std::size_t layers = 0;
};

/// Parses descriptors such as "no_pc", "fractional(0.5)", "two_level(1.5,0.4,0.6)"
/// (P1/P2 with P2 = 1), "dpc_thm3_lower(5)", "dpc_thm3_upper(5)", "dpc_thm5",
/// "dpc_vb(5)" and "dpc_optimal(5)".
inline named_scheme parse_scheme(const std::string& text, const experiment_spec& spec) {
    static const std::regex pattern(R"(^\s*([a-z0-9_]+)\s*(?:\((.*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) throw config_error("unparseable scheme descriptor '" + text + "'");
    const std::string name = m[1];
    const std::vector<double> args = m[2].matched ? detail::parse_args(m[2]) : std::vector<double>{};
    auto expect = [&](std::size_t n) {
        if (args.size() != n)
            throw config_error("scheme '" + name + "' takes " + std::to_string(n) + " argument(s)");
    };
    named_scheme out;
    out.label = text;
    out.label.erase(std::remove_if(out.label.begin(), out.label.end(), ::isspace), out.label.end());
    try {
        if (name == "no_pc") {
            if (args.size() > 1) expect(1);
            out.scheme = scheme::no_pc{args.empty() ? 1.0 : args[0]};
        } else if (name == "channel_inversion") {
            expect(0);
            out.scheme = scheme::channel_inversion{};
        } else if (name == "fractional") {
            if (args.size() > 1) expect(1);
            out.scheme = scheme::fractional{args.empty() ? 0.5 : args[0]};
        } else if (name == "two_level") {
            expect(3);
            out.scheme = scheme::two_level{args[0], 1.0, args[1], args[2]};
        } else if (name == "dpc_thm3_lower") {
            expect(1);
            const std::size_t n = detail::as_count(args[0], name);
            const auto p = layer_partition::equal_width(spec.s, n);
            out.scheme = scheme::n_layer_dpc{design_powers(p, spec.alpha, power_design::thm3_lower), p};
            out.layers = n;
        } else if (name == "dpc_thm3_upper") {
            expect(1);
            const std::size_t n = detail::as_count(args[0], name);
            const auto p = layer_partition::equal_width_annulus(default_inner_radius(spec.s, n), spec.s, n);
            out.scheme = scheme::n_layer_dpc{design_powers(p, spec.alpha, power_design::thm3_upper), p};
            out.layers = n;
        } else if (name == "dpc_thm5") {
            expect(0);
            if (spec.receivers != "discrete") throw config_error("dpc_thm5 needs receivers = discrete");
            const auto p = spec.receiver_partition();
            out.scheme = scheme::n_layer_dpc{design_powers(p, spec.alpha, power_design::thm5), p};
            out.layers = p.size();
        } else if (name == "dpc_vb") {
            expect(1);
            const std::size_t n = detail::as_count(args[0], name);
            const auto p = layer_partition::equal_width(spec.s, n);
            const auto u = coefficient_powers(p, spec.alpha, coefficient_rule::vb_interior{});
            out.scheme = scheme::n_layer_dpc{powers_from_coefficients(p, u, spec.alpha), p};
            out.layers = n;
        } else if (name == "dpc_optimal") {
            expect(1);
            const std::size_t n = detail::as_count(args[0], name);
            const auto p = layer_partition::equal_width(spec.s, n);
            power_design_problem prob{p.probs(), spec.alpha, spec.rho0, 1.0, constraint_form::eq4_derived};
            out.scheme = scheme::n_layer_dpc{numeric_powers(prob).powers, p};
            out.layers = n;
        } else {
            throw config_error("unknown scheme '" + name + "'");
        }
        validate(out.scheme);
    } catch (const invalid_parameter& e) {
        throw config_error("scheme '" + text + "': " + e.what());
    }
    return out;
}

namespace detail {

inline const std::map<std::string, std::string>& preset_documents() {
    static const std::map<std::string, std::string> docs = {
        {"fig1", R"json({"kind": "feasibility", "alpha": 3.5, "rho0": 1.29,
                     "eta_min": 0.05, "eta_max": 0.95, "eta_points": 19})json"},
        {"fig2", R"json({"kind": "outage", "alpha": 3.5, "beta": 1, "receivers": "fixed", "distance": 20, "s": 20,
                     "lambda_min": 1e-5, "lambda_max": 1e-3, "lambda_points": 10, "lambda_scale": "log",
                     "schemes": ["no_pc", "two_level(1.5,0.4,0.6)"], "trials": 20000, "seed": 2})json"},
        {"fig3", R"json({"kind": "spatial_reuse", "alpha": 3.5, "beta": 1, "receivers": "fixed", "distance": 20, "s": 20,
                     "lambda_min": 1e-5, "lambda_max": 1e-3, "lambda_points": 10, "lambda_scale": "log",
                     "schemes": ["no_pc", "two_level(1.5,0.4,0.6)"], "trials": 20000, "seed": 3})json"},
        {"fig4", R"json({"kind": "outage", "alpha": 3.5, "beta": 1, "receivers": "uniform", "s": 20,
                     "lambda_min": 1e-5, "lambda_max": 1e-3, "lambda_points": 10, "lambda_scale": "log",
                     "schemes": ["no_pc", "channel_inversion", "fractional(0.5)", "dpc_thm3_lower(5)"],
                     "trials": 20000, "seed": 4})json"},
        {"fig5", R"json({"kind": "throughput", "alpha": 3.5, "beta": 1, "gamma": 1, "receivers": "discrete", "s": 15,
                     "locations": [3, 6, 9, 12, 15],
                     "lambda_min": 1e-5, "lambda_max": 1e-3, "lambda_points": 10, "lambda_scale": "log",
                     "schemes": ["no_pc", "channel_inversion", "fractional(0.5)", "dpc_thm5"],
                     "trials": 20000, "seed": 5})json"},
        {"fig6", R"json({"kind": "spatial_reuse", "alpha": 3.5, "beta": 1, "receivers": "discrete", "s": 15,
                     "locations": [3, 6, 9, 12, 15],
                     "lambda_min": 1e-5, "lambda_max": 1e-3, "lambda_points": 10, "lambda_scale": "log",
                     "schemes": ["no_pc", "channel_inversion", "fractional(0.5)", "dpc_thm5"],
                     "trials": 20000, "seed": 6})json"},
        {"fig7", R"json({"kind": "throughput", "alpha": 3.5, "beta": 1, "gamma": 1, "receivers": "uniform", "s": 15,
                     "rho0": 1.29,
                     "lambda_min": 1e-5, "lambda_max": 1e-3, "lambda_points": 10, "lambda_scale": "log",
                     "schemes": ["no_pc", "channel_inversion", "fractional(0.5)",
                                 "dpc_vb(2)", "dpc_vb(5)", "dpc_vb(10)", "dpc_vb(20)",
                                 "dpc_optimal(2)", "dpc_optimal(5)", "dpc_optimal(10)", "dpc_optimal(20)"],
                     "trials": 20000, "seed": 7})json"},
    };
    return docs;
}

} // namespace detail

inline std::vector<std::string> list_presets() {
    std::vector<std::string> out;
    for (const auto& [k, v] : detail::preset_documents()) out.push_back(k);
    return out;
}

/// The embedded document for a preset, with "preset" set.
inline nlohmann::json preset_document(const std::string& id) {
    const auto& docs = detail::preset_documents();
    const auto it = docs.find(id);
    if (it == docs.end()) throw config_error("unknown preset '" + id + "'");
    auto doc = nlohmann::json::parse(it->second);
    doc["preset"] = id;
    return doc;
}

/// Applies "key=value"; the value is read as JSON when it parses, else as a string.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw config_error("override must look like key=value: '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    auto parsed = nlohmann::json::parse(value, nullptr, false);
    doc[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
}

/// Builds a spec from a flat document; a "preset" key loads that preset first
/// and the remaining keys override it.
inline experiment_spec parse_spec(const nlohmann::json& input) {
    if (!input.is_object()) throw config_error("experiment config must be a JSON object");
    nlohmann::json doc = nlohmann::json::object();
    if (input.contains("preset")) {
        if (!input["preset"].is_string()) throw config_error("preset must be a string");
        doc = preset_document(input["preset"].get<std::string>());
    }
    for (const auto& [k, v] : input.items()) doc[k] = v;

    experiment_spec spec;
    static const std::set<std::string> known = {
        "preset", "kind", "lambda_min", "lambda_max", "lambda_points", "lambda_scale", "schemes", "epsilon",
        "epsilons", "beta", "gamma", "alpha", "s", "receivers", "distance", "locations", "rho0", "eta_min",
        "eta_max", "eta_points", "trials", "seed", "window_radius", "threads", "output"};
    for (const auto& [k, v] : doc.items())
        if (!known.count(k)) throw config_error("unknown config key '" + k + "'");

    try {
        auto num = [&](const char* key, double& dst) {
            if (doc.contains(key)) {
                if (!doc[key].is_number()) throw config_error(std::string(key) + " must be a number");
                dst = doc[key].get<double>();
            }
        };
        auto count = [&](const char* key, std::size_t& dst) {
            if (doc.contains(key)) {
                if (!doc[key].is_number_integer() || doc[key].get<long long>() < 0)
                    throw config_error(std::string(key) + " must be a nonnegative integer");
                dst = doc[key].get<std::size_t>();
            }
        };
        auto str = [&](const char* key, std::string& dst) {
            if (doc.contains(key)) {
                if (!doc[key].is_string()) throw config_error(std::string(key) + " must be a string");
                dst = doc[key].get<std::string>();
            }
        };
        auto list = [&](const char* key, std::vector<double>& dst) {
            if (doc.contains(key)) {
                if (!doc[key].is_array()) throw config_error(std::string(key) + " must be an array");
                dst.clear();
                for (const auto& x : doc[key]) {
                    if (!x.is_number()) throw config_error(std::string(key) + " must hold numbers");
                    dst.push_back(x.get<double>());
                }
            }
        };
        str("preset", spec.preset);
        std::string kind = "outage";
        str("kind", kind);
        static const std::map<std::string, experiment_kind> kinds = {
            {"feasibility", experiment_kind::feasibility}, {"outage", experiment_kind::outage},
            {"spatial_reuse", experiment_kind::spatial_reuse}, {"throughput", experiment_kind::throughput},
            {"contention", experiment_kind::contention}};
        if (!kinds.count(kind)) throw config_error("unknown kind '" + kind + "'");
        spec.kind = kinds.at(kind);
        num("lambda_min", spec.lambda_min);
        num("lambda_max", spec.lambda_max);
        count("lambda_points", spec.lambda_points);
        std::string scale = "log";
        str("lambda_scale", scale);
        if (scale != "log" && scale != "linear") throw config_error("lambda_scale must be log or linear");
        spec.lambda_log = scale == "log";
        if (doc.contains("schemes")) {
            if (!doc["schemes"].is_array()) throw config_error("schemes must be an array of strings");
            for (const auto& x : doc["schemes"]) {
                if (!x.is_string()) throw config_error("schemes must be an array of strings");
                spec.schemes.push_back(x.get<std::string>());
            }
        }
        num("epsilon", spec.epsilon);
        list("epsilons", spec.epsilons);
        num("beta", spec.beta);
        num("gamma", spec.gamma);
        num("alpha", spec.alpha);
        num("s", spec.s);
        str("receivers", spec.receivers);
        num("distance", spec.distance);
        list("locations", spec.locations);
        num("rho0", spec.rho0);
        num("eta_min", spec.eta_min);
        num("eta_max", spec.eta_max);
        count("eta_points", spec.eta_points);
        count("trials", spec.trials);
        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_unsigned()) throw config_error("seed must be a nonnegative integer");
            spec.seed = doc["seed"].get<std::uint64_t>();
        }
        num("window_radius", spec.window_radius);
        count("threads", spec.threads);
        str("output", spec.output);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    auto check = [](bool ok, const std::string& msg) {
        if (!ok) throw config_error(msg);
    };
    check(spec.alpha > 2.0, "alpha must exceed 2");
    check(spec.beta > 0.0, "beta must be positive");
    check(spec.gamma > 0.0, "gamma must be positive");
    check(spec.s > 0.0, "s must be positive");
    check(spec.rho0 >= 1.0, "rho0 must be >= 1");
    check(spec.receivers == "uniform" || spec.receivers == "fixed" || spec.receivers == "discrete",
          "receivers must be one of uniform, fixed, discrete");
    if (spec.receivers == "fixed") check(spec.distance > 0.0, "distance must be positive");
    if (spec.receivers == "discrete") check(!spec.locations.empty(), "discrete receivers need locations");
    if (spec.kind == experiment_kind::feasibility) {
        check(spec.eta_min > 0.0 && spec.eta_max < 1.0 && spec.eta_min <= spec.eta_max, "eta range must lie in (0,1)");
        check(spec.eta_points >= 2, "eta_points must be at least 2");
    } else {
        check(!spec.schemes.empty(), "schemes must not be empty");
        check(spec.trials >= 1000, "trials must be at least 1000");
        if (spec.kind == experiment_kind::contention) {
            if (spec.epsilons.empty()) spec.epsilons = {spec.epsilon};
            for (double e : spec.epsilons) check(e > 0.0 && e < 1.0, "epsilons must lie in (0,1)");
        } else {
            check(spec.lambda_min > 0.0 && spec.lambda_max > 0.0, "lambda sweep bounds must be positive");
            check(spec.lambda_min <= spec.lambda_max, "lambda_min must not exceed lambda_max");
            check(spec.lambda_points >= 2, "lambda_points must be at least 2");
        }
    }
    try {
        (void)spec.receiver_partition();
    } catch (const invalid_parameter& e) {
        throw config_error(std::string("receivers: ") + e.what());
    }
    return spec;
}

inline nlohmann::json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config '" + path + "'");
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw config_error("config '" + path + "' is not valid JSON");
    return doc;
}

namespace detail {

/// Interference factor per class, when the scheme has a closed-form outage.
inline std::optional<std::vector<double>> class_factors(const power_scheme& s, const layer_partition& receivers,
                                                        double alpha) {
    if (std::holds_alternative<scheme::no_pc>(s))
        return std::vector<double>(receivers.size(), kappa_alpha(alpha));
    if (const auto* t = std::get_if<scheme::two_level>(&s)) {
        const std::vector<double> p{t->p1, t->p2};
        const std::vector<double> q{t->eta1, t->eta2};
        return std::vector<double>{interference_factor(p, q, alpha, 0), interference_factor(p, q, alpha, 1)};
    }
    if (const auto* d = std::get_if<scheme::n_layer_dpc>(&s)) {
        std::vector<double> t(d->powers.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = interference_factor(d->powers, d->partition.probs(), alpha, i);
        return t;
    }
    return std::nullopt;
}

/// Outage of a receiver drawn from layer i of p with interference factor t.
inline double layer_closed_form(double lambda, double t, double beta, double alpha, const layer_partition& p,
                                std::size_t i) {
    if (p.kind() == partition_kind::discrete_locations)
        return fixed_distance_outage(lambda, t, beta, alpha, p.location(i));
    return uniform_annulus_outage(lambda, t, beta, alpha, p.inner(i), p.outer(i));
}

/// Closed-form per-class outage, or nullopt for schemes without one.
inline std::optional<std::vector<double>> analytic_class_outage(const power_scheme& s, const layer_partition& receivers,
                                                                double lambda, double beta, double alpha) {
    const auto t = class_factors(s, receivers, alpha);
    if (!t) return std::nullopt;
    std::vector<double> q(t->size());
    if (std::holds_alternative<scheme::two_level>(s)) {
        for (std::size_t c = 0; c < q.size(); ++c) {
            double acc = 0.0;
            for (std::size_t l = 0; l < receivers.size(); ++l)
                acc += receivers.prob(l) * layer_closed_form(lambda, (*t)[c], beta, alpha, receivers, l);
            q[c] = acc;
        }
        return q;
    }
    const layer_partition& p = receiver_partition(s, receivers);
    for (std::size_t c = 0; c < q.size(); ++c) q[c] = layer_closed_form(lambda, (*t)[c], beta, alpha, p, c);
    return q;
}

inline double weighted(const std::vector<double>& w, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * v[i];
    return acc;
}

inline std::string class_metric(const std::string& base, std::size_t c) { return base + "_class" + std::to_string(c + 1); }

inline void add_row(result_table& table, const std::string& sweep, double value, const std::string& scheme,
                    const std::string& metric, double estimate, double ci, std::optional<double> analytic) {
    table.rows.push_back({sweep, round10(value), scheme, metric, round10(estimate), round10(ci),
                          analytic ? std::optional<double>(round10(*analytic)) : std::nullopt});
}

} // namespace detail

inline void sort_rows(result_table& table) {
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const result_row& a, const result_row& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        if (a.scheme != b.scheme) return a.scheme < b.scheme;
        return a.metric < b.metric;
    });
}

/// Runs the estimators and closed forms an experiment asks for. Every lambda
/// point reuses the master seed, so sweeps run on common random numbers.
inline result_table run_experiment(const experiment_spec& spec) {
    result_table table;
    if (spec.kind == experiment_kind::feasibility) {
        for (std::size_t i = 0; i < spec.eta_points; ++i) {
            const double eta1 = spec.eta_min + (spec.eta_max - spec.eta_min) * static_cast<double>(i) /
                                                   static_cast<double>(spec.eta_points - 1);
            const double eta2 = 1.0 - eta1;
            const auto region = two_power_region(eta1, eta2, spec.alpha, spec.rho0);
            const bool ok = !region.empty();
            detail::add_row(table, "eta1", eta1, "two_level", "feasible", ok ? 1.0 : 0.0, 0.0, ok ? 1.0 : 0.0);
            if (ok) {
                detail::add_row(table, "eta1", eta1, "two_level", "ratio_lower", region.lower, 0.0, region.lower);
                detail::add_row(table, "eta1", eta1, "two_level", "ratio_upper", region.upper, 0.0, region.upper);
            }
        }
        sort_rows(table);
        return table;
    }

    std::vector<named_scheme> named;
    std::vector<power_scheme> schemes;
    for (const auto& text : spec.schemes) {
        named.push_back(parse_scheme(text, spec));
        schemes.push_back(named.back().scheme);
    }
    network_config cfg;
    cfg.alpha = spec.alpha;
    cfg.beta = spec.beta;
    cfg.gamma = spec.gamma;
    cfg.receivers = spec.receiver_partition();
    cfg.window_radius = spec.window_radius;
    cfg.threads = spec.threads;

    // Design summary for layered schemes.
    for (const auto& n : named) {
        if (const auto* d = std::get_if<scheme::n_layer_dpc>(&n.scheme)) {
            double sum = 0.0;
            double mx = 0.0;
            for (double p : d->powers) {
                sum += p;
                mx = std::max(mx, p);
            }
            detail::add_row(table, "design", static_cast<double>(d->powers.size()), n.label, "sum_power", sum / mx,
                            0.0, std::nullopt);
        }
    }

    if (spec.kind == experiment_kind::contention) {
        for (double eps : spec.epsilons) {
            contention_options opt;
            opt.epsilon = eps;
            opt.trials = spec.trials;
            const auto reports = estimate_max_contention(cfg, schemes, opt, spec.seed);
            for (std::size_t k = 0; k < named.size(); ++k) {
                const auto& r = reports[k];
                std::optional<double> lam, cap;
                // Exact values from the layer formulas where the scheme has them.
                std::optional<std::pair<layer_partition, std::vector<double>>> layered;
                if (const auto* d = std::get_if<scheme::n_layer_dpc>(&schemes[k])) layered.emplace(d->partition, d->powers);
                else if (std::holds_alternative<scheme::no_pc>(schemes[k]))
                    layered.emplace(cfg.receivers, std::vector<double>(cfg.receivers.size(), 1.0));
                if (layered) {
                    lam = max_contention_exact(layered->first, layered->second, eps, spec.beta, spec.alpha);
                    cap = throughput_at(*lam, layered->first, layered->second, spec.beta, spec.alpha, spec.gamma);
                }
                const double half = 0.5 * (r.upper - r.lower);
                detail::add_row(table, "epsilon", eps, named[k].label, "lambda_eps", r.lambda_eps, half, lam);
                detail::add_row(table, "epsilon", eps, named[k].label, "tc_max", r.capacity, r.capacity_ci, cap);
            }
        }
        sort_rows(table);
        return table;
    }

    for (double lambda : spec.lambda_grid()) {
        cfg.lambda = lambda;
        if (spec.kind == experiment_kind::spatial_reuse) {
            const auto reports = estimate_spatial_reuse(cfg, schemes, spec.trials, spec.seed);
            for (std::size_t k = 0; k < named.size(); ++k) {
                const auto& r = reports[k];
                const auto t = detail::class_factors(schemes[k], cfg.receivers, spec.alpha);
                std::vector<double> exact;
                if (t)
                    for (double f : *t) exact.push_back(std::numbers::pi * std::pow(spec.beta, -2.0 / spec.alpha) / f);
                if (r.per_class.size() > 1) {
                    for (std::size_t c = 0; c < r.per_class.size(); ++c)
                        detail::add_row(table, "lambda", lambda, named[k].label, detail::class_metric("sr", c),
                                        r.per_class[c].estimate, r.per_class[c].ci,
                                        t ? std::optional<double>(exact[c]) : std::nullopt);
                }
                detail::add_row(table, "lambda", lambda, named[k].label, "sr", r.mixture.estimate, r.mixture.ci,
                                t ? std::optional<double>(detail::weighted(r.probs, exact)) : std::nullopt);
                if (std::holds_alternative<scheme::no_pc>(schemes[k])) {
                    const double lb = spatial_reuse_np_lower(lambda, spec.alpha, spec.beta);
                    detail::add_row(table, "lambda", lambda, named[k].label, "sr_lower_bound", lb, 0.0, lb);
                }
            }
            continue;
        }
        const auto reports = estimate_outage(cfg, schemes, spec.trials, spec.seed);
        for (std::size_t k = 0; k < named.size(); ++k) {
            const auto& r = reports[k];
            const auto exact = detail::analytic_class_outage(schemes[k], cfg.receivers, lambda, spec.beta, spec.alpha);
            if (spec.kind == experiment_kind::outage) {
                if (r.q.size() > 1) {
                    for (std::size_t c = 0; c < r.q.size(); ++c)
                        detail::add_row(table, "lambda", lambda, named[k].label, detail::class_metric("outage", c),
                                        r.q[c], r.ci[c], exact ? std::optional<double>((*exact)[c]) : std::nullopt);
                }
                detail::add_row(table, "lambda", lambda, named[k].label, "outage", r.mixture, r.mixture_ci,
                                exact ? std::optional<double>(detail::weighted(r.probs, *exact)) : std::nullopt);
            } else {
                const double scale = spec.gamma * lambda;
                std::optional<double> tc;
                if (exact) tc = scale * (1.0 - detail::weighted(r.probs, *exact));
                detail::add_row(table, "lambda", lambda, named[k].label, "tc", scale * (1.0 - r.mixture),
                                scale * r.mixture_ci, tc);
            }
        }
    }
    sort_rows(table);
    return table;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace detail

inline constexpr const char* csv_header = "sweep_name,sweep_value,scheme,metric,estimate,ci_halfwidth,analytic";

inline std::string to_csv(const result_table& table) {
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : table.rows) {
        out += detail::csv_field(r.sweep_name) + ',' + detail::format10(r.sweep_value) + ',' +
               detail::csv_field(r.scheme) + ',' + detail::csv_field(r.metric) + ',' + detail::format10(r.estimate) +
               ',' + detail::format10(r.ci_halfwidth) + ',' + (r.analytic ? detail::format10(*r.analytic) : "") + '\n';
    }
    return out;
}

inline void emit_csv(const result_table& table, const std::string& path) {
    if (table.rows.empty()) throw invalid_parameter("emit_csv: empty table");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << to_csv(table);
    out.flush();
    if (!out) throw io_error("write to '" + path + "' failed");
}

inline result_table parse_csv(std::istream& in) {
    result_table table;
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw invalid_parameter("parse_csv: unexpected header");
    auto num = [](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') throw invalid_parameter("parse_csv: bad number '" + s + "'");
        return v;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 7) throw invalid_parameter("parse_csv: expected 7 fields");
        result_row r;
        r.sweep_name = f[0];
        r.sweep_value = num(f[1]);
        r.scheme = f[2];
        r.metric = f[3];
        r.estimate = num(f[4]);
        r.ci_halfwidth = num(f[5]);
        if (!f[6].empty()) r.analytic = num(f[6]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

inline result_table read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    return parse_csv(in);
}

} // namespace dpc
