#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpc/dpc.hpp"

namespace {

enum exit_code : int { ok = 0, failure = 1, config = 2, infeasible = 3 };

struct run_options {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
    long long seed = -1;
    long long trials = -1;
};

nlohmann::json load(const run_options& o) {
    nlohmann::json doc = nlohmann::json::object();
    if (!o.config_path.empty()) doc = dpc::read_config_file(o.config_path);
    if (!o.preset.empty()) doc["preset"] = o.preset;
    if (!doc.contains("preset") && o.config_path.empty()) throw dpc::config_error("give --preset or --config");
    for (const auto& kv : o.overrides) dpc::apply_override(doc, kv);
    if (o.seed >= 0) doc["seed"] = static_cast<std::uint64_t>(o.seed);
    if (o.trials >= 0) doc["trials"] = o.trials;
    if (!o.out.empty()) doc["output"] = o.out;
    return doc;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const dpc::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const dpc::infeasible_design& e) {
        std::cerr << "infeasible scheme: " << e.what() << '\n';
        return infeasible;
    } catch (const dpc::infeasible_closed_form& e) {
        std::cerr << "infeasible scheme: " << e.what() << '\n';
        return infeasible;
    } catch (const dpc::degenerate_layer& e) {
        std::cerr << "infeasible scheme: " << e.what() << '\n';
        return infeasible;
    } catch (const dpc::invalid_parameter& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const dpc::invariant_violation& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}

void add_source_options(CLI::App* cmd, run_options& o) {
    cmd->add_option("--preset", o.preset, "Embedded preset id (see list-presets)");
    cmd->add_option("--config", o.config_path, "JSON experiment config");
    cmd->add_option("--override", o.overrides, "key=value applied on top of the config")->take_all();
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per point");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete power control experiments for Poisson-clustered ad hoc networks"};
    app.require_subcommand(1);

    run_options run_opt;
    auto* run = app.add_subcommand("run", "Run an experiment and write its CSV");
    add_source_options(run, run_opt);
    run->add_option("--out", run_opt.out, "Output CSV path (default: stdout)");

    auto* list = app.add_subcommand("list-presets", "List embedded presets");

    run_options val_opt;
    auto* val = app.add_subcommand("validate", "Check a config without running it");
    add_source_options(val, val_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config;
    }

    if (*list) {
        for (const auto& id : dpc::list_presets()) std::cout << id << '\n';
        return ok;
    }
    if (*val) {
        return guarded([&] {
            const auto spec = dpc::parse_spec(load(val_opt));
            for (const auto& s : spec.schemes) (void)dpc::parse_scheme(s, spec);
            std::cout << "ok\n";
            return static_cast<int>(ok);
        });
    }
    return guarded([&] {
        const auto spec = dpc::parse_spec(load(run_opt));
        const auto table = dpc::run_experiment(spec);
        if (spec.output.empty() || spec.output == "-") {
            std::cout << dpc::to_csv(table);
        } else {
            dpc::emit_csv(table, spec.output);
            std::cerr << "wrote " << table.rows.size() << " rows to " << spec.output << '\n';
        }
        return static_cast<int>(ok);
    });
}
