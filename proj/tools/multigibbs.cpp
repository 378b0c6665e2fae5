#include "multigibbs/config.hpp"
#include "multigibbs/errors.hpp"
#include "multigibbs/presets.hpp"
#include "multigibbs/table.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

using namespace multigibbs;

namespace {

std::vector<std::string> split_commas(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Multilinear Gibbs measures: variational solvers, Glauber sampling and limit-law diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> theta;
    std::optional<double> field;
    app.add_option("--config", config_path, "TOML experiment file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (default: the config's out)");
    app.add_option("--seed", seed, "RNG seed; required unless the config sets one");
    app.add_option("--theta", theta, "Override theta");
    app.add_option("-B,--field", field, "Override the external field B");

    std::map<std::string, std::function<RunResult(const ExperimentConfig &)>> runners{
        {"tilt", run_tilt},
        {"solve-scalar", run_solve_scalar},
        {"solve-profile", run_solve_profile},
        {"free-energy", run_free_energy},
        {"phase-scan", run_phase_scan},
        {"critical-theta", run_critical_theta},
        {"sample", run_sample},
        {"weak-law", run_weak_law},
        {"exact-small-n", run_exact_small_n},
    };
    const std::map<std::string, std::string> help{
        {"tilt", "Tables of alpha, alpha', alpha'', gamma and beta for the base measure"},
        {"solve-scalar", "Maximizers and fixed points of the scalar free energy"},
        {"solve-profile", "Damped fixed-point iteration from [solver] start"},
        {"free-energy", "Multistart free-energy solve and replica-symmetry verdict"},
        {"phase-scan", "Free-energy solve over a theta grid"},
        {"critical-theta", "Bisection for the critical theta of the scalar problem"},
        {"sample", "Glauber chain on the blown-up kernel"},
        {"weak-law", "Chains over several n and seeds against the predicted limit sets"},
        {"exact-small-n", "Exact finite-n free energy by enumeration"},
    };

    std::map<std::string, CLI::App *> subs;
    for (const auto &[name, text] : help) {
        subs[name] = app.add_subcommand(name, text);
    }

    std::optional<double> theta_min, theta_max;
    std::optional<int> steps;
    subs["phase-scan"]->add_option("--theta-min", theta_min);
    subs["phase-scan"]->add_option("--theta-max", theta_max);
    subs["phase-scan"]->add_option("--steps", steps)->check(CLI::PositiveNumber);

    std::optional<long> sweeps, burn_in, thin;
    std::optional<std::string> stats;
    subs["sample"]->add_option("--sweeps", sweeps)->check(CLI::NonNegativeNumber);
    subs["sample"]->add_option("--burn-in", burn_in)->check(CLI::NonNegativeNumber);
    subs["sample"]->add_option("--thin", thin)->check(CLI::PositiveNumber);
    subs["sample"]->add_option("--stats", stats, "Comma-separated: mag,absmag,ham,energy,contrast:alt,contrast:half,moments");

    std::string preset_name;
    bool skip_sampling = false;
    CLI::App *preset = app.add_subcommand("preset", "Run an embedded experiment and check its assertions");
    preset->add_option("name", preset_name)->required()->check(CLI::IsMember(preset_names()));
    preset->add_flag("--skip-sampling", skip_sampling, "Run only the solver stages");
    CLI::App *show = app.add_subcommand("show-preset", "Print the embedded TOML of a preset");
    std::string show_name;
    show->add_option("name", show_name)->required()->check(CLI::IsMember(preset_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (show->parsed()) {
            std::cout << preset_config(show_name);
            return 0;
        }
        ExperimentConfig cfg;
        if (preset->parsed()) {
            cfg = parse_config(preset_config(preset_name), seed);
        } else if (!config_path.empty()) {
            cfg = load_config(config_path, seed);
        } else if (seed) {
            cfg = parse_config("", seed);
        } else {
            throw DomainError("a seed is required: pass --seed or set seed in --config");
        }
        if (out_dir) {
            cfg.out = *out_dir;
        }
        if (theta) {
            cfg.theta = *theta;
        }
        if (field) {
            cfg.B = *field;
        }
        if (theta_min) {
            cfg.scan.theta_min = *theta_min;
        }
        if (theta_max) {
            cfg.scan.theta_max = *theta_max;
        }
        if (steps) {
            cfg.scan.steps = *steps;
        }
        if (sweeps) {
            cfg.sampler.sweeps = *sweeps;
        }
        if (burn_in) {
            cfg.sampler.burn_in = *burn_in;
        }
        if (thin) {
            cfg.sampler.thin = *thin;
        }
        if (stats) {
            cfg.sampler.stats = split_commas(*stats);
        }

        RunResult r;
        if (preset->parsed()) {
            r = run_preset(preset_name, cfg, skip_sampling);
        } else {
            for (const auto &[name, sub] : subs) {
                if (sub->parsed()) {
                    r = runners.at(name)(cfg);
                }
            }
        }
        write_result(r, cfg.out);
        std::cout << to_csv(r.main());
        for (const auto &f : r.failures) {
            std::cerr << "FAILED: " << f << '\n';
        }
        return r.ok() ? 0 : 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
