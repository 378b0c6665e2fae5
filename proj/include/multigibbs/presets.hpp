#ifndef MULTIGIBBS_PRESETS_HPP
#define MULTIGIBBS_PRESETS_HPP

#include "multigibbs/config.hpp"
#include "multigibbs/table.hpp"

#include <string>
#include <utility>
#include <vector>

namespace multigibbs {

/// Tables produced by one experiment plus any failed checks.
struct RunResult {
    /// (name, table); the first entry is the main table.
    std::vector<std::pair<std::string, Table>> tables;
    std::vector<std::string> failures;
    /// Largest first-order residual among the free-energy optimizers reported.
    double max_solver_residual = 0.0;
    /// Number of free-energy optimizers whose residual entered max_solver_residual.
    long solver_optimizers = 0;

    bool ok() const { return failures.empty(); }
    const Table &main() const { return tables.front().second; }
};

RunResult run_tilt(const ExperimentConfig &cfg);
RunResult run_solve_scalar(const ExperimentConfig &cfg);
RunResult run_solve_profile(const ExperimentConfig &cfg);
RunResult run_free_energy(const ExperimentConfig &cfg);
RunResult run_phase_scan(const ExperimentConfig &cfg);
RunResult run_critical_theta(const ExperimentConfig &cfg);
/// Tables "trace" (sweep and statistics) and "summary" (stat, mean, batch_se, samples).
RunResult run_sample(const ExperimentConfig &cfg);
RunResult run_weak_law(const ExperimentConfig &cfg);
RunResult run_exact_small_n(const ExperimentConfig &cfg);

/// Per (n, seed) weak-law measurements from a chain on the blown-up kernel.
struct WeakLawRow {
    int n = 0;
    std::uint64_t seed = 0;
    /// Long-run mean of | |mean X| - t | with t the largest |mean f| over the optimizers.
    double absmag_dev = 0.0;
    double absmag = 0.0;
    double absmag_se = 0.0;
    double contrast_alt = 0.0;
    double ham = 0.0;
    /// Averages over the snapshots.
    double distance_b_star = 0.0;
    double lp_distance = 0.0;
};

struct WeakLawStudy {
    std::vector<WeakLawRow> rows;
    FreeEnergy solve;
};

WeakLawStudy weak_law_study(const ExperimentConfig &cfg);

std::vector<std::string> preset_names();
/// Embedded TOML of a preset. Throws DomainError for unknown names.
std::string preset_config(const std::string &name);
/// skip_sampling drops the Monte Carlo stages and keeps the solver stages.
RunResult run_preset(const std::string &name, const ExperimentConfig &cfg, bool skip_sampling = false);
RunResult run_preset(const std::string &name, bool skip_sampling = false);

/// Writes each table as <dir>/<name>.csv and <dir>/<name>.dat.
void write_result(const RunResult &r, const std::string &dir);

} // namespace multigibbs

#endif // MULTIGIBBS_PRESETS_HPP
