#ifndef MULTIGIBBS_CONFIG_HPP
#define MULTIGIBBS_CONFIG_HPP

#include "multigibbs/exp_family.hpp"
#include "multigibbs/gibbs_sampler.hpp"
#include "multigibbs/meanfield.hpp"
#include "multigibbs/motif_kernel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace multigibbs {

/// Base measure given by name ("ising", "bernoulli(0.3)", ...) or by explicit atoms.
struct BaseSpec {
    std::string name = "ising";
    std::vector<double> points;
    std::vector<double> weights;

    bool operator==(const BaseSpec &) const = default;
};

/// Motif by name ("K2", "K3", "K1_2", "Kv(4)") or by vertex count and 1-based edges.
struct MotifSpec {
    std::string name = "K2";
    int v = 0;
    std::vector<std::pair<int, int>> edges;

    bool operator==(const MotifSpec &) const = default;
};

/// Kernel by name ("constant(1)", "tripartite", "bipartite(2)") or by masses and values.
struct KernelSpec {
    std::string name = "constant(1)";
    std::vector<double> masses;
    std::vector<std::vector<double>> values;

    bool operator==(const KernelSpec &) const = default;
};

struct SolverSection {
    int n_random = 64;
    int constant_grid = 17;
    int refine = 1;
    double damping = 0.5;
    long max_iter = 100000;
    double tol = 1e-11;
    /// Start for solve-profile; empty means the constant alpha'(0).
    std::vector<double> start;

    bool operator==(const SolverSection &) const = default;
};

struct SamplerSection {
    long sweeps = 1000;
    long burn_in = 100;
    long thin = 1;
    std::string scan = "random";
    std::vector<std::string> stats{"mag", "absmag", "ham", "contrast:alt", "moments"};
    double moment_p = 2.0;
    double moment_q = 2.0;

    bool operator==(const SamplerSection &) const = default;
};

struct ScanSection {
    double theta_min = 0.0;
    double theta_max = 1.5;
    int steps = 16;

    bool operator==(const ScanSection &) const = default;
};

struct WeakLawSection {
    std::vector<int> ns{250, 500, 1000, 2000};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    int snapshots = 8;
    int subsample = 512;
    int repeats = 2;
    double p_prime = 1.0;

    bool operator==(const WeakLawSection &) const = default;
};

struct CriticalSection {
    double lo = 1e-3;
    double hi = 1.0;
    double tol = 1e-8;
    /// When set, the theta-c preset checks the result against this value.
    std::optional<double> expected;
    double tolerance = 1e-6;

    bool operator==(const CriticalSection &) const = default;
};

struct ExactSection {
    int n_min = 4;
    int n_max = 12;

    bool operator==(const ExactSection &) const = default;
};

/**
 * One experiment. Every field except the seed has a default; the seed is
 * mandatory so that no run draws entropy implicitly.
 */
struct ExperimentConfig {
    std::uint64_t seed = 0;
    double theta = 0.0;
    double B = 0.0;
    BaseSpec base;
    MotifSpec motif;
    KernelSpec kernel;
    /// Number of sites when the kernel is blown up for sampling.
    int n = 100;
    std::string out = "out";
    SolverSection solver;
    SamplerSection sampler;
    ScanSection scan;
    WeakLawSection weak_law;
    CriticalSection critical;
    ExactSection exact;

    bool operator==(const ExperimentConfig &) const = default;
};

/// Parses TOML text. Throws DomainError on malformed input or a missing seed.
/// A given seed_override replaces the file's seed and satisfies the requirement.
ExperimentConfig parse_config(const std::string &text, std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::string &path, std::optional<std::uint64_t> seed_override = std::nullopt);
/// TOML text that parse_config maps back to the same config.
std::string serialize_config(const ExperimentConfig &cfg);

BaseMeasure make_base(const BaseSpec &spec);
MotifGraph make_motif(const MotifSpec &spec);
StepKernel make_kernel(const KernelSpec &spec);

MultistartSpec multistart_of(const ExperimentConfig &cfg);
ModelSpec model_of(const ExperimentConfig &cfg);
ChainOptions chain_options_of(const ExperimentConfig &cfg);

} // namespace multigibbs

#endif // MULTIGIBBS_CONFIG_HPP
