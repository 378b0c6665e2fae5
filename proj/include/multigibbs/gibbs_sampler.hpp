#ifndef MULTIGIBBS_GIBBS_SAMPLER_HPP
#define MULTIGIBBS_GIBBS_SAMPLER_HPP

#include "multigibbs/exp_family.hpp"
#include "multigibbs/motif_kernel.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace multigibbs {

/// Budget on the number of index tuples visited by a naive distinct-tuple sum.
inline constexpr double kNaiveBudget = 1e7;

namespace detail {
struct BlockPlan;
}

/**
 * Finite-n model: motif, coupling, base measure, theta and field.
 *
 * The coupling is either a dense CouplingMatrix or a StepKernel blown up to
 * n sites, sites assigned to blocks contiguously with boundaries
 * round(n * cumulative mass). The field B enters only through the tilted
 * base measure mu_B. Sites are indexed 0..n-1.
 */
class ModelSpec {
  public:
    ModelSpec(MotifGraph H, CouplingMatrix Q, BaseMeasure mu, double theta, double B);
    ModelSpec(MotifGraph H, StepKernel W, int n, BaseMeasure mu, double theta, double B);

    const MotifGraph &motif() const { return H_; }
    int v() const { return H_.v(); }
    int n() const { return n_; }
    double theta() const { return theta_; }
    double B() const { return B_; }
    const BaseMeasure &base() const { return mu_; }
    /// mu_B, the measure sites are drawn from before interaction.
    const BaseMeasure &tilted_base() const { return mu_B_; }

    bool is_block() const { return kernel_.has_value(); }
    const StepKernel &kernel() const { return *kernel_; }
    const std::vector<int> &block_of_site() const { return block_of_; }
    /// Dense coupling; only present for dense specs.
    const CouplingMatrix &dense() const { return *dense_; }

    /// Coupling entry Q(i, j); zero on the diagonal.
    double Q(int i, int j) const;
    /// The full n x n coupling matrix.
    CouplingMatrix coupling_matrix() const;

    /// Same model with Q replaced by Q(pi(i), pi(j)) (always dense).
    ModelSpec permuted(const std::vector<int> &pi) const;

    const detail::BlockPlan &plan() const { return *plan_; }

  private:
    MotifGraph H_;
    BaseMeasure mu_;
    BaseMeasure mu_B_;
    double theta_;
    double B_;
    int n_;
    std::optional<CouplingMatrix> dense_;
    std::optional<StepKernel> kernel_;
    std::vector<int> block_of_;
    std::shared_ptr<const detail::BlockPlan> plan_;
};

/// U_n(X) over distinct ordered tuples; block specs use inclusion-exclusion on block power sums.
double hamiltonian(const ModelSpec &spec, const Eigen::VectorXd &X);
/// Direct enumeration of distinct tuples. Throws SizeError beyond kNaiveBudget.
double hamiltonian_naive(const ModelSpec &spec, const Eigen::VectorXd &X);

/// m_i for site i (0-based).
double local_field(const ModelSpec &spec, const Eigen::VectorXd &X, int i);
double local_field_naive(const ModelSpec &spec, const Eigen::VectorXd &X, int i);

/// Every m_i at once.
Eigen::VectorXd local_fields(const ModelSpec &spec, const Eigen::VectorXd &X);

/// n^{-1} sum_i X_i m_i, which equals v U_n(X).
double hamiltonian_stat(const ModelSpec &spec, const Eigen::VectorXd &X);

double contrast(const Eigen::VectorXd &c, const Eigen::VectorXd &X);

/// Weights c_i = (-1)^i with 1-based i.
Eigen::VectorXd alternating_weights(int n);

/// (n^-1 sum |X_i|^p, n^-1 sum |m_i|^q, n^-1 sum |alpha'(theta m_i)|^p).
std::array<double, 3> moment_diagnostics(const ModelSpec &spec, const Eigen::VectorXd &X, double p = 2.0,
                                         double q = 2.0);

/// Atom probabilities of tilted_measure(mu, field).
Eigen::VectorXd conditional_probs(const BaseMeasure &mu, double field);
/// Inverse-CDF draw of an atom index for a uniform u in [0, 1).
int draw_atom(const Eigen::VectorXd &probs, double u);

enum class ScanOrder { sequential, random };

/// Spin configuration with cached block power sums (or Q X for dense v = 2) and its own RNG.
class SamplerState {
  public:
    /// Starts from i.i.d. draws from mu_B.
    SamplerState(const ModelSpec &spec, std::uint64_t seed);
    SamplerState(const ModelSpec &spec, std::uint64_t seed, Eigen::VectorXd X0);

    const ModelSpec &spec() const { return *spec_; }
    const Eigen::VectorXd &config() const { return X_; }
    long sweeps() const { return sweeps_; }

    /// Local field at site i from the cached sums.
    double field(int i) const;
    /// Heat-bath update of one site.
    void update_site(int i);
    /// Compares cached sums with a fresh recomputation; throws DiagnosticError beyond 1e-9, then resyncs.
    void audit();

    /// Advances the sweep counter; every 100th sweep runs audit().
    void finish_sweep();

    double uniform();

  private:
    void rebuild();
    void set_site(int i, int atom);

    const ModelSpec *spec_;
    std::mt19937_64 rng_;
    Eigen::VectorXd X_;
    std::vector<int> atom_;
    Eigen::MatrixXd power_sums_; // k x (v + 1), column r holds sum of X^r
    Eigen::VectorXd QX_;
    long sweeps_ = 0;
};

/// n site visits; the block-sum audit runs every 100 sweeps.
void glauber_sweep(SamplerState &state, ScanOrder scan = ScanOrder::random);

struct ChainOptions {
    long sweeps = 1000;
    long burn_in = 100;
    long thin = 1;
    std::uint64_t seed = 0;
    /// mag, absmag, ham, energy, contrast:alt, contrast:half, moments.
    std::vector<std::string> stats{"mag"};
    ScanOrder scan = ScanOrder::random;
    double moment_p = 2.0;
    double moment_q = 2.0;
    bool keep_snapshots = false;
    int batches = 16;
};

struct StatSummary {
    std::string name;
    double mean = 0.0;
    /// Batch-means standard error; NaN with fewer rows than batches.
    double batch_se = 0.0;
    long samples = 0;
};

struct Trace {
    std::vector<std::string> columns;
    std::vector<long> sweep;
    /// One row per recorded sweep.
    std::vector<std::vector<double>> rows;
    std::vector<StatSummary> summary;
    std::vector<Eigen::VectorXd> snapshots;
};

Trace sample_chain(const ModelSpec &spec, const ChainOptions &opt);

struct ExactLaw {
    double Z = 0.0;
    double mean_mag = 0.0;
    double mean_absmag = 0.0;
    double mean_ham_stat = 0.0;
    double mean_contrast_alt = 0.0;
    /// Gibbs law of U_n: (value, probability), values ascending.
    std::vector<std::pair<double, double>> law_U;
};

/// Exhaustive enumeration of support^n (at most 1e7 configurations).
ExactLaw exact_small_n(const ModelSpec &spec);

/// Total-variation distance between the random-scan chain's stationary law and the Gibbs law.
double exact_glauber_stationarity(const ModelSpec &spec);

struct PermutationReport {
    double z_gap = 0.0;
    double law_gap = 0.0;
    bool invariant = false;
};

PermutationReport permutation_invariance_check(const ModelSpec &spec, const std::vector<int> &pi);

} // namespace multigibbs

#endif // MULTIGIBBS_GIBBS_SAMPLER_HPP
