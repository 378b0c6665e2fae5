#ifndef MULTIGIBBS_MEANFIELD_HPP
#define MULTIGIBBS_MEANFIELD_HPP

#include "multigibbs/exp_family.hpp"
#include "multigibbs/field_profile.hpp"
#include "multigibbs/motif_kernel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace multigibbs {

/// One optimizer candidate. Scalar problems use a single-block profile.
struct Candidate {
    FieldProfile profile;
    double objective = 0.0;
    double residual = 0.0;
    long iterations = 0;
    bool converged = true;
    /// Some value sits on a support endpoint; only one-sided optimality applies there.
    bool boundary = false;

    double scalar() const { return profile.values(0); }
};

struct SolveReport {
    /// Sorted by objective, best first.
    std::vector<Candidate> optimizers;
    /// "ok", "not_converged" or "empty".
    std::string verdict = "ok";

    double best_objective() const;
    bool converged() const { return verdict == "ok"; }
};

struct ScalarOptions {
    int grid = 4096;
    double tol_value = 1e-9;
    double tol_x = 1e-7;
    std::size_t cap = 16;
};

/// H(x) = theta x^v + B x - gamma(beta(x)).
double scalar_objective(const BaseMeasure &mu, double theta, double B, int v, double x);

/// The argmax set of H over the support hull.
SolveReport scalar_maximizers(const BaseMeasure &mu, double theta, double B, int v, const ScalarOptions &opt = {});

struct FixedPoint {
    double x = 0.0;
    /// Derivative of x -> alpha'(theta v x^{v-1} + B) at the root.
    double slope = 0.0;
    bool stable = false;
};

std::vector<FixedPoint> scalar_fixed_points(const BaseMeasure &mu, double theta, double B, int v, int grid = 4096);

struct QuadraticCase {
    /// 1: unique maximizer at 0; 2: B != 0, unique maximizer with the sign of B; 3: two maximizers +-t.
    int which = 0;
    double t = 0.0;
    /// theta at which 2 theta alpha''(0) = 1.
    double threshold = 0.0;
    /// Variance is non-increasing in |theta|; false raises the warning flag.
    bool variance_condition = true;
    /// The case agrees with scalar_maximizers at v = 2.
    bool consistent = true;
    SolveReport maximizers;
};

/// Trichotomy for v = 2; mu must be symmetric about zero and theta >= 0.
QuadraticCase quadratic_case(const BaseMeasure &mu, double theta, double B);

/**
 * Cached evaluation of the profile problem on a fixed block partition.
 *
 * Profiles must live on the kernel's partition.
 */
class ProfileProblem {
  public:
    ProfileProblem(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu, double theta, double B);

    const StepKernel &kernel() const { return W_; }
    const BaseMeasure &measure() const { return mu_; }
    int v() const { return sym_.v(); }
    double theta() const { return theta_; }
    double B() const { return B_; }

    Eigen::VectorXd vartheta(const Eigen::VectorXd &f) const;
    /// theta G_W(f) + B int f - int gamma(beta(f)).
    double objective(const Eigen::VectorXd &f) const;
    /// Per-unit-mass gradient theta vartheta + B - beta(f).
    Eigen::VectorXd gradient(const Eigen::VectorXd &f) const;
    /// alpha'(theta vartheta(f) + B) per block.
    Eigen::VectorXd update(const Eigen::VectorXd &f) const;
    /// Sup norm of f - update(f).
    double residual(const Eigen::VectorXd &f) const;

  private:
    StepKernel W_;
    BaseMeasure mu_;
    SymTensor sym_;
    double theta_;
    double B_;
};

double profile_objective(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu, double theta, double B,
                         const FieldProfile &f);

struct FixedPointOptions {
    double damping = 0.5;
    long max_iter = 100000;
    double tol = 1e-11;
};

SolveReport profile_fixed_point(const ProfileProblem &problem, const Eigen::VectorXd &f0,
                                const FixedPointOptions &opt = {});
SolveReport profile_fixed_point(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu, double theta,
                                double B, const FieldProfile &f0, const FixedPointOptions &opt = {});

struct MultistartSpec {
    int n_random = 64;
    /// Number of evenly spaced interior constants used as extra starts.
    int constant_grid = 17;
    std::uint64_t seed = 0;
    /// Each block is split into this many sub-blocks so non-constant profiles within a block are reachable.
    int refine = 1;
    double value_tol = 1e-8;
    double dedup_sup = 1e-6;
    std::size_t cap = 16;
    FixedPointOptions fixed_point;
};

struct FreeEnergy {
    double Z = 0.0;
    /// F_theta: converged candidates within value_tol of Z, deduplicated.
    SolveReport optimizers;
    /// Every run, converged or not.
    std::vector<Candidate> runs;
};

FreeEnergy solve_free_energy(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu, double theta, double B,
                             const MultistartSpec &spec = {});

enum class Symmetry { symmetric, broken, inconclusive };

std::string to_string(Symmetry s);

struct SymmetryVerdict {
    Symmetry verdict = Symmetry::inconclusive;
    double best_constant = 0.0;
    double best_constant_x = 0.0;
    /// -infinity when no non-constant candidate was found.
    double best_nonconstant = 0.0;
    bool regular = false;
    bool positive_kernel = false;
    bool theta_nonneg = false;
    bool v_even_or_nonneg = false;
    /// All the sufficient conditions for constant optimizers hold.
    bool hypotheses_hold = false;
    FreeEnergy solve;
};

SymmetryVerdict replica_symmetry_verdict(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu,
                                         double theta, double B, const MultistartSpec &spec = {});

struct CriticalOptions {
    double lo = 1e-3;
    double hi = 1.0;
    double tol = 1e-8;
    int validation_points = 32;
    ScalarOptions scalar;
};

struct CriticalTheta {
    double theta_c = 0.0;
    int bisections = 0;
    /// (theta, zero is a global maximizer) from the validation scan.
    std::vector<std::pair<double, bool>> scan;
};

CriticalTheta critical_theta(const BaseMeasure &mu, int v, double B = 0.0, const CriticalOptions &opt = {});

struct UniquenessRow {
    double B = 0.0;
    std::size_t count = 0;
    double best_x = 0.0;
};

struct UniquenessField {
    std::optional<double> B0;
    std::vector<UniquenessRow> table;
};

UniquenessField uniqueness_field(const BaseMeasure &mu, double theta, int v, std::vector<double> B_grid,
                                 const ScalarOptions &opt = {});

} // namespace multigibbs

#endif // MULTIGIBBS_MEANFIELD_HPP
