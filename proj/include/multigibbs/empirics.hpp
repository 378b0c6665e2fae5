#ifndef MULTIGIBBS_EMPIRICS_HPP
#define MULTIGIBBS_EMPIRICS_HPP

#include "multigibbs/exp_family.hpp"
#include "multigibbs/field_profile.hpp"
#include "multigibbs/motif_kernel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace multigibbs {

/// Equal-weight point cloud on [0,1] x R.
struct EmpiricalMeasure2D {
    Eigen::VectorXd u;
    Eigen::VectorXd y;

    Eigen::Index size() const { return u.size(); }
};

/// Points (i/n, X_i), i = 1..n.
EmpiricalMeasure2D empirical_of_config(const Eigen::VectorXd &X);
EmpiricalMeasure2D empirical_of_fields(const Eigen::VectorXd &m);

/**
 * A predicted limit law on [0,1] x R.
 *
 * product_tilt: given U = u, V ~ mu tilted to mean f(u).
 * degenerate_profile: V = g(U).
 */
struct LimitLaw {
    enum class Kind { product_tilt, degenerate_profile };

    Kind kind = Kind::degenerate_profile;
    FieldProfile profile;
    std::optional<BaseMeasure> mu;

    static LimitLaw product_tilt(FieldProfile f, BaseMeasure mu);
    static LimitLaw degenerate(FieldProfile g);
};

/// n points with u_i = (i - 0.5)/n.
EmpiricalMeasure2D sample_limit(const LimitLaw &law, int n, std::uint64_t seed);

struct LimitSets {
    std::vector<LimitLaw> xi;      // product tilts of each f
    std::vector<LimitLaw> b_star;  // Law(U, vartheta(U))
    std::vector<LimitLaw> b_tilde; // Law(U, alpha'(theta vartheta(U) + B))
    /// Largest blockwise |alpha'(theta vartheta + B) - f| over the members.
    double max_inconsistency = 0.0;
    /// max_inconsistency <= 1e-7.
    bool consistent = true;
};

LimitSets build_limit_sets(const std::vector<FieldProfile> &F, const MotifGraph &H, const StepKernel &W,
                           const BaseMeasure &mu, double theta, double B = 0.0);

struct BLOptions {
    int subsample = 512;
    int repeats = 4;
    std::uint64_t seed = 0;
};

/**
 * Matching surrogate for the bounded-Lipschitz distance.
 *
 * Both clouds are thinned to a common size m = min(subsample, |P|, |Q|) by
 * systematic sampling with a random offset; the mean cost of an optimal
 * perfect matching under min(2, |du| + |dy|) is averaged over repeats. The
 * value bounds d_l from above.
 */
double bl_distance(const EmpiricalMeasure2D &P, const EmpiricalMeasure2D &Q, const BLOptions &opt = {});

/// min over laws of bl_distance(P, sample_limit(law, n_ref, seed)).
double distance_to_set(const EmpiricalMeasure2D &P, const std::vector<LimitLaw> &laws, int n_ref,
                       std::uint64_t seed, const BLOptions &opt = {});

/// min over f in F of n^-1 sum_i |a_i - f(i/n)|^p.
double lp_profile_distance(const Eigen::VectorXd &a, const std::vector<FieldProfile> &F, double p);

/// alpha'(theta m_i + B) for each site.
Eigen::VectorXd tilted_means(const BaseMeasure &mu, double theta, double B, const Eigen::VectorXd &m);

} // namespace multigibbs

#endif // MULTIGIBBS_EMPIRICS_HPP
