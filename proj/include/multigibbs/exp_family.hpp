#ifndef MULTIGIBBS_EXP_FAMILY_HPP
#define MULTIGIBBS_EXP_FAMILY_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace multigibbs {

/**
 * Finitely supported probability measure on the real line.
 *
 * Atoms are stored with strictly increasing points and strictly positive
 * weights summing to one. The support hull is [support_min, support_max];
 * both endpoints are atoms, so boundary rates are always finite.
 */
class BaseMeasure {
  public:
    BaseMeasure(Eigen::VectorXd points, Eigen::VectorXd weights);

    /// Fair coin on {-1, +1}.
    static BaseMeasure ising_pm1();
    /// {-1, +1} with mu(+1) = e^b / (e^b + e^-b), i.e. the b-tilt of the fair coin.
    static BaseMeasure ising_tilted(double b);
    /// {0, 1} with mu(1) = p.
    static BaseMeasure bernoulli(double p);
    /// {-1, 0, 1} with mass w/2 on each of +-1 and 1 - w at zero.
    static BaseMeasure three_point(double w);
    /// Gauss-Legendre discretization of a named density on [a, b].
    static BaseMeasure quadrature(const std::string &density, double a, double b, int nodes = 64);

    const Eigen::VectorXd &points() const { return points_; }
    const Eigen::VectorXd &weights() const { return weights_; }
    const Eigen::VectorXd &log_weights() const { return log_weights_; }
    std::size_t size() const { return static_cast<std::size_t>(points_.size()); }
    double support_min() const { return points_(0); }
    double support_max() const { return points_(points_.size() - 1); }

  private:
    Eigen::VectorXd points_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd log_weights_;
};

/// Real number or a signed infinity.
class ExtendedReal {
  public:
    enum class Kind { finite, pos_inf, neg_inf };

    static ExtendedReal finite(double value) { return {Kind::finite, value}; }
    static ExtendedReal pos_inf() { return {Kind::pos_inf, 0.0}; }
    static ExtendedReal neg_inf() { return {Kind::neg_inf, 0.0}; }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
    bool is_neg_inf() const { return kind_ == Kind::neg_inf; }
    /// Payload of a finite value. Throws DomainError for infinities.
    double value() const;
    /// Finite payload or +-infinity as a double.
    double to_double() const;

  private:
    ExtendedReal(Kind kind, double value) : kind_(kind), value_(value) {}
    Kind kind_;
    double value_;
};

/// Tolerance below which a mean is snapped onto a support endpoint.
inline constexpr double kEndpointSnap = 1e-12;

// alpha(theta) = log E exp(theta X)
double log_mgf(const BaseMeasure &mu, double theta);
// alpha'(theta), the tilted mean
double tilt_mean(const BaseMeasure &mu, double theta);
// alpha''(theta), the tilted variance
double tilt_var(const BaseMeasure &mu, double theta);
// alpha'''(theta), the tilted third central moment
double tilt_third_cumulant(const BaseMeasure &mu, double theta);

/// Same atoms, weights proportional to w_j exp(theta x_j).
BaseMeasure tilted_measure(const BaseMeasure &mu, double theta);

/**
 * beta(x): the natural parameter whose tilt has mean x.
 *
 * Interior points are solved by bracketed, safeguarded Newton iteration to
 * near machine precision. Points within kEndpointSnap of an endpoint map to
 * +-infinity. Throws DomainError outside the support hull.
 */
ExtendedReal inverse_mean(const BaseMeasure &mu, double x);

/// gamma(theta) = theta alpha'(theta) - alpha(theta) = KL(mu_theta || mu).
double rate(const BaseMeasure &mu, double theta);

/// gamma(beta(x)); at an endpoint atom this is -log mu({endpoint}).
double rate_at_mean(const BaseMeasure &mu, double x);

/// Grid verdict on stochastic non-negativity (default 512 grid points).
bool is_stochastically_nonneg(const BaseMeasure &mu, int grid_size = 512);

struct SymmetricTiltWitness {
    bool found = false;
    double tilt = 0.0;
};

/// Detects mu = (non-negative tilt) of a measure symmetric about zero.
SymmetricTiltWitness nonneg_tilt_of_symmetric(const BaseMeasure &mu);

/// Atoms mirror-symmetric about zero with equal mirrored weights.
bool is_symmetric_about_zero(const BaseMeasure &mu, double tol = 1e-12);

/// Grid check that alpha'' is non-increasing on [0, theta_max].
bool variance_nonincreasing_on_halfline(const BaseMeasure &mu, double theta_max = 40.0, int grid_size = 512);

} // namespace multigibbs

#endif // MULTIGIBBS_EXP_FAMILY_HPP
