#ifndef MULTIGIBBS_FIELD_PROFILE_HPP
#define MULTIGIBBS_FIELD_PROFILE_HPP

#include <Eigen/Dense>

namespace multigibbs {

/// Step function on [0,1]: block b has length masses(b) and value values(b).
struct FieldProfile {
    Eigen::VectorXd masses;
    Eigen::VectorXd values;

    FieldProfile() = default;
    FieldProfile(Eigen::VectorXd masses_, Eigen::VectorXd values_);

    static FieldProfile constant(const Eigen::VectorXd &masses, double value);

    Eigen::Index blocks() const { return masses.size(); }
    /// Value at u in [0,1]; blocks are the half-open intervals (c_{b-1}, c_b].
    double at(double u) const;
    /// Block index containing u under the same convention as at().
    Eigen::Index block_of(double u) const;
    /// Mass-weighted mean value.
    double mean() const { return masses.dot(values); }
    /// Largest deviation from the mass-weighted mean.
    double spread() const;
};

} // namespace multigibbs

#endif // MULTIGIBBS_FIELD_PROFILE_HPP
