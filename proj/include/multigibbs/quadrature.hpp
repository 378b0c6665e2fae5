#ifndef MULTIGIBBS_QUADRATURE_HPP
#define MULTIGIBBS_QUADRATURE_HPP

#include <Eigen/Dense>

namespace multigibbs {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Gauss-Legendre rule on [a, b] via the Golub-Welsch eigenproblem.
QuadratureRule gauss_legendre(int nodes, double a, double b);

} // namespace multigibbs

#endif // MULTIGIBBS_QUADRATURE_HPP
