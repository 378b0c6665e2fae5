#include "multigibbs/quadrature.hpp"

#include "multigibbs/errors.hpp"

#include <cmath>

namespace multigibbs {

QuadratureRule gauss_legendre(int nodes, double a, double b) {
    if (nodes < 2) {
        throw DomainError("gauss_legendre: need at least 2 nodes");
    }
    if (!(b > a)) {
        throw DomainError("gauss_legendre: empty interval");
    }
    // Jacobi matrix of the Legendre recurrence; eigenvalues are the nodes on [-1, 1].
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int i = 1; i < nodes; ++i) {
        const double k = i;
        const double off = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    const Eigen::VectorXd &x = solver.eigenvalues();
    const Eigen::VectorXd w = 2.0 * solver.eigenvectors().row(0).transpose().array().square().matrix();

    QuadratureRule rule;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    rule.nodes = (mid + half * x.array()).matrix();
    rule.weights = half * w;
    return rule;
}

} // namespace multigibbs
