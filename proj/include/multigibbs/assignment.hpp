#ifndef MULTIGIBBS_ASSIGNMENT_HPP
#define MULTIGIBBS_ASSIGNMENT_HPP

#include <Eigen/Dense>

#include <vector>

namespace multigibbs {

/**
 * Minimum-cost perfect matching on a square cost matrix (Hungarian method
 * with potentials, O(m^3)). Returns the total cost; row_to_col, if given,
 * receives the column matched to each row.
 */
double min_cost_assignment(const Eigen::MatrixXd &cost, std::vector<int> *row_to_col = nullptr);

} // namespace multigibbs

#endif // MULTIGIBBS_ASSIGNMENT_HPP
