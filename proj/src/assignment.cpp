#include "multigibbs/assignment.hpp"

#include "multigibbs/errors.hpp"

#include <limits>

namespace multigibbs {

double min_cost_assignment(const Eigen::MatrixXd &cost, std::vector<int> *row_to_col) {
    const auto m = static_cast<int>(cost.rows());
    if (cost.cols() != m) {
        throw DomainError("min_cost_assignment: cost matrix must be square");
    }
    if (m == 0) {
        if (row_to_col) {
            row_to_col->clear();
        }
        return 0.0;
    }
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials u (rows), w (columns); p[j] is the row matched to column j.
    std::vector<double> u(m + 1, 0.0);
    std::vector<double> w(m + 1, 0.0);
    std::vector<int> p(m + 1, 0);
    std::vector<int> way(m + 1, 0);
    std::vector<double> minv(m + 1);
    std::vector<char> used(m + 1);
    for (int i = 1; i <= m; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - w[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    w[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    std::vector<int> match(m, -1);
    for (int j = 1; j <= m; ++j) {
        match[p[j] - 1] = j - 1;
        total += cost(p[j] - 1, j - 1);
    }
    if (row_to_col) {
        *row_to_col = std::move(match);
    }
    return total;
}

} // namespace multigibbs
