#ifndef MULTIGIBBS_MOTIF_KERNEL_HPP
#define MULTIGIBBS_MOTIF_KERNEL_HPP

#include "multigibbs/field_profile.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace multigibbs {

/// Largest motif size handled by the exact tuple sums.
inline constexpr int kMaxMotifVertices = 6;
/// Budget on k^v for the dense symmetrized tensor.
inline constexpr double kTupleBudget = 1e7;

/**
 * Finite simple graph H on vertices 1..v.
 *
 * Constructed from 1-based edge labels; edges() reports them 0-based.
 */
class MotifGraph {
  public:
    MotifGraph(int v, const std::vector<std::pair<int, int>> &edges_one_based);

    static MotifGraph K2();
    static MotifGraph K3();
    /// Two-edge star with centre 1.
    static MotifGraph K1_2();
    static MotifGraph complete(int v);

    int v() const { return v_; }
    const std::vector<std::array<int, 2>> &edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }
    int max_degree() const { return max_degree_; }

    /// Distinct labelled copies of H under vertex relabelling (edge lists, 0-based).
    const std::vector<std::vector<std::array<int, 2>>> &copies() const { return copies_; }

    bool operator==(const MotifGraph &other) const { return v_ == other.v_ && edges_ == other.edges_; }

  private:
    int v_;
    std::vector<std::array<int, 2>> edges_;
    int max_degree_ = 0;
    std::vector<std::vector<std::array<int, 2>>> copies_;
};

/// Symmetric n x n matrix with zero diagonal.
class CouplingMatrix {
  public:
    explicit CouplingMatrix(Eigen::MatrixXd entries);

    /// Complete graph adjacency (ones off the diagonal).
    static CouplingMatrix complete(int n);
    /// Quenched Erdos-Renyi 0/1 adjacency scaled by 1/p.
    static CouplingMatrix er_quenched(int n, double p, std::uint64_t seed);

    int n() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd &entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

  private:
    Eigen::MatrixXd entries_;
};

/// Symmetric block graphon: k blocks with lengths masses(a) and values values(a, b).
class StepKernel {
  public:
    StepKernel(Eigen::VectorXd masses, Eigen::MatrixXd values);

    static StepKernel constant(double c);
    /// Three equal blocks, zero on diagonal blocks, one elsewhere.
    static StepKernel tripartite();
    /// Two equal blocks, zero on diagonal blocks, c elsewhere.
    static StepKernel bipartite(double c);
    static StepKernel equal_blocks(const Eigen::MatrixXd &values);

    int k() const { return static_cast<int>(masses_.size()); }
    const Eigen::VectorXd &masses() const { return masses_; }
    const Eigen::MatrixXd &values() const { return values_; }
    double operator()(int a, int b) const { return values_(a, b); }

    double min_value() const { return values_.minCoeff(); }
    double max_value() const { return values_.maxCoeff(); }
    bool has_equal_masses(double tol = 1e-12) const;
    StepKernel abs() const { return StepKernel(masses_, values_.cwiseAbs()); }

  private:
    Eigen::VectorXd masses_;
    Eigen::MatrixXd values_;
};

/**
 * Sym[W] tabulated on every block tuple.
 *
 * The table is stored row-major with the first block index slowest, so row
 * b of the (k, k^{v-1}) view holds Sym[W](b, .). Construction costs
 * O(k^v * copies * |E|) and throws SizeError when k^v exceeds kTupleBudget.
 */
class SymTensor {
  public:
    SymTensor(const MotifGraph &H, const StepKernel &W);

    int k() const { return k_; }
    int v() const { return v_; }
    std::size_t size() const { return table_.size(); }
    double operator()(std::span<const int> blocks) const;
    /// (k, k^{v-1}) row-major view; row b is the anchored slice.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> anchored() const;

  private:
    int k_;
    int v_;
    std::vector<double> table_;
};

/// Product of per-coordinate weights over all k^r tuples, first coordinate slowest.
Eigen::VectorXd tuple_products(const Eigen::VectorXd &per_block, int r);

double sym_eval(const MotifGraph &H, const StepKernel &W, std::span<const int> blocks);

/// T[Sym[W]] evaluated on each block.
Eigen::VectorXd degree_profile(const MotifGraph &H, const StepKernel &W);

struct Regularity {
    bool regular = false;
    double constant = 0.0;
};

Regularity is_regular(const MotifGraph &H, const StepKernel &W, double tol = 1e-12);

/// G_W(f) by direct O(k^v) enumeration of the edge products.
double hom_functional(const MotifGraph &H, const StepKernel &W, const FieldProfile &f);

/// vartheta(u) = v * sum over (v-1)-tuples of Sym[W](u, .) * prod f * prod masses.
FieldProfile vartheta_profile(const MotifGraph &H, const StepKernel &W, const FieldProfile &f);
FieldProfile vartheta_profile(const SymTensor &sym, const FieldProfile &f);

/// (sum_ab m_a m_b |W_ab|^r)^{1/r}
template <typename DerivedM, typename DerivedW>
double lr_norm(const Eigen::MatrixBase<DerivedM> &masses, const Eigen::MatrixBase<DerivedW> &values, double r) {
    const auto outer = (masses * masses.transpose()).array();
    return std::pow((outer * values.array().abs().pow(r)).sum(), 1.0 / r);
}

double lr_norm(const StepKernel &W, double r);

/// Exact cut norm; enumerates S over the 2^k block subsets (k <= 20).
double cut_norm_exact(const StepKernel &W);

/// Alternating local search; the value is attained by some (S,T), hence a lower bound.
double cut_norm_heuristic(const StepKernel &W, int restarts, std::uint64_t seed);
double cut_norm_heuristic(const CouplingMatrix &Q, int restarts, std::uint64_t seed);

/// Both kernels re-expressed on the common refinement of their block partitions.
std::pair<StepKernel, StepKernel> refine(const StepKernel &W1, const StepKernel &W2);

/// Kernel and profile re-expressed on a common block partition.
std::pair<StepKernel, FieldProfile> align(const StepKernel &W, const FieldProfile &f);

double cut_distance(const StepKernel &W1, const StepKernel &W2);

/// min over the k! block relabellings of cut_distance; equal masses, k <= 8.
double weak_cut_distance_small(const StepKernel &W1, const StepKernel &W2);

StepKernel matrix_to_kernel(const CouplingMatrix &Q);

/// W^sigma with block b of the result equal to block perm[b] of W.
StepKernel permute_blocks(const StepKernel &W, std::span<const int> perm);

/// Split every block into r equal sub-blocks (same function, finer partition).
StepKernel subdivide(const StepKernel &W, int r);

} // namespace multigibbs

#endif // MULTIGIBBS_MOTIF_KERNEL_HPP
