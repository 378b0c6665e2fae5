#include "multigibbs/motif_kernel.hpp"

#include "multigibbs/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace multigibbs {

namespace {

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= base;
    }
    return r;
}

// Advances a base-k odometer (last coordinate fastest); false after the final tuple.
bool next_tuple(std::vector<int> &t, int k) {
    for (auto i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
        if (++t[i] < k) {
            return true;
        }
        t[i] = 0;
    }
    return false;
}

std::vector<double> boundaries(const Eigen::VectorXd &masses) {
    std::vector<double> c(masses.size() + 1, 0.0);
    for (Eigen::Index a = 0; a < masses.size(); ++a) {
        c[a + 1] = c[a] + masses(a);
    }
    c.back() = 1.0;
    return c;
}

void check_masses(const Eigen::VectorXd &masses, const char *who) {
    if (masses.size() == 0) {
        throw DomainError(std::string(who) + ": no blocks");
    }
    if ((masses.array() <= 0.0).any()) {
        throw DomainError(std::string(who) + ": block masses must be positive");
    }
    if (std::abs(masses.sum() - 1.0) > 1e-12) {
        throw DomainError(std::string(who) + ": block masses must sum to one");
    }
}

// Common refinement of two partitions: piece masses and the owning block in each.
struct CommonPartition {
    Eigen::VectorXd masses;
    std::vector<int> owner1;
    std::vector<int> owner2;
};

CommonPartition common_partition(const Eigen::VectorXd &m1, const Eigen::VectorXd &m2) {
    const std::vector<double> c1 = boundaries(m1);
    const std::vector<double> c2 = boundaries(m2);
    std::vector<double> cuts;
    cuts.insert(cuts.end(), c1.begin(), c1.end());
    cuts.insert(cuts.end(), c2.begin(), c2.end());
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> merged{0.0};
    for (double c : cuts) {
        if (c - merged.back() > 1e-14) {
            merged.push_back(c);
        }
    }
    merged.back() = 1.0;

    CommonPartition out;
    const auto pieces = static_cast<Eigen::Index>(merged.size() - 1);
    out.masses.resize(pieces);
    for (Eigen::Index p = 0; p < pieces; ++p) {
        out.masses(p) = merged[p + 1] - merged[p];
        const double mid = 0.5 * (merged[p] + merged[p + 1]);
        auto owner = [mid](const std::vector<double> &c) {
            const auto it = std::upper_bound(c.begin() + 1, c.end() - 1, mid);
            return static_cast<int>(it - (c.begin() + 1));
        };
        out.owner1.push_back(owner(c1));
        out.owner2.push_back(owner(c2));
    }
    out.masses /= out.masses.sum();
    return out;
}

StepKernel pull_back(const StepKernel &W, const Eigen::VectorXd &masses, const std::vector<int> &owner) {
    const auto k = static_cast<Eigen::Index>(owner.size());
    Eigen::MatrixXd values(k, k);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = 0; q < k; ++q) {
            values(p, q) = W(owner[p], owner[q]);
        }
    }
    return StepKernel(masses, values);
}

// Matrix of block-pair masses times values: M_ab = m_a m_b W_ab.
Eigen::MatrixXd mass_matrix(const StepKernel &W) {
    return (W.masses() * W.masses().transpose()).cwiseProduct(W.values());
}

} // namespace

// ---------------------------------------------------------------- FieldProfile

FieldProfile::FieldProfile(Eigen::VectorXd masses_, Eigen::VectorXd values_)
    : masses(std::move(masses_)), values(std::move(values_)) {
    if (masses.size() != values.size()) {
        throw DomainError("FieldProfile: masses and values differ in length");
    }
    check_masses(masses, "FieldProfile");
    if (!values.allFinite()) {
        throw DomainError("FieldProfile: non-finite value");
    }
}

FieldProfile FieldProfile::constant(const Eigen::VectorXd &masses, double value) {
    return FieldProfile(masses, Eigen::VectorXd::Constant(masses.size(), value));
}

Eigen::Index FieldProfile::block_of(double u) const {
    double c = 0.0;
    for (Eigen::Index b = 0; b + 1 < masses.size(); ++b) {
        c += masses(b);
        if (u <= c + 1e-15) {
            return b;
        }
    }
    return masses.size() - 1;
}

double FieldProfile::at(double u) const { return values(block_of(u)); }

double FieldProfile::spread() const { return (values.array() - mean()).abs().maxCoeff(); }

// ------------------------------------------------------------------ MotifGraph

MotifGraph::MotifGraph(int v, const std::vector<std::pair<int, int>> &edges_one_based) : v_(v) {
    if (v < 2) {
        throw DomainError("MotifGraph: need at least 2 vertices");
    }
    if (v > kMaxMotifVertices) {
        throw UnsupportedError("MotifGraph: at most 6 vertices supported");
    }
    if (edges_one_based.empty()) {
        throw DomainError("MotifGraph: edge list is empty");
    }
    std::set<std::array<int, 2>> seen;
    std::vector<int> degree(v, 0);
    for (auto [a, b] : edges_one_based) {
        if (a < 1 || a > v || b < 1 || b > v) {
            throw DomainError("MotifGraph: vertex label out of range");
        }
        if (a == b) {
            throw DomainError("MotifGraph: self-loop");
        }
        std::array<int, 2> e{std::min(a, b) - 1, std::max(a, b) - 1};
        if (!seen.insert(e).second) {
            throw DomainError("MotifGraph: duplicate edge");
        }
        edges_.push_back(e);
        ++degree[e[0]];
        ++degree[e[1]];
    }
    max_degree_ = *std::max_element(degree.begin(), degree.end());

    std::vector<int> sigma(v);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::set<std::vector<std::array<int, 2>>> distinct;
    do {
        std::vector<std::array<int, 2>> image;
        for (const auto &e : edges_) {
            const int x = sigma[e[0]];
            const int y = sigma[e[1]];
            image.push_back({std::min(x, y), std::max(x, y)});
        }
        std::sort(image.begin(), image.end());
        distinct.insert(std::move(image));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    copies_.assign(distinct.begin(), distinct.end());
}

MotifGraph MotifGraph::K2() { return MotifGraph(2, {{1, 2}}); }

MotifGraph MotifGraph::K3() { return MotifGraph(3, {{1, 2}, {1, 3}, {2, 3}}); }

MotifGraph MotifGraph::K1_2() { return MotifGraph(3, {{1, 2}, {1, 3}}); }

MotifGraph MotifGraph::complete(int v) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 1; a <= v; ++a) {
        for (int b = a + 1; b <= v; ++b) {
            edges.emplace_back(a, b);
        }
    }
    return MotifGraph(v, edges);
}

// -------------------------------------------------------------- CouplingMatrix

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw DomainError("CouplingMatrix: must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        if (entries_(i, i) != 0.0) {
            throw DomainError("CouplingMatrix: diagonal must be zero");
        }
        for (Eigen::Index j = 0; j < i; ++j) {
            if (entries_(i, j) != entries_(j, i)) {
                throw DomainError("CouplingMatrix: must be symmetric");
            }
        }
    }
}

CouplingMatrix CouplingMatrix::complete(int n) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Ones(n, n);
    q.diagonal().setZero();
    return CouplingMatrix(q);
}

CouplingMatrix CouplingMatrix::er_quenched(int n, double p, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw DomainError("er_quenched: p must lie in (0, 1]");
    }
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            if (u < p) {
                q(i, j) = 1.0 / p;
                q(j, i) = 1.0 / p;
            }
        }
    }
    return CouplingMatrix(q);
}

// ------------------------------------------------------------------ StepKernel

StepKernel::StepKernel(Eigen::VectorXd masses, Eigen::MatrixXd values)
    : masses_(std::move(masses)), values_(std::move(values)) {
    check_masses(masses_, "StepKernel");
    if (values_.rows() != masses_.size() || values_.cols() != masses_.size()) {
        throw DomainError("StepKernel: values must be k x k");
    }
    if (!values_.allFinite()) {
        throw DomainError("StepKernel: non-finite value");
    }
    for (Eigen::Index a = 0; a < values_.rows(); ++a) {
        for (Eigen::Index b = 0; b < a; ++b) {
            if (values_(a, b) != values_(b, a)) {
                throw DomainError("StepKernel: values must be symmetric");
            }
        }
    }
}

StepKernel StepKernel::constant(double c) { return StepKernel(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, c)); }

StepKernel StepKernel::equal_blocks(const Eigen::MatrixXd &values) {
    const auto k = values.rows();
    return StepKernel(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)), values);
}

StepKernel StepKernel::tripartite() {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3);
    w.diagonal().setZero();
    return equal_blocks(w);
}

StepKernel StepKernel::bipartite(double c) {
    Eigen::Matrix2d w;
    w << 0.0, c, c, 0.0;
    return equal_blocks(w);
}

bool StepKernel::has_equal_masses(double tol) const {
    return ((masses_.array() - 1.0 / static_cast<double>(k())).abs() <= tol).all();
}

// ------------------------------------------------------------------- SymTensor

SymTensor::SymTensor(const MotifGraph &H, const StepKernel &W) : k_(W.k()), v_(H.v()) {
    if (std::pow(static_cast<double>(k_), v_) > kTupleBudget) {
        throw SizeError("SymTensor: k^v exceeds the tuple budget");
    }
    table_.resize(ipow(static_cast<std::size_t>(k_), v_));
    const auto &copies = H.copies();
    const double scale = 1.0 / static_cast<double>(copies.size());
    std::vector<int> t(v_, 0);
    std::size_t idx = 0;
    do {
        double s = 0.0;
        for (const auto &copy : copies) {
            double prod = 1.0;
            for (const auto &e : copy) {
                prod *= W(t[e[0]], t[e[1]]);
            }
            s += prod;
        }
        table_[idx++] = scale * s;
    } while (next_tuple(t, k_));
}

double SymTensor::operator()(std::span<const int> blocks) const {
    if (static_cast<int>(blocks.size()) != v_) {
        throw DomainError("SymTensor: expected v block indices");
    }
    std::size_t idx = 0;
    for (int b : blocks) {
        if (b < 0 || b >= k_) {
            throw DomainError("SymTensor: block index out of range");
        }
        idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(b);
    }
    return table_[idx];
}

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> SymTensor::anchored() const {
    const auto cols = static_cast<Eigen::Index>(table_.size() / static_cast<std::size_t>(k_));
    return {table_.data(), k_, cols};
}

Eigen::VectorXd tuple_products(const Eigen::VectorXd &per_block, int r) {
    const auto k = static_cast<int>(per_block.size());
    Eigen::VectorXd out(static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(k), r)));
    if (r == 0) {
        out(0) = 1.0;
        return out;
    }
    std::vector<int> t(r, 0);
    Eigen::Index idx = 0;
    do {
        double p = 1.0;
        for (int b : t) {
            p *= per_block(b);
        }
        out(idx++) = p;
    } while (next_tuple(t, k));
    return out;
}

// ------------------------------------------------------------------ operations

double sym_eval(const MotifGraph &H, const StepKernel &W, std::span<const int> blocks) {
    if (static_cast<int>(blocks.size()) != H.v()) {
        throw DomainError("sym_eval: expected v block indices");
    }
    for (int b : blocks) {
        if (b < 0 || b >= W.k()) {
            throw DomainError("sym_eval: block index out of range");
        }
    }
    // Literal average over all v! vertex permutations.
    std::vector<int> sigma(H.v());
    std::iota(sigma.begin(), sigma.end(), 0);
    double total = 0.0;
    double count = 0.0;
    do {
        double prod = 1.0;
        for (const auto &e : H.edges()) {
            prod *= W(blocks[sigma[e[0]]], blocks[sigma[e[1]]]);
        }
        total += prod;
        count += 1.0;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total / count;
}

Eigen::VectorXd degree_profile(const MotifGraph &H, const StepKernel &W) {
    const SymTensor sym(H, W);
    return sym.anchored() * tuple_products(W.masses(), H.v() - 1);
}

Regularity is_regular(const MotifGraph &H, const StepKernel &W, double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("is_regular: tol must be positive");
    }
    const Eigen::VectorXd d = degree_profile(H, W);
    Regularity r;
    r.constant = W.masses().dot(d);
    r.regular = d.maxCoeff() - d.minCoeff() <= tol;
    return r;
}

double hom_functional(const MotifGraph &H, const StepKernel &W0, const FieldProfile &f0) {
    const auto [W, f] = align(W0, f0);
    const int k = W.k();
    const Eigen::VectorXd weight = f.values.cwiseProduct(W.masses());
    std::vector<int> t(H.v(), 0);
    double total = 0.0;
    do {
        double prod = 1.0;
        for (int b : t) {
            prod *= weight(b);
        }
        if (prod == 0.0) {
            continue;
        }
        for (const auto &e : H.edges()) {
            prod *= W(t[e[0]], t[e[1]]);
        }
        total += prod;
    } while (next_tuple(t, k));
    return total;
}

FieldProfile vartheta_profile(const SymTensor &sym, const FieldProfile &f) {
    if (f.blocks() != sym.k()) {
        throw DomainError("vartheta_profile: profile and tensor partitions differ");
    }
    const Eigen::VectorXd weight = f.values.cwiseProduct(f.masses);
    Eigen::VectorXd theta = static_cast<double>(sym.v()) * (sym.anchored() * tuple_products(weight, sym.v() - 1));
    return FieldProfile(f.masses, std::move(theta));
}

FieldProfile vartheta_profile(const MotifGraph &H, const StepKernel &W0, const FieldProfile &f0) {
    const auto [W, f] = align(W0, f0);
    return vartheta_profile(SymTensor(H, W), f);
}

double lr_norm(const StepKernel &W, double r) {
    if (!(r >= 1.0)) {
        throw DomainError("lr_norm: r must be at least 1");
    }
    return lr_norm(W.masses(), W.values(), r);
}

double cut_norm_exact(const StepKernel &W) {
    const int k = W.k();
    if (k > 20) {
        throw SizeError("cut_norm_exact: k > 20, use cut_norm_heuristic");
    }
    const Eigen::MatrixXd M = mass_matrix(W);
    // Gray-code walk over S; r = M^T 1_S, best T takes all positive or all negative entries.
    Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
    double best = 0.0;
    const std::uint64_t total = std::uint64_t{1} << k;
    std::uint64_t gray = 0;
    for (std::uint64_t step = 1; step < total; ++step) {
        const int flip = std::countr_zero(step);
        gray ^= std::uint64_t{1} << flip;
        if (gray & (std::uint64_t{1} << flip)) {
            r += M.row(flip).transpose();
        } else {
            r -= M.row(flip).transpose();
        }
        const double pos = r.cwiseMax(0.0).sum();
        const double neg = -r.cwiseMin(0.0).sum();
        best = std::max(best, std::max(pos, neg));
    }
    return best;
}

double cut_norm_heuristic(const StepKernel &W, int restarts, std::uint64_t seed) {
    const int k = W.k();
    const Eigen::MatrixXd M = mass_matrix(W);
    std::mt19937_64 rng(seed);

    auto climb = [&](Eigen::VectorXd s, double sign) {
        double value = 0.0;
        for (int iter = 0; iter < 4 * k + 8; ++iter) {
            const Eigen::VectorXd r = sign * (M.transpose() * s);
            const Eigen::VectorXd t = (r.array() > 0.0).cast<double>().matrix();
            const Eigen::VectorXd c = sign * (M * t);
            Eigen::VectorXd next = (c.array() > 0.0).cast<double>().matrix();
            const double nv = sign * next.dot(M * t);
            if (nv <= value + 1e-15) {
                value = std::max(value, nv);
                break;
            }
            value = nv;
            s = std::move(next);
        }
        return value;
    };

    double best = 0.0;
    for (int start = 0; start <= std::max(restarts, 0); ++start) {
        Eigen::VectorXd s(k);
        if (start == 0) {
            s.setOnes();
        } else {
            for (int a = 0; a < k; ++a) {
                s(a) = static_cast<double>(rng() & 1u);
            }
        }
        best = std::max({best, climb(s, 1.0), climb(s, -1.0)});
    }
    return best;
}

double cut_norm_heuristic(const CouplingMatrix &Q, int restarts, std::uint64_t seed) {
    return cut_norm_heuristic(matrix_to_kernel(Q), restarts, seed);
}

std::pair<StepKernel, StepKernel> refine(const StepKernel &W1, const StepKernel &W2) {
    const CommonPartition cp = common_partition(W1.masses(), W2.masses());
    return {pull_back(W1, cp.masses, cp.owner1), pull_back(W2, cp.masses, cp.owner2)};
}

std::pair<StepKernel, FieldProfile> align(const StepKernel &W, const FieldProfile &f) {
    if (f.blocks() == W.k() && (f.masses - W.masses()).cwiseAbs().maxCoeff() <= 1e-12) {
        return {W, FieldProfile(W.masses(), f.values)};
    }
    const CommonPartition cp = common_partition(W.masses(), f.masses);
    Eigen::VectorXd values(cp.masses.size());
    for (Eigen::Index p = 0; p < values.size(); ++p) {
        values(p) = f.values(cp.owner2[p]);
    }
    return {pull_back(W, cp.masses, cp.owner1), FieldProfile(cp.masses, values)};
}

double cut_distance(const StepKernel &W1, const StepKernel &W2) {
    const auto [a, b] = refine(W1, W2);
    return cut_norm_exact(StepKernel(a.masses(), a.values() - b.values()));
}

double weak_cut_distance_small(const StepKernel &W1, const StepKernel &W2) {
    if (W1.k() != W2.k() || !W1.has_equal_masses() || !W2.has_equal_masses()) {
        throw UnsupportedError("weak_cut_distance_small: needs equal-mass kernels with the same block count");
    }
    if (W1.k() > 8) {
        throw UnsupportedError("weak_cut_distance_small: k > 8");
    }
    std::vector<int> perm(W1.k());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, cut_distance(permute_blocks(W1, perm), W2));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

StepKernel matrix_to_kernel(const CouplingMatrix &Q) { return StepKernel::equal_blocks(Q.entries()); }

StepKernel permute_blocks(const StepKernel &W, std::span<const int> perm) {
    const int k = W.k();
    if (static_cast<int>(perm.size()) != k) {
        throw DomainError("permute_blocks: permutation size mismatch");
    }
    Eigen::VectorXd masses(k);
    Eigen::MatrixXd values(k, k);
    for (int a = 0; a < k; ++a) {
        masses(a) = W.masses()(perm[a]);
        for (int b = 0; b < k; ++b) {
            values(a, b) = W(perm[a], perm[b]);
        }
    }
    return StepKernel(masses, values);
}

StepKernel subdivide(const StepKernel &W, int r) {
    if (r < 1) {
        throw DomainError("subdivide: factor must be positive");
    }
    const int k = W.k();
    Eigen::VectorXd masses(k * r);
    Eigen::MatrixXd values(k * r, k * r);
    for (int p = 0; p < k * r; ++p) {
        masses(p) = W.masses()(p / r) / r;
        for (int q = 0; q < k * r; ++q) {
            values(p, q) = W(p / r, q / r);
        }
    }
    masses /= masses.sum();
    return StepKernel(masses, values);
}

} // namespace multigibbs
