#include "multigibbs/gibbs_sampler.hpp"

#include "multigibbs/errors.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace multigibbs {

namespace detail {

// A set partition of some motif slots with its Moebius coefficient
// prod over parts of (-1)^{|P|-1} (|P|-1)!.
struct Partition {
    std::vector<int> part_of; // -1 for slots outside the partitioned set
    std::vector<int> sizes;
    double mobius = 1.0;
};

struct BlockPlan {
    std::vector<Partition> full;
    std::vector<std::vector<Partition>> anchored; // [a]: partitions of the slots other than a
};

} // namespace detail

namespace {

using detail::BlockPlan;
using detail::Partition;

double factorial(int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) {
        r *= i;
    }
    return r;
}

// All set partitions of `slots` via restricted growth strings.
std::vector<Partition> partitions_of(const std::vector<int> &slots, int v) {
    std::vector<Partition> out;
    const auto m = static_cast<int>(slots.size());
    std::vector<int> rgs(m, 0);
    std::function<void(int, int)> rec = [&](int pos, int parts) {
        if (pos == m) {
            Partition p;
            p.part_of.assign(v, -1);
            p.sizes.assign(parts, 0);
            for (int j = 0; j < m; ++j) {
                p.part_of[slots[j]] = rgs[j];
                ++p.sizes[rgs[j]];
            }
            for (int s : p.sizes) {
                p.mobius *= ((s - 1) % 2 == 0 ? 1.0 : -1.0) * factorial(s - 1);
            }
            out.push_back(std::move(p));
            return;
        }
        for (int c = 0; c <= parts; ++c) {
            rgs[pos] = c;
            rec(pos + 1, std::max(parts, c + 1));
        }
    };
    rec(0, 0);
    return out;
}

std::shared_ptr<const BlockPlan> make_plan(int v) {
    auto plan = std::make_shared<BlockPlan>();
    std::vector<int> all(v);
    std::iota(all.begin(), all.end(), 0);
    plan->full = partitions_of(all, v);
    for (int a = 0; a < v; ++a) {
        std::vector<int> rest;
        for (int s = 0; s < v; ++s) {
            if (s != a) {
                rest.push_back(s);
            }
        }
        plan->anchored.push_back(partitions_of(rest, v));
    }
    return plan;
}

bool next_tuple(std::vector<int> &t, int k) {
    for (auto i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
        if (++t[i] < k) {
            return true;
        }
        t[i] = 0;
    }
    return false;
}

double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Inclusion-exclusion: sum over distinct site tuples of prod X prod W, written
// through block power sums S(b, r) = sum_{i in b} X_i^r. The anchored slot (if any)
// carries a fixed block label and is excluded from the power sums by the caller.
double partition_sum(const std::vector<Partition> &parts, const StepKernel &W,
                     const std::vector<std::array<int, 2>> &edges, const Eigen::MatrixXd &S, int anchor,
                     int anchor_label) {
    const int k = W.k();
    double total = 0.0;
    std::vector<int> label(parts.empty() ? 0 : parts.front().part_of.size());
    for (const Partition &P : parts) {
        const auto p = static_cast<int>(P.sizes.size());
        std::vector<int> c(p, 0);
        do {
            double prod = P.mobius;
            for (int q = 0; q < p && prod != 0.0; ++q) {
                prod *= S(c[q], P.sizes[q]);
            }
            if (prod == 0.0) {
                continue;
            }
            for (std::size_t s = 0; s < label.size(); ++s) {
                label[s] = static_cast<int>(s) == anchor ? anchor_label : c[P.part_of[s]];
            }
            for (const auto &e : edges) {
                prod *= W(label[e[0]], label[e[1]]);
            }
            total += prod;
        } while (next_tuple(c, k));
    }
    return total;
}

Eigen::MatrixXd block_power_sums(const ModelSpec &spec, const Eigen::VectorXd &X) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(spec.kernel().k(), spec.v() + 1);
    for (int i = 0; i < spec.n(); ++i) {
        double p = 1.0;
        for (int r = 0; r <= spec.v(); ++r) {
            S(spec.block_of_site()[i], r) += p;
            p *= X(i);
        }
    }
    return S;
}

// m_i on a block spec given power sums that include site i.
double block_field(const ModelSpec &spec, const Eigen::MatrixXd &S, double xi, int bi) {
    Eigen::MatrixXd rest = S;
    double p = 1.0;
    for (int r = 0; r <= spec.v(); ++r) {
        rest(bi, r) -= p;
        p *= xi;
    }
    const auto &edges = spec.motif().edges();
    double total = 0.0;
    for (int a = 0; a < spec.v(); ++a) {
        total += partition_sum(spec.plan().anchored[a], spec.kernel(), edges, rest, a, bi);
    }
    return total / std::pow(static_cast<double>(spec.n()), spec.v() - 1);
}

void check_config(const ModelSpec &spec, const Eigen::VectorXd &X) {
    if (X.size() != spec.n()) {
        throw DomainError("configuration length differs from n");
    }
}

Eigen::VectorXd all_fields(const ModelSpec &spec, const Eigen::VectorXd &X) {
    Eigen::VectorXd m(spec.n());
    if (spec.is_block()) {
        const Eigen::MatrixXd S = block_power_sums(spec, X);
        for (int i = 0; i < spec.n(); ++i) {
            m(i) = block_field(spec, S, X(i), spec.block_of_site()[i]);
        }
    } else if (spec.v() == 2) {
        m = (2.0 / spec.n()) * (spec.dense().entries() * X);
    } else {
        for (int i = 0; i < spec.n(); ++i) {
            m(i) = local_field_naive(spec, X, i);
        }
    }
    return m;
}

} // namespace

// ------------------------------------------------------------------- ModelSpec

ModelSpec::ModelSpec(MotifGraph H, CouplingMatrix Q, BaseMeasure mu, double theta, double B)
    : H_(std::move(H)), mu_(std::move(mu)), mu_B_(tilted_measure(mu_, B)), theta_(theta), B_(B), n_(Q.n()),
      dense_(std::move(Q)), plan_(make_plan(H_.v())) {
    if (n_ < 1) {
        throw DomainError("ModelSpec: n must be positive");
    }
}

ModelSpec::ModelSpec(MotifGraph H, StepKernel W, int n, BaseMeasure mu, double theta, double B)
    : H_(std::move(H)), mu_(std::move(mu)), mu_B_(tilted_measure(mu_, B)), theta_(theta), B_(B), n_(n),
      kernel_(std::move(W)), plan_(make_plan(H_.v())) {
    if (n_ < 1) {
        throw DomainError("ModelSpec: n must be positive");
    }
    block_of_.assign(n_, 0);
    double cum = 0.0;
    int start = 0;
    for (int b = 0; b < kernel_->k(); ++b) {
        cum += kernel_->masses()(b);
        const int stop = b + 1 == kernel_->k() ? n_ : static_cast<int>(std::lround(n_ * cum));
        for (int i = start; i < std::min(stop, n_); ++i) {
            block_of_[i] = b;
        }
        start = std::max(start, stop);
    }
}

double ModelSpec::Q(int i, int j) const {
    if (i == j) {
        return 0.0;
    }
    if (dense_) {
        return (*dense_)(i, j);
    }
    return (*kernel_)(block_of_[i], block_of_[j]);
}

CouplingMatrix ModelSpec::coupling_matrix() const {
    if (dense_) {
        return *dense_;
    }
    Eigen::MatrixXd q(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            q(i, j) = Q(i, j);
        }
    }
    return CouplingMatrix(q);
}

ModelSpec ModelSpec::permuted(const std::vector<int> &pi) const {
    std::vector<int> check = pi;
    std::sort(check.begin(), check.end());
    for (int i = 0; i < n_; ++i) {
        if (static_cast<int>(check.size()) != n_ || check[i] != i) {
            throw DomainError("permuted: pi is not a permutation of 0..n-1");
        }
    }
    Eigen::MatrixXd q(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            q(i, j) = Q(pi[i], pi[j]);
        }
    }
    return ModelSpec(H_, CouplingMatrix(q), mu_, theta_, B_);
}

// ------------------------------------------------------------ energies, fields

double hamiltonian_naive(const ModelSpec &spec, const Eigen::VectorXd &X) {
    check_config(spec, X);
    const int n = spec.n();
    const int v = spec.v();
    if (std::pow(static_cast<double>(n), v) > kNaiveBudget) {
        throw SizeError("hamiltonian_naive: n^v exceeds the tuple budget");
    }
    const auto &edges = spec.motif().edges();
    std::vector<int> t(v);
    std::vector<char> used(n, 0);
    double total = 0.0;
    std::function<void(int, double)> rec = [&](int depth, double px) {
        if (depth == v) {
            double prod = px;
            for (const auto &e : edges) {
                prod *= spec.Q(t[e[0]], t[e[1]]);
            }
            total += prod;
            return;
        }
        for (int j = 0; j < n; ++j) {
            if (used[j] || X(j) == 0.0) {
                continue;
            }
            used[j] = 1;
            t[depth] = j;
            rec(depth + 1, px * X(j));
            used[j] = 0;
        }
    };
    rec(0, 1.0);
    return total / std::pow(static_cast<double>(n), v);
}

double hamiltonian(const ModelSpec &spec, const Eigen::VectorXd &X) {
    check_config(spec, X);
    const double scale = std::pow(static_cast<double>(spec.n()), spec.v());
    if (spec.is_block()) {
        const Eigen::MatrixXd S = block_power_sums(spec, X);
        return partition_sum(spec.plan().full, spec.kernel(), spec.motif().edges(), S, -1, 0) / scale;
    }
    if (spec.v() == 2) {
        return X.dot(spec.dense().entries() * X) / scale;
    }
    return hamiltonian_naive(spec, X);
}

double local_field_naive(const ModelSpec &spec, const Eigen::VectorXd &X, int i) {
    check_config(spec, X);
    const int n = spec.n();
    const int v = spec.v();
    if (i < 0 || i >= n) {
        throw DomainError("local_field: site out of range");
    }
    if (std::pow(static_cast<double>(n), v - 1) > kNaiveBudget) {
        throw SizeError("local_field: n^{v-1} exceeds the tuple budget");
    }
    const auto &edges = spec.motif().edges();
    std::vector<int> t(v);
    std::vector<char> used(n, 0);
    used[i] = 1;
    double total = 0.0;
    for (int a = 0; a < v; ++a) {
        t[a] = i;
        std::function<void(int, double)> rec = [&](int slot, double px) {
            if (slot == v) {
                double prod = px;
                for (const auto &e : edges) {
                    prod *= spec.Q(t[e[0]], t[e[1]]);
                }
                total += prod;
                return;
            }
            if (slot == a) {
                rec(slot + 1, px);
                return;
            }
            for (int j = 0; j < n; ++j) {
                if (used[j] || X(j) == 0.0) {
                    continue;
                }
                used[j] = 1;
                t[slot] = j;
                rec(slot + 1, px * X(j));
                used[j] = 0;
            }
        };
        rec(0, 1.0);
    }
    return total / std::pow(static_cast<double>(n), v - 1);
}

double local_field(const ModelSpec &spec, const Eigen::VectorXd &X, int i) {
    check_config(spec, X);
    if (i < 0 || i >= spec.n()) {
        throw DomainError("local_field: site out of range");
    }
    if (spec.is_block()) {
        return block_field(spec, block_power_sums(spec, X), X(i), spec.block_of_site()[i]);
    }
    if (spec.v() == 2) {
        return 2.0 / spec.n() * spec.dense().entries().row(i).dot(X);
    }
    return local_field_naive(spec, X, i);
}

Eigen::VectorXd local_fields(const ModelSpec &spec, const Eigen::VectorXd &X) {
    check_config(spec, X);
    return all_fields(spec, X);
}

double hamiltonian_stat(const ModelSpec &spec, const Eigen::VectorXd &X) {
    check_config(spec, X);
    return X.dot(all_fields(spec, X)) / spec.n();
}

double contrast(const Eigen::VectorXd &c, const Eigen::VectorXd &X) {
    if (c.size() != X.size()) {
        throw DomainError("contrast: weights and configuration differ in length");
    }
    return c.dot(X) / static_cast<double>(X.size());
}

Eigen::VectorXd alternating_weights(int n) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) {
        c(i) = (i + 1) % 2 == 0 ? 1.0 : -1.0;
    }
    return c;
}

std::array<double, 3> moment_diagnostics(const ModelSpec &spec, const Eigen::VectorXd &X, double p, double q) {
    check_config(spec, X);
    const Eigen::VectorXd m = all_fields(spec, X);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int i = 0; i < spec.n(); ++i) {
        out[0] += std::pow(std::abs(X(i)), p);
        out[1] += std::pow(std::abs(m(i)), q);
        out[2] += std::pow(std::abs(tilt_mean(spec.base(), spec.theta() * m(i) + spec.B())), p);
    }
    for (double &d : out) {
        d /= spec.n();
    }
    return out;
}

Eigen::VectorXd conditional_probs(const BaseMeasure &mu, double field) {
    const Eigen::ArrayXd e = field * mu.points().array() + mu.log_weights().array();
    const Eigen::ArrayXd u = (e - e.maxCoeff()).exp();
    return (u / u.sum()).matrix();
}

int draw_atom(const Eigen::VectorXd &probs, double u) {
    double cum = 0.0;
    int last = 0;
    for (Eigen::Index j = 0; j < probs.size(); ++j) {
        if (probs(j) > 0.0) {
            last = static_cast<int>(j);
        }
        cum += probs(j);
        if (u < cum) {
            return static_cast<int>(j);
        }
    }
    return last;
}

// --------------------------------------------------------------- SamplerState

SamplerState::SamplerState(const ModelSpec &spec, std::uint64_t seed) : spec_(&spec), rng_(seed) {
    const BaseMeasure &mu = spec.tilted_base();
    const Eigen::VectorXd probs = mu.weights();
    X_.resize(spec.n());
    atom_.resize(spec.n());
    for (int i = 0; i < spec.n(); ++i) {
        atom_[i] = draw_atom(probs, uniform());
        X_(i) = mu.points()(atom_[i]);
    }
    rebuild();
}

SamplerState::SamplerState(const ModelSpec &spec, std::uint64_t seed, Eigen::VectorXd X0)
    : spec_(&spec), rng_(seed), X_(std::move(X0)) {
    check_config(spec, X_);
    const Eigen::VectorXd &pts = spec.tilted_base().points();
    atom_.resize(spec.n());
    for (int i = 0; i < spec.n(); ++i) {
        const auto *it = std::find(pts.data(), pts.data() + pts.size(), X_(i));
        if (it == pts.data() + pts.size()) {
            throw DomainError("SamplerState: configuration entry is not an atom");
        }
        atom_[i] = static_cast<int>(it - pts.data());
    }
    rebuild();
}

double SamplerState::uniform() { return uniform01(rng_); }

void SamplerState::rebuild() {
    if (spec_->is_block()) {
        power_sums_ = block_power_sums(*spec_, X_);
    } else if (spec_->v() == 2) {
        QX_ = spec_->dense().entries() * X_;
    }
}

double SamplerState::field(int i) const {
    if (spec_->is_block()) {
        return block_field(*spec_, power_sums_, X_(i), spec_->block_of_site()[i]);
    }
    if (spec_->v() == 2) {
        return 2.0 / spec_->n() * QX_(i);
    }
    return local_field_naive(*spec_, X_, i);
}

void SamplerState::set_site(int i, int atom) {
    const double old = X_(i);
    const double now = spec_->tilted_base().points()(atom);
    atom_[i] = atom;
    if (old == now) {
        return;
    }
    X_(i) = now;
    if (spec_->is_block()) {
        const int b = spec_->block_of_site()[i];
        double po = 1.0;
        double pn = 1.0;
        for (int r = 0; r <= spec_->v(); ++r) {
            power_sums_(b, r) += pn - po;
            po *= old;
            pn *= now;
        }
    } else if (spec_->v() == 2) {
        QX_ += spec_->dense().entries().col(i) * (now - old);
    }
}

void SamplerState::update_site(int i) {
    const Eigen::VectorXd probs = conditional_probs(spec_->tilted_base(), spec_->theta() * field(i));
    set_site(i, draw_atom(probs, uniform()));
}

void SamplerState::audit() {
    double gap = 0.0;
    if (spec_->is_block()) {
        gap = (block_power_sums(*spec_, X_) - power_sums_).cwiseAbs().maxCoeff();
    } else if (spec_->v() == 2) {
        gap = (spec_->dense().entries() * X_ - QX_).cwiseAbs().maxCoeff();
    }
    if (gap > 1e-9) {
        throw DiagnosticError("SamplerState: cached sums drifted by " + std::to_string(gap));
    }
    rebuild();
}

void glauber_sweep(SamplerState &state, ScanOrder scan) {
    const int n = state.spec().n();
    for (int s = 0; s < n; ++s) {
        const int i = scan == ScanOrder::sequential ? s : std::min(n - 1, static_cast<int>(state.uniform() * n));
        state.update_site(i);
    }
    state.finish_sweep();
}

void SamplerState::finish_sweep() {
    if (++sweeps_ % 100 == 0) {
        audit();
    }
}

// --------------------------------------------------------------------- chains

Trace sample_chain(const ModelSpec &spec, const ChainOptions &opt) {
    if (!(opt.burn_in >= 0 && opt.burn_in < opt.sweeps) || opt.thin < 1) {
        throw DomainError("sample_chain: need 0 <= burn_in < sweeps and thin >= 1");
    }
    if (opt.batches < 2) {
        throw DomainError("sample_chain: need at least 2 batches");
    }
    Trace trace;
    bool need_fields = false;
    for (const auto &s : opt.stats) {
        if (s == "moments") {
            trace.columns.insert(trace.columns.end(), {"moment_x", "moment_m", "moment_alpha"});
            need_fields = true;
        } else if (s == "mag" || s == "absmag" || s == "energy" || s == "contrast:alt" || s == "contrast:half") {
            trace.columns.push_back(s);
        } else if (s == "ham") {
            trace.columns.push_back(s);
            need_fields = true;
        } else {
            throw DomainError("sample_chain: unknown statistic '" + s + "'");
        }
    }
    const int n = spec.n();
    const Eigen::VectorXd alt = alternating_weights(n);
    Eigen::VectorXd half(n);
    for (int i = 0; i < n; ++i) {
        half(i) = i < n / 2 ? 1.0 : -1.0;
    }

    SamplerState state(spec, opt.seed);
    for (long s = 1; s <= opt.sweeps; ++s) {
        glauber_sweep(state, opt.scan);
        if (s <= opt.burn_in || (s - opt.burn_in) % opt.thin != 0) {
            continue;
        }
        const Eigen::VectorXd &X = state.config();
        Eigen::VectorXd m;
        if (need_fields) {
            m = all_fields(spec, X);
        }
        std::vector<double> row;
        for (const auto &name : opt.stats) {
            if (name == "mag") {
                row.push_back(X.mean());
            } else if (name == "absmag") {
                row.push_back(std::abs(X.mean()));
            } else if (name == "ham") {
                row.push_back(X.dot(m) / n);
            } else if (name == "energy") {
                row.push_back(hamiltonian(spec, X));
            } else if (name == "contrast:alt") {
                row.push_back(contrast(alt, X));
            } else if (name == "contrast:half") {
                row.push_back(contrast(half, X));
            } else if (name == "moments") {
                double a = 0.0;
                double b = 0.0;
                double c = 0.0;
                for (int i = 0; i < n; ++i) {
                    a += std::pow(std::abs(X(i)), opt.moment_p);
                    b += std::pow(std::abs(m(i)), opt.moment_q);
                    c += std::pow(std::abs(tilt_mean(spec.base(), spec.theta() * m(i) + spec.B())), opt.moment_p);
                }
                row.insert(row.end(), {a / n, b / n, c / n});
            }
        }
        trace.sweep.push_back(s);
        trace.rows.push_back(std::move(row));
        if (opt.keep_snapshots) {
            trace.snapshots.push_back(X);
        }
    }

    const auto rows = static_cast<long>(trace.rows.size());
    for (std::size_t c = 0; c < trace.columns.size(); ++c) {
        StatSummary st;
        st.name = trace.columns[c];
        st.samples = rows;
        double sum = 0.0;
        for (const auto &r : trace.rows) {
            sum += r[c];
        }
        st.mean = rows > 0 ? sum / rows : std::numeric_limits<double>::quiet_NaN();
        st.batch_se = std::numeric_limits<double>::quiet_NaN();
        const long size = rows / opt.batches;
        if (size >= 1) {
            std::vector<double> means(opt.batches, 0.0);
            for (int b = 0; b < opt.batches; ++b) {
                for (long j = 0; j < size; ++j) {
                    means[b] += trace.rows[b * size + j][c];
                }
                means[b] /= size;
            }
            const double mbar = std::accumulate(means.begin(), means.end(), 0.0) / opt.batches;
            double ss = 0.0;
            for (double x : means) {
                ss += (x - mbar) * (x - mbar);
            }
            st.batch_se = std::sqrt(ss / (opt.batches - 1) / opt.batches);
        }
        trace.summary.push_back(st);
    }
    return trace;
}

// ----------------------------------------------------------- exact enumeration

namespace {

std::size_t config_count(const ModelSpec &spec, double budget, const char *who) {
    const double count = std::pow(static_cast<double>(spec.tilted_base().size()), spec.n());
    if (count > budget) {
        throw SizeError(std::string(who) + ": support^n exceeds the enumeration budget");
    }
    return static_cast<std::size_t>(count);
}

void decode(std::size_t idx, const BaseMeasure &mu, Eigen::VectorXd &X, std::vector<int> &atoms) {
    const auto s = mu.size();
    for (Eigen::Index i = X.size() - 1; i >= 0; --i) {
        atoms[i] = static_cast<int>(idx % s);
        X(i) = mu.points()(atoms[i]);
        idx /= s;
    }
}

// Gibbs log-weight n theta U + sum log mu_B(x_i).
double log_gibbs_weight(const ModelSpec &spec, const std::vector<int> &atoms, double U) {
    double lw = spec.n() * spec.theta() * U;
    for (int a : atoms) {
        lw += spec.tilted_base().log_weights()(a);
    }
    return lw;
}

} // namespace

ExactLaw exact_small_n(const ModelSpec &spec) {
    const std::size_t total = config_count(spec, 1e7, "exact_small_n");
    const bool keep_law = total <= 1000000;
    const int n = spec.n();
    const Eigen::VectorXd alt = alternating_weights(n);
    Eigen::VectorXd X(n);
    std::vector<int> atoms(n);

    // Streaming log-sum-exp with running shift.
    double shift = -std::numeric_limits<double>::infinity();
    double z = 0.0;
    std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
    std::vector<std::pair<double, double>> law;
    std::vector<double> lws;
    for (std::size_t idx = 0; idx < total; ++idx) {
        decode(idx, spec.tilted_base(), X, atoms);
        const double U = hamiltonian(spec, X);
        const double lw = log_gibbs_weight(spec, atoms, U);
        if (lw > shift) {
            const double r = std::exp(shift - lw);
            z *= r;
            for (double &a : acc) {
                a *= r;
            }
            shift = lw;
        }
        const double w = std::exp(lw - shift);
        z += w;
        acc[0] += w * X.mean();
        acc[1] += w * std::abs(X.mean());
        acc[2] += w * hamiltonian_stat(spec, X);
        acc[3] += w * contrast(alt, X);
        if (keep_law) {
            law.emplace_back(U, lw);
        }
    }

    ExactLaw out;
    out.Z = log_mgf(spec.base(), spec.B()) + (shift + std::log(z)) / n;
    out.mean_mag = acc[0] / z;
    out.mean_absmag = acc[1] / z;
    out.mean_ham_stat = acc[2] / z;
    out.mean_contrast_alt = acc[3] / z;

    if (keep_law) {
        const double log_total = shift + std::log(z);
        std::sort(law.begin(), law.end());
        for (const auto &[U, lw] : law) {
            const double p = std::exp(lw - log_total);
            if (!out.law_U.empty() && std::abs(U - out.law_U.back().first) <= 1e-9 * std::max(1.0, std::abs(U))) {
                out.law_U.back().second += p;
            } else {
                out.law_U.emplace_back(U, p);
            }
        }
    }
    return out;
}

double exact_glauber_stationarity(const ModelSpec &spec) {
    const std::size_t N = config_count(spec, 4096, "exact_glauber_stationarity");
    const int n = spec.n();
    const BaseMeasure &mu = spec.tilted_base();
    const auto s = static_cast<std::size_t>(mu.size());
    Eigen::VectorXd X(n);
    std::vector<int> atoms(n);

    // Rows of A = P^T - I, except the last row which pins sum(pi) = 1.
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd gibbs(N);
    std::vector<std::size_t> stride(n);
    for (int i = n - 1, st = 1; i >= 0; --i, st *= static_cast<int>(s)) {
        stride[i] = static_cast<std::size_t>(st);
    }
    const auto last = static_cast<Eigen::Index>(N - 1);
    for (std::size_t idx = 0; idx < N; ++idx) {
        decode(idx, mu, X, atoms);
        gibbs(idx) = log_gibbs_weight(spec, atoms, hamiltonian(spec, X));
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd p = conditional_probs(mu, spec.theta() * local_field(spec, X, i));
            const std::size_t base = idx - atoms[i] * stride[i];
            for (std::size_t j = 0; j < s; ++j) {
                const auto to = static_cast<Eigen::Index>(base + j * stride[i]);
                if (to != last) {
                    trip.emplace_back(to, static_cast<Eigen::Index>(idx), p(j) / n);
                }
            }
        }
        if (static_cast<Eigen::Index>(idx) != last) {
            trip.emplace_back(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx), -1.0);
        }
        trip.emplace_back(last, static_cast<Eigen::Index>(idx), 1.0);
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw DiagnosticError("exact_glauber_stationarity: transition system is singular");
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    rhs(last) = 1.0;
    const Eigen::VectorXd pi = lu.solve(rhs);

    gibbs = (gibbs.array() - gibbs.maxCoeff()).exp().matrix();
    gibbs /= gibbs.sum();
    return 0.5 * (pi - gibbs).cwiseAbs().sum();
}

PermutationReport permutation_invariance_check(const ModelSpec &spec, const std::vector<int> &pi) {
    config_count(spec, 1e6, "permutation_invariance_check");
    const ExactLaw a = exact_small_n(spec);
    const ExactLaw b = exact_small_n(spec.permuted(pi));
    PermutationReport rep;
    rep.z_gap = std::abs(a.Z - b.Z);
    if (a.law_U.size() != b.law_U.size()) {
        rep.law_gap = std::numeric_limits<double>::infinity();
    } else {
        for (std::size_t j = 0; j < a.law_U.size(); ++j) {
            if (std::abs(a.law_U[j].first - b.law_U[j].first) > 1e-9) {
                rep.law_gap = std::numeric_limits<double>::infinity();
                break;
            }
            rep.law_gap = std::max(rep.law_gap, std::abs(a.law_U[j].second - b.law_U[j].second));
        }
    }
    rep.invariant = rep.z_gap <= 1e-12 && rep.law_gap <= 1e-12;
    return rep;
}

} // namespace multigibbs
