#include "oracles.hpp"

#include "multigibbs/errors.hpp"
#include "multigibbs/gibbs_sampler.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace multigibbs;

namespace {

const BaseMeasure coin = BaseMeasure::ising_pm1();

std::vector<std::pair<int, int>> edges0(const MotifGraph &H) {
    std::vector<std::pair<int, int>> out;
    for (const auto &e : H.edges()) {
        out.emplace_back(e[0], e[1]);
    }
    return out;
}

CouplingMatrix random_coupling(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            Q(i, j) = Q(j, i) = u(rng);
        }
    }
    return CouplingMatrix(Q);
}

Eigen::VectorXd random_spins(int n, std::uint64_t seed, const std::vector<double> &atoms = {-1.0, 1.0}) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(atoms.size()) - 1);
    Eigen::VectorXd X(n);
    for (int i = 0; i < n; ++i) {
        X(i) = atoms[pick(rng)];
    }
    return X;
}

} // namespace

TEST(Hamiltonian, Examples) {
    const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(6), coin, 1.0, 0.0);
    EXPECT_EQ(hamiltonian(spec, Eigen::VectorXd::Zero(6)), 0.0);
    const Eigen::VectorXd X = random_spins(6, 1, {-1.0, 0.5, 2.0});
    const double s = X.sum();
    EXPECT_NEAR(hamiltonian(spec, X), (s * s - X.squaredNorm()) / 36.0, 1e-15);
    EXPECT_NEAR(hamiltonian_naive(spec, X), (s * s - X.squaredNorm()) / 36.0, 1e-15);
}

TEST(Hamiltonian, DistinctTupleCount) {
    for (int v : {2, 3, 4}) {
        const ModelSpec spec(MotifGraph::complete(v), CouplingMatrix::complete(v), coin, 1.0, 0.0);
        double expect = 1.0;
        for (int i = 1; i <= v; ++i) {
            expect *= static_cast<double>(i) / v;
        }
        EXPECT_NEAR(hamiltonian(spec, Eigen::VectorXd::Ones(v)), expect, 1e-15);
    }
}

TEST(Hamiltonian, DenseAndBlockMatchBruteForce) {
    for (const auto &H : {MotifGraph::K2(), MotifGraph::K1_2(), MotifGraph::K3()}) {
        const ModelSpec dense(H, random_coupling(7, 3), coin, 1.0, 0.0);
        const Eigen::VectorXd X = random_spins(7, 4, {-1.0, 0.3, 1.0});
        EXPECT_NEAR(hamiltonian(dense, X), oracle::hamiltonian(H.v(), edges0(H), dense.coupling_matrix().entries(), X),
                    1e-14);
        Eigen::MatrixXd V(3, 3);
        V << 0.5, -1.0, 0.2, -1.0, 0.0, 0.8, 0.2, 0.8, 1.0;
        const ModelSpec block(H, StepKernel(Eigen::Vector3d(0.25, 0.35, 0.4), V), 9, coin, 1.0, 0.0);
        const Eigen::VectorXd Y = random_spins(9, 5, {-1.0, 0.3, 1.0});
        EXPECT_NEAR(hamiltonian(block, Y), oracle::hamiltonian(H.v(), edges0(H), block.coupling_matrix().entries(), Y),
                    1e-14);
    }
}

TEST(Hamiltonian, StatEqualsVTimesUExhaustively) {
    for (const auto &H : {MotifGraph::K2(), MotifGraph::K3()}) {
        const ModelSpec spec(H, random_coupling(8, 11), coin, 1.0, 0.0);
        for (const auto &X : oracle::configurations({-1.0, 1.0}, 8)) {
            EXPECT_NEAR(hamiltonian_stat(spec, X), H.v() * hamiltonian(spec, X), 1e-12);
        }
    }
}

TEST(BlockModel, SitesAreContiguousAndProportional) {
    const ModelSpec spec(MotifGraph::K3(), StepKernel::tripartite(), 900, coin, 9.0, 0.0);
    const auto &blocks = spec.block_of_site();
    EXPECT_EQ(std::count(blocks.begin(), blocks.end(), 0), 300);
    EXPECT_EQ(std::count(blocks.begin(), blocks.end(), 2), 300);
    EXPECT_TRUE(std::is_sorted(blocks.begin(), blocks.end()));
    EXPECT_EQ(spec.Q(0, 299), 0.0);
    EXPECT_EQ(spec.Q(0, 300), 1.0);
}

TEST(LocalField, PairFormula) {
    const CouplingMatrix Q = random_coupling(10, 21);
    const ModelSpec spec(MotifGraph::K2(), Q, coin, 1.0, 0.0);
    const Eigen::VectorXd X = random_spins(10, 22);
    const Eigen::VectorXd all = local_fields(spec, X);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(local_field(spec, X, i), 2.0 / 10 * Q.entries().row(i).dot(X), 1e-14);
        EXPECT_NEAR(all(i), local_field(spec, X, i), 1e-14);
    }
    EXPECT_EQ(local_fields(spec, Eigen::VectorXd::Zero(10)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LocalField, BlockInclusionExclusionMatchesNaive) {
    Eigen::MatrixXd V(3, 3);
    V << 0.3, 1.0, -0.5, 1.0, 0.0, 0.7, -0.5, 0.7, 0.9;
    const StepKernel W(Eigen::Vector3d(0.2, 0.5, 0.3), V);
    for (const auto &H : {MotifGraph::K3(), MotifGraph::K1_2(), MotifGraph(4, {{1, 2}, {2, 3}, {3, 4}})}) {
        const int n = H.v() == 4 ? 14 : 30;
        const ModelSpec spec(H, W, n, coin, 1.0, 0.0);
        const Eigen::VectorXd X = random_spins(n, 31, {-1.0, 0.2, 1.0});
        for (int i : {0, n / 2, n - 1}) {
            EXPECT_NEAR(local_field(spec, X, i), local_field_naive(spec, X, i), 1e-10);
        }
        EXPECT_NEAR(hamiltonian(spec, X), hamiltonian_naive(spec, X), 1e-12);
    }
}

TEST(LocalField, IsTheDerivativeOfNU) {
    const ModelSpec spec(MotifGraph::K3(), random_coupling(7, 41), coin, 1.0, 0.0);
    const Eigen::VectorXd X = random_spins(7, 42, {-0.5, 0.25, 1.0});
    for (int i = 0; i < 7; ++i) {
        Eigen::VectorXd Xp = X, Xm = X;
        Xp(i) += 1e-5;
        Xm(i) -= 1e-5;
        const double fd = 7.0 * (hamiltonian(spec, Xp) - hamiltonian(spec, Xm)) / 2e-5;
        EXPECT_NEAR(local_field(spec, X, i), fd, 1e-8);
    }
}

TEST(LocalField, DenseSizeError) {
    const ModelSpec spec(MotifGraph::complete(4), CouplingMatrix::complete(300), coin, 1.0, 0.0);
    EXPECT_THROW(local_field(spec, Eigen::VectorXd::Ones(300), 0), SizeError);
}

TEST(Conditional, ClosedFormTanh) {
    for (double m : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
        const Eigen::VectorXd p = conditional_probs(coin, m);
        EXPECT_NEAR(p(1), 0.5 * (1 + std::tanh(m)), 1e-15);
        EXPECT_NEAR(p.sum(), 1.0, 1e-15);
    }
    const Eigen::Vector3d p(0.2, 0.5, 0.3);
    EXPECT_EQ(draw_atom(p, 0.0), 0);
    EXPECT_EQ(draw_atom(p, 0.19999), 0);
    EXPECT_EQ(draw_atom(p, 0.2), 1);
    EXPECT_EQ(draw_atom(p, 0.69999), 1);
    EXPECT_EQ(draw_atom(p, 0.7), 2);
    EXPECT_EQ(draw_atom(p, 0.99999999), 2);
}

TEST(Conditional, SiteUpdateFrequencies) {
    // Holding the rest fixed, repeated updates of one site follow the tilted law.
    const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(5), coin, 0.8, 0.3);
    const Eigen::VectorXd X0 = (Eigen::VectorXd(5) << 1, -1, 1, 1, -1).finished();
    SamplerState state(spec, 7, X0);
    const double m = state.field(0);
    EXPECT_NEAR(m, 2.0 / 5.0 * (X0.sum() - X0(0)), 1e-15);
    const double p_up = 0.5 * (1 + std::tanh(0.8 * m + 0.3));
    const int reps = 200000;
    int ups = 0;
    for (int r = 0; r < reps; ++r) {
        state.update_site(0);
        ups += state.config()(0) > 0;
    }
    const double se = std::sqrt(p_up * (1 - p_up) / reps);
    EXPECT_NEAR(static_cast<double>(ups) / reps, p_up, 4 * se);
}

TEST(Glauber, StationarityMatchesLinearSolveOracle) {
    for (double theta : {0.0, 0.5, 1.0}) {
        const auto [pi, gibbs] = oracle::coin_glauber_laws(CouplingMatrix::complete(3).entries(), theta);
        EXPECT_LE(oracle::tv(pi, gibbs), 1e-12);
        const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(3), coin, theta, 0.0);
        EXPECT_LE(exact_glauber_stationarity(spec), theta == 0.0 ? 1e-12 : 1e-10);
    }
    const ModelSpec block(MotifGraph::K3(), StepKernel::tripartite(), 6, BaseMeasure::three_point(0.5), 1.5, 0.2);
    EXPECT_LE(exact_glauber_stationarity(block), 1e-8);
    const ModelSpec big(MotifGraph::K2(), CouplingMatrix::complete(13), coin, 1.0, 0.0);
    EXPECT_THROW(exact_glauber_stationarity(big), SizeError);
}

TEST(Glauber, AuditAndDeterminism) {
    const ModelSpec spec(MotifGraph::K3(), StepKernel::tripartite(), 60, BaseMeasure::three_point(0.6), 3.0, 0.1);
    SamplerState a(spec, 99), b(spec, 99);
    for (int s = 0; s < 250; ++s) {
        glauber_sweep(a, ScanOrder::random);
        glauber_sweep(b, ScanOrder::random);
    }
    EXPECT_NO_THROW(a.audit());
    EXPECT_EQ(a.sweeps(), 250);
    EXPECT_TRUE(a.config() == b.config());
    for (int i = 0; i < 60; ++i) {
        EXPECT_NEAR(a.field(i), local_field(spec, a.config(), i), 1e-9);
    }
}

TEST(SampleChain, RowCountAndReplay) {
    const ModelSpec spec(MotifGraph::K2(), StepKernel::constant(1.0), 50, coin, 0.7, 0.0);
    ChainOptions opt;
    opt.sweeps = 203;
    opt.burn_in = 20;
    opt.thin = 4;
    opt.seed = 5;
    opt.stats = {"mag", "ham", "contrast:alt", "moments"};
    const Trace a = sample_chain(spec, opt);
    const Trace b = sample_chain(spec, opt);
    EXPECT_EQ(a.rows.size(), static_cast<std::size_t>((203 - 20) / 4));
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(a.columns.size(), 6u);
    opt.seed = 6;
    EXPECT_NE(sample_chain(spec, opt).rows, a.rows);
    opt.stats = {"bogus"};
    EXPECT_THROW(sample_chain(spec, opt), DomainError);
}

TEST(SampleChain, IndependentSitesAtZeroTheta) {
    const double B = 0.4;
    const ModelSpec spec(MotifGraph::K2(), StepKernel::constant(1.0), 400, coin, 0.0, B);
    ChainOptions opt;
    opt.sweeps = 800;
    opt.burn_in = 0;
    opt.seed = 3;
    opt.stats = {"mag", "moments"};
    const Trace t = sample_chain(spec, opt);
    EXPECT_NEAR(t.summary[0].mean, std::tanh(B), 3 * t.summary[0].batch_se + 1e-3);
    // second moment of +-1 spins and |alpha'(B)|^2 at theta = 0
    EXPECT_NEAR(t.summary[1].mean, 1.0, 1e-15);
    EXPECT_NEAR(t.summary[3].mean, std::pow(std::tanh(B), 2), 1e-14);
}

TEST(Statistics, ContrastAndMoments) {
    const Eigen::VectorXd X = random_spins(9, 61, {-1.0, 0.5, 1.0});
    EXPECT_EQ(contrast(Eigen::VectorXd::Zero(9), X), 0.0);
    EXPECT_NEAR(contrast(Eigen::VectorXd::Ones(9), X), X.mean(), 1e-15);
    const Eigen::VectorXd alt = alternating_weights(4);
    EXPECT_EQ(alt, (Eigen::VectorXd(4) << -1, 1, -1, 1).finished());

    const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(6), coin, 1.0, 0.0);
    const Eigen::VectorXd Y = random_spins(6, 62);
    const auto d = moment_diagnostics(spec, Y, 3.0, 2.0);
    EXPECT_NEAR(d[0], 1.0, 1e-15);
    const Eigen::VectorXd m = local_fields(spec, Y);
    EXPECT_NEAR(d[1], m.squaredNorm() / 6.0, 1e-14);
    EXPECT_NEAR(hamiltonian_stat(spec, Y), 2.0 * hamiltonian(spec, Y), 1e-14);
}

TEST(ExactSmallN, MatchesDirectEnumeration) {
    for (const auto &H : {MotifGraph::K2(), MotifGraph::K3()}) {
        const CouplingMatrix Q = random_coupling(6, 71);
        const BaseMeasure tp = BaseMeasure::three_point(0.4);
        const ModelSpec spec(H, Q, tp, 1.3, 0.25);
        EXPECT_NEAR(exact_small_n(spec).Z,
                    oracle::finite_free_energy({-1.0, 0.0, 1.0}, {0.2, 0.6, 0.2}, H.v(), edges0(H), Q.entries(), 1.3,
                                               0.25),
                    1e-12);
    }
}

TEST(ExactSmallN, TrivialCases) {
    const double B = -0.3;
    const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(8), coin, 0.0, B);
    const ExactLaw law = exact_small_n(spec);
    EXPECT_NEAR(law.Z, std::log(std::cosh(B)), 1e-14);
    EXPECT_NEAR(law.mean_mag, std::tanh(B), 1e-13);
    const ModelSpec one(MotifGraph::K2(), CouplingMatrix(Eigen::MatrixXd::Zero(1, 1)), coin, 2.0, 0.0);
    EXPECT_NEAR(exact_small_n(one).Z, 0.0, 1e-15);
    const ModelSpec two(MotifGraph::K3(), StepKernel::constant(1.0), 2, coin, 2.0, 0.0);
    EXPECT_EQ(hamiltonian(two, Eigen::Vector2d(1.0, 1.0)), 0.0);
    EXPECT_EQ(local_field(two, Eigen::Vector2d(1.0, -1.0), 0), 0.0);
    EXPECT_NEAR(exact_small_n(two).Z, 0.0, 1e-15);
    double total = 0.0;
    for (const auto &[u, p] : law.law_U) {
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PermutationInvariance, Examples) {
    std::mt19937_64 rng(81);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(8, 8);
    std::bernoulli_distribution edge(0.5);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < i; ++j) {
            A(i, j) = A(j, i) = edge(rng) ? 1.0 : 0.0;
        }
    }
    const ModelSpec spec(MotifGraph::K3(), CouplingMatrix(A), coin, 2.0, 0.1);
    std::vector<int> id(8);
    std::iota(id.begin(), id.end(), 0);
    const auto same = permutation_invariance_check(spec, id);
    EXPECT_EQ(same.z_gap, 0.0);
    EXPECT_TRUE(same.invariant);
    std::vector<int> pi = id;
    std::shuffle(pi.begin(), pi.end(), rng);
    const auto r = permutation_invariance_check(spec, pi);
    EXPECT_LE(r.z_gap, 1e-12);
    EXPECT_TRUE(r.invariant);
}
