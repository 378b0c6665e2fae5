#include "oracles.hpp"

#include "multigibbs/assignment.hpp"
#include "multigibbs/empirics.hpp"
#include "multigibbs/errors.hpp"
#include "multigibbs/meanfield.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace multigibbs;

namespace {

const BaseMeasure coin = BaseMeasure::ising_pm1();

EmpiricalMeasure2D cloud(std::vector<double> u, std::vector<double> y) {
    EmpiricalMeasure2D m;
    m.u = Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    m.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    return m;
}

EmpiricalMeasure2D random_cloud(int n, std::uint64_t seed, double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> y(shift, 0.5);
    EmpiricalMeasure2D m;
    m.u.resize(n);
    m.y.resize(n);
    for (int i = 0; i < n; ++i) {
        m.u(i) = u(rng);
        m.y(i) = y(rng);
    }
    return m;
}

FieldProfile one_block(double value) { return FieldProfile::constant(Eigen::VectorXd::Ones(1), value); }

} // namespace

TEST(Assignment, MatchesPermutationBruteForce) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int m = 1; m <= 7; ++m) {
        Eigen::MatrixXd C(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                C(i, j) = u(rng);
            }
        }
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double s = 0.0;
            for (int i = 0; i < m; ++i) {
                s += C(i, perm[i]);
            }
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<int> match;
        EXPECT_NEAR(min_cost_assignment(C, &match), best, 1e-12);
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            s += C(i, match[i]);
        }
        EXPECT_NEAR(s, best, 1e-12);
    }
}

TEST(Empirical, Examples) {
    const auto c = empirical_of_config(Eigen::VectorXd::Constant(5, 0.3));
    EXPECT_TRUE((c.y.array() == 0.3).all());
    const auto two = empirical_of_config(Eigen::Vector2d(-1.0, 1.0));
    EXPECT_EQ(two.u, Eigen::Vector2d(0.5, 1.0));
    EXPECT_EQ(two.y, Eigen::Vector2d(-1.0, 1.0));
    const auto m = empirical_of_fields(Eigen::Vector3d(0.1, 0.2, 0.3));
    EXPECT_NEAR(m.u(2), 1.0, 1e-15);
    EXPECT_EQ(m.y(1), 0.2);
}

TEST(SampleLimit, ProductTilt) {
    const auto base = sample_limit(LimitLaw::product_tilt(one_block(0.0), coin), 20000, 3);
    EXPECT_NEAR(base.y.mean(), 0.0, 3 * 1.0 / std::sqrt(20000.0));
    const int n = 40000;
    const auto tilted = sample_limit(LimitLaw::product_tilt(one_block(0.5), coin), n, 4);
    const double up = (tilted.y.array() > 0).cast<double>().mean();
    EXPECT_NEAR(up, 0.75, 3 * std::sqrt(0.75 * 0.25 / n));
    EXPECT_NEAR(tilted.u(0), 0.5 / n, 1e-15);
    EXPECT_TRUE((tilted.y.array().abs() == 1.0).all());
    const auto edge = sample_limit(LimitLaw::product_tilt(one_block(1.0), coin), 50, 5);
    EXPECT_TRUE((edge.y.array() == 1.0).all());
    EXPECT_THROW(sample_limit(LimitLaw::product_tilt(one_block(1.2), coin), 10, 1), DomainError);
}

TEST(SampleLimit, DegenerateAndBlocks) {
    const auto d = sample_limit(LimitLaw::degenerate(one_block(0.7)), 30, 1);
    EXPECT_TRUE((d.y.array() == 0.7).all());
    const FieldProfile g(Eigen::Vector2d(0.25, 0.75), Eigen::Vector2d(-2.0, 3.0));
    const auto s = sample_limit(LimitLaw::degenerate(g), 8, 1);
    EXPECT_EQ(s.y, (Eigen::VectorXd(8) << -2, -2, 3, 3, 3, 3, 3, 3).finished());
}

TEST(LimitSets, CurieWeiss) {
    const StepKernel one = StepKernel::constant(1.0);
    const double t = oracle::tstar(1.0);
    const std::vector<FieldProfile> F{one_block(t), one_block(-t)};
    const LimitSets sets = build_limit_sets(F, MotifGraph::K2(), one, coin, 1.0);
    EXPECT_TRUE(sets.consistent);
    EXPECT_LE(sets.max_inconsistency, 1e-7);
    ASSERT_EQ(sets.b_star.size(), 2u);
    EXPECT_NEAR(sets.b_star[0].profile.values(0), 2 * t, 1e-12);
    EXPECT_NEAR(sets.b_star[1].profile.values(0), -2 * t, 1e-12);
    EXPECT_NEAR(sets.b_tilde[0].profile.values(0), t, 1e-9);

    const LimitSets flat = build_limit_sets({one_block(0.0)}, MotifGraph::K2(), one, coin, 0.0);
    EXPECT_NEAR(flat.b_tilde[0].profile.values(0), 0.0, 1e-15);

    const LimitSets bad = build_limit_sets({one_block(0.5)}, MotifGraph::K2(), one, coin, 1.0);
    EXPECT_FALSE(bad.consistent);
}

TEST(LimitSets, SecondMomentsAreStableAcrossSeeds) {
    const StepKernel tri = StepKernel::tripartite();
    const BaseMeasure mu = BaseMeasure::ising_tilted(-4.0);
    const FreeEnergy fe = solve_free_energy(MotifGraph::K3(), tri, mu, 9.0, 0.0);
    std::vector<FieldProfile> F;
    for (const auto &c : fe.optimizers.optimizers) {
        F.push_back(c.profile);
    }
    const LimitSets sets = build_limit_sets(F, MotifGraph::K3(), tri, mu, 9.0);
    EXPECT_TRUE(sets.consistent);
    for (const auto *family : {&sets.xi, &sets.b_star, &sets.b_tilde}) {
        for (const auto &law : *family) {
            std::vector<double> m2;
            for (std::uint64_t seed = 1; seed <= 8; ++seed) {
                m2.push_back(sample_limit(law, 512, seed).y.squaredNorm() / 512.0);
            }
            const double mean = std::accumulate(m2.begin(), m2.end(), 0.0) / m2.size();
            double var = 0.0;
            for (double x : m2) {
                var += (x - mean) * (x - mean) / (m2.size() - 1);
            }
            EXPECT_TRUE(std::isfinite(mean));
            EXPECT_LT(std::sqrt(var) / mean, 0.1);
        }
    }
}

TEST(BLDistance, Examples) {
    const auto P = random_cloud(200, 1);
    EXPECT_EQ(bl_distance(P, P), 0.0);
    EXPECT_NEAR(bl_distance(cloud({0.5}, {0.2}), cloud({0.5}, {0.2 + 0.7})), 0.7, 1e-15);
    const auto far = cloud({0.1, 0.4, 0.9}, {5.0, 5.0, 5.0});
    EXPECT_NEAR(bl_distance(cloud({0.1, 0.4, 0.9}, {1.0, 2.0, 0.0}), far), 2.0, 1e-15);
}

TEST(BLDistance, MetricProperties) {
    for (int rep = 0; rep < 5; ++rep) {
        const auto P = random_cloud(120, 10 + rep), Q = random_cloud(120, 20 + rep, 0.3),
                   R = random_cloud(120, 30 + rep, -0.4);
        const double pq = bl_distance(P, Q), qp = bl_distance(Q, P);
        EXPECT_GE(pq, 0.0);
        EXPECT_NEAR(pq, qp, 1e-12);
        EXPECT_LE(pq, bl_distance(P, R) + bl_distance(R, Q) + 1e-12);
    }
}

TEST(BLDistance, SelfDistanceShrinksWithSampleSize) {
    const LimitLaw law = LimitLaw::product_tilt(FieldProfile(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.3, -0.6)), coin);
    std::vector<double> d;
    for (int n : {128, 256, 512}) {
        double s = 0.0;
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            s += bl_distance(sample_limit(law, n, 2 * seed + 1), sample_limit(law, n, 2 * seed + 2),
                             BLOptions{512, 1, seed});
        }
        d.push_back(s / 4);
    }
    EXPECT_GT(d[0], d[1]);
    EXPECT_GT(d[1], d[2]);
}

TEST(DistanceToSet, PicksTheNearBranchAndRejectsEmpty) {
    const double t = 0.9;
    const std::vector<LimitLaw> laws{LimitLaw::degenerate(one_block(t)), LimitLaw::degenerate(one_block(-t))};
    const auto P = sample_limit(LimitLaw::degenerate(one_block(t + 0.01)), 256, 1);
    EXPECT_NEAR(distance_to_set(P, laws, 256, 7), 0.01, 1e-12);
    EXPECT_NEAR(bl_distance(P, sample_limit(laws[1], 256, 1)), 2 * t + 0.01, 1e-12);
    EXPECT_GT(distance_to_set(P, {LimitLaw::degenerate(one_block(-t))}, 256, 7), 1.0);
    EXPECT_THROW(distance_to_set(P, {}, 256, 7), DomainError);
}

TEST(LpProfileDistance, Examples) {
    const FieldProfile f(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.2, -0.4));
    Eigen::VectorXd a(10);
    for (int i = 0; i < 10; ++i) {
        a(i) = f.at((i + 1) / 10.0);
    }
    EXPECT_EQ(lp_profile_distance(a, {f}, 1.0), 0.0);
    EXPECT_NEAR(lp_profile_distance(a.array() + 0.1, {f, one_block(5.0)}, 2.0), 0.01, 1e-15);
    EXPECT_THROW(lp_profile_distance(a, {}, 1.0), DomainError);

    const Eigen::VectorXd m = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
    EXPECT_EQ(lp_profile_distance(tilted_means(coin, 0.0, 0.0, m), {one_block(0.0)}, 1.0), 0.0);
    EXPECT_NEAR(tilted_means(coin, 2.0, 0.1, m)(0), std::tanh(-2.0 + 0.1), 1e-15);
}
