// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// value, its tolerance and its wall time against the time budget.

#include "oracles.hpp"

#include "multigibbs/config.hpp"
#include "multigibbs/exp_family.hpp"
#include "multigibbs/gibbs_sampler.hpp"
#include "multigibbs/meanfield.hpp"
#include "multigibbs/motif_kernel.hpp"
#include "multigibbs/presets.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace multigibbs;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string &what) {
        pass = pass && ok;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [violated]");
    }
};

std::string num(double x, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string &name, double budget_s, const std::function<void(Outcome &)> &body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception &e) {
        out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.check(secs < budget_s, "runtime " + num(secs, 3) + " s < " + num(budget_s) + " s");
    failures += !out.pass;
    std::printf("%s %d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
}

StepKernel random_kernel(std::mt19937_64 &rng, int k, bool signed_values) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd m(k);
    for (int i = 0; i < k; ++i) {
        m(i) = 0.05 + u(rng);
    }
    m /= m.sum();
    Eigen::MatrixXd V(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j) {
            V(i, j) = V(j, i) = signed_values ? 2.0 * u(rng) - 1.0 : u(rng);
        }
    }
    return StepKernel(m, V);
}

CouplingMatrix random_coupling(std::mt19937_64 &rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            Q(i, j) = Q(j, i) = u(rng);
        }
    }
    return CouplingMatrix(Q);
}

std::vector<Eigen::VectorXd> spin_configurations(int n) {
    std::vector<Eigen::VectorXd> out;
    for (long mask = 0; mask < (1L << n); ++mask) {
        Eigen::VectorXd X(n);
        for (int i = 0; i < n; ++i) {
            X(i) = (mask >> i & 1) ? 1.0 : -1.0;
        }
        out.push_back(X);
    }
    return out;
}

const BaseMeasure coin = BaseMeasure::ising_pm1();

void exp_family_suite(Outcome &o) {
    const std::vector<std::pair<std::string, BaseMeasure>> battery{
        {"ising", coin},
        {"ising_tilted(-4)", BaseMeasure::ising_tilted(-4.0)},
        {"bernoulli(0.3)", BaseMeasure::bernoulli(0.3)},
        {"three_point(0.5)", BaseMeasure::three_point(0.5)},
        {"quadrature(uniform)", BaseMeasure::quadrature("uniform", -1.0, 1.0, 24)},
    };
    double worst_trip = 0.0, worst_gamma = 0.0, worst_center = 0.0, worst_end = 0.0;
    for (const auto &[name, mu] : battery) {
        const double a = mu.support_min(), b = mu.support_max();
        for (int i = 0; i < 512; ++i) {
            const double x = a + (b - a) * (i + 0.5) / 512.0;
            const ExtendedReal th = inverse_mean(mu, x);
            worst_trip = std::max(worst_trip, std::abs(tilt_mean(mu, th.value()) - x));
            worst_gamma = std::min(worst_gamma, rate_at_mean(mu, x));
        }
        worst_center = std::max(worst_center, std::abs(rate_at_mean(mu, tilt_mean(mu, 0.0))));
        worst_end = std::max({worst_end, std::abs(rate_at_mean(mu, b) + std::log(mu.weights()(mu.weights().size() - 1))),
                              std::abs(rate_at_mean(mu, a) + std::log(mu.weights()(0)))});
    }
    o.check(worst_trip <= 1e-10, "max |alpha'(beta(x)) - x| = " + num(worst_trip, 3) + " <= 1e-10");
    o.check(worst_gamma >= 0.0, "min gamma = " + num(worst_gamma, 3) + " >= 0");
    o.check(worst_center <= 1e-12, "max |gamma(beta(alpha'(0)))| = " + num(worst_center, 3) + " <= 1e-12");
    const double g1 = rate_at_mean(coin, 1.0);
    o.check(std::abs(g1 - std::log(2.0)) <= 1e-12, "gamma(beta(1)) fair coin = " + num(g1, 15) + " vs log 2");
    o.check(worst_end <= 1e-12, "max endpoint |gamma + log mu(end)| = " + num(worst_end, 3));
}

void glauber_exactness(Outcome &o) {
    for (double theta : {0.0, 0.5, 1.0}) {
        const auto [pi, gibbs] = oracle::coin_glauber_laws(CouplingMatrix::complete(3).entries(), theta);
        const double oracle_tv = oracle::tv(pi, gibbs);
        const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(3), coin, theta, 0.0);
        const double lib_tv = exact_glauber_stationarity(spec);
        o.check(oracle_tv <= 1e-8 && lib_tv <= 1e-8, "theta " + num(theta) + ": TV oracle " + num(oracle_tv, 3) +
                                                         ", library " + num(lib_tv, 3) + " <= 1e-8");
    }
}

void scalar_transition(Outcome &o) {
    const CriticalTheta c1 = critical_theta(coin, 2);
    o.check(std::abs(c1.theta_c - 0.5) <= 1e-6, "fair coin theta_c = " + num(c1.theta_c, 12) + " (0.5 +- 1e-6)");
    const BaseMeasure tp = BaseMeasure::three_point(0.5);
    const CriticalTheta c2 = critical_theta(tp, 2);
    const double expect = 1.0 / (2.0 * tilt_var(tp, 0.0));
    o.check(std::abs(c2.theta_c - 1.0) <= 1e-6,
            "three-point theta_c = " + num(c2.theta_c, 12) + " (1.0 +- 1e-6; 1/(2 alpha''(0)) = " + num(expect) + ")");
}

void fixed_point_value(Outcome &o) {
    const SolveReport r = scalar_maximizers(coin, 1.0, 0.0, 2);
    const double t = oracle::tstar(1.0);
    o.check(r.optimizers.size() == 2, std::to_string(r.optimizers.size()) + " maximizers (expect 2)");
    for (const auto &c : r.optimizers) {
        o.check(std::abs(std::abs(c.scalar()) - 0.9575040) <= 1e-7 && std::abs(std::abs(c.scalar()) - t) <= 1e-7,
                "x = " + num(c.scalar(), 12) + " vs t* " + num(t, 12));
    }
    if (r.optimizers.size() == 2) {
        o.check(r.optimizers[0].scalar() * r.optimizers[1].scalar() < 0, "opposite signs");
    }
}

void tripartite(Outcome &o) {
    const ExperimentConfig cfg = parse_config(preset_config("tripartite-counterexample"));
    const BaseMeasure mu = BaseMeasure::ising_tilted(-4.0);
    const double p1 = std::exp(-4.0) / (std::exp(-4.0) + std::exp(4.0));
    o.check(std::abs(mu.weights()(1) - p1) <= 1e-15, "mu(1) = " + num(mu.weights()(1), 6));
    const StepKernel W = StepKernel::tripartite();
    const FieldProfile reference(W.masses(), Eigen::Vector3d(-0.99, -0.99, 0.83));
    const double reference_obj = profile_objective(MotifGraph::K3(), W, mu, 9.0, 0.0, reference);
    const SymmetryVerdict v = replica_symmetry_verdict(MotifGraph::K3(), W, mu, 9.0, 0.0, multistart_of(cfg));
    const double gap = reference_obj - v.best_constant;
    o.check(gap > 0.0, "reference profile " + num(reference_obj) + " - best constant " + num(v.best_constant) + " = gap " +
                           num(gap) + " > 0");
    o.check(v.verdict == Symmetry::broken, "verdict " + to_string(v.verdict));
    o.check(v.solve.Z >= reference_obj - 1e-12, "Z = " + num(v.solve.Z) + " >= reference profile");
}

void bipartite(Outcome &o) {
    const ExperimentConfig cfg = parse_config(preset_config("bipartite-negative-theta"));
    const StepKernel W = StepKernel::bipartite(2.0);
    o.check(W.values() == (Eigen::Matrix2d() << 0, 2, 2, 0).finished(), "W = [[0,2],[2,0]]");
    const SymmetryVerdict v = replica_symmetry_verdict(MotifGraph::K2(), W, coin, -5.0, 0.0, multistart_of(cfg));
    const auto &best = v.solve.optimizers.optimizers.front().profile.values;
    o.check(best(0) * best(1) < 0, "best profile (" + num(best(0)) + ", " + num(best(1)) + ") has opposite signs");
    const double margin = v.solve.Z - v.best_constant;
    o.check(margin > 1e-6, "Z " + num(v.solve.Z) + " - best constant " + num(v.best_constant) + " = " + num(margin) +
                               " > 1e-6");
}

void free_energy_convergence(Outcome &o) {
    const FreeEnergy fe = solve_free_energy(MotifGraph::K2(), StepKernel::constant(1.0), coin, 0.3, 0.0);
    double prev = INFINITY;
    bool monotone = true;
    double last = 0.0;
    std::string trail;
    for (int n = 4; n <= 12; ++n) {
        const ModelSpec spec(MotifGraph::K2(), CouplingMatrix::complete(n), coin, 0.3, 0.0);
        const double gap = std::abs(exact_small_n(spec).Z - fe.Z);
        monotone = monotone && gap <= prev + 1e-12;
        prev = last = gap;
        trail += (trail.empty() ? "" : ",") + num(gap, 4);
    }
    o.check(monotone, "|Z_n - Z| for n=4..12 non-increasing (" + trail + ")");
    o.check(last <= 0.05, "|Z_12 - Z| = " + num(last, 6) + " <= 0.05 (Z = " + num(fe.Z, 6) + ")");
}

void weak_laws(Outcome &o) {
    const ExperimentConfig cfg = parse_config(preset_config("weak-law-scan"));
    const WeakLawStudy study = weak_law_study(cfg);
    const double t = oracle::tstar(1.0);
    std::map<int, std::vector<WeakLawRow>> by_n;
    for (const auto &r : study.rows) {
        by_n[r.n].push_back(r);
    }
    o.check(by_n.size() == 4 && by_n.rbegin()->first == 2000, "n grid 250..2000");
    for (const auto &r : by_n[2000]) {
        const std::string s = "seed " + std::to_string(r.seed) + ": ";
        o.check(r.absmag_dev <= 0.02, s + "(a) mean ||Xbar|-t*| = " + num(r.absmag_dev, 4) + " <= 0.02");
        o.check(std::abs(r.contrast_alt) <= 0.05, s + "(b) |alt contrast| = " + num(std::abs(r.contrast_alt), 4));
        o.check(std::abs(r.ham - 2 * t * t) <= 0.03,
                s + "(c) ham " + num(r.ham, 6) + " vs 2t*^2 = " + num(2 * t * t, 6) + " within 0.03");
        o.check(r.lp_distance <= 0.02, s + "(e) lp distance = " + num(r.lp_distance, 4) + " <= 0.02");
    }
    double prev = INFINITY;
    bool decreasing = true;
    std::string trail;
    for (const auto &[n, rows] : by_n) {
        double mean = 0.0;
        for (const auto &r : rows) {
            mean += r.distance_b_star / rows.size();
        }
        decreasing = decreasing && mean < prev;
        prev = mean;
        trail += (trail.empty() ? "" : ",") + num(mean, 4);
    }
    o.check(decreasing, "(d) seed-averaged distance to B* strictly decreasing (" + trail + ")");
}

void identities(Outcome &o) {
    std::mt19937_64 rng(20240909);
    double worst_stat = 0.0;
    for (int v : {2, 3}) {
        for (int n = 1; n <= 10; ++n) {
            const ModelSpec spec(MotifGraph::complete(v), random_coupling(rng, n), coin, 1.0, 0.0);
            for (const auto &X : spin_configurations(n)) {
                worst_stat = std::max(worst_stat, std::abs(hamiltonian_stat(spec, X) - v * hamiltonian(spec, X)));
            }
        }
    }
    o.check(worst_stat <= 1e-12, "max |stat - v U| over all spins, n <= 10, v in {2,3} = " + num(worst_stat, 3));

    const std::vector<MotifGraph> motifs{MotifGraph::K2(), MotifGraph::K3(), MotifGraph::K1_2(),
                                        MotifGraph(4, {{1, 2}, {2, 3}, {3, 4}}),
                                        MotifGraph(4, {{1, 2}, {1, 3}, {1, 4}})};
    double worst_ratio = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const MotifGraph &H = motifs[rep % motifs.size()];
        const int k = 1 + rep % 4;
        const StepKernel W = random_kernel(rng, k, true);
        const SymTensor sym(H, StepKernel(W.masses(), W.values().cwiseAbs()));
        const Eigen::VectorXd weights = tuple_products(W.masses(), H.v());
        const int E = static_cast<int>(H.edges().size());
        for (double q : {1.5, 2.0, 3.0}) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < sym.size(); ++j) {
                std::vector<int> tup(H.v());
                std::size_t r = j;
                for (int a = H.v() - 1; a >= 0; --a) {
                    tup[a] = static_cast<int>(r % k);
                    r /= k;
                }
                lhs += weights(static_cast<Eigen::Index>(j)) * std::pow(sym(tup), q);
            }
            worst_ratio = std::max(worst_ratio, lhs / std::pow(lr_norm(W, q * H.max_degree()), q * E));
        }
    }
    o.check(worst_ratio <= 1 + 1e-12, "Hoelder: max int|Sym W|^q / ||W||_{q Delta}^{q E} = " + num(worst_ratio, 6));

    double worst_cut = -INFINITY;
    for (int rep = 0; rep < 50; ++rep) {
        const StepKernel W = random_kernel(rng, 1 + rep % 10, true);
        worst_cut = std::max(worst_cut, cut_norm_heuristic(W, 8, rep) - cut_norm_exact(W));
    }
    o.check(worst_cut <= 1e-12, "max (heuristic - exact) cut norm, k <= 10 = " + num(worst_cut, 3));

    double worst_perm = 0.0;
    for (const auto &H : {MotifGraph::K2(), MotifGraph::K3()}) {
        const ModelSpec spec(H, random_coupling(rng, 8), coin, 1.5, 0.1);
        std::vector<int> pi(8);
        std::iota(pi.begin(), pi.end(), 0);
        std::shuffle(pi.begin(), pi.end(), rng);
        worst_perm = std::max(worst_perm, permutation_invariance_check(spec, pi).z_gap);
    }
    o.check(worst_perm <= 1e-12, "permutation |Z_n gap| at n=8 = " + num(worst_perm, 3));
}

void stationarity(Outcome &o) {
    double worst = 0.0;
    long count = 0;
    for (const auto &name : preset_names()) {
        const RunResult r = run_preset(name, true);
        worst = std::max(worst, r.max_solver_residual);
        count += r.solver_optimizers;
    }
    o.check(count > 0 && worst <= 1e-8,
            std::to_string(count) + " preset optimizers, max residual " + num(worst, 3) + " <= 1e-8");

    std::mt19937_64 rng(20240910);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    const std::vector<MotifGraph> motifs{MotifGraph::K2(), MotifGraph::K3(), MotifGraph::K1_2(),
                                        MotifGraph(4, {{1, 2}, {2, 3}, {3, 4}})};
    double worst_rel = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const int k = 2 + rep % 3;
        const ProfileProblem P(motifs[rep % motifs.size()], random_kernel(rng, k, true),
                               rep % 2 ? coin : BaseMeasure::three_point(0.4), 2.0 * u(rng), u(rng));
        Eigen::VectorXd f(k), d(k);
        for (int b = 0; b < k; ++b) {
            f(b) = u(rng);
            d(b) = u(rng);
        }
        const double h = 1e-5;
        const double fd = (P.objective(f + h * d) - P.objective(f - h * d)) / (2 * h);
        const double an = P.kernel().masses().cwiseProduct(P.gradient(f)).dot(d);
        worst_rel = std::max(worst_rel, std::abs(fd - an) / std::max(std::abs(an), 1e-3));
    }
    o.check(worst_rel <= 1e-6, "directional derivative vs central difference, max relative error " +
                                   num(worst_rel, 3) + " <= 1e-6 on 20 profiles");
}

} // namespace

int main() {
    criterion(1, "exponential-family suite", 1.0, exp_family_suite);
    criterion(2, "Glauber exactness", 5.0, glauber_exactness);
    criterion(3, "scalar phase transition", 10.0, scalar_transition);
    criterion(4, "fixed point value", 1.0, fixed_point_value);
    criterion(5, "tripartite counterexample", 5.0, tripartite);
    criterion(6, "negative-theta bipartite", 5.0, bipartite);
    criterion(7, "free-energy convergence", 60.0, free_energy_convergence);
    criterion(8, "weak laws", 600.0, weak_laws);
    criterion(9, "identities and inequalities", 60.0, identities);
    criterion(10, "solver stationarity", 30.0, stationarity);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
