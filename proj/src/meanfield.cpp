#include "multigibbs/meanfield.hpp"

#include "multigibbs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace multigibbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) {
        r *= x;
    }
    return r;
}

void check_in_hull(const BaseMeasure &mu, double x, const char *who) {
    if (!(x >= mu.support_min() - kEndpointSnap && x <= mu.support_max() + kEndpointSnap)) {
        throw DomainError(std::string(who) + ": value outside the support hull");
    }
}

bool on_boundary(const BaseMeasure &mu, double x) {
    return x <= mu.support_min() + kEndpointSnap || x >= mu.support_max() - kEndpointSnap;
}

// beta as a double with signed infinities at the endpoints.
double beta(const BaseMeasure &mu, double x) { return inverse_mean(mu, x).to_double(); }

double half_range(const Eigen::VectorXd &f) { return 0.5 * (f.maxCoeff() - f.minCoeff()); }

void sort_by_objective(std::vector<Candidate> &c) {
    std::stable_sort(c.begin(), c.end(),
                     [](const Candidate &a, const Candidate &b) { return a.objective > b.objective; });
}

Candidate scalar_candidate(const BaseMeasure &mu, double theta, double B, int v, double x) {
    Candidate c;
    c.profile = FieldProfile::constant(Eigen::VectorXd::Ones(1), x);
    c.objective = scalar_objective(mu, theta, B, v, x);
    c.residual = std::abs(x - tilt_mean(mu, theta * v * ipow(x, v - 1) + B));
    c.boundary = on_boundary(mu, x);
    return c;
}

// Root of a decreasing-through-zero function on [a, b] with g(a) > 0 > g(b).
template <typename G>
double bisect_down(G &&g, double a, double b) {
    for (int iter = 0; iter < 200; ++iter) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) {
            break;
        }
        if (g(m) > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

template <typename F>
double golden_max(F &&h, double a, double b) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double h1 = h(x1);
    double h2 = h(x2);
    for (int iter = 0; iter < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++iter) {
        if (h1 < h2) {
            a = x1;
            x1 = x2;
            h1 = h2;
            x2 = a + r * (b - a);
            h2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            h2 = h1;
            x1 = b - r * (b - a);
            h1 = h(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

double SolveReport::best_objective() const {
    if (optimizers.empty()) {
        return -kInf;
    }
    return optimizers.front().objective;
}

double scalar_objective(const BaseMeasure &mu, double theta, double B, int v, double x) {
    check_in_hull(mu, x, "scalar_objective");
    return theta * ipow(x, v) + B * x - rate_at_mean(mu, x);
}

SolveReport scalar_maximizers(const BaseMeasure &mu, double theta, double B, int v, const ScalarOptions &opt) {
    if (!(opt.tol_value > 0.0 && opt.tol_x > 0.0) || opt.grid < 3) {
        throw DomainError("scalar_maximizers: tolerances must be positive and the grid at least 3 points");
    }
    const double lo = mu.support_min();
    const double hi = mu.support_max();
    const int n = opt.grid;
    auto H = [&](double x) { return scalar_objective(mu, theta, B, v, x); };
    // H'(x); +inf at the lower endpoint, -inf at the upper one.
    auto g = [&](double x) { return theta * v * ipow(x, v - 1) + B - beta(mu, x); };

    std::vector<double> xs(n);
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        hs[i] = H(xs[i]);
    }

    std::vector<double> found;
    for (int i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || hs[i] >= hs[i - 1];
        const bool right_ok = i == n - 1 || hs[i] >= hs[i + 1];
        if (!left_ok || !right_ok) {
            continue;
        }
        const double a = xs[std::max(i - 1, 0)];
        const double m = xs[i];
        const double c = xs[std::min(i + 1, n - 1)];
        const double ga = g(a);
        const double gm = g(m);
        const double gc = g(c);
        bool hit = false;
        if (gm == 0.0) {
            found.push_back(m);
            hit = true;
        }
        if (ga > 0.0 && gm < 0.0) {
            found.push_back(bisect_down(g, a, m));
            hit = true;
        }
        if (gm > 0.0 && gc < 0.0) {
            found.push_back(bisect_down(g, m, c));
            hit = true;
        }
        if (!hit) {
            found.push_back(golden_max(H, a, c));
        }
    }

    std::vector<Candidate> cands;
    for (double x : found) {
        cands.push_back(scalar_candidate(mu, theta, B, v, std::clamp(x, lo, hi)));
    }
    sort_by_objective(cands);

    SolveReport rep;
    if (cands.empty()) {
        rep.verdict = "empty";
        return rep;
    }
    const double top = cands.front().objective;
    for (const auto &c : cands) {
        if (c.objective < top - opt.tol_value) {
            break;
        }
        const bool dup = std::any_of(rep.optimizers.begin(), rep.optimizers.end(), [&](const Candidate &o) {
            return std::abs(o.scalar() - c.scalar()) <= opt.tol_x;
        });
        if (!dup) {
            rep.optimizers.push_back(c);
        }
    }
    if (rep.optimizers.size() > opt.cap) {
        throw DiagnosticError("scalar_maximizers: optimizer set exceeds the cap of " + std::to_string(opt.cap));
    }
    return rep;
}

std::vector<FixedPoint> scalar_fixed_points(const BaseMeasure &mu, double theta, double B, int v, int grid) {
    if (grid < 3) {
        throw DomainError("scalar_fixed_points: grid must have at least 3 points");
    }
    const double lo = mu.support_min();
    const double hi = mu.support_max();
    auto d = [&](double x) { return x - tilt_mean(mu, theta * v * ipow(x, v - 1) + B); };

    std::vector<double> roots;
    double xp = lo;
    double dp = d(lo);
    for (int i = 1; i < grid; ++i) {
        const double x = i == grid - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (grid - 1);
        const double dx = d(x);
        if (dp == 0.0) {
            roots.push_back(xp);
        } else if ((dp < 0.0 && dx > 0.0) || (dp > 0.0 && dx < 0.0)) {
            double a = xp;
            double b = x;
            const bool rising = dp < 0.0;
            while (b - a > 1e-12) {
                const double m = 0.5 * (a + b);
                const double dm = d(m);
                if (dm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((dm < 0.0) == rising) {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        xp = x;
        dp = dx;
    }
    if (dp == 0.0) {
        roots.push_back(xp);
    }

    std::vector<FixedPoint> out;
    for (double x : roots) {
        FixedPoint fp;
        fp.x = x;
        const double arg = theta * v * ipow(x, v - 1) + B;
        fp.slope = tilt_var(mu, arg) * theta * v * (v - 1) * ipow(x, v - 2);
        fp.stable = std::abs(fp.slope) < 1.0;
        out.push_back(fp);
    }
    return out;
}

QuadraticCase quadratic_case(const BaseMeasure &mu, double theta, double B) {
    if (!is_symmetric_about_zero(mu)) {
        throw PreconditionError("quadratic_case: mu must be symmetric about zero");
    }
    if (theta < 0.0) {
        throw PreconditionError("quadratic_case: theta must be non-negative");
    }
    QuadraticCase q;
    const double var0 = tilt_var(mu, 0.0);
    q.threshold = 0.5 / var0;
    q.variance_condition = variance_nonincreasing_on_halfline(mu);
    q.maximizers = scalar_maximizers(mu, theta, B, 2);
    const auto &opt = q.maximizers.optimizers;
    const double best = opt.front().scalar();
    const double tiny = 1e-7;

    if (B != 0.0) {
        q.which = 2;
        q.t = best;
        q.consistent = opt.size() == 1 && best * B > 0.0;
    } else if (2.0 * theta * var0 <= 1.0) {
        q.which = 1;
        q.t = 0.0;
        q.consistent = opt.size() == 1 && std::abs(best) <= tiny;
    } else {
        q.which = 3;
        q.t = std::abs(best);
        q.consistent = opt.size() == 2 && std::abs(opt[0].scalar() + opt[1].scalar()) <= tiny && q.t > tiny;
    }
    return q;
}

// ------------------------------------------------------------- ProfileProblem

ProfileProblem::ProfileProblem(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu, double theta, double B)
    : W_(W), mu_(mu), sym_(H, W), theta_(theta), B_(B) {}

Eigen::VectorXd ProfileProblem::vartheta(const Eigen::VectorXd &f) const {
    if (f.size() != W_.k()) {
        throw DomainError("ProfileProblem: profile length differs from the block count");
    }
    const Eigen::VectorXd weight = f.cwiseProduct(W_.masses());
    return static_cast<double>(v()) * (sym_.anchored() * tuple_products(weight, v() - 1));
}

double ProfileProblem::objective(const Eigen::VectorXd &f) const {
    const Eigen::VectorXd t = vartheta(f);
    const Eigen::VectorXd &m = W_.masses();
    // Euler: sum_b m_b f_b vartheta_b = v G_W(f).
    const double G = m.dot(f.cwiseProduct(t)) / v();
    double entropy = 0.0;
    for (Eigen::Index b = 0; b < f.size(); ++b) {
        check_in_hull(mu_, f(b), "profile_objective");
        entropy += m(b) * rate_at_mean(mu_, f(b));
    }
    return theta_ * G + B_ * m.dot(f) - entropy;
}

Eigen::VectorXd ProfileProblem::gradient(const Eigen::VectorXd &f) const {
    Eigen::VectorXd grad = theta_ * vartheta(f);
    for (Eigen::Index b = 0; b < f.size(); ++b) {
        grad(b) += B_ - beta(mu_, f(b));
    }
    return grad;
}

Eigen::VectorXd ProfileProblem::update(const Eigen::VectorXd &f) const {
    const Eigen::VectorXd field = theta_ * vartheta(f);
    Eigen::VectorXd out(f.size());
    for (Eigen::Index b = 0; b < f.size(); ++b) {
        out(b) = tilt_mean(mu_, field(b) + B_);
    }
    return out;
}

double ProfileProblem::residual(const Eigen::VectorXd &f) const { return (f - update(f)).cwiseAbs().maxCoeff(); }

double profile_objective(const MotifGraph &H, const StepKernel &W0, const BaseMeasure &mu, double theta, double B,
                         const FieldProfile &f0) {
    const auto [W, f] = align(W0, f0);
    return ProfileProblem(H, W, mu, theta, B).objective(f.values);
}

SolveReport profile_fixed_point(const ProfileProblem &problem, const Eigen::VectorXd &f0,
                                const FixedPointOptions &opt) {
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) {
        throw DomainError("profile_fixed_point: damping must lie in (0, 1]");
    }
    if (!(opt.tol > 0.0) || opt.max_iter < 1) {
        throw DomainError("profile_fixed_point: tol and max_iter must be positive");
    }
    const BaseMeasure &mu = problem.measure();
    for (Eigen::Index b = 0; b < f0.size(); ++b) {
        check_in_hull(mu, f0(b), "profile_fixed_point");
    }
    Eigen::VectorXd f = f0;
    Candidate c;
    c.converged = false;
    for (long it = 0; it < opt.max_iter; ++it) {
        const Eigen::VectorXd step = opt.damping * (problem.update(f) - f);
        if (step.cwiseAbs().maxCoeff() <= opt.tol) {
            c.converged = true;
            break;
        }
        f += step;
        c.iterations = it + 1;
    }
    f = f.cwiseMax(mu.support_min()).cwiseMin(mu.support_max());
    c.profile = FieldProfile(problem.kernel().masses(), f);
    c.objective = problem.objective(f);
    c.residual = problem.residual(f);
    c.boundary = std::any_of(f.begin(), f.end(), [&](double x) { return on_boundary(mu, x); });

    SolveReport rep;
    rep.verdict = c.converged ? "ok" : "not_converged";
    rep.optimizers.push_back(std::move(c));
    return rep;
}

SolveReport profile_fixed_point(const MotifGraph &H, const StepKernel &W0, const BaseMeasure &mu, double theta,
                                double B, const FieldProfile &f0, const FixedPointOptions &opt) {
    const auto [W, f] = align(W0, f0);
    return profile_fixed_point(ProfileProblem(H, W, mu, theta, B), f.values, opt);
}

FreeEnergy solve_free_energy(const MotifGraph &H, const StepKernel &W0, const BaseMeasure &mu, double theta, double B,
                             const MultistartSpec &spec) {
    if (spec.n_random < 0 || spec.constant_grid < 0) {
        throw DomainError("solve_free_energy: start counts must be non-negative");
    }
    const StepKernel W = subdivide(W0, spec.refine);
    const ProfileProblem problem(H, W, mu, theta, B);
    const Eigen::Index k = W.k();
    const double lo = mu.support_min();
    const double hi = mu.support_max();

    std::vector<Eigen::VectorXd> starts;
    const double cbar = is_regular(H, W).constant;
    for (const auto &fp : scalar_fixed_points(mu, theta * cbar, B, H.v())) {
        starts.push_back(Eigen::VectorXd::Constant(k, fp.x));
    }
    for (int j = 1; j <= spec.constant_grid; ++j) {
        starts.push_back(Eigen::VectorXd::Constant(k, lo + (hi - lo) * j / (spec.constant_grid + 1.0)));
    }
    std::mt19937_64 rng(spec.seed);
    for (int r = 0; r < spec.n_random; ++r) {
        Eigen::VectorXd f(k);
        for (Eigen::Index b = 0; b < k; ++b) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            f(b) = lo + (hi - lo) * u;
        }
        starts.push_back(std::move(f));
    }

    FreeEnergy out;
    for (const auto &s : starts) {
        out.runs.push_back(profile_fixed_point(problem, s, spec.fixed_point).optimizers.front());
    }

    std::vector<Candidate> pool;
    for (const auto &c : out.runs) {
        if (c.converged) {
            pool.push_back(c);
        }
    }
    if (pool.empty()) {
        pool = out.runs;
        out.optimizers.verdict = "not_converged";
    }
    sort_by_objective(pool);
    out.Z = pool.front().objective;
    for (const auto &c : pool) {
        if (c.objective < out.Z - spec.value_tol) {
            break;
        }
        const bool dup = std::any_of(out.optimizers.optimizers.begin(), out.optimizers.optimizers.end(),
                                     [&](const Candidate &o) {
                                         return (o.profile.values - c.profile.values).cwiseAbs().maxCoeff() <=
                                                spec.dedup_sup;
                                     });
        if (!dup) {
            out.optimizers.optimizers.push_back(c);
        }
    }
    if (out.optimizers.optimizers.size() > spec.cap) {
        throw DiagnosticError("solve_free_energy: optimizer set exceeds the cap of " + std::to_string(spec.cap));
    }
    return out;
}

std::string to_string(Symmetry s) {
    switch (s) {
    case Symmetry::symmetric:
        return "symmetric";
    case Symmetry::broken:
        return "broken";
    default:
        return "inconclusive";
    }
}

SymmetryVerdict replica_symmetry_verdict(const MotifGraph &H, const StepKernel &W, const BaseMeasure &mu,
                                         double theta, double B, const MultistartSpec &spec) {
    SymmetryVerdict sv;
    sv.solve = solve_free_energy(H, W, mu, theta, B, spec);

    const Regularity reg = is_regular(H, W);
    sv.regular = reg.regular;
    sv.positive_kernel = W.min_value() > 0.0;
    sv.theta_nonneg = theta >= 0.0;
    sv.v_even_or_nonneg = H.v() % 2 == 0 || is_stochastically_nonneg(mu);
    sv.hypotheses_hold = sv.regular && sv.positive_kernel && sv.theta_nonneg && sv.v_even_or_nonneg;

    // A constant profile t has G_W = G_W(1) t^v.
    const SolveReport constants = scalar_maximizers(mu, theta * reg.constant, B, H.v());
    sv.best_constant = constants.best_objective();
    sv.best_constant_x = constants.optimizers.front().scalar();

    const double flat = spec.dedup_sup;
    sv.best_nonconstant = -kInf;
    for (const auto &c : sv.solve.runs) {
        if (c.converged && half_range(c.profile.values) > flat) {
            sv.best_nonconstant = std::max(sv.best_nonconstant, c.objective);
        }
    }
    const auto &F = sv.solve.optimizers.optimizers;
    const bool all_flat =
        std::all_of(F.begin(), F.end(), [&](const Candidate &c) { return half_range(c.profile.values) <= flat; });

    if (sv.best_nonconstant > sv.best_constant + 1e-6) {
        sv.verdict = Symmetry::broken;
    } else if (all_flat && sv.best_nonconstant <= sv.best_constant + 1e-8) {
        sv.verdict = Symmetry::symmetric;
    } else {
        sv.verdict = Symmetry::inconclusive;
    }
    return sv;
}

CriticalTheta critical_theta(const BaseMeasure &mu, int v, double B, const CriticalOptions &opt) {
    if (std::abs(tilt_mean(mu, 0.0)) > 1e-12) {
        throw PreconditionError("critical_theta: the base measure must have mean zero");
    }
    if (!(opt.lo > 0.0 && opt.hi > opt.lo && opt.tol > 0.0)) {
        throw DomainError("critical_theta: need 0 < lo < hi and tol > 0");
    }
    auto zero_optimal = [&](double theta) {
        const SolveReport rep = scalar_maximizers(mu, theta, B, v, opt.scalar);
        return std::any_of(rep.optimizers.begin(), rep.optimizers.end(),
                           [&](const Candidate &c) { return std::abs(c.scalar()) <= opt.scalar.tol_x; });
    };

    double lo = opt.lo;
    double hi = opt.hi;
    while (!zero_optimal(lo)) {
        lo *= 0.5;
        if (lo < 1e-12) {
            throw DiagnosticError("critical_theta: zero is not optimal even for tiny theta");
        }
    }
    while (zero_optimal(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) {
            throw DiagnosticError("critical_theta: no transition below 1e8");
        }
    }

    CriticalTheta out;
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        if (zero_optimal(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++out.bisections;
    }
    out.theta_c = 0.5 * (lo + hi);

    const int m = std::max(opt.validation_points, 2);
    for (int j = 0; j < m; ++j) {
        const double theta = out.theta_c * (0.5 + static_cast<double>(j) / (m - 1));
        if (std::abs(theta - out.theta_c) <= 2.0 * opt.tol) {
            continue;
        }
        const bool z = zero_optimal(theta);
        out.scan.emplace_back(theta, z);
        if (z != (theta < out.theta_c)) {
            throw DiagnosticError("critical_theta: predicate is not monotone in theta");
        }
    }
    return out;
}

UniquenessField uniqueness_field(const BaseMeasure &mu, double theta, int v, std::vector<double> B_grid,
                                 const ScalarOptions &opt) {
    if (mu.support_min() < -1.0 - 1e-12 || mu.support_max() > 1.0 + 1e-12) {
        throw PreconditionError("uniqueness_field: mu must be supported in [-1, 1]");
    }
    std::sort(B_grid.begin(), B_grid.end());
    UniquenessField out;
    for (double B : B_grid) {
        const SolveReport rep = scalar_maximizers(mu, theta, B, v, opt);
        out.table.push_back({B, rep.optimizers.size(), rep.optimizers.front().scalar()});
    }
    for (std::size_t i = out.table.size(); i-- > 0;) {
        if (out.table[i].count != 1) {
            break;
        }
        out.B0 = out.table[i].B;
    }
    return out;
}

} // namespace multigibbs
