#include "multigibbs/empirics.hpp"

#include "multigibbs/assignment.hpp"
#include "multigibbs/errors.hpp"
#include "multigibbs/gibbs_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace multigibbs {

namespace {

double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

EmpiricalMeasure2D on_grid(const Eigen::VectorXd &values) {
    const auto n = values.size();
    EmpiricalMeasure2D e;
    e.u = Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n)) / static_cast<double>(n);
    e.y = values;
    return e;
}

// Systematic subsample of m indices out of n.
std::vector<Eigen::Index> thin(Eigen::Index n, Eigen::Index m, std::mt19937_64 &rng) {
    std::vector<Eigen::Index> idx(m);
    if (m == n) {
        for (Eigen::Index j = 0; j < m; ++j) {
            idx[j] = j;
        }
        return idx;
    }
    const double step = static_cast<double>(n) / static_cast<double>(m);
    const double offset = uniform01(rng) * step;
    for (Eigen::Index j = 0; j < m; ++j) {
        idx[j] = std::min(n - 1, static_cast<Eigen::Index>(offset + j * step));
    }
    return idx;
}

} // namespace

EmpiricalMeasure2D empirical_of_config(const Eigen::VectorXd &X) { return on_grid(X); }

EmpiricalMeasure2D empirical_of_fields(const Eigen::VectorXd &m) { return on_grid(m); }

LimitLaw LimitLaw::product_tilt(FieldProfile f, BaseMeasure mu) {
    LimitLaw law;
    law.kind = Kind::product_tilt;
    law.profile = std::move(f);
    law.mu = std::move(mu);
    return law;
}

LimitLaw LimitLaw::degenerate(FieldProfile g) {
    LimitLaw law;
    law.kind = Kind::degenerate_profile;
    law.profile = std::move(g);
    return law;
}

EmpiricalMeasure2D sample_limit(const LimitLaw &law, int n, std::uint64_t seed) {
    if (n < 1) {
        throw DomainError("sample_limit: n must be positive");
    }
    EmpiricalMeasure2D e;
    e.u.resize(n);
    e.y.resize(n);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        e.u(i) = (i + 0.5) / n;
    }
    if (law.kind == LimitLaw::Kind::degenerate_profile) {
        for (int i = 0; i < n; ++i) {
            e.y(i) = law.profile.at(e.u(i));
        }
        return e;
    }
    const BaseMeasure &mu = *law.mu;
    std::vector<Eigen::VectorXd> probs(law.profile.blocks());
    std::vector<double> fixed(law.profile.blocks(), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index b = 0; b < law.profile.blocks(); ++b) {
        const ExtendedReal beta = inverse_mean(mu, law.profile.values(b));
        if (beta.is_pos_inf()) {
            fixed[b] = mu.support_max();
        } else if (beta.is_neg_inf()) {
            fixed[b] = mu.support_min();
        } else {
            probs[b] = conditional_probs(mu, beta.value());
        }
    }
    for (int i = 0; i < n; ++i) {
        const Eigen::Index b = law.profile.block_of(e.u(i));
        const double u = uniform01(rng);
        e.y(i) = std::isnan(fixed[b]) ? mu.points()(draw_atom(probs[b], u)) : fixed[b];
    }
    return e;
}

LimitSets build_limit_sets(const std::vector<FieldProfile> &F, const MotifGraph &H, const StepKernel &W,
                           const BaseMeasure &mu, double theta, double B) {
    LimitSets out;
    for (const FieldProfile &f0 : F) {
        const auto [Wa, f] = align(W, f0);
        const FieldProfile t = vartheta_profile(H, Wa, f);
        Eigen::VectorXd a(t.blocks());
        for (Eigen::Index b = 0; b < a.size(); ++b) {
            a(b) = tilt_mean(mu, theta * t.values(b) + B);
        }
        out.max_inconsistency = std::max(out.max_inconsistency, (a - f.values).cwiseAbs().maxCoeff());
        out.xi.push_back(LimitLaw::product_tilt(f, mu));
        out.b_star.push_back(LimitLaw::degenerate(t));
        out.b_tilde.push_back(LimitLaw::degenerate(FieldProfile(t.masses, a)));
    }
    out.consistent = out.max_inconsistency <= 1e-7;
    return out;
}

double bl_distance(const EmpiricalMeasure2D &P, const EmpiricalMeasure2D &Q, const BLOptions &opt) {
    if (P.size() == 0 || Q.size() == 0) {
        throw DomainError("bl_distance: empty point cloud");
    }
    if (opt.subsample < 1 || opt.repeats < 1) {
        throw DomainError("bl_distance: subsample and repeats must be positive");
    }
    const Eigen::Index m = std::min<Eigen::Index>({opt.subsample, P.size(), Q.size()});
    // With both clouds used whole the estimate is deterministic.
    const int repeats = (m == P.size() && m == Q.size()) ? 1 : opt.repeats;
    std::mt19937_64 rng(opt.seed);
    double total = 0.0;
    Eigen::MatrixXd cost(m, m);
    for (int r = 0; r < repeats; ++r) {
        const auto ip = thin(P.size(), m, rng);
        const auto iq = thin(Q.size(), m, rng);
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < m; ++b) {
                const double d = std::abs(P.u(ip[a]) - Q.u(iq[b])) + std::abs(P.y(ip[a]) - Q.y(iq[b]));
                cost(a, b) = std::min(2.0, d);
            }
        }
        total += min_cost_assignment(cost) / static_cast<double>(m);
    }
    return total / repeats;
}

double distance_to_set(const EmpiricalMeasure2D &P, const std::vector<LimitLaw> &laws, int n_ref,
                       std::uint64_t seed, const BLOptions &opt) {
    if (laws.empty()) {
        throw DomainError("distance_to_set: empty set of laws");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto &law : laws) {
        best = std::min(best, bl_distance(P, sample_limit(law, n_ref, seed), opt));
    }
    return best;
}

double lp_profile_distance(const Eigen::VectorXd &a, const std::vector<FieldProfile> &F, double p) {
    if (F.empty()) {
        throw DomainError("lp_profile_distance: empty optimizer set");
    }
    if (!(p >= 1.0)) {
        throw DomainError("lp_profile_distance: p must be at least 1");
    }
    const auto n = a.size();
    double best = std::numeric_limits<double>::infinity();
    for (const auto &f : F) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s += std::pow(std::abs(a(i) - f.at(static_cast<double>(i + 1) / n)), p);
        }
        best = std::min(best, s / n);
    }
    return best;
}

Eigen::VectorXd tilted_means(const BaseMeasure &mu, double theta, double B, const Eigen::VectorXd &m) {
    Eigen::VectorXd out(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        out(i) = tilt_mean(mu, theta * m(i) + B);
    }
    return out;
}

} // namespace multigibbs
