#include "multigibbs/exp_family.hpp"

#include "multigibbs/errors.hpp"
#include "multigibbs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multigibbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Normalized tilted weights p_j proportional to w_j exp(theta x_j), plus log-normalizer.
struct Tilt {
    Eigen::ArrayXd p;
    double log_norm;
};

Tilt tilt(const BaseMeasure &mu, double theta) {
    const Eigen::ArrayXd e = theta * mu.points().array() + mu.log_weights().array();
    const double shift = e.maxCoeff();
    const Eigen::ArrayXd u = (e - shift).exp();
    const double s = u.sum();
    return {u / s, shift + std::log(s)};
}

// alpha'(theta) - x, accumulated as sum p_j (x_j - x) for accuracy near the hull edges.
double mean_gap(const BaseMeasure &mu, double theta, double x) {
    const Tilt t = tilt(mu, theta);
    return (t.p * (mu.points().array() - x)).sum();
}

} // namespace

BaseMeasure::BaseMeasure(Eigen::VectorXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) {
        throw DomainError("BaseMeasure: points and weights differ in length");
    }
    if (points_.size() < 2) {
        throw DomainError("BaseMeasure: at least two atoms required");
    }
    for (Eigen::Index j = 0; j < points_.size(); ++j) {
        if (!std::isfinite(points_(j))) {
            throw DomainError("BaseMeasure: non-finite atom");
        }
        if (!(weights_(j) > 0.0) || !std::isfinite(weights_(j))) {
            throw DomainError("BaseMeasure: weights must be strictly positive");
        }
        if (j > 0 && !(points_(j) > points_(j - 1))) {
            throw DomainError("BaseMeasure: points must be strictly increasing");
        }
    }
    if (std::abs(weights_.sum() - 1.0) > 1e-12) {
        throw DomainError("BaseMeasure: weights must sum to one");
    }
    log_weights_ = weights_.array().log().matrix();
}

BaseMeasure BaseMeasure::ising_pm1() {
    return BaseMeasure(Eigen::Vector2d(-1.0, 1.0), Eigen::Vector2d(0.5, 0.5));
}

BaseMeasure BaseMeasure::ising_tilted(double b) {
    // mu(+1) = e^b / (e^b + e^-b) = 1 / (1 + e^{-2b})
    const double plus = 1.0 / (1.0 + std::exp(-2.0 * b));
    const double minus = 1.0 / (1.0 + std::exp(2.0 * b));
    const double s = plus + minus;
    return BaseMeasure(Eigen::Vector2d(-1.0, 1.0), Eigen::Vector2d(minus / s, plus / s));
}

BaseMeasure BaseMeasure::bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("bernoulli: p must lie in (0, 1)");
    }
    return BaseMeasure(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0 - p, p));
}

BaseMeasure BaseMeasure::three_point(double w) {
    if (!(w > 0.0 && w < 1.0)) {
        throw DomainError("three_point: w must lie in (0, 1)");
    }
    return BaseMeasure(Eigen::Vector3d(-1.0, 0.0, 1.0), Eigen::Vector3d(0.5 * w, 1.0 - w, 0.5 * w));
}

BaseMeasure BaseMeasure::quadrature(const std::string &density, double a, double b, int nodes) {
    const QuadratureRule rule = gauss_legendre(nodes, a, b);
    Eigen::VectorXd w(rule.nodes.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double x = rule.nodes(j);
        double f = 0.0;
        if (density == "uniform") {
            f = 1.0;
        } else if (density == "gaussian") {
            f = std::exp(-0.5 * x * x);
        } else if (density == "semicircle") {
            const double s = (2.0 * x - a - b) / (b - a);
            f = std::sqrt(std::max(0.0, 1.0 - s * s));
        } else {
            throw DomainError("quadrature: unknown density '" + density + "'");
        }
        w(j) = rule.weights(j) * f;
    }
    w /= w.sum();
    return BaseMeasure(rule.nodes, w);
}

double ExtendedReal::value() const {
    if (kind_ != Kind::finite) {
        throw DomainError("ExtendedReal: value() of an infinite quantity");
    }
    return value_;
}

double ExtendedReal::to_double() const {
    switch (kind_) {
    case Kind::pos_inf:
        return kInf;
    case Kind::neg_inf:
        return -kInf;
    default:
        return value_;
    }
}

double log_mgf(const BaseMeasure &mu, double theta) { return tilt(mu, theta).log_norm; }

double tilt_mean(const BaseMeasure &mu, double theta) {
    const Tilt t = tilt(mu, theta);
    return (t.p * mu.points().array()).sum();
}

double tilt_var(const BaseMeasure &mu, double theta) {
    const Tilt t = tilt(mu, theta);
    const double m = (t.p * mu.points().array()).sum();
    return (t.p * (mu.points().array() - m).square()).sum();
}

double tilt_third_cumulant(const BaseMeasure &mu, double theta) {
    const Tilt t = tilt(mu, theta);
    const double m = (t.p * mu.points().array()).sum();
    return (t.p * (mu.points().array() - m).cube()).sum();
}

BaseMeasure tilted_measure(const BaseMeasure &mu, double theta) {
    Tilt t = tilt(mu, theta);
    Eigen::VectorXd w = t.p.matrix();
    w /= w.sum();
    return BaseMeasure(mu.points(), w);
}

ExtendedReal inverse_mean(const BaseMeasure &mu, double x) {
    const double lo_x = mu.support_min();
    const double hi_x = mu.support_max();
    if (!(x >= lo_x - kEndpointSnap && x <= hi_x + kEndpointSnap)) {
        throw DomainError("inverse_mean: x outside the support hull");
    }
    if (x >= hi_x - kEndpointSnap) {
        return ExtendedReal::pos_inf();
    }
    if (x <= lo_x + kEndpointSnap) {
        return ExtendedReal::neg_inf();
    }

    double a = -50.0;
    double b = 50.0;
    while (mean_gap(mu, a, x) > 0.0) {
        a *= 2.0;
    }
    while (mean_gap(mu, b, x) < 0.0) {
        b *= 2.0;
    }

    double theta = std::clamp(0.0, a, b);
    const double ftol = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x));
    for (int iter = 0; iter < 400; ++iter) {
        const double g = mean_gap(mu, theta, x);
        if (std::abs(g) <= ftol) {
            break;
        }
        if (g > 0.0) {
            b = theta;
        } else {
            a = theta;
        }
        if (b - a <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(theta))) {
            break;
        }
        const double slope = tilt_var(mu, theta);
        double next = theta - g / slope;
        if (!(slope > 0.0) || !(next > a && next < b)) {
            next = 0.5 * (a + b);
        }
        theta = next;
    }
    return ExtendedReal::finite(theta);
}

double rate(const BaseMeasure &mu, double theta) {
    const Tilt t = tilt(mu, theta);
    return theta * (t.p * mu.points().array()).sum() - t.log_norm;
}

double rate_at_mean(const BaseMeasure &mu, double x) {
    const ExtendedReal b = inverse_mean(mu, x);
    if (b.is_pos_inf()) {
        return -mu.log_weights()(mu.log_weights().size() - 1);
    }
    if (b.is_neg_inf()) {
        return -mu.log_weights()(0);
    }
    const double theta = b.value();
    return theta * x - log_mgf(mu, theta);
}

bool is_stochastically_nonneg(const BaseMeasure &mu, int grid_size) {
    if (grid_size < 16) {
        throw DomainError("is_stochastically_nonneg: grid_size must be at least 16");
    }
    const double lo = mu.support_min();
    const double hi = mu.support_max();
    if (lo >= 0.0) {
        return true; // -t never attainable
    }
    const double reach = -lo;
    // -t attainable but t not: the inclusion clause fails.
    if (reach > hi + kEndpointSnap) {
        return false;
    }
    for (int k = 1; k <= grid_size; ++k) {
        const double t = reach * static_cast<double>(k) / grid_size;
        if (rate_at_mean(mu, t) > rate_at_mean(mu, -t) + 1e-10) {
            return false;
        }
    }
    return true;
}

bool is_symmetric_about_zero(const BaseMeasure &mu, double tol) {
    const auto n = static_cast<Eigen::Index>(mu.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index m = n - 1 - j;
        if (std::abs(mu.points()(j) + mu.points()(m)) > tol) {
            return false;
        }
        if (std::abs(mu.weights()(j) - mu.weights()(m)) > tol) {
            return false;
        }
    }
    return true;
}

SymmetricTiltWitness nonneg_tilt_of_symmetric(const BaseMeasure &mu) {
    const auto n = static_cast<Eigen::Index>(mu.size());
    const Eigen::VectorXd &x = mu.points();
    const Eigen::VectorXd &lw = mu.log_weights();
    const double scale = std::max(std::abs(x(0)), std::abs(x(n - 1)));
    bool have = false;
    double b = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index m = n - 1 - j;
        if (std::abs(x(j) + x(m)) > 1e-12 * std::max(1.0, scale)) {
            return {};
        }
        if (j >= m) {
            continue;
        }
        // log w_j - log w_m = B (x_j - x_m); the symmetric base cancels.
        const double candidate = (lw(j) - lw(m)) / (x(j) - x(m));
        if (!have) {
            b = candidate;
            have = true;
        } else if (std::abs(candidate - b) > 1e-9 * std::max(1.0, std::abs(b))) {
            return {};
        }
    }
    if (b < -1e-12) {
        return {false, b};
    }
    return {true, std::max(b, 0.0)};
}

bool variance_nonincreasing_on_halfline(const BaseMeasure &mu, double theta_max, int grid_size) {
    double prev = tilt_var(mu, 0.0);
    for (int k = 1; k <= grid_size; ++k) {
        const double v = tilt_var(mu, theta_max * k / grid_size);
        if (v > prev + 1e-13) {
            return false;
        }
        prev = v;
    }
    return true;
}

} // namespace multigibbs
