#include "ptwalk/walk.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ptwalk::walk {

namespace {
constexpr double kPi = std::numbers::pi;
}

WalkParams::WalkParams(double t1, double t2, double g)
    : theta1(t1), theta2(t2), gamma(std::abs(g)) {
    if (!std::isfinite(t1) || !std::isfinite(t2) || !std::isfinite(g))
        throw Error("WalkParams: non-finite parameter");
}

KGrid KGrid::uniform(int n, bool shifted) {
    if (n < 1) throw Error("KGrid: n must be positive");
    KGrid g;
    g.n = n;
    g.points.resize(n);
    const double delta = 2.0 * kPi / n;
    const double off = shifted ? 0.5 : 0.0;
    for (int j = 0; j < n; ++j) g.points[j] = -kPi + (j + off) * delta;
    return g;
}

CMat coin_operator(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return CMat(2, {cdouble{c, 0.0}, cdouble{0.0, s}, cdouble{0.0, s}, cdouble{c, 0.0}});
}

CMat gain_loss(double gamma) {
    const double e = std::exp(gamma);
    return CMat(2, {cdouble{e, 0.0}, 0.0, 0.0, cdouble{1.0 / e, 0.0}});
}

CMat shift_k(double k) {
    return CMat(2, {std::polar(1.0, k), 0.0, 0.0, std::polar(1.0, -k)});
}

CMat coin_walk_operator(const WalkParams& p, double k) {
    const CMat s = shift_k(k);
    return s * gain_loss(-p.gamma) * coin_operator(p.theta2) * s * gain_loss(p.gamma) *
           coin_operator(p.theta1);
}

double dispersion_a(const WalkParams& p, double k) {
    return std::cos(2.0 * k) * std::cos(p.theta1) * std::cos(p.theta2) -
           std::cosh(2.0 * p.gamma) * std::sin(p.theta1) * std::sin(p.theta2);
}

KEigenSystem eigensystem(const WalkParams& p, double k) {
    const double a = dispersion_a(p, k);
    if (std::abs(a - 1.0) < 1e-10)
        throw ExceptionalPointError("eigensystem: a(k) = 1 within 1e-10 at k = " +
                                        std::to_string(k) + ", gamma = " + std::to_string(p.gamma),
                                    k, p.gamma);

    // Closed-form eigenvalues. The large root is formed without cancellation
    // and the small one through the unit-determinant product rule.
    cdouble lp, lm;
    if (a > 1.0) {
        const double s = std::sqrt(a * a - 1.0);
        lp = cdouble{a + s, 0.0};
        lm = cdouble{1.0 / (a + s), 0.0};
    } else if (a < -1.0) {
        const double s = std::sqrt(a * a - 1.0);
        lp = cdouble{a - s, 0.0};
        lm = cdouble{1.0 / (a - s), 0.0};
    } else {
        const double s = std::sqrt(std::max(0.0, 1.0 - a * a));
        lp = cdouble{a, s};
        lm = cdouble{a, -s};
    }

    const CMat w = coin_walk_operator(p, k);
    numerics::EigenDecomp d;
    try {
        d = numerics::eig(w);
    } catch (const NonDiagonalizableError& e) {
        throw ExceptionalPointError(
            "eigensystem: eigenvectors coalesce at k = " + std::to_string(k) +
                " (condition " + std::to_string(e.condition) + ")",
            k, p.gamma);
    }

    // Pair each closed-form eigenvalue with the nearest numeric one and keep
    // its eigenvector. Mismatch beyond 1e-8 means conventions are broken.
    const double scale = std::max(1.0, std::abs(lp));
    int ip = (std::abs(d.values[0] - lp) <= std::abs(d.values[1] - lp)) ? 0 : 1;
    const int im = 1 - ip;
    if (std::abs(d.values[ip] - lp) > 1e-8 * scale || std::abs(d.values[im] - lm) > 1e-8 * scale)
        throw ComputeError("eigensystem: closed-form eigenvalues disagree with numerics.eig");

    KEigenSystem sys;
    sys.k = k;
    sys.a = a;
    sys.lambda_plus = lp;
    sys.lambda_minus = lm;
    sys.eps_plus = cdouble{0.0, 1.0} * std::log(lp);
    sys.eps_minus = cdouble{0.0, 1.0} * std::log(lm);
    sys.condition = d.condition;
    for (int r = 0; r < 2; ++r) {
        sys.vectors(r, 0) = d.vectors(r, ip);
        sys.vectors(r, 1) = d.vectors(r, im);
    }
    return sys;
}

double exceptional_point(double theta1, double theta2) {
    if (!(theta1 > 0.0 && theta1 < kPi && theta2 > -kPi && theta2 < 0.0))
        throw Error("exceptional_point: theta1 must be in (0, pi), theta2 in (-pi, 0)");
    const double s1s2 = std::sin(theta1) * std::sin(theta2);
    if (s1s2 == 0.0)
        throw NoTransitionError("exceptional_point: sin(theta1) sin(theta2) = 0");
    const double arg = (std::cos(theta1) * std::cos(theta2) - 1.0) / s1s2;
    // Rounding can push the theta2 = -theta1 diagonal (gamma_PT = 0) a few
    // ulps below 1; clamp that sliver, reject anything genuinely smaller.
    if (arg < 1.0 - 1e-12)
        throw NoTransitionError("exceptional_point: acosh argument " + std::to_string(arg) +
                                " below 1, no PT transition at finite gamma");
    return 0.5 * std::acosh(std::max(arg, 1.0));
}

EpGrid ep_contour_grid(double theta1_min, double theta1_max, int n1, double theta2_min,
                       double theta2_max, int n2) {
    if (n1 < 1 || n2 < 1) throw Error("ep_contour_grid: resolution must be positive");
    EpGrid g;
    g.theta1s.resize(n1);
    g.theta2s.resize(n2);
    for (int i = 0; i < n1; ++i)
        g.theta1s[i] = (n1 == 1) ? theta1_min
                                 : theta1_min + (theta1_max - theta1_min) * i / (n1 - 1);
    for (int j = 0; j < n2; ++j)
        g.theta2s[j] = (n2 == 1) ? theta2_min
                                 : theta2_min + (theta2_max - theta2_min) * j / (n2 - 1);
    g.values.assign(static_cast<size_t>(n1) * n2, std::numeric_limits<double>::quiet_NaN());
    g.status.assign(static_cast<size_t>(n1) * n2, EpGrid::CellStatus::NoTransition);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            try {
                g.values[static_cast<size_t>(i) * n2 + j] =
                    exceptional_point(g.theta1s[i], g.theta2s[j]);
                g.status[static_cast<size_t>(i) * n2 + j] = EpGrid::CellStatus::Ok;
            } catch (const Error&) {
                // cell keeps the NoTransition sentinel
            }
        }
    }
    return g;
}

} // namespace ptwalk::walk
