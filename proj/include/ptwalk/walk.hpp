#pragma once

#include <vector>

#include "ptwalk/numerics.hpp"

namespace ptwalk::walk {

using numerics::CMat;
using numerics::cdouble;

/// Coin angles (radians) and non-Hermiticity strength of a two-coin walk.
/// gamma is stored as |gamma|: the spectrum is even in gamma since the two
/// gain-loss legs are mutual inverses.
struct WalkParams {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double gamma = 0.0;

    WalkParams() = default;
    WalkParams(double t1, double t2, double g);
};

/// Uniform momentum grid on [-pi, pi). With `shifted` the points sit half a
/// step off k = 0 and k = +-pi, avoiding the a(k) = 1 locus at gamma_PT.
struct KGrid {
    int n = 0;
    std::vector<double> points;

    static KGrid uniform(int n, bool shifted = false);
};

/// Per-momentum eigendata of the coin-space walk operator.
/// lambda_plus is first under the ordering of numerics::EigenDecomp
/// (modulus descending, then real, then imaginary); eps = i log(lambda) with
/// the principal branch, so Im(eps_plus) = log|lambda_plus| >= 0.
struct KEigenSystem {
    double k = 0.0;
    cdouble lambda_plus, lambda_minus;
    cdouble eps_plus, eps_minus;
    CMat vectors{2};   // columns: phi_plus, phi_minus, unit norm
    double a = 0.0;
    double condition = 1.0;
};

/// C(theta) = [[cos, i sin], [i sin, cos]]; unitary, symmetric, C* = C^-1.
CMat coin_operator(double theta);

/// diag(e^gamma, e^-gamma); gain_loss(g) * gain_loss(-g) = I.
CMat gain_loss(double gamma);

/// Momentum-space shift diag(e^ik, e^-ik).
CMat shift_k(double k);

/// One-step coin-space operator S(k) G^-1 C(theta2) S(k) G C(theta1).
/// Unit determinant for all parameters; unitary at gamma = 0.
CMat coin_walk_operator(const WalkParams& p, double k);

/// a(k) = cos(2k) cos(theta1) cos(theta2) - cosh(2 gamma) sin(theta1) sin(theta2).
double dispersion_a(const WalkParams& p, double k);

/// Closed-form eigenvalues lambda = a +- sqrt(a^2 - 1) paired with the
/// numerically computed eigenvectors of the walk operator, cross-checked
/// against numerics::eig to 1e-8.
/// Throws ExceptionalPointError when |a - 1| < 1e-10.
KEigenSystem eigensystem(const WalkParams& p, double k);

/// gamma_PT = acosh((cos t1 cos t2 - 1) / (sin t1 sin t2)) / 2 on the
/// domain theta1 in (0, pi), theta2 in (-pi, 0).
/// Throws NoTransitionError when sin t1 sin t2 = 0 or the argument is < 1.
double exceptional_point(double theta1, double theta2);

/// Grid of gamma_PT values over rectangular theta ranges. Cells where no
/// transition exists carry status NoTransition and a NaN value.
struct EpGrid {
    enum class CellStatus : unsigned char { Ok, NoTransition };
    std::vector<double> theta1s;
    std::vector<double> theta2s;
    std::vector<double> values;       // row-major, theta1 rows
    std::vector<CellStatus> status;
};

EpGrid ep_contour_grid(double theta1_min, double theta1_max, int n1,
                       double theta2_min, double theta2_max, int n2);

} // namespace ptwalk::walk
