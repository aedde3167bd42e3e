#pragma once

#include <Eigen/Dense>

#include <cmath>

// Closed-form references computed independently of the solver pipeline: 2x2
// boundary systems for radial and single-mode solutions, and a Bessel series
// for quadrature checks. Tests freeze expected values against these, never
// against solver output.
namespace oracles {

/// alpha + beta*ln r solving the radial problem with constant data:
///   -beta/r1 + gamma*(alpha + beta*ln r1) = g
///    beta/r2 + alpha + beta*ln r2         = h
struct RadialSolution {
    double alpha = 0.0;
    double beta = 0.0;
    double value(double r) const { return alpha + beta * std::log(r); }
    double d_dr(double r) const { return beta / r; }
};

inline RadialSolution radial_robin_solution(double r1, double r2, double gamma, double g,
                                            double h) {
    Eigen::Matrix2d A;
    A << gamma, -1.0 / r1 + gamma * std::log(r1), 1.0, 1.0 / r2 + std::log(r2);
    const Eigen::Vector2d x = A.fullPivLu().solve(Eigen::Vector2d(g, h));
    return {x[0], x[1]};
}

/// Response of the linearized boundary map on azimuthal mode k at a radial
/// state: w = W(r) cos(k theta), W = a r^k + b r^-k (k >= 1) or a + b ln r
/// (k = 0), inner Robin row sourced by -u_star(r1), homogeneous outer Robin
/// row. Returns the measured outer value -W(r2) per unit direction.
inline double elliptic_mode_response(int k, double r1, double r2, double gamma,
                                     double u_star_r1) {
    Eigen::Matrix2d A;
    const Eigen::Vector2d rhs(-u_star_r1, 0.0);
    if (k == 0) {
        A << gamma, -1.0 / r1 + gamma * std::log(r1), 1.0, 1.0 / r2 + std::log(r2);
        const Eigen::Vector2d x = A.fullPivLu().solve(rhs);
        return -(x[0] + x[1] * std::log(r2));
    }
    const double rk1 = std::pow(r1, k);
    const double rk2 = std::pow(r2, k);
    A << -k * rk1 / r1 + gamma * rk1, k / (rk1 * r1) + gamma / rk1, k * rk2 / r2 + rk2,
        -k / (rk2 * r2) + 1.0 / rk2;
    const Eigen::Vector2d x = A.fullPivLu().solve(rhs);
    return -(x[0] * rk2 + x[1] / rk2);
}

/// Modified Bessel function of the first kind, order zero, by its power
/// series; converges fast for the small arguments used in tests.
inline double bessel_I0(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 60; ++m) {
        term *= (x * x / 4.0) / (m * m);
        sum += term;
    }
    return sum;
}

}  // namespace oracles
