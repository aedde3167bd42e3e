#pragma once

#include "robin/geometry.hpp"

#include <Eigen/Core>

namespace robin {

/// Grid function sampled at the polar nodes; row i = radius, column j = angle.
struct Field {
    Eigen::MatrixXd values;  // n_r x n_theta

    static Field zero(const AnnulusGrid& grid) {
        return {Eigen::MatrixXd::Zero(grid.n_r, grid.n_theta)};
    }
    static Field constant(const AnnulusGrid& grid, double value) {
        return {Eigen::MatrixXd::Constant(grid.n_r, grid.n_theta, value)};
    }

    int n_r() const { return static_cast<int>(values.rows()); }
    int n_theta() const { return static_cast<int>(values.cols()); }

    /// Node-major vector (index i*n_theta + j), the ordering of the linear systems.
    Eigen::VectorXd flattened() const;
    static Field from_flat(const Eigen::VectorXd& v, const AnnulusGrid& grid);
};

/// Discrete L2(Omega) norm with area weights r*h_r*h_theta, trapezoidal in r
/// at the two radial end rows.
double field_norm_L2(const Field& field, const AnnulusGrid& grid);

/// Extracts the boundary row; exact, no interpolation.
BoundaryTrace trace(const Field& field, Boundary boundary);

/// Outward normal derivative on a boundary circle by a second-order one-sided
/// radial difference. The outward normal is -d/dr on Gamma_i and +d/dr on Gamma_a.
BoundaryTrace normal_derivative(const Field& field, Boundary boundary, const AnnulusGrid& grid);

/// Third-order one-sided variant. Independent of the stencil the Robin rows
/// use, so it can audit a boundary condition on a solved field instead of
/// reproducing the solver's own residual.
BoundaryTrace normal_derivative_cubic(const Field& field, Boundary boundary,
                                      const AnnulusGrid& grid);

/// The radial harmonic w = c1 + c2*ln r sampled at every node.
Field radial_harmonic_oracle(double c1, double c2, const AnnulusGrid& grid);

}  // namespace robin
