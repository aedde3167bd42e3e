#pragma once

#include <Eigen/Core>

#include <vector>

namespace robin {

enum class Boundary { Inner, Outer };

/// Uniform polar tensor grid on the annulus r1 <= r <= r2, 0 <= theta < 2*pi.
///
/// Radial row 0 is the inner boundary Gamma_i, row n_r-1 the outer boundary
/// Gamma_a. The angular direction is periodic: column n_theta wraps to 0,
/// and the seam carries no duplicate node.
struct AnnulusGrid {
    double r1 = 0.0;
    double r2 = 0.0;
    int n_r = 0;
    int n_theta = 0;
    double h_r = 0.0;
    double h_theta = 0.0;
    std::vector<double> r_nodes;
    std::vector<double> theta_nodes;

    int size() const { return n_r * n_theta; }

    /// Flattened node index; j is wrapped modulo n_theta.
    int index(int i, int j) const {
        int jw = j % n_theta;
        if (jw < 0) jw += n_theta;
        return i * n_theta + jw;
    }

    int boundary_row(Boundary b) const { return b == Boundary::Inner ? 0 : n_r - 1; }
    double boundary_radius(Boundary b) const { return b == Boundary::Inner ? r1 : r2; }
};

AnnulusGrid build_annulus(double r1, double r2, int n_r, int n_theta);

/// Function values on one boundary circle, one entry per angular node.
struct BoundaryTrace {
    Boundary boundary = Boundary::Inner;
    Eigen::VectorXd values;

    static BoundaryTrace zero(Boundary b, int n_theta) {
        return {b, Eigen::VectorXd::Zero(n_theta)};
    }
    static BoundaryTrace constant(Boundary b, int n_theta, double value) {
        return {b, Eigen::VectorXd::Constant(n_theta, value)};
    }
};

/// Discrete L2(Gamma) norm, rectangle rule on the periodic circle:
/// sqrt(sum_j r_Gamma * h_theta * v_j^2).
double boundary_norm(const BoundaryTrace& trace, const AnnulusGrid& grid);

}  // namespace robin
