#pragma once

#include "robin/elliptic.hpp"
#include "robin/parabolic.hpp"

#include <Eigen/Core>

namespace robin {

enum class MapKind { Elliptic, Parabolic };

/// Perturbation of the measurable outer quantity, the trace component the
/// outer condition does not prescribe. Robin1 measures the normal derivative,
/// which equals -w on the outer circle by the homogeneous Robin row.
BoundaryTrace measured_trace(const Field& w, OuterBC outer_bc, const AnnulusGrid& grid);

/// Linearized coefficient-to-measurement map applied to one direction d on the
/// inner circle: solve the sensitivity system at (gamma, u_star) and read the
/// measured outer trace.
BoundaryTrace apply_N(const EllipticSolver& solver, const Field& u_star, const BoundaryTrace& d);

/// Parabolic counterpart; w_initial supports separated-variable reference
/// solutions, which start from a nonzero state (see ParabolicSolver).
TimeTrace apply_N(const ParabolicSolver& solver, const TimeField& u_star, const BoundaryTrace& d,
                  const Field* w_initial = nullptr);

/// Time-major flattening (node n, angle j) -> n * n_theta + j.
Eigen::VectorXd stack(const TimeTrace& trace);
TimeTrace unstack(const Eigen::VectorXd& v, Boundary boundary, int n_theta, int n_time);

struct LinearizedMap {
    MapKind kind = MapKind::Elliptic;
    Eigen::MatrixXd matrix;  // column j = map applied to the j-th angular unit direction
    RobinCoefficient gamma_star;
    int n_theta = 0;
    int n_time = 0;  // time nodes per column for the parabolic kind, 0 otherwise
};

LinearizedMap assemble_N_matrix(const EllipticSolver& solver, const Field& u_star);
LinearizedMap assemble_N_matrix(const ParabolicSolver& solver, const TimeField& u_star);

struct SolveNResult {
    Eigen::VectorXd d;
    bool rank_deficient = false;
    int rank = 0;
    double smallest_singular_value = 0.0;
    double largest_singular_value = 0.0;
};

/// Least squares in d: minimizes |N d - phi|^2 + reg |d|^2 via SVD. With
/// reg = 0 the truncated pseudoinverse is used and near-null singular values
/// (below 1e-10 of the largest) are reported, not inverted.
SolveNResult solve_N(const LinearizedMap& map, const Eigen::VectorXd& phi, double reg);

struct ConditioningReport {
    Eigen::VectorXd singular_values;  // descending
    double smallest = 0.0;
    double largest = 0.0;
    /// Response magnitude |N e_k| / |e_k| for the azimuthal mode pair cos/sin
    /// of frequency k (max of the two), k = 0 .. n_theta/2.
    Eigen::VectorXd mode_response;
};

ConditioningReport conditioning_report(const LinearizedMap& map);

}  // namespace robin
