#pragma once

#include "robin/elliptic.hpp"
#include "robin/field.hpp"
#include "robin/geometry.hpp"
#include "robin/robin_coefficient.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <vector>

namespace robin {

/// Uniform partition of [0, T] into n_t steps, n_t + 1 nodes.
struct TimeGrid {
    double T = 0.0;
    int n_t = 0;
    double dt = 0.0;
    std::vector<double> t_nodes;
};

TimeGrid build_time_grid(double T, int n_t);

/// Snapshot sequence indexed by the time nodes; snapshots[0] is the initial state.
struct TimeField {
    std::vector<Field> snapshots;

    static TimeField zero(const AnnulusGrid& grid, const TimeGrid& tg);
    int n_time() const { return static_cast<int>(snapshots.size()); }
};

/// Boundary trace sequence indexed by the time nodes.
struct TimeTrace {
    Boundary boundary = Boundary::Inner;
    std::vector<Eigen::VectorXd> snapshots;

    static TimeTrace zero(Boundary b, int n_theta, const TimeGrid& tg);
    static TimeTrace constant(Boundary b, int n_theta, const TimeGrid& tg, double value);
    int n_time() const { return static_cast<int>(snapshots.size()); }
};

enum class Scheme { ImplicitEuler, CrankNicolson };

/// Heat flow du/dt = r^2 * Laplace(u) on the annulus with Robin data
/// -du/dr + gamma u = g on the inner circle and du/dr + u = h on the outer one.
struct ParabolicProblem {
    AnnulusGrid grid;
    RobinCoefficient gamma;
    TimeTrace g;
    TimeTrace h;
    TimeGrid tg;
    Scheme scheme = Scheme::ImplicitEuler;
    Field initial;  // empty means zero, the physical initial state
};

/// Factorizes the implicit step matrix once; marching reuses it for every step
/// and for every boundary data set against the same gamma and time grid.
class ParabolicSolver {
  public:
    explicit ParabolicSolver(ParabolicProblem problem, double tol = 1e-10);

    TimeField solve() const;

    /// Linearization of the forward map in the coefficient direction p: same
    /// equation, inner data -p * u|_inner per time node, homogeneous outer data,
    /// zero initial state. w_initial overrides the initial state for solves
    /// against separated-variable reference solutions, which start nonzero.
    TimeField solve_sensitivity(const TimeField& u, const BoundaryTrace& p,
                                const Field* w_initial = nullptr) const;

    /// Outer-boundary traces of sensitivity solutions for several directions at
    /// once, marched as a single multi-column system. Column c of the result
    /// blocks is the trace for directions.col(c); rows stack time-major
    /// (node n, angle j) -> n * n_theta + j.
    Eigen::MatrixXd sensitivity_outer_traces(const TimeField& u,
                                             const Eigen::MatrixXd& directions) const;

    const ParabolicProblem& problem() const { return problem_; }
    const AnnulusGrid& grid() const { return problem_.grid; }
    const TimeGrid& time_grid() const { return problem_.tg; }

  private:
    ParabolicProblem problem_;
    double tol_;
    double theta_;  // 1 implicit Euler, 1/2 Crank-Nicolson
    Eigen::SparseMatrix<double> P_;  // implicit step matrix
    Eigen::SparseMatrix<double> E_;  // explicit part applied to the previous state
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

TimeField solve_parabolic(const ParabolicProblem& problem);

TimeField solve_parabolic_sensitivity(const ParabolicProblem& problem, const TimeField& u,
                                      const BoundaryTrace& p, const Field* w_initial = nullptr);

/// exp(t) written as the separated-solution factor t*e^(t - ln t); the right
/// limit at t = 0 is 1.
double temporal_factor(double t);

/// F(t) * (c1*r + c2/r) at every node and time; c1*r + c2/r solves the Euler
/// equation r^2 V'' + r V' - V = 0, so the product solves the heat flow above.
TimeField radial_separated_oracle(double c1, double c2, const AnnulusGrid& grid,
                                  const TimeGrid& tg);

/// Constant coefficient direction whose sensitivity solution is the separated
/// reference F(t) * (c1*r + 1/r) with c1 = (1 - r2) / (r2^2 (1 + r2)).
double surjectivity_direction_parabolic(double r1, double r2, double gamma_star_r1, double v_r1);

/// L2(0,T; L2(boundary)) norm: trapezoidal in time over squared boundary norms.
double time_boundary_norm(const TimeTrace& trace, const AnnulusGrid& grid, const TimeGrid& tg);

/// Robin data reproducing F(t) * (c1*r + c2/r): inner -d/dr + gamma, outer d/dr + 1.
TimeTrace manufactured_inner_data_parabolic(double c1, double c2, const RobinCoefficient& gamma,
                                            const AnnulusGrid& grid, const TimeGrid& tg);
TimeTrace manufactured_outer_data_parabolic(double c1, double c2, const AnnulusGrid& grid,
                                            const TimeGrid& tg);

}  // namespace robin
