#pragma once

#include "robin/field.hpp"
#include "robin/geometry.hpp"
#include "robin/robin_coefficient.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace robin {

/// Condition imposed on the outer (accessible) boundary. Robin1 is the model's
/// condition du/dn + u = h; Neumann and Dirichlet exist for the boundary
/// condition comparison harness only.
enum class OuterBC { Robin1, Neumann, Dirichlet };

/// -Laplace(u) = f in the annulus, du/dn + gamma*u = g on Gamma_i, and the
/// outer_bc row (default du/dn + u = h) on Gamma_a.
struct EllipticProblem {
    AnnulusGrid grid;
    RobinCoefficient gamma;
    Field f;
    BoundaryTrace g;
    BoundaryTrace h;
    OuterBC outer_bc = OuterBC::Robin1;
};

struct SparseSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
};

/// Assembles the full linear system: 5-point polar Laplacian rows at interior
/// nodes, second-order one-sided Robin rows on both boundaries (outward normal
/// -d/dr on Gamma_i, +d/dr on Gamma_a).
SparseSystem assemble(const EllipticProblem& problem);

/// Holds the factorized operator for one problem; the forward and sensitivity
/// systems share it (same matrix, different right-hand sides).
class EllipticSolver {
public:
    explicit EllipticSolver(EllipticProblem problem, double tol = 1e-10);

    Field solve() const;

    /// Linearization in the coefficient: -Laplace(w) = 0, with boundary source
    /// -d*u on Gamma_i and the homogeneous outer row. u must be the forward
    /// solution of this problem.
    Field solve_sensitivity(const Field& u, const BoundaryTrace& d) const;

    /// Solves A x = rhs against the stored factorization, with residual check.
    Eigen::VectorXd solve_rhs(const Eigen::VectorXd& rhs) const;
    /// Column-wise multi right-hand-side variant.
    Eigen::MatrixXd solve_rhs(const Eigen::MatrixXd& rhs) const;

    const EllipticProblem& problem() const { return problem_; }
    const AnnulusGrid& grid() const { return problem_.grid; }
    double tolerance() const { return tol_; }

private:
    EllipticProblem problem_;
    double tol_;
    Eigen::SparseMatrix<double> A_;
    Eigen::VectorXd b_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

Field solve_elliptic(const EllipticProblem& problem);
Field solve_sensitivity(const EllipticProblem& problem, const Field& u, const BoundaryTrace& d);

/// The scalar coefficient direction that realizes the radial construction
/// w = 1/r2 + ln r2 - ln r on the inner boundary:
///   d = -1/(r1*u*(r1)) - (gamma*(r1)/u*(r1)) * (1/r2 + ln r2 - ln r1).
/// Pure arithmetic; u_star_r1 = 0 raises an identifiability error.
double surjectivity_direction_elliptic(double r1, double r2, double gamma_star_r1,
                                       double u_star_r1);

/// Boundary data consistent with u = c1 + c2*ln r and f = 0, so the solver can
/// be checked against the exact radial solution.
BoundaryTrace manufactured_inner_data(double c1, double c2, const RobinCoefficient& gamma,
                                      const AnnulusGrid& grid);
BoundaryTrace manufactured_outer_data(double c1, double c2, const AnnulusGrid& grid,
                                      OuterBC outer_bc = OuterBC::Robin1);

}  // namespace robin
