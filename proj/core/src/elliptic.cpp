#include "robin/elliptic.hpp"

#include "robin/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace robin {

namespace {

std::string fmt_residual(double res) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", res);
    return buf;
}

void validate(const EllipticProblem& p) {
    const auto& grid = p.grid;
    if (grid.n_r < 3 || grid.n_theta < 4)
        throw InvalidArgument("elliptic: grid is not a valid annulus discretization");
    if (p.gamma.size() != grid.n_theta)
        throw InvalidArgument("elliptic: gamma length does not match n_theta");
    if (!p.gamma.feasible())
        throw InvalidArgument("elliptic: gamma leaves the feasible box");
    if (p.f.n_r() != grid.n_r || p.f.n_theta() != grid.n_theta)
        throw InvalidArgument("elliptic: source field shape does not match grid");
    if (p.g.boundary != Boundary::Inner || p.g.values.size() != grid.n_theta)
        throw InvalidArgument("elliptic: g must be an inner-boundary trace of length n_theta");
    if (p.h.boundary != Boundary::Outer || p.h.values.size() != grid.n_theta)
        throw InvalidArgument("elliptic: h must be an outer-boundary trace of length n_theta");
}

double relative_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
    const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
    return (A * x - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

SparseSystem assemble(const EllipticProblem& p) {
    validate(p);
    const auto& grid = p.grid;
    const int n = grid.size();
    const double hr = grid.h_r;
    const double ht = grid.h_theta;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(5 * n));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

    // Interior rows: -Laplace in polar coordinates,
    // -(u_rr + u_r/r + u_tt/r^2).
    for (int i = 1; i < grid.n_r - 1; ++i) {
        const double r = grid.r_nodes[i];
        const double c_center = 2.0 / (hr * hr) + 2.0 / (ht * ht * r * r);
        const double c_rp = -1.0 / (hr * hr) - 1.0 / (2.0 * hr * r);
        const double c_rm = -1.0 / (hr * hr) + 1.0 / (2.0 * hr * r);
        const double c_t = -1.0 / (ht * ht * r * r);
        for (int j = 0; j < grid.n_theta; ++j) {
            const int row = grid.index(i, j);
            trips.emplace_back(row, row, c_center);
            trips.emplace_back(row, grid.index(i + 1, j), c_rp);
            trips.emplace_back(row, grid.index(i - 1, j), c_rm);
            trips.emplace_back(row, grid.index(i, j + 1), c_t);
            trips.emplace_back(row, grid.index(i, j - 1), c_t);
            b[row] = p.f.values(i, j);
        }
    }

    // Gamma_i rows: -du/dr + gamma*u = g, one-sided 3-point d/dr.
    const double s = 1.0 / (2.0 * hr);
    for (int j = 0; j < grid.n_theta; ++j) {
        const int row = grid.index(0, j);
        trips.emplace_back(row, row, 3.0 * s + p.gamma.values[j]);
        trips.emplace_back(row, grid.index(1, j), -4.0 * s);
        trips.emplace_back(row, grid.index(2, j), 1.0 * s);
        b[row] = p.g.values[j];
    }

    // Gamma_a rows per outer_bc.
    const int m = grid.n_r - 1;
    for (int j = 0; j < grid.n_theta; ++j) {
        const int row = grid.index(m, j);
        switch (p.outer_bc) {
            case OuterBC::Robin1:
                trips.emplace_back(row, row, 3.0 * s + 1.0);
                trips.emplace_back(row, grid.index(m - 1, j), -4.0 * s);
                trips.emplace_back(row, grid.index(m - 2, j), 1.0 * s);
                break;
            case OuterBC::Neumann:
                trips.emplace_back(row, row, 3.0 * s);
                trips.emplace_back(row, grid.index(m - 1, j), -4.0 * s);
                trips.emplace_back(row, grid.index(m - 2, j), 1.0 * s);
                break;
            case OuterBC::Dirichlet:
                trips.emplace_back(row, row, 1.0);
                break;
        }
        b[row] = p.h.values[j];
    }

    SparseSystem sys;
    sys.A.resize(n, n);
    sys.A.setFromTriplets(trips.begin(), trips.end());
    sys.A.makeCompressed();
    sys.b = std::move(b);
    return sys;
}

EllipticSolver::EllipticSolver(EllipticProblem problem, double tol)
    : problem_(std::move(problem)), tol_(tol) {
    SparseSystem sys = assemble(problem_);
    A_ = std::move(sys.A);
    b_ = std::move(sys.b);
    lu_.compute(A_);
    if (lu_.info() != Eigen::Success)
        throw SolverError("elliptic: sparse LU factorization failed (singular matrix?)",
                          std::numeric_limits<double>::infinity());
}

Eigen::VectorXd EllipticSolver::solve_rhs(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != A_.rows())
        throw InvalidArgument("elliptic: rhs length does not match the assembled system");
    Eigen::VectorXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success)
        throw SolverError("elliptic: back-substitution failed",
                          std::numeric_limits<double>::infinity());
    const double res = relative_residual(A_, x, rhs);
    if (!(res <= tol_))
        throw SolverError("elliptic: residual " + fmt_residual(res) + " exceeds tolerance", res);
    return x;
}

Eigen::MatrixXd EllipticSolver::solve_rhs(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != A_.rows())
        throw InvalidArgument("elliptic: rhs rows do not match the assembled system");
    Eigen::MatrixXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success)
        throw SolverError("elliptic: back-substitution failed",
                          std::numeric_limits<double>::infinity());
    for (int c = 0; c < rhs.cols(); ++c) {
        const double res = relative_residual(A_, x.col(c), rhs.col(c));
        if (!(res <= tol_))
            throw SolverError("elliptic: residual " + fmt_residual(res) +
                                  " exceeds tolerance in column " + std::to_string(c),
                              res);
    }
    return x;
}

Field EllipticSolver::solve() const { return Field::from_flat(solve_rhs(b_), problem_.grid); }

Field EllipticSolver::solve_sensitivity(const Field& u, const BoundaryTrace& d) const {
    const auto& grid = problem_.grid;
    if (d.boundary != Boundary::Inner || d.values.size() != grid.n_theta)
        throw InvalidArgument("solve_sensitivity: d must live on the inner boundary");
    if (u.n_r() != grid.n_r || u.n_theta() != grid.n_theta)
        throw InvalidArgument("solve_sensitivity: u shape does not match grid");

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(grid.size());
    for (int j = 0; j < grid.n_theta; ++j)
        rhs[grid.index(0, j)] = -d.values[j] * u.values(0, j);
    return Field::from_flat(solve_rhs(rhs), grid);
}

Field solve_elliptic(const EllipticProblem& problem) { return EllipticSolver(problem).solve(); }

Field solve_sensitivity(const EllipticProblem& problem, const Field& u, const BoundaryTrace& d) {
    return EllipticSolver(problem).solve_sensitivity(u, d);
}

double surjectivity_direction_elliptic(double r1, double r2, double gamma_star_r1,
                                       double u_star_r1) {
    if (u_star_r1 == 0.0)
        throw IdentifiabilityError(
            "surjectivity_direction_elliptic: u*(r1) = 0, coefficient not identifiable");
    return -1.0 / (r1 * u_star_r1) -
           (gamma_star_r1 / u_star_r1) * (1.0 / r2 + std::log(r2) - std::log(r1));
}

BoundaryTrace manufactured_inner_data(double c1, double c2, const RobinCoefficient& gamma,
                                      const AnnulusGrid& grid) {
    // -du/dr + gamma*u at r1 for u = c1 + c2*ln r.
    const double u_r1 = c1 + c2 * std::log(grid.r1);
    BoundaryTrace g = BoundaryTrace::zero(Boundary::Inner, grid.n_theta);
    for (int j = 0; j < grid.n_theta; ++j)
        g.values[j] = -c2 / grid.r1 + gamma.values[j] * u_r1;
    return g;
}

BoundaryTrace manufactured_outer_data(double c1, double c2, const AnnulusGrid& grid,
                                      OuterBC outer_bc) {
    const double u_r2 = c1 + c2 * std::log(grid.r2);
    double h = 0.0;
    switch (outer_bc) {
        case OuterBC::Robin1: h = c2 / grid.r2 + u_r2; break;
        case OuterBC::Neumann: h = c2 / grid.r2; break;
        case OuterBC::Dirichlet: h = u_r2; break;
    }
    return BoundaryTrace::constant(Boundary::Outer, grid.n_theta, h);
}

}  // namespace robin
