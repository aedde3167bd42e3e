#include "robin/parabolic.hpp"

#include "robin/errors.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace robin {

TimeGrid build_time_grid(double T, int n_t) {
    if (!(T > 0.0)) throw InvalidArgument("build_time_grid: T must be positive");
    if (n_t < 1) throw InvalidArgument("build_time_grid: n_t must be at least 1");
    TimeGrid tg;
    tg.T = T;
    tg.n_t = n_t;
    tg.dt = T / n_t;
    tg.t_nodes.resize(n_t + 1);
    for (int n = 0; n <= n_t; ++n) tg.t_nodes[n] = (n == n_t) ? T : n * tg.dt;
    return tg;
}

TimeField TimeField::zero(const AnnulusGrid& grid, const TimeGrid& tg) {
    TimeField tf;
    tf.snapshots.assign(tg.n_t + 1, Field::zero(grid));
    return tf;
}

TimeTrace TimeTrace::zero(Boundary b, int n_theta, const TimeGrid& tg) {
    TimeTrace tt;
    tt.boundary = b;
    tt.snapshots.assign(tg.n_t + 1, Eigen::VectorXd::Zero(n_theta));
    return tt;
}

TimeTrace TimeTrace::constant(Boundary b, int n_theta, const TimeGrid& tg, double value) {
    TimeTrace tt;
    tt.boundary = b;
    tt.snapshots.assign(tg.n_t + 1, Eigen::VectorXd::Constant(n_theta, value));
    return tt;
}

namespace {

std::string fmt_residual(double res) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", res);
    return buf;
}

void validate(const ParabolicProblem& p) {
    const auto& grid = p.grid;
    if (grid.n_r < 3 || grid.n_theta < 4)
        throw InvalidArgument("parabolic: grid is not a valid annulus discretization");
    if (p.tg.n_t < 1 || !(p.tg.dt > 0.0))
        throw InvalidArgument("parabolic: invalid time grid");
    if (p.gamma.size() != grid.n_theta)
        throw InvalidArgument("parabolic: gamma length does not match n_theta");
    if (!p.gamma.feasible())
        throw InvalidArgument("parabolic: gamma leaves the feasible box");
    const int n_nodes = p.tg.n_t + 1;
    auto check_trace = [&](const TimeTrace& tt, Boundary b, const char* name) {
        if (tt.boundary != b)
            throw InvalidArgument(std::string("parabolic: ") + name + " is on the wrong boundary");
        if (tt.n_time() != n_nodes)
            throw InvalidArgument(std::string("parabolic: ") + name +
                                  " snapshot count does not match the time grid");
        for (const auto& v : tt.snapshots)
            if (v.size() != grid.n_theta)
                throw InvalidArgument(std::string("parabolic: ") + name +
                                      " snapshot length does not match n_theta");
    };
    check_trace(p.g, Boundary::Inner, "g");
    check_trace(p.h, Boundary::Outer, "h");
    if (p.initial.values.size() != 0 &&
        (p.initial.n_r() != grid.n_r || p.initial.n_theta() != grid.n_theta))
        throw InvalidArgument("parabolic: initial field shape does not match grid");
}

}  // namespace

ParabolicSolver::ParabolicSolver(ParabolicProblem problem, double tol)
    : problem_(std::move(problem)), tol_(tol) {
    validate(problem_);
    theta_ = problem_.scheme == Scheme::ImplicitEuler ? 1.0 : 0.5;

    const auto& grid = problem_.grid;
    const int n = grid.size();
    const double dt = problem_.tg.dt;

    EllipticProblem ep;
    ep.grid = grid;
    ep.gamma = problem_.gamma;
    ep.f = Field::zero(grid);
    ep.g = BoundaryTrace::zero(Boundary::Inner, grid.n_theta);
    ep.h = BoundaryTrace::zero(Boundary::Outer, grid.n_theta);
    ep.outer_bc = OuterBC::Robin1;
    const SparseSystem sys = assemble(ep);

    // P = I + theta*dt*r^2*A at interior rows, Robin rows verbatim;
    // E = I - (1-theta)*dt*r^2*A at interior rows, zero at boundary rows.
    std::vector<Eigen::Triplet<double>> pt, et;
    pt.reserve(static_cast<std::size_t>(6 * n));
    et.reserve(static_cast<std::size_t>(6 * n));
    for (int k = 0; k < sys.A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it) {
            const int row = static_cast<int>(it.row());
            const int i = row / grid.n_theta;
            if (i == 0 || i == grid.n_r - 1) {
                pt.emplace_back(row, static_cast<int>(it.col()), it.value());
            } else {
                const double r = grid.r_nodes[i];
                const double lv = r * r * it.value();
                pt.emplace_back(row, static_cast<int>(it.col()), theta_ * dt * lv);
                if (theta_ < 1.0)
                    et.emplace_back(row, static_cast<int>(it.col()), -(1.0 - theta_) * dt * lv);
            }
        }
    }
    for (int i = 1; i < grid.n_r - 1; ++i)
        for (int j = 0; j < grid.n_theta; ++j) {
            const int row = grid.index(i, j);
            pt.emplace_back(row, row, 1.0);
            et.emplace_back(row, row, 1.0);
        }

    P_.resize(n, n);
    P_.setFromTriplets(pt.begin(), pt.end());
    P_.makeCompressed();
    E_.resize(n, n);
    E_.setFromTriplets(et.begin(), et.end());
    E_.makeCompressed();

    lu_.compute(P_);
    if (lu_.info() != Eigen::Success)
        throw SolverError("parabolic: step matrix factorization failed",
                          std::numeric_limits<double>::infinity());
}

namespace {

double step_residual(const Eigen::SparseMatrix<double>& P, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& R) {
    double worst = 0.0;
    const Eigen::MatrixXd D = P * X - R;
    for (int c = 0; c < R.cols(); ++c) {
        const double scale = std::max(R.col(c).lpNorm<Eigen::Infinity>(), 1e-300);
        worst = std::max(worst, D.col(c).lpNorm<Eigen::Infinity>() / scale);
    }
    return worst;
}

}  // namespace

namespace {

/// Generic theta-scheme march shared by all solve entry points. g_nodes and
/// h_nodes hold boundary data columns per time node; emit receives every state
/// including the initial one.
void march_collect(const Eigen::SparseMatrix<double>& P, const Eigen::SparseMatrix<double>& E,
                   const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu, const AnnulusGrid& grid,
                   const TimeGrid& tg, double tol, const Eigen::MatrixXd& X0,
                   const std::vector<Eigen::MatrixXd>& g_nodes,
                   const std::vector<Eigen::MatrixXd>& h_nodes,
                   const std::function<void(int, const Eigen::MatrixXd&)>& emit) {
    const int nt = grid.n_theta;
    const int inner0 = grid.index(0, 0);
    const int outer0 = grid.index(grid.n_r - 1, 0);

    Eigen::MatrixXd X = X0;
    emit(0, X);
    for (int n = 0; n < tg.n_t; ++n) {
        Eigen::MatrixXd R = E * X;
        R.middleRows(inner0, nt) = g_nodes[n + 1];
        R.middleRows(outer0, nt) = h_nodes[n + 1];
        X = lu.solve(R);
        if (lu.info() != Eigen::Success)
            throw SolverError("parabolic: back-substitution failed at step " + std::to_string(n + 1),
                              std::numeric_limits<double>::infinity(), n + 1);
        const double res = step_residual(P, X, R);
        if (!(res <= tol))
            throw SolverError("parabolic: step residual " + fmt_residual(res) +
                                  " exceeds tolerance",
                              res, n + 1);
        emit(n + 1, X);
    }
}

}  // namespace

TimeField ParabolicSolver::solve() const {
    const auto& grid = problem_.grid;
    const auto& tg = problem_.tg;
    const int nodes = tg.n_t + 1;

    std::vector<Eigen::MatrixXd> g_nodes(nodes), h_nodes(nodes);
    for (int n = 0; n < nodes; ++n) {
        g_nodes[n] = problem_.g.snapshots[n];
        h_nodes[n] = problem_.h.snapshots[n];
    }
    Eigen::MatrixXd X0 = problem_.initial.values.size() == 0
                             ? Eigen::MatrixXd::Zero(grid.size(), 1)
                             : Eigen::MatrixXd(problem_.initial.flattened());

    TimeField out;
    out.snapshots.reserve(nodes);
    march_collect(P_, E_, lu_, grid, tg, tol_, X0, g_nodes, h_nodes,
                  [&](int, const Eigen::MatrixXd& X) {
                      out.snapshots.push_back(Field::from_flat(X.col(0), grid));
                  });
    return out;
}

TimeField ParabolicSolver::solve_sensitivity(const TimeField& u, const BoundaryTrace& p,
                                             const Field* w_initial) const {
    const auto& grid = problem_.grid;
    const auto& tg = problem_.tg;
    const int nodes = tg.n_t + 1;
    if (p.boundary != Boundary::Inner || p.values.size() != grid.n_theta)
        throw InvalidArgument("solve_sensitivity: p must live on the inner boundary");
    if (u.n_time() != nodes)
        throw InvalidArgument("solve_sensitivity: u snapshot count does not match the time grid");

    std::vector<Eigen::MatrixXd> g_nodes(nodes), h_nodes(nodes);
    for (int n = 0; n < nodes; ++n) {
        Eigen::VectorXd gn(grid.n_theta);
        for (int j = 0; j < grid.n_theta; ++j) gn[j] = -p.values[j] * u.snapshots[n].values(0, j);
        g_nodes[n] = gn;
        h_nodes[n] = Eigen::VectorXd::Zero(grid.n_theta);
    }
    Eigen::MatrixXd X0 = w_initial == nullptr ? Eigen::MatrixXd::Zero(grid.size(), 1)
                                              : Eigen::MatrixXd(w_initial->flattened());

    TimeField out;
    out.snapshots.reserve(nodes);
    march_collect(P_, E_, lu_, grid, tg, tol_, X0, g_nodes, h_nodes,
                  [&](int, const Eigen::MatrixXd& X) {
                      out.snapshots.push_back(Field::from_flat(X.col(0), grid));
                  });
    return out;
}

Eigen::MatrixXd ParabolicSolver::sensitivity_outer_traces(const TimeField& u,
                                                          const Eigen::MatrixXd& directions) const {
    const auto& grid = problem_.grid;
    const auto& tg = problem_.tg;
    const int nodes = tg.n_t + 1;
    const int m = static_cast<int>(directions.cols());
    if (directions.rows() != grid.n_theta)
        throw InvalidArgument("sensitivity_outer_traces: directions must have n_theta rows");
    if (u.n_time() != nodes)
        throw InvalidArgument(
            "sensitivity_outer_traces: u snapshot count does not match the time grid");

    std::vector<Eigen::MatrixXd> g_nodes(nodes), h_nodes(nodes);
    for (int n = 0; n < nodes; ++n) {
        Eigen::MatrixXd gn(grid.n_theta, m);
        for (int j = 0; j < grid.n_theta; ++j)
            gn.row(j) = -u.snapshots[n].values(0, j) * directions.row(j);
        g_nodes[n] = std::move(gn);
        h_nodes[n] = Eigen::MatrixXd::Zero(grid.n_theta, m);
    }

    Eigen::MatrixXd stacked(nodes * grid.n_theta, m);
    march_collect(P_, E_, lu_, grid, tg, tol_, Eigen::MatrixXd::Zero(grid.size(), m), g_nodes,
                  h_nodes, [&](int n, const Eigen::MatrixXd& X) {
                      stacked.middleRows(n * grid.n_theta, grid.n_theta) =
                          X.bottomRows(grid.n_theta);
                  });
    return stacked;
}

TimeField solve_parabolic(const ParabolicProblem& problem) {
    return ParabolicSolver(problem).solve();
}

TimeField solve_parabolic_sensitivity(const ParabolicProblem& problem, const TimeField& u,
                                      const BoundaryTrace& p, const Field* w_initial) {
    return ParabolicSolver(problem).solve_sensitivity(u, p, w_initial);
}

double temporal_factor(double t) {
    if (t < 0.0) throw InvalidArgument("temporal_factor: t must be nonnegative");
    if (t == 0.0) return 1.0;
    return t * std::exp(t - std::log(t));
}

TimeField radial_separated_oracle(double c1, double c2, const AnnulusGrid& grid,
                                  const TimeGrid& tg) {
    TimeField tf;
    tf.snapshots.reserve(tg.n_t + 1);
    for (int n = 0; n <= tg.n_t; ++n) {
        const double F = temporal_factor(tg.t_nodes[n]);
        Field f = Field::zero(grid);
        for (int i = 0; i < grid.n_r; ++i) {
            const double r = grid.r_nodes[i];
            f.values.row(i).setConstant(F * (c1 * r + c2 / r));
        }
        tf.snapshots.push_back(std::move(f));
    }
    return tf;
}

double surjectivity_direction_parabolic(double r1, double r2, double gamma_star_r1, double v_r1) {
    if (v_r1 == 0.0)
        throw IdentifiabilityError(
            "surjectivity_direction_parabolic: v(r1) = 0, coefficient not identifiable");
    const double c1 = (1.0 - r2) / (r2 * r2 * (1.0 + r2));
    return -(1.0 / v_r1) * (-c1 + 1.0 / (r1 * r1) + gamma_star_r1 * (c1 * r1 + 1.0 / r1));
}

double time_boundary_norm(const TimeTrace& trace, const AnnulusGrid& grid, const TimeGrid& tg) {
    if (trace.n_time() != tg.n_t + 1)
        throw InvalidArgument("time_boundary_norm: snapshot count does not match the time grid");
    double acc = 0.0;
    for (int n = 0; n <= tg.n_t; ++n) {
        const double w = (n == 0 || n == tg.n_t) ? 0.5 * tg.dt : tg.dt;
        BoundaryTrace bt{trace.boundary, trace.snapshots[n]};
        const double bn = boundary_norm(bt, grid);
        acc += w * bn * bn;
    }
    return std::sqrt(acc);
}

TimeTrace manufactured_inner_data_parabolic(double c1, double c2, const RobinCoefficient& gamma,
                                            const AnnulusGrid& grid, const TimeGrid& tg) {
    // -dw/dr + gamma*w at r1 for w = F(t)*(c1*r + c2/r).
    const double dV = c1 - c2 / (grid.r1 * grid.r1);
    const double V = c1 * grid.r1 + c2 / grid.r1;
    TimeTrace tt = TimeTrace::zero(Boundary::Inner, grid.n_theta, tg);
    for (int n = 0; n <= tg.n_t; ++n) {
        const double F = temporal_factor(tg.t_nodes[n]);
        for (int j = 0; j < grid.n_theta; ++j)
            tt.snapshots[n][j] = F * (-dV + gamma.values[j] * V);
    }
    return tt;
}

TimeTrace manufactured_outer_data_parabolic(double c1, double c2, const AnnulusGrid& grid,
                                            const TimeGrid& tg) {
    const double dV = c1 - c2 / (grid.r2 * grid.r2);
    const double V = c1 * grid.r2 + c2 / grid.r2;
    TimeTrace tt = TimeTrace::zero(Boundary::Outer, grid.n_theta, tg);
    for (int n = 0; n <= tg.n_t; ++n)
        tt.snapshots[n].setConstant(temporal_factor(tg.t_nodes[n]) * (dV + V));
    return tt;
}

}  // namespace robin
