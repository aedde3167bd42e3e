#include "robin/linop.hpp"

#include "robin/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace robin {

BoundaryTrace measured_trace(const Field& w, OuterBC outer_bc, const AnnulusGrid& grid) {
    switch (outer_bc) {
        case OuterBC::Robin1: {
            BoundaryTrace t = trace(w, Boundary::Outer);
            t.values = -t.values;
            return t;
        }
        case OuterBC::Neumann:
            return trace(w, Boundary::Outer);
        case OuterBC::Dirichlet:
            return normal_derivative(w, Boundary::Outer, grid);
    }
    throw InvalidArgument("measured_trace: unknown outer boundary condition");
}

BoundaryTrace apply_N(const EllipticSolver& solver, const Field& u_star, const BoundaryTrace& d) {
    const Field w = solver.solve_sensitivity(u_star, d);
    return measured_trace(w, solver.problem().outer_bc, solver.grid());
}

TimeTrace apply_N(const ParabolicSolver& solver, const TimeField& u_star, const BoundaryTrace& d,
                  const Field* w_initial) {
    const TimeField w = solver.solve_sensitivity(u_star, d, w_initial);
    TimeTrace out;
    out.boundary = Boundary::Outer;
    out.snapshots.reserve(w.snapshots.size());
    for (const auto& snap : w.snapshots)
        out.snapshots.push_back(-snap.values.row(snap.n_r() - 1).transpose());
    return out;
}

Eigen::VectorXd stack(const TimeTrace& trace) {
    const int nt = trace.n_time();
    if (nt == 0) return {};
    const int m = static_cast<int>(trace.snapshots[0].size());
    Eigen::VectorXd v(static_cast<Eigen::Index>(nt) * m);
    for (int n = 0; n < nt; ++n) v.segment(n * m, m) = trace.snapshots[n];
    return v;
}

TimeTrace unstack(const Eigen::VectorXd& v, Boundary boundary, int n_theta, int n_time) {
    if (v.size() != static_cast<Eigen::Index>(n_theta) * n_time)
        throw InvalidArgument("unstack: length is not n_theta * n_time");
    TimeTrace out;
    out.boundary = boundary;
    out.snapshots.reserve(n_time);
    for (int n = 0; n < n_time; ++n) out.snapshots.push_back(v.segment(n * n_theta, n_theta));
    return out;
}

LinearizedMap assemble_N_matrix(const EllipticSolver& solver, const Field& u_star) {
    const auto& grid = solver.grid();
    const int nt = grid.n_theta;
    if (u_star.n_r() != grid.n_r || u_star.n_theta() != nt)
        throw InvalidArgument("assemble_N_matrix: u_star shape does not match grid");

    // Unit direction e_j sources only the j-th inner node: rhs row index(0,j).
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(grid.size(), nt);
    for (int j = 0; j < nt; ++j) rhs(grid.index(0, j), j) = -u_star.values(0, j);
    const Eigen::MatrixXd W = solver.solve_rhs(rhs);

    LinearizedMap map;
    map.kind = MapKind::Elliptic;
    map.gamma_star = solver.problem().gamma;
    map.n_theta = nt;
    map.matrix.resize(nt, nt);
    for (int j = 0; j < nt; ++j) {
        const Field w = Field::from_flat(W.col(j), grid);
        map.matrix.col(j) = measured_trace(w, solver.problem().outer_bc, grid).values;
    }
    return map;
}

LinearizedMap assemble_N_matrix(const ParabolicSolver& solver, const TimeField& u_star) {
    const int nt = solver.grid().n_theta;
    LinearizedMap map;
    map.kind = MapKind::Parabolic;
    map.gamma_star = solver.problem().gamma;
    map.n_theta = nt;
    map.n_time = solver.time_grid().n_t + 1;
    map.matrix =
        -solver.sensitivity_outer_traces(u_star, Eigen::MatrixXd::Identity(nt, nt));
    return map;
}

SolveNResult solve_N(const LinearizedMap& map, const Eigen::VectorXd& phi, double reg) {
    if (reg < 0.0) throw InvalidArgument("solve_N: reg must be nonnegative");
    if (phi.size() != map.matrix.rows())
        throw InvalidArgument("solve_N: phi length does not match the map");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.matrix,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    SolveNResult out;
    out.largest_singular_value = s.size() ? s[0] : 0.0;
    out.smallest_singular_value = s.size() ? s[s.size() - 1] : 0.0;
    const double threshold = 1e-10 * out.largest_singular_value;

    const Eigen::VectorXd proj = svd.matrixU().transpose() * phi;
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(s.size());
    int rank = 0;
    for (int i = 0; i < s.size(); ++i) {
        if (s[i] > threshold) ++rank;
        if (reg > 0.0)
            coef[i] = s[i] / (s[i] * s[i] + reg) * proj[i];
        else if (s[i] > threshold)
            coef[i] = proj[i] / s[i];
    }
    out.rank = rank;
    out.rank_deficient = rank < map.matrix.cols();
    out.d = svd.matrixV() * coef;
    return out;
}

ConditioningReport conditioning_report(const LinearizedMap& map) {
    const int nt = map.n_theta;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.matrix);
    ConditioningReport rep;
    rep.singular_values = svd.singularValues();
    rep.largest = rep.singular_values.size() ? rep.singular_values[0] : 0.0;
    rep.smallest =
        rep.singular_values.size() ? rep.singular_values[rep.singular_values.size() - 1] : 0.0;

    rep.mode_response.resize(nt / 2 + 1);
    for (int k = 0; k <= nt / 2; ++k) {
        Eigen::VectorXd c(nt), sn(nt);
        for (int j = 0; j < nt; ++j) {
            const double a = 2.0 * std::numbers::pi * k * j / nt;
            c[j] = std::cos(a);
            sn[j] = std::sin(a);
        }
        double resp = (map.matrix * c).norm() / c.norm();
        if (k > 0 && k < nt - k) {
            // sin mode is distinct except at k = 0 and the Nyquist frequency
            resp = std::max(resp, (map.matrix * sn).norm() / sn.norm());
        }
        rep.mode_response[k] = resp;
    }
    return rep;
}

}  // namespace robin
