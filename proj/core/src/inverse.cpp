#include "robin/inverse.hpp"

#include "robin/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <functional>
#include <utility>

namespace robin {

namespace {

/// sqrt of the rectangle-rule weight per outer node; whitened Euclidean norms
/// then equal the boundary data norm.
double elliptic_sqrt_weight(const AnnulusGrid& grid) {
    return std::sqrt(grid.r2 * grid.h_theta);
}

Eigen::VectorXd parabolic_sqrt_weights(const AnnulusGrid& grid, const TimeGrid& tg) {
    const double bw = grid.r2 * grid.h_theta;
    Eigen::VectorXd w(static_cast<Eigen::Index>(tg.n_t + 1) * grid.n_theta);
    for (int n = 0; n <= tg.n_t; ++n) {
        const double tw = (n == 0 || n == tg.n_t) ? 0.5 * tg.dt : tg.dt;
        w.segment(n * grid.n_theta, grid.n_theta).setConstant(std::sqrt(tw * bw));
    }
    return w;
}

Eigen::VectorXd stack_trace(const TimeTrace& z) {
    const int nt = z.n_time();
    const int m = nt ? static_cast<int>(z.snapshots[0].size()) : 0;
    Eigen::VectorXd v(static_cast<Eigen::Index>(nt) * m);
    for (int n = 0; n < nt; ++n) v.segment(n * m, m) = z.snapshots[n];
    return v;
}

/// Kind-erased pieces the optimizer needs: whitened residual and whitened
/// Jacobian at a coefficient.
struct WhitenedOps {
    std::function<Eigen::VectorXd(const RobinCoefficient&)> residual;
    std::function<Eigen::MatrixXd(const RobinCoefficient&)> jac;
};

ReconstructionResult levenberg_marquardt(const WhitenedOps& ops, const RobinCoefficient& gamma0,
                                         const ReconstructionOptions& opts) {
    if (!(opts.max_iters >= 1) || !(opts.tol_misfit > 0.0) || !(opts.tol_step > 0.0) ||
        !(opts.levenberg_lambda0 >= 0.0) || !(opts.lambda_decrease > 0.0) ||
        !(opts.lambda_decrease < 1.0) || !(opts.lambda_increase > 1.0) ||
        !(opts.noise_level >= 0.0) || !(opts.tikhonov >= 0.0))
        throw InvalidArgument("reconstruct: invalid options");
    if (!gamma0.feasible()) throw InvalidArgument("reconstruct: gamma0 leaves the feasible box");

    const int n = gamma0.size();
    const Eigen::VectorXd ref =
        opts.gamma_ref.size() == 0 ? gamma0.values : Eigen::VectorXd(opts.gamma_ref);
    if (ref.size() != n) throw InvalidArgument("reconstruct: gamma_ref length mismatch");

    auto objective = [&](const Eigen::VectorXd& r, const RobinCoefficient& gamma) {
        double val = 0.5 * r.squaredNorm();
        if (opts.tikhonov > 0.0) val += 0.5 * opts.tikhonov * (gamma.values - ref).squaredNorm();
        return val;
    };

    ReconstructionResult out;
    out.gamma_hat = gamma0;
    RobinCoefficient gamma = gamma0;
    Eigen::VectorXd r = ops.residual(gamma);
    double obj = objective(r, gamma);
    out.misfit_history.push_back(obj);

    auto finish = [&](StopReason reason, bool converged, int iters) {
        out.gamma_hat = gamma;
        out.stop_reason = reason;
        out.converged = converged;
        out.iterations = iters;
        return out;
    };

    if (obj <= opts.tol_misfit) return finish(StopReason::MisfitTol, true, 0);
    if (opts.noise_level > 0.0 && r.norm() <= opts.noise_level)
        return finish(StopReason::Discrepancy, true, 0);

    double lambda = opts.levenberg_lambda0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        const Eigen::MatrixXd J = ops.jac(gamma);
        Eigen::MatrixXd H = J.transpose() * J;
        Eigen::VectorXd grad = J.transpose() * r;
        if (opts.tikhonov > 0.0) {
            H.diagonal().array() += opts.tikhonov;
            grad += opts.tikhonov * (gamma.values - ref);
        }

        bool accepted = false;
        double step_norm = 0.0;
        while (true) {
            Eigen::MatrixXd Hl = H;
            Hl.diagonal().array() += lambda;
            const Eigen::VectorXd delta = Hl.ldlt().solve(-grad);
            const RobinCoefficient candidate = gamma.projected(gamma.values + delta);
            const Eigen::VectorXd rc = ops.residual(candidate);
            const double objc = objective(rc, candidate);
            if (objc < obj) {
                step_norm = (candidate.values - gamma.values).norm() /
                            std::max(1.0, gamma.values.norm());
                gamma = candidate;
                r = rc;
                obj = objc;
                out.misfit_history.push_back(obj);
                lambda = std::max(lambda * opts.lambda_decrease, 1e-12);
                accepted = true;
                break;
            }
            lambda = lambda == 0.0 ? 1e-8 : lambda * opts.lambda_increase;
            if (lambda > 1e8) return finish(StopReason::Stalled, false, it);
        }

        if (accepted) {
            if (obj <= opts.tol_misfit) return finish(StopReason::MisfitTol, true, it);
            if (opts.noise_level > 0.0 && r.norm() <= opts.noise_level)
                return finish(StopReason::Discrepancy, true, it);
            if (step_norm <= opts.tol_step) return finish(StopReason::StepTol, true, it);
        }
    }
    return finish(StopReason::MaxIters, false, opts.max_iters);
}

}  // namespace

double misfit(const RobinCoefficient& gamma, const BoundaryTrace& z, const EllipticSetup& setup) {
    if (z.boundary != Boundary::Outer || z.values.size() != setup.grid.n_theta)
        throw InvalidArgument("misfit: z must be an outer trace of length n_theta");
    const Field u = solve_elliptic(setup.problem(gamma));
    BoundaryTrace diff = trace(u, Boundary::Outer);
    diff.values -= z.values;
    const double d = boundary_norm(diff, setup.grid);
    return 0.5 * d * d;
}

double misfit(const RobinCoefficient& gamma, const TimeTrace& z, const ParabolicSetup& setup) {
    if (z.boundary != Boundary::Outer || z.n_time() != setup.tg.n_t + 1)
        throw InvalidArgument("misfit: z must be an outer time trace on the time grid");
    const TimeField u = solve_parabolic(setup.problem(gamma));
    TimeTrace diff;
    diff.boundary = Boundary::Outer;
    diff.snapshots.reserve(z.n_time());
    for (int n = 0; n < z.n_time(); ++n)
        diff.snapshots.push_back(
            u.snapshots[n].values.row(setup.grid.n_r - 1).transpose() - z.snapshots[n]);
    const double d = time_boundary_norm(diff, setup.grid, setup.tg);
    return 0.5 * d * d;
}

Eigen::MatrixXd jacobian(const RobinCoefficient& gamma, const EllipticSetup& setup) {
    const EllipticSolver solver(setup.problem(gamma));
    const Field u = solver.solve();
    const auto& grid = setup.grid;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(grid.size(), grid.n_theta);
    for (int j = 0; j < grid.n_theta; ++j) rhs(grid.index(0, j), j) = -u.values(0, j);
    const Eigen::MatrixXd W = solver.solve_rhs(rhs);
    return W.bottomRows(grid.n_theta);
}

Eigen::MatrixXd jacobian(const RobinCoefficient& gamma, const ParabolicSetup& setup) {
    const ParabolicSolver solver(setup.problem(gamma));
    const TimeField u = solver.solve();
    return solver.sensitivity_outer_traces(
        u, Eigen::MatrixXd::Identity(setup.grid.n_theta, setup.grid.n_theta));
}

ReconstructionResult reconstruct(const BoundaryTrace& z, const RobinCoefficient& gamma0,
                                 const ReconstructionOptions& opts, const EllipticSetup& setup) {
    if (z.boundary != Boundary::Outer || z.values.size() != setup.grid.n_theta)
        throw InvalidArgument("reconstruct: z must be an outer trace of length n_theta");
    const double sw = elliptic_sqrt_weight(setup.grid);

    WhitenedOps ops;
    ops.residual = [&, sw](const RobinCoefficient& gamma) -> Eigen::VectorXd {
        const Field u = solve_elliptic(setup.problem(gamma));
        return sw * (u.values.row(setup.grid.n_r - 1).transpose() - z.values);
    };
    ops.jac = [&, sw](const RobinCoefficient& gamma) -> Eigen::MatrixXd {
        return sw * jacobian(gamma, setup);
    };
    return levenberg_marquardt(ops, gamma0, opts);
}

ReconstructionResult reconstruct(const TimeTrace& z, const RobinCoefficient& gamma0,
                                 const ReconstructionOptions& opts, const ParabolicSetup& setup) {
    if (z.boundary != Boundary::Outer || z.n_time() != setup.tg.n_t + 1)
        throw InvalidArgument("reconstruct: z must be an outer time trace on the time grid");
    const Eigen::VectorXd sw = parabolic_sqrt_weights(setup.grid, setup.tg);
    const Eigen::VectorXd zs = stack_trace(z);

    WhitenedOps ops;
    ops.residual = [&, sw, zs](const RobinCoefficient& gamma) -> Eigen::VectorXd {
        const ParabolicSolver solver(setup.problem(gamma));
        const TimeField u = solver.solve();
        Eigen::VectorXd t(zs.size());
        const int m = setup.grid.n_theta;
        for (int n = 0; n <= setup.tg.n_t; ++n)
            t.segment(n * m, m) = u.snapshots[n].values.row(setup.grid.n_r - 1).transpose();
        return sw.cwiseProduct(t - zs);
    };
    ops.jac = [&, sw](const RobinCoefficient& gamma) -> Eigen::MatrixXd {
        return sw.asDiagonal() * jacobian(gamma, setup);
    };
    return levenberg_marquardt(ops, gamma0, opts);
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::MisfitTol: return "misfit_tol";
        case StopReason::StepTol: return "step_tol";
        case StopReason::Discrepancy: return "discrepancy";
        case StopReason::MaxIters: return "max_iters";
        case StopReason::Stalled: return "stalled";
    }
    return "unknown";
}

}  // namespace robin
