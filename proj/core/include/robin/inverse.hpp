#pragma once

#include "robin/elliptic.hpp"
#include "robin/parabolic.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace robin {

/// Everything of the elliptic problem that stays fixed while gamma varies.
struct EllipticSetup {
    AnnulusGrid grid;
    Field f;
    BoundaryTrace g;
    BoundaryTrace h;
    OuterBC outer_bc = OuterBC::Robin1;

    EllipticProblem problem(const RobinCoefficient& gamma) const {
        return EllipticProblem{grid, gamma, f, g, h, outer_bc};
    }
};

struct ParabolicSetup {
    AnnulusGrid grid;
    TimeTrace g;
    TimeTrace h;
    TimeGrid tg;
    Scheme scheme = Scheme::ImplicitEuler;

    ParabolicProblem problem(const RobinCoefficient& gamma) const {
        return ParabolicProblem{grid, gamma, g, h, tg, scheme, Field{}};
    }
};

/// Half squared data-space distance between the outer trace of u(gamma) and z.
double misfit(const RobinCoefficient& gamma, const BoundaryTrace& z, const EllipticSetup& setup);
double misfit(const RobinCoefficient& gamma, const TimeTrace& z, const ParabolicSetup& setup);

/// Column j = outer trace of the sensitivity solution for the j-th angular
/// unit direction at gamma; the derivative of the measurement map.
Eigen::MatrixXd jacobian(const RobinCoefficient& gamma, const EllipticSetup& setup);
Eigen::MatrixXd jacobian(const RobinCoefficient& gamma, const ParabolicSetup& setup);

struct ReconstructionOptions {
    int max_iters = 50;
    double tol_misfit = 1e-10;
    double tol_step = 1e-8;
    double levenberg_lambda0 = 1e-3;
    double lambda_decrease = 0.5;
    double lambda_increase = 4.0;
    double noise_level = 0.0;  // discrepancy stop when the data-space residual norm falls below
    std::uint64_t seed = 0;
    double tikhonov = 0.0;            // optional penalty weight on |gamma - gamma_ref|^2
    Eigen::VectorXd gamma_ref;        // empty means the starting iterate
};

enum class StopReason { MisfitTol, StepTol, Discrepancy, MaxIters, Stalled };

struct ReconstructionResult {
    RobinCoefficient gamma_hat;
    std::vector<double> misfit_history;  // entry 0 at the starting iterate
    int iterations = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::MaxIters;
};

const char* to_string(StopReason reason);

/// Projected Levenberg-Marquardt on the box [lo, hi]: solves
/// (J^T J + lambda I) delta = -J^T r in quadrature-whitened variables and
/// clips each candidate into the box. lambda shrinks on accepted steps and
/// grows on rejected ones; growth past 1e8 stalls out with the best iterate.
ReconstructionResult reconstruct(const BoundaryTrace& z, const RobinCoefficient& gamma0,
                                 const ReconstructionOptions& opts, const EllipticSetup& setup);
ReconstructionResult reconstruct(const TimeTrace& z, const RobinCoefficient& gamma0,
                                 const ReconstructionOptions& opts, const ParabolicSetup& setup);

}  // namespace robin
