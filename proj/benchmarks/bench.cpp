#include <benchmark/benchmark.h>

#include <robin/elliptic.hpp>
#include <robin/inverse.hpp>
#include <robin/linop.hpp>
#include <robin/parabolic.hpp>

using namespace robin;

namespace {

EllipticProblem elliptic_case(int n_r, int n_theta) {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, n_r, n_theta);
    const RobinCoefficient gamma = RobinCoefficient::constant(1.5, 0.1, 10.0, n_theta);
    return EllipticProblem{grid,
                           gamma,
                           Field::zero(grid),
                           manufactured_inner_data(2.0, 0.5, gamma, grid),
                           manufactured_outer_data(2.0, 0.5, grid),
                           OuterBC::Robin1};
}

ParabolicProblem parabolic_case(int n_r, int n_theta, int n_t, Scheme scheme) {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, n_r, n_theta);
    const TimeGrid tg = build_time_grid(1.0, n_t);
    const RobinCoefficient gamma = RobinCoefficient::constant(1.5, 0.1, 10.0, n_theta);
    const double c1 = (1.0 - grid.r2) / (grid.r2 * grid.r2 * (1.0 + grid.r2));
    return ParabolicProblem{grid,
                            gamma,
                            manufactured_inner_data_parabolic(c1, 1.0, gamma, grid, tg),
                            manufactured_outer_data_parabolic(c1, 1.0, grid, tg),
                            tg,
                            scheme,
                            radial_separated_oracle(c1, 1.0, grid, tg).snapshots[0]};
}

void BM_EllipticSolve(benchmark::State& state) {
    const EllipticProblem p = elliptic_case(static_cast<int>(state.range(0)),
                                            static_cast<int>(state.range(1)));
    // the residual guard scales with the factorization roundoff at large sizes
    for (auto _ : state) {
        const EllipticSolver solver(p, 1e-8);
        benchmark::DoNotOptimize(solver.solve());
    }
    state.SetLabel(std::to_string(p.grid.size()) + " unknowns");
}
BENCHMARK(BM_EllipticSolve)->Args({33, 64})->Args({65, 64})->Args({129, 64})->Args({257, 128});

void BM_EllipticFactorizeOnceManySolves(benchmark::State& state) {
    const EllipticProblem p = elliptic_case(65, 64);
    const EllipticSolver solver(p);
    const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(p.grid.size(), 16);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve_rhs(rhs));
    }
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_EllipticFactorizeOnceManySolves);

void BM_ParabolicSolve(benchmark::State& state) {
    const ParabolicProblem p =
        parabolic_case(static_cast<int>(state.range(0)), 32,
                       static_cast<int>(state.range(1)), Scheme::CrankNicolson);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_parabolic(p));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_ParabolicSolve)->Args({33, 64})->Args({65, 64})->Args({65, 256});

void BM_ApplyN(benchmark::State& state) {
    const EllipticProblem p = elliptic_case(65, static_cast<int>(state.range(0)));
    const EllipticSolver solver(p);
    const Field u = solver.solve();
    const BoundaryTrace d =
        BoundaryTrace::constant(Boundary::Inner, p.grid.n_theta, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_N(solver, u, d));
    }
}
BENCHMARK(BM_ApplyN)->Arg(16)->Arg(64)->Arg(128);

void BM_AssembleNMatrix(benchmark::State& state) {
    const EllipticProblem p = elliptic_case(65, static_cast<int>(state.range(0)));
    const EllipticSolver solver(p);
    const Field u = solver.solve();
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_N_matrix(solver, u));
    }
}
BENCHMARK(BM_AssembleNMatrix)->Arg(16)->Arg(64)->Arg(128);

void BM_Jacobian(benchmark::State& state) {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 65, static_cast<int>(state.range(0)));
    const RobinCoefficient gamma =
        RobinCoefficient::constant(1.5, 0.5, 3.0, grid.n_theta);
    const EllipticSetup setup{grid, Field::zero(grid),
                              BoundaryTrace::constant(Boundary::Inner, grid.n_theta, 1.0),
                              BoundaryTrace::constant(Boundary::Outer, grid.n_theta, 0.2),
                              OuterBC::Robin1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobian(gamma, setup));
    }
}
BENCHMARK(BM_Jacobian)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
