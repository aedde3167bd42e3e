#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <robin/errors.hpp>
#include <robin/linop.hpp>
#include <robin/rng.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace robin;

namespace {

EllipticProblem radial_problem(const AnnulusGrid& grid, double gamma_val, double c1, double c2,
                               OuterBC bc = OuterBC::Robin1) {
    RobinCoefficient gamma = RobinCoefficient::constant(gamma_val, 0.1, 10.0, grid.n_theta);
    return EllipticProblem{grid,
                           gamma,
                           Field::zero(grid),
                           manufactured_inner_data(c1, c2, gamma, grid),
                           manufactured_outer_data(c1, c2, grid, bc),
                           bc};
}

BoundaryTrace random_direction(int n_theta, std::uint64_t seed) {
    Rng rng(seed);
    BoundaryTrace d = BoundaryTrace::zero(Boundary::Inner, n_theta);
    for (int j = 0; j < n_theta; ++j) d.values[j] = rng.uniform(-1.0, 1.0);
    return d;
}

}  // namespace

TEST_CASE("measured trace picks the complementary outer quantity") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 9, 8);
    // linear in r: the one-sided derivative stencils are exact on it
    Field w = Field::zero(grid);
    for (int i = 0; i < grid.n_r; ++i)
        for (int j = 0; j < grid.n_theta; ++j) w.values(i, j) = 2.0 + 0.75 * grid.r_nodes[i];

    const double w_r2 = 2.0 + 0.75 * 2.0;
    const BoundaryTrace robin = measured_trace(w, OuterBC::Robin1, grid);
    const BoundaryTrace neumann = measured_trace(w, OuterBC::Neumann, grid);
    const BoundaryTrace dirichlet = measured_trace(w, OuterBC::Dirichlet, grid);
    for (int j = 0; j < 8; ++j) {
        CHECK(robin.values[j] == doctest::Approx(-w_r2));
        CHECK(neumann.values[j] == doctest::Approx(w_r2));
        CHECK(dirichlet.values[j] == doctest::Approx(0.75));
    }
    CHECK(robin.boundary == Boundary::Outer);
}

TEST_CASE("linearized map is linear and vanishes on the zero direction") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 33, 8);
    const EllipticSolver solver(radial_problem(grid, 1.5, 2.0, 0.5));
    const Field u = solver.solve();

    const BoundaryTrace z = apply_N(solver, u, BoundaryTrace::zero(Boundary::Inner, 8));
    CHECK(z.values.cwiseAbs().maxCoeff() < 1e-13);

    const BoundaryTrace d1 = random_direction(8, 5);
    const BoundaryTrace d2 = random_direction(8, 6);
    const BoundaryTrace n1 = apply_N(solver, u, d1);
    const BoundaryTrace n2 = apply_N(solver, u, d2);
    BoundaryTrace combo{Boundary::Inner, 2.0 * d1.values - 3.0 * d2.values};
    const BoundaryTrace nc = apply_N(solver, u, combo);
    CHECK((nc.values - 2.0 * n1.values + 3.0 * n2.values).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("constant-direction response realizes the radial construction") {
    // The scalar direction d from the closed-form construction produces the
    // response -1/r2 (constant in angle) up to discretization error.
    const double r1 = 1.0, r2 = 2.0, gamma_val = 1.5;
    const AnnulusGrid grid = build_annulus(r1, r2, 65, 16);
    const EllipticSolver solver(radial_problem(grid, gamma_val, 2.0, 0.5));
    const Field u = solver.solve();
    const double u_r1 = u.values(0, 0);

    const double d = surjectivity_direction_elliptic(r1, r2, gamma_val, u_r1);
    const BoundaryTrace resp =
        apply_N(solver, u, BoundaryTrace::constant(Boundary::Inner, 16, d));

    const double target = -1.0 / r2;
    for (int j = 0; j < 16; ++j)
        CHECK(resp.values[j] == doctest::Approx(target).epsilon(2e-2));

    // same response through the radial two-point oracle, scaled by d
    const double oracle = d * oracles::elliptic_mode_response(0, r1, r2, gamma_val, u_r1);
    CHECK(resp.values.mean() == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("assembled matrix reproduces the operator column by column") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 33, 8);
    const EllipticSolver solver(radial_problem(grid, 1.5, 2.0, 0.5));
    const Field u = solver.solve();
    const LinearizedMap map = assemble_N_matrix(solver, u);
    REQUIRE(map.matrix.rows() == 8);
    REQUIRE(map.matrix.cols() == 8);
    CHECK(map.kind == MapKind::Elliptic);
    CHECK(map.n_time == 0);

    for (int j = 0; j < 8; ++j) {
        BoundaryTrace e = BoundaryTrace::zero(Boundary::Inner, 8);
        e.values[j] = 1.0;
        const BoundaryTrace col = apply_N(solver, u, e);
        CHECK((map.matrix.col(j) - col.values).cwiseAbs().maxCoeff() < 1e-11);
    }

    for (std::uint64_t s : {11, 12, 13, 14, 15}) {
        const BoundaryTrace d = random_direction(8, s);
        const BoundaryTrace nd = apply_N(solver, u, d);
        CHECK((map.matrix * d.values - nd.values).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("rotation invariance makes the matrix circulant for radial data") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 33, 8);
    const EllipticSolver solver(radial_problem(grid, 1.5, 2.0, 0.5));
    const LinearizedMap map = assemble_N_matrix(solver, solver.solve());
    for (int j = 1; j < 8; ++j)
        for (int i = 0; i < 8; ++i)
            CHECK(map.matrix((i + j) % 8, j) ==
                  doctest::Approx(map.matrix(i, 0)).epsilon(1e-10));
}

TEST_CASE("zero forward state produces the zero map") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 17, 8);
    RobinCoefficient gamma = RobinCoefficient::constant(1.5, 0.1, 10.0, 8);
    EllipticProblem p{grid,
                      gamma,
                      Field::zero(grid),
                      BoundaryTrace::zero(Boundary::Inner, 8),
                      BoundaryTrace::zero(Boundary::Outer, 8),
                      OuterBC::Robin1};
    const EllipticSolver solver(p);
    const LinearizedMap map = assemble_N_matrix(solver, solver.solve());
    CHECK(map.matrix.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("least squares solve inverts what the map applied") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 33, 8);
    const EllipticSolver solver(radial_problem(grid, 1.5, 2.0, 0.5));
    const LinearizedMap map = assemble_N_matrix(solver, solver.solve());

    const BoundaryTrace d_true = random_direction(8, 77);
    const Eigen::VectorXd phi = map.matrix * d_true.values;
    const SolveNResult res = solve_N(map, phi, 0.0);
    CHECK_FALSE(res.rank_deficient);
    CHECK(res.rank == 8);
    CHECK((res.d - d_true.values).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(res.largest_singular_value >= res.smallest_singular_value);
    CHECK(res.smallest_singular_value > 0.0);

    const SolveNResult zero = solve_N(map, Eigen::VectorXd::Zero(8), 0.0);
    CHECK(zero.d.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regularized solve satisfies its normal equations and norm bound") {
    const AnnulusGrid grid = build_annulus(1.0, 2.0, 33, 8);
    const EllipticSolver solver(radial_problem(grid, 1.5, 2.0, 0.5));
    const LinearizedMap map = assemble_N_matrix(solver, solver.solve());

    Rng rng(3);
    Eigen::VectorXd phi(8);
    for (int j = 0; j < 8; ++j) phi[j] = rng.uniform(-1.0, 1.0);

    for (double reg : {1e-6, 1e-3, 1e-1}) {
        const SolveNResult res = solve_N(map, phi, reg);
        const Eigen::VectorXd grad =
            map.matrix.transpose() * (map.matrix * res.d - phi) + reg * res.d;
        CHECK(grad.norm() < 1e-10 * (phi.norm() + 1.0));
        CHECK(res.d.norm() <= phi.norm() / (2.0 * std::sqrt(reg)) * (1.0 + 1e-12));
    }

    CHECK_THROWS_AS(solve_N(map, phi, -1.0), InvalidArgument);
    CHECK_THROWS_AS(solve_N(map, Eigen::VectorXd::Zero(5), 0.0), InvalidArgument);
}

TEST_CASE("rank deficiency is reported, not inverted") {
    LinearizedMap map;
    map.kind = MapKind::Elliptic;
    map.n_theta = 6;
    Eigen::VectorXd a(6), b(6);
    a << 1, 2, 3, 4, 5, 6;
    b << 1, -1, 1, -1, 1, -1;
    map.matrix = a * b.transpose();  // rank one

    const SolveNResult res = solve_N(map, a, 0.0);
    CHECK(res.rank_deficient);
    CHECK(res.rank == 1);
    CHECK(std::isfinite(res.d.norm()));
    // the recovered direction lives in the row space and reproduces phi
    CHECK((map.matrix * res.d - a).norm() < 1e-10 * a.norm());
}

TEST_CASE("conditioning report matches the per-mode radial oracles") {
    const double r1 = 1.0, r2 = 2.0, gamma_val = 1.5;
    const AnnulusGrid grid = build_annulus(r1, r2, 65, 16);
    const EllipticSolver solver(radial_problem(grid, gamma_val, 2.0, 0.5));
    const Field u = solver.solve();
    const LinearizedMap map = assemble_N_matrix(solver, u);
    const ConditioningReport rep = conditioning_report(map);

    REQUIRE(rep.singular_values.size() == 16);
    for (int i = 1; i < 16; ++i)
        CHECK(rep.singular_values[i] <= rep.singular_values[i - 1] * (1.0 + 1e-12));
    CHECK(rep.largest == doctest::Approx(rep.singular_values[0]));
    CHECK(rep.smallest == doctest::Approx(rep.singular_values[15]));

    REQUIRE(rep.mode_response.size() == 9);
    const double u_r1 = u.values(0, 0);
    for (int k = 0; k <= 4; ++k) {
        const double oracle =
            std::abs(oracles::elliptic_mode_response(k, r1, r2, gamma_val, u_r1));
        CHECK(rep.mode_response[k] == doctest::Approx(oracle).epsilon(5e-2));
    }
    // high azimuthal frequencies are damped through the annulus
    for (int k = 1; k <= 8; ++k) CHECK(rep.mode_response[k] < rep.mode_response[k - 1]);
    CHECK(rep.mode_response[8] < 0.05 * rep.mode_response[0]);
}

TEST_CASE("conditioning report of the zero map is zero") {
    LinearizedMap map;
    map.kind = MapKind::Elliptic;
    map.n_theta = 8;
    map.matrix = Eigen::MatrixXd::Zero(8, 8);
    const ConditioningReport rep = conditioning_report(map);
    CHECK(rep.largest == 0.0);
    CHECK(rep.smallest == 0.0);
    CHECK(rep.mode_response.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time trace stacking round trip") {
    const TimeGrid tg = build_time_grid(1.0, 3);
    TimeTrace t = TimeTrace::zero(Boundary::Outer, 4, tg);
    Rng rng(9);
    for (auto& s : t.snapshots)
        for (int j = 0; j < 4; ++j) s[j] = rng.uniform(-1.0, 1.0);

    const Eigen::VectorXd v = stack(t);
    REQUIRE(v.size() == 4 * 4);
    CHECK(v[0] == t.snapshots[0][0]);
    CHECK(v[4 * 2 + 3] == t.snapshots[2][3]);

    const TimeTrace back = unstack(v, Boundary::Outer, 4, 4);
    for (int n = 0; n < 4; ++n)
        CHECK((back.snapshots[n] - t.snapshots[n]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parabolic construction yields the exponential response profile") {
    // Direction from the separated construction; the response is
    // -2 exp(t) / (r2 (1 + r2)) at every angle.
    const double r1 = 1.0, r2 = 2.0, gamma_val = 1.5;
    const AnnulusGrid grid = build_annulus(r1, r2, 65, 8);
    const TimeGrid tg = build_time_grid(1.0, 32);
    const double c1s = 0.5, c2s = -1.0;

    ParabolicProblem p;
    p.grid = grid;
    p.gamma = RobinCoefficient::constant(gamma_val, 0.1, 10.0, 8);
    p.g = manufactured_inner_data_parabolic(c1s, c2s, p.gamma, grid, tg);
    p.h = manufactured_outer_data_parabolic(c1s, c2s, grid, tg);
    p.tg = tg;
    p.scheme = Scheme::CrankNicolson;
    p.initial = radial_separated_oracle(c1s, c2s, grid, tg).snapshots[0];

    const ParabolicSolver solver(p);
    const TimeField u = solver.solve();
    const double v_r1 = u.snapshots[0].values(0, 0);

    const double d = surjectivity_direction_parabolic(r1, r2, gamma_val, v_r1);
    const double c1w = (1.0 - r2) / (r2 * r2 * (1.0 + r2));
    const Field w0 = radial_separated_oracle(c1w, 1.0, grid, tg).snapshots[0];
    const TimeTrace resp =
        apply_N(solver, u, BoundaryTrace::constant(Boundary::Inner, 8, d), &w0);

    REQUIRE(resp.n_time() == 33);
    for (int n = 0; n < 33; ++n) {
        const double target = -2.0 * std::exp(tg.t_nodes[n]) / (r2 * (1.0 + r2));
        for (int j = 0; j < 8; ++j)
            CHECK(resp.snapshots[n][j] == doctest::Approx(target).epsilon(2e-2));
    }

    // the assembled parabolic matrix reproduces the operator on this direction
    const LinearizedMap map = assemble_N_matrix(solver, u);
    CHECK(map.kind == MapKind::Parabolic);
    CHECK(map.n_time == 33);
    REQUIRE(map.matrix.rows() == 33 * 8);
    const TimeTrace no_init =
        apply_N(solver, u, BoundaryTrace::constant(Boundary::Inner, 8, d));
    const Eigen::VectorXd via_matrix =
        map.matrix * Eigen::VectorXd::Constant(8, d);
    CHECK((via_matrix - stack(no_init)).cwiseAbs().maxCoeff() < 1e-9);
}
