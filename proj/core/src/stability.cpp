#include "robin/stability.hpp"

#include "robin/parallel.hpp"
#include "robin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace robin {

namespace {

double inner_dist(const RobinCoefficient& g1, const RobinCoefficient& g2,
                  const AnnulusGrid& grid) {
    BoundaryTrace diff{Boundary::Inner, g1.values - g2.values};
    return boundary_norm(diff, grid);
}

double ratio_impl(const RobinCoefficient& g1, const RobinCoefficient& g2,
                  const AnnulusGrid& grid,
                  const std::function<double(const RobinCoefficient&, const RobinCoefficient&)>&
                      data_dist) {
    if (g1.size() != grid.n_theta || g2.size() != grid.n_theta)
        throw InvalidArgument("lipschitz_ratio: coefficient length does not match n_theta");
    if (!g1.feasible() || !g2.feasible())
        throw InvalidArgument("lipschitz_ratio: coefficients leave the feasible box");
    const double num = inner_dist(g1, g2, grid);
    if (num == 0.0)
        throw InvalidArgument("lipschitz_ratio: gamma1 and gamma2 coincide");
    const double den = data_dist(g1, g2);
    if (den == 0.0)
        throw RatioIdentifiabilityError(
            "lipschitz_ratio: distinct coefficients produce identical data", g1, g2);
    return num / den;
}

double elliptic_data_dist(const RobinCoefficient& g1, const RobinCoefficient& g2,
                          const EllipticSetup& setup) {
    const Field u1 = solve_elliptic(setup.problem(g1));
    const Field u2 = solve_elliptic(setup.problem(g2));
    BoundaryTrace d1 = measured_trace(u1, setup.outer_bc, setup.grid);
    const BoundaryTrace d2 = measured_trace(u2, setup.outer_bc, setup.grid);
    d1.values -= d2.values;
    return boundary_norm(d1, setup.grid);
}

double parabolic_data_dist(const RobinCoefficient& g1, const RobinCoefficient& g2,
                           const ParabolicSetup& setup) {
    const TimeField u1 = solve_parabolic(setup.problem(g1));
    const TimeField u2 = solve_parabolic(setup.problem(g2));
    TimeTrace diff;
    diff.boundary = Boundary::Outer;
    diff.snapshots.reserve(u1.n_time());
    const int last = setup.grid.n_r - 1;
    for (int n = 0; n < u1.n_time(); ++n)
        diff.snapshots.push_back(
            (u1.snapshots[n].values.row(last) - u2.snapshots[n].values.row(last)).transpose());
    return time_boundary_norm(diff, setup.grid, setup.tg);
}

struct SampleSet {
    std::vector<Eigen::VectorXd> pert1, pert2;
};

/// All randomness happens here, before any solve, so sample s is the same
/// regardless of how evaluation is scheduled.
SampleSet draw_samples(double b, int n_samples, std::uint64_t seed, ProbeMode mode,
                       const AnnulusGrid& grid) {
    const int nt = grid.n_theta;
    Rng rng(seed);
    SampleSet s;
    s.pert1.reserve(n_samples);
    s.pert2.reserve(n_samples);

    const double radial_cap = b / std::sqrt(2.0 * std::numbers::pi * grid.r1);
    const double node_weight = std::sqrt(grid.r1 * grid.h_theta);

    auto draw_one = [&]() -> Eigen::VectorXd {
        if (mode == ProbeMode::RadialOnly)
            return Eigen::VectorXd::Constant(nt, rng.uniform(-radial_cap, radial_cap));
        Eigen::VectorXd xi(nt);
        for (int j = 0; j < nt; ++j) xi[j] = rng.normal();
        const double rho = b * std::pow(rng.uniform01(), 1.0 / nt);
        const double wnorm = node_weight * xi.norm();
        if (wnorm == 0.0) return Eigen::VectorXd::Zero(nt);
        return (rho / wnorm) * xi;
    };

    for (int i = 0; i < n_samples; ++i) {
        s.pert1.push_back(draw_one());
        s.pert2.push_back(draw_one());
    }
    return s;
}

/// Largest pointwise excursion the sampler can produce; the box margin must
/// cover it so every sample is feasible without clipping.
double excursion_bound(double b, ProbeMode mode, const AnnulusGrid& grid) {
    if (mode == ProbeMode::RadialOnly) return b / std::sqrt(2.0 * std::numbers::pi * grid.r1);
    return b / std::sqrt(grid.r1 * grid.h_theta);
}

StabilityReport probe_impl(
    const RobinCoefficient& gamma_star, double b, int n_samples, std::uint64_t seed,
    ProbeMode mode, const AnnulusGrid& grid, unsigned jobs,
    const std::function<double(const RobinCoefficient&, const RobinCoefficient&)>& data_dist) {
    if (!(b > 0.0)) throw InvalidArgument("probe_neighborhood: b must be positive");
    if (n_samples < 0) throw InvalidArgument("probe_neighborhood: negative sample count");
    if (gamma_star.size() != grid.n_theta)
        throw InvalidArgument("probe_neighborhood: gamma_star length does not match n_theta");
    if (!gamma_star.feasible())
        throw InvalidArgument("probe_neighborhood: gamma_star leaves the feasible box");

    const double excursion = excursion_bound(b, mode, grid);
    for (int j = 0; j < grid.n_theta; ++j) {
        if (gamma_star.values[j] - excursion < gamma_star.lo ||
            gamma_star.values[j] + excursion > gamma_star.hi)
            throw InvalidArgument(
                "probe_neighborhood: neighborhood of radius b exits the feasible box");
    }

    StabilityReport rep;
    rep.b = b;
    rep.n_samples = n_samples;
    rep.mode = mode;
    rep.seed = seed;
    rep.coeff_dists.assign(n_samples, 0.0);
    rep.data_dists.assign(n_samples, 0.0);
    rep.ratios.assign(n_samples, std::numeric_limits<double>::quiet_NaN());
    if (n_samples == 0) return rep;

    const SampleSet samples = draw_samples(b, n_samples, seed, mode, grid);

    parallel_for(static_cast<std::size_t>(n_samples), jobs, [&](std::size_t s) {
        const RobinCoefficient g1(gamma_star.values + samples.pert1[s], gamma_star.lo,
                                  gamma_star.hi);
        const RobinCoefficient g2(gamma_star.values + samples.pert2[s], gamma_star.lo,
                                  gamma_star.hi);
        const double num = inner_dist(g1, g2, grid);
        rep.coeff_dists[s] = num;
        const double den = data_dist(g1, g2);
        rep.data_dists[s] = den;
        if (num > 0.0 && den > 0.0) rep.ratios[s] = num / den;
    });

    std::vector<double> valid;
    valid.reserve(n_samples);
    for (double r : rep.ratios) {
        if (std::isnan(r))
            ++rep.identifiability_violations;
        else
            valid.push_back(r);
    }
    if (!valid.empty()) {
        std::sort(valid.begin(), valid.end());
        rep.min_ratio = valid.front();
        rep.max_ratio = valid.back();
        auto quantile = [&](double q) {
            const double pos = q * (valid.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, valid.size() - 1);
            const double frac = pos - lo;
            return valid[lo] * (1.0 - frac) + valid[hi] * frac;
        };
        rep.median_ratio = quantile(0.5);
        rep.p95_ratio = quantile(0.95);
    }
    return rep;
}

}  // namespace

double lipschitz_ratio(const RobinCoefficient& gamma1, const RobinCoefficient& gamma2,
                       const EllipticSetup& setup) {
    return ratio_impl(gamma1, gamma2, setup.grid,
                      [&](const RobinCoefficient& a, const RobinCoefficient& b) {
                          return elliptic_data_dist(a, b, setup);
                      });
}

double lipschitz_ratio(const RobinCoefficient& gamma1, const RobinCoefficient& gamma2,
                       const ParabolicSetup& setup) {
    return ratio_impl(gamma1, gamma2, setup.grid,
                      [&](const RobinCoefficient& a, const RobinCoefficient& b) {
                          return parabolic_data_dist(a, b, setup);
                      });
}

StabilityReport probe_neighborhood(const RobinCoefficient& gamma_star, double b, int n_samples,
                                   std::uint64_t seed, ProbeMode mode, const EllipticSetup& setup,
                                   unsigned jobs) {
    return probe_impl(gamma_star, b, n_samples, seed, mode, setup.grid, jobs,
                      [&](const RobinCoefficient& g1, const RobinCoefficient& g2) {
                          return elliptic_data_dist(g1, g2, setup);
                      });
}

StabilityReport probe_neighborhood(const RobinCoefficient& gamma_star, double b, int n_samples,
                                   std::uint64_t seed, ProbeMode mode, const ParabolicSetup& setup,
                                   unsigned jobs) {
    return probe_impl(gamma_star, b, n_samples, seed, mode, setup.grid, jobs,
                      [&](const RobinCoefficient& g1, const RobinCoefficient& g2) {
                          return parabolic_data_dist(g1, g2, setup);
                      });
}

std::vector<BcComparisonEntry> compare_outer_bc(const RobinCoefficient& gamma_star,
                                                const EllipticSetup& setup) {
    const Field u_star = solve_elliptic(setup.problem(gamma_star));
    std::vector<BcComparisonEntry> out;
    for (OuterBC bc : {OuterBC::Robin1, OuterBC::Neumann, OuterBC::Dirichlet}) {
        EllipticSetup variant = setup;
        variant.outer_bc = bc;
        const EllipticSolver solver(variant.problem(gamma_star));
        const LinearizedMap map = assemble_N_matrix(solver, u_star);
        BcComparisonEntry entry;
        entry.outer_bc = bc;
        entry.conditioning = conditioning_report(map);
        entry.constant_mode_response = entry.conditioning.mode_response[0];
        out.push_back(std::move(entry));
    }
    return out;
}

const char* to_string(OuterBC bc) {
    switch (bc) {
        case OuterBC::Robin1: return "robin";
        case OuterBC::Neumann: return "neumann";
        case OuterBC::Dirichlet: return "dirichlet";
    }
    return "unknown";
}

const char* to_string(ProbeMode mode) {
    switch (mode) {
        case ProbeMode::RadialOnly: return "radial";
        case ProbeMode::FullAngle: return "full";
    }
    return "unknown";
}

}  // namespace robin
