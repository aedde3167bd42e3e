#include "robin/geometry.hpp"

#include "robin/errors.hpp"

#include <cmath>
#include <numbers>

namespace robin {

AnnulusGrid build_annulus(double r1, double r2, int n_r, int n_theta) {
    if (!(r1 > 0.0)) throw InvalidArgument("build_annulus: inner radius must be positive");
    if (!(r2 > r1)) throw InvalidArgument("build_annulus: outer radius must exceed inner radius");
    if (n_r < 3) throw InvalidArgument("build_annulus: need at least 3 radial nodes");
    if (n_theta < 4) throw InvalidArgument("build_annulus: need at least 4 angular nodes");

    AnnulusGrid grid;
    grid.r1 = r1;
    grid.r2 = r2;
    grid.n_r = n_r;
    grid.n_theta = n_theta;
    grid.h_r = (r2 - r1) / (n_r - 1);
    grid.h_theta = 2.0 * std::numbers::pi / n_theta;

    grid.r_nodes.resize(n_r);
    for (int i = 0; i < n_r; ++i) grid.r_nodes[i] = r1 + i * grid.h_r;
    grid.r_nodes[n_r - 1] = r2;  // pin the endpoint against accumulation error

    grid.theta_nodes.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) grid.theta_nodes[j] = j * grid.h_theta;

    return grid;
}

double boundary_norm(const BoundaryTrace& trace, const AnnulusGrid& grid) {
    if (trace.values.size() != grid.n_theta)
        throw InvalidArgument("boundary_norm: trace length does not match grid");
    const double w = grid.boundary_radius(trace.boundary) * grid.h_theta;
    return std::sqrt(w * trace.values.squaredNorm());
}

}  // namespace robin
