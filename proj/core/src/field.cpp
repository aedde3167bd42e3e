#include "robin/field.hpp"

#include "robin/errors.hpp"

#include <cmath>

namespace robin {

Eigen::VectorXd Field::flattened() const {
    Eigen::VectorXd v(values.size());
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < values.cols(); ++j) v[i * values.cols() + j] = values(i, j);
    return v;
}

Field Field::from_flat(const Eigen::VectorXd& v, const AnnulusGrid& grid) {
    if (v.size() != grid.size()) throw InvalidArgument("Field::from_flat: size mismatch");
    Field f = Field::zero(grid);
    for (int i = 0; i < grid.n_r; ++i)
        for (int j = 0; j < grid.n_theta; ++j) f.values(i, j) = v[grid.index(i, j)];
    return f;
}

double field_norm_L2(const Field& field, const AnnulusGrid& grid) {
    if (field.n_r() != grid.n_r || field.n_theta() != grid.n_theta)
        throw InvalidArgument("field_norm_L2: field shape does not match grid");
    double acc = 0.0;
    for (int i = 0; i < grid.n_r; ++i) {
        const double radial_w = (i == 0 || i == grid.n_r - 1) ? 0.5 : 1.0;
        const double w = radial_w * grid.r_nodes[i] * grid.h_r * grid.h_theta;
        acc += w * field.values.row(i).squaredNorm();
    }
    return std::sqrt(acc);
}

BoundaryTrace trace(const Field& field, Boundary boundary) {
    const int i = boundary == Boundary::Inner ? 0 : field.n_r() - 1;
    return {boundary, field.values.row(i).transpose()};
}

BoundaryTrace normal_derivative(const Field& field, Boundary boundary, const AnnulusGrid& grid) {
    if (field.n_r() != grid.n_r || field.n_theta() != grid.n_theta)
        throw InvalidArgument("normal_derivative: field shape does not match grid");
    const double s = 1.0 / (2.0 * grid.h_r);
    Eigen::VectorXd out(grid.n_theta);
    if (boundary == Boundary::Inner) {
        // d/dn = -d/dr at r = r1
        for (int j = 0; j < grid.n_theta; ++j)
            out[j] = s * (3.0 * field.values(0, j) - 4.0 * field.values(1, j) + field.values(2, j));
    } else {
        const int m = grid.n_r - 1;
        for (int j = 0; j < grid.n_theta; ++j)
            out[j] = s * (3.0 * field.values(m, j) - 4.0 * field.values(m - 1, j) + field.values(m - 2, j));
    }
    return {boundary, out};
}

BoundaryTrace normal_derivative_cubic(const Field& field, Boundary boundary,
                                      const AnnulusGrid& grid) {
    if (field.n_r() != grid.n_r || field.n_theta() != grid.n_theta)
        throw InvalidArgument("normal_derivative_cubic: field shape does not match grid");
    if (grid.n_r < 4)
        throw InvalidArgument("normal_derivative_cubic: needs at least 4 radial nodes");
    const double s = 1.0 / (6.0 * grid.h_r);
    Eigen::VectorXd out(grid.n_theta);
    if (boundary == Boundary::Inner) {
        // d/dn = -d/dr at r = r1
        for (int j = 0; j < grid.n_theta; ++j)
            out[j] = s * (11.0 * field.values(0, j) - 18.0 * field.values(1, j) +
                          9.0 * field.values(2, j) - 2.0 * field.values(3, j));
    } else {
        const int m = grid.n_r - 1;
        for (int j = 0; j < grid.n_theta; ++j)
            out[j] = s * (11.0 * field.values(m, j) - 18.0 * field.values(m - 1, j) +
                          9.0 * field.values(m - 2, j) - 2.0 * field.values(m - 3, j));
    }
    return {boundary, out};
}

Field radial_harmonic_oracle(double c1, double c2, const AnnulusGrid& grid) {
    Field f = Field::zero(grid);
    for (int i = 0; i < grid.n_r; ++i) {
        const double v = c1 + c2 * std::log(grid.r_nodes[i]);
        f.values.row(i).setConstant(v);
    }
    return f;
}

}  // namespace robin
