#pragma once

#include <Eigen/Core>

namespace robin {

/// Robin coefficient discretized on the inner boundary, together with the box
/// bounds of the feasible set: 0 < lo <= gamma <= hi pointwise.
struct RobinCoefficient {
    Eigen::VectorXd values;
    double lo = 0.0;
    double hi = 0.0;

    RobinCoefficient() = default;
    RobinCoefficient(Eigen::VectorXd vals, double lo_bound, double hi_bound);

    static RobinCoefficient constant(double value, double lo, double hi, int n_theta);

    int size() const { return static_cast<int>(values.size()); }
    bool feasible() const;

    /// New coefficient with the candidate values clipped pointwise into [lo, hi].
    RobinCoefficient projected(const Eigen::VectorXd& candidate) const;
};

}  // namespace robin
