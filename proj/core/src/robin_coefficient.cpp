#include "robin/robin_coefficient.hpp"

#include "robin/errors.hpp"

#include <utility>

namespace robin {

RobinCoefficient::RobinCoefficient(Eigen::VectorXd vals, double lo_bound, double hi_bound)
    : values(std::move(vals)), lo(lo_bound), hi(hi_bound) {
    if (!(lo > 0.0)) throw InvalidArgument("RobinCoefficient: lower bound must be positive");
    if (!(hi >= lo)) throw InvalidArgument("RobinCoefficient: upper bound must be >= lower bound");
    if (!feasible())
        throw InvalidArgument("RobinCoefficient: values leave the feasible box [lo, hi]");
}

RobinCoefficient RobinCoefficient::constant(double value, double lo, double hi, int n_theta) {
    return RobinCoefficient(Eigen::VectorXd::Constant(n_theta, value), lo, hi);
}

bool RobinCoefficient::feasible() const {
    if (values.size() == 0) return false;
    return (values.array() >= lo).all() && (values.array() <= hi).all();
}

RobinCoefficient RobinCoefficient::projected(const Eigen::VectorXd& candidate) const {
    RobinCoefficient out;
    out.values = candidate.cwiseMax(lo).cwiseMin(hi);
    out.lo = lo;
    out.hi = hi;
    return out;
}

}  // namespace robin
