#pragma once

#include "robin/errors.hpp"
#include "robin/inverse.hpp"
#include "robin/linop.hpp"

#include <cstdint>
#include <vector>

namespace robin {

enum class ProbeMode { RadialOnly, FullAngle };

/// Per-sample ratios |gamma1 - gamma2| on the inner circle over the data-space
/// distance of the outer measurements, plus order statistics. The max ratio is
/// the empirical counterpart of the stability constant.
struct StabilityReport {
    double b = 0.0;
    int n_samples = 0;
    ProbeMode mode = ProbeMode::RadialOnly;
    std::uint64_t seed = 0;
    std::vector<double> coeff_dists;
    std::vector<double> data_dists;
    std::vector<double> ratios;  // NaN marks an identifiability violation
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    double p95_ratio = 0.0;
    int identifiability_violations = 0;
};

/// Zero data-space distance between distinct coefficients; carries both.
class RatioIdentifiabilityError : public IdentifiabilityError {
  public:
    RatioIdentifiabilityError(const std::string& what, RobinCoefficient gamma1,
                              RobinCoefficient gamma2)
        : IdentifiabilityError(what), gamma1_(std::move(gamma1)), gamma2_(std::move(gamma2)) {}

    const RobinCoefficient& gamma1() const { return gamma1_; }
    const RobinCoefficient& gamma2() const { return gamma2_; }

  private:
    RobinCoefficient gamma1_;
    RobinCoefficient gamma2_;
};

double lipschitz_ratio(const RobinCoefficient& gamma1, const RobinCoefficient& gamma2,
                       const EllipticSetup& setup);
double lipschitz_ratio(const RobinCoefficient& gamma1, const RobinCoefficient& gamma2,
                       const ParabolicSetup& setup);

/// Draws n_samples coefficient pairs uniformly from the ball of radius b
/// around gamma_star (RadialOnly: constant offsets; FullAngle: random angular
/// profiles) and evaluates the ratio per pair. Deterministic for a fixed seed
/// at any jobs count: samples are drawn up front, evaluated into slots, and
/// aggregated in index order.
StabilityReport probe_neighborhood(const RobinCoefficient& gamma_star, double b, int n_samples,
                                   std::uint64_t seed, ProbeMode mode, const EllipticSetup& setup,
                                   unsigned jobs = 1);
StabilityReport probe_neighborhood(const RobinCoefficient& gamma_star, double b, int n_samples,
                                   std::uint64_t seed, ProbeMode mode, const ParabolicSetup& setup,
                                   unsigned jobs = 1);

/// Linearized-map diagnostics at the same gamma_star and forward state for the
/// three outer boundary conditions; diagnostic output only, no verdict.
struct BcComparisonEntry {
    OuterBC outer_bc = OuterBC::Robin1;
    double constant_mode_response = 0.0;
    ConditioningReport conditioning;
};

std::vector<BcComparisonEntry> compare_outer_bc(const RobinCoefficient& gamma_star,
                                                const EllipticSetup& setup);

const char* to_string(OuterBC bc);
const char* to_string(ProbeMode mode);

}  // namespace robin
