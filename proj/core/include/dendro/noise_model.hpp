#pragma once

#include <cmath>
#include <memory>
#include <span>

#include "dendro/dissimilarity.hpp"
#include "dendro/rng.hpp"

namespace dendro {

/// Global measurement variance v (squared distance units).
struct NoiseSpec {
    double variance;

    /// Throws DomainError unless std > 0.
    static NoiseSpec from_std(double std);
    double std_dev() const noexcept { return std::sqrt(variance); }
};

struct LogNormalParams {
    double mu;
    double sigma;
};

/// Lognormal parameters whose distribution has mean theta and variance v.
/// Throws DomainError if theta <= 0 or v <= 0.
LogNormalParams params_for(double theta, const NoiseSpec& spec);

/// Per-pair measurement distribution G_theta, applied independently to every pair.
class NoiseModel {
  public:
    virtual ~NoiseModel() = default;

    virtual double log_density(double x, double theta) const = 0;
    virtual double sample(double theta, Rng& rng) const = 0;
    virtual const NoiseSpec& spec() const noexcept = 0;

    /// Sum of per-pair log densities. Spans must have equal length.
    double log_density(std::span<const double> x, std::span<const double> theta) const;
};

class LogNormalNoise final : public NoiseModel {
  public:
    explicit LogNormalNoise(NoiseSpec spec);

    double log_density(double x, double theta) const override;
    double sample(double theta, Rng& rng) const override;
    const NoiseSpec& spec() const noexcept override { return spec_; }

    using NoiseModel::log_density;

  private:
    NoiseSpec spec_;
};

/// log p(x | theta) under the lognormal model. Throws DomainError on sizes or nonpositive entries.
double log_density(const Dissimilarity& x, const Dissimilarity& theta, const NoiseSpec& spec);

/// One independent lognormal draw per pair.
Dissimilarity sample_measurement(const Dissimilarity& theta, const NoiseModel& model, Rng& rng);
Dissimilarity sample_measurement(const Dissimilarity& theta, const NoiseSpec& spec, Rng& rng);

}  // namespace dendro
