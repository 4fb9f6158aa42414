#pragma once

#include <cstddef>
#include <span>

#include "dendro/dendrogram.hpp"
#include "dendro/dissimilarity.hpp"
#include "dendro/noise_model.hpp"
#include "dendro/rng.hpp"
#include "dendro/samplers.hpp"

namespace dendro {

struct LikelihoodConfig {
    /// Height vectors drawn from the order simplex.
    std::size_t n_omega = 100;
    SamplerBudget fiber_budget{};
    /// Fraction of height draws allowed to fail fiber sampling.
    double max_failed_fraction = 0.5;
};

void validate(const LikelihoodConfig& cfg);

/// Monte-Carlo estimate of log p(x|u).
struct PhiEstimate {
    double log_value;
    /// Pooled fiber samples N.
    std::size_t samples;
    /// Standard error of the sample mean of the densities, relative to the mean.
    double relative_std_error;
};

/// Integrated likelihood estimate log p(x|tau).
struct LogLikelihood {
    double value;
    std::size_t heights_used;
    std::size_t heights_failed;
};

/// Weighted average of p(x|theta_l) over the pooled samples of all cones, in log space.
PhiEstimate pooled_log_mean(const Dissimilarity& x, std::span<const FiberSample> samples, const NoiseModel& model);

/// log p(x|u) averaged over a uniform sample of the fiber of u.
/// Propagates InsufficientSamples from the fiber sampler.
PhiEstimate phi(const Dissimilarity& x, const Ultrametric& u, const NoiseModel& model, const LikelihoodConfig& cfg,
                Rng& rng);

/// log p(x|tau): averages phi over n_omega uniform height vectors composed with tau.
/// Height h draws from rng.split("height", h), so equal seeds give every structure
/// the same height vectors. Failed heights are skipped and the average is taken
/// over the successful ones; throws InsufficientSamples if too many fail.
LogLikelihood structure_log_likelihood(const Dissimilarity& x, const Structure& tau, const NoiseModel& model,
                                       const LikelihoodConfig& cfg, Rng& rng);

}  // namespace dendro
