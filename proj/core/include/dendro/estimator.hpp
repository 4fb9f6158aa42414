#pragma once

#include <cstddef>
#include <vector>

#include "dendro/dendrogram.hpp"
#include "dendro/dissimilarity.hpp"
#include "dendro/likelihood.hpp"
#include "dendro/mh_pruning.hpp"
#include "dendro/noise_model.hpp"
#include "dendro/rng.hpp"

namespace dendro {

struct EstimatorConfig {
    MHConfig mh{};
    LikelihoodConfig likelihood{};
    /// Divide x (and the noise scale) by s so that max slhc(x) = 1 - 1e-6.
    bool rescale = true;
};

struct RankedHypothesis {
    Structure structure;
    double log_likelihood;
    /// Occurrences in the MH tally.
    std::size_t mh_count;
};

struct EstimateReport {
    /// Scored hypotheses by descending log-likelihood, ties in canonical order.
    std::vector<RankedHypothesis> ranked;
    Structure chosen;
    Structure baseline;
    bool baseline_degenerate = false;
    /// Factor x was divided by before estimation (1 when not rescaled).
    double scale = 1.0;
};

struct NormalizedMeasurement {
    Dissimilarity x;
    double scale;
};

/// s = max slhc(x) / (1 - 1e-6); returns x / s.
NormalizedMeasurement normalize_to_theta(const Dissimilarity& x);

/// Structure of the single-linkage dendrogram of the raw measurement. May be degenerate.
Dendrogram slhc_dendrogram(const Dissimilarity& x);
Structure slhc_estimate(const Dissimilarity& x);

/// Approximate maximum-likelihood structure: MH tally over the normalized metric
/// space, pruning to the most frequent binary structures, then integrated
/// likelihood scoring of each survivor. Survivors share the likelihood stream, so
/// they are scored on the same height draws.
EstimateReport mle_estimate(const Dissimilarity& x, const NoiseSpec& noise, const EstimatorConfig& cfg, Rng& rng);

}  // namespace dendro
