#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dendro/dendrogram.hpp"
#include "dendro/dissimilarity.hpp"
#include "dendro/estimator.hpp"
#include "dendro/mh_pruning.hpp"
#include "dendro/rng.hpp"
#include "dendro/samplers.hpp"

namespace dendro {

struct ExperimentSpec {
    std::size_t n = 5;
    double noise_std = 0.1;
    /// Frequency study: measurements drawn.
    std::size_t n_measurements = 200;
    /// Comparison study: height vectors and measurements per height.
    std::size_t n_heights = 8;
    std::size_t per_height = 100;
    MHConfig mh{};
    LikelihoodConfig likelihood{};
    std::uint64_t seed = 42;
    /// Comparison study structure; drawn from the seed when unset.
    std::optional<std::size_t> structure_index;
    /// Frequency study: draw a fresh ground truth for every measurement instead of
    /// measuring one ground-truth metric repeatedly.
    bool redraw_truth = true;
};

void validate(const ExperimentSpec& spec);

struct GroundTruth {
    Structure structure;
    HeightVector heights;
    Metric theta;
};

/// Uniform structure, uniform heights, and one uniform metric from the fiber.
GroundTruth generate_ground_truth(const StructureCatalog& catalog, Rng& rng);

inline constexpr std::size_t kFrequencyBins = 20;

/// Bin of a frequency count/total: [0, 0.05] is bin 0, (0.05k, 0.05(k+1)] is bin k.
std::size_t frequency_bin(std::size_t count, std::size_t total);

struct BinHistogram {
    std::array<double, kFrequencyBins + 1> edges{};
    /// Structures per bin, averaged over measurements.
    std::array<double, kFrequencyBins> mean_counts{};
};

struct RankDistribution {
    /// rank_counts[r - 1] = measurements whose true structure ranked r.
    std::vector<std::size_t> rank_counts;
    /// True structure never visited by the chain.
    std::size_t unranked = 0;
    std::size_t measurements = 0;

    double probability(std::size_t rank) const;
    double unranked_probability() const;
};

/// Per-measurement summary of one MH tally.
struct TallySummary {
    std::array<std::size_t, kFrequencyBins> bins{};
    std::optional<std::size_t> true_rank;
    /// The chain hit ProposalStuck; no tally exists for this measurement.
    bool stuck = false;
};

/// Bins every catalog structure by its frequency in the tally (0 when unseen) and
/// ranks the true structure among the visited ones.
TallySummary summarize_tally(const StructureTally& tally, const StructureCatalog& catalog, const Structure& truth);

/// Measurements whose chain got stuck count as unranked and are left out of the
/// histogram average.
struct FrequencyStudy {
    BinHistogram histogram;
    RankDistribution ranks;
    std::size_t stuck = 0;
};

FrequencyStudy run_frequency_study(const ExperimentSpec& spec);

struct ComparisonRow {
    double noise_std;
    double mle_rate;
    double slhc_rate;
    /// Trials where the MLE threw InsufficientSamples or ProposalStuck; counted as misses.
    std::size_t mle_failures = 0;
};

/// Fixed structure, n_heights shared height vectors, per_height fiber metrics
/// and one measurement each, for every noise level. Rates are averaged over heights.
std::vector<ComparisonRow> run_comparison_study(const ExperimentSpec& spec, std::span<const double> noise_levels);

void write_histogram_csv(std::ostream& out, const BinHistogram& histogram);
void write_ranks_csv(std::ostream& out, const RankDistribution& ranks);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace dendro
