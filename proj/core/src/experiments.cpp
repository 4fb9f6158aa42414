#include "dendro/experiments.hpp"

#include <ostream>
#include <string>

#include "dendro/errors.hpp"
#include "dendro/io.hpp"
#include "dendro/noise_model.hpp"
#include "dendro/parallel.hpp"
#include "dendro/spanning_tree.hpp"

namespace dendro {

void validate(const ExperimentSpec& spec) {
    if (spec.n < 2 || spec.n_measurements == 0 || spec.n_heights == 0 || spec.per_height == 0) {
        throw DomainError{"experiment counts must be positive and n >= 2"};
    }
    if (!(spec.noise_std > 0.0)) {
        throw DomainError{"noise standard deviation must be positive"};
    }
    validate(spec.mh);
    validate(spec.likelihood);
}

GroundTruth generate_ground_truth(const StructureCatalog& catalog, Rng& rng) {
    Rng pick = rng.split("structure");
    const Structure& tau = catalog[pick.below(catalog.size())];
    Rng height_rng = rng.split("heights");
    HeightVector a = sample_height(catalog.leaves(), height_rng);
    Rng fiber_rng = rng.split("fiber");
    Metric theta = draw_fiber_point(compose(tau, a), fiber_rng);
    return GroundTruth{tau, std::move(a), std::move(theta)};
}

std::size_t frequency_bin(std::size_t count, std::size_t total) {
    // ceil(20 c / N) - 1, clamped to bin 0; integer arithmetic keeps edges exact.
    const std::size_t scaled = count * kFrequencyBins;
    const std::size_t ceil = (scaled + total - 1) / total;
    return ceil == 0 ? 0 : std::min(ceil - 1, kFrequencyBins - 1);
}

double RankDistribution::probability(std::size_t rank) const {
    if (rank == 0 || rank > rank_counts.size() || measurements == 0) {
        return 0.0;
    }
    return static_cast<double>(rank_counts[rank - 1]) / static_cast<double>(measurements);
}

double RankDistribution::unranked_probability() const {
    return measurements == 0 ? 0.0 : static_cast<double>(unranked) / static_cast<double>(measurements);
}

TallySummary summarize_tally(const StructureTally& tally, const StructureCatalog& catalog, const Structure& truth) {
    TallySummary summary;
    for (const auto& s : catalog.all()) {
        ++summary.bins[frequency_bin(tally.count(s), tally.total())];
    }
    std::size_t rank = 0;
    for (const auto& [s, c] : tally.ranked()) {
        if (!catalog.index_of(s)) {
            continue;
        }
        ++rank;
        if (s == truth) {
            summary.true_rank = rank;
            break;
        }
    }
    return summary;
}

FrequencyStudy run_frequency_study(const ExperimentSpec& spec) {
    validate(spec);
    const StructureCatalog catalog{spec.n};
    const NoiseSpec noise = NoiseSpec::from_std(spec.noise_std);
    const LogNormalNoise model{noise};
    const Rng root{spec.seed};

    std::vector<TallySummary> summaries(spec.n_measurements);
    parallel_for(spec.n_measurements, [&](std::size_t m) {
        Rng truth_rng = spec.redraw_truth ? root.split("truth", m) : root.split("truth");
        const GroundTruth truth = generate_ground_truth(catalog, truth_rng);
        Rng stream = root.split("measurement", m);
        Rng noise_rng = stream.split("noise");
        const Dissimilarity x = sample_measurement(truth.theta.values(), model, noise_rng);
        Rng chain_rng = stream.split("mh");
        try {
            const StructureTally tally = mh_sample(x, initial_state(x), model, spec.mh, chain_rng);
            summaries[m] = summarize_tally(tally, catalog, truth.structure);
        } catch (const ProposalStuck&) {
            summaries[m].stuck = true;
        }
    });

    FrequencyStudy study;
    for (std::size_t b = 0; b <= kFrequencyBins; ++b) {
        study.histogram.edges[b] = static_cast<double>(b) / static_cast<double>(kFrequencyBins);
    }
    study.ranks.rank_counts.assign(catalog.size(), 0);
    study.ranks.measurements = spec.n_measurements;
    for (const auto& s : summaries) {
        if (s.stuck) {
            ++study.stuck;
            ++study.ranks.unranked;
            continue;
        }
        for (std::size_t b = 0; b < kFrequencyBins; ++b) {
            study.histogram.mean_counts[b] += static_cast<double>(s.bins[b]);
        }
        if (s.true_rank) {
            ++study.ranks.rank_counts[*s.true_rank - 1];
        } else {
            ++study.ranks.unranked;
        }
    }
    const std::size_t completed = spec.n_measurements - study.stuck;
    for (double& c : study.histogram.mean_counts) {
        c = completed == 0 ? 0.0 : c / static_cast<double>(completed);
    }
    return study;
}

std::vector<ComparisonRow> run_comparison_study(const ExperimentSpec& spec, std::span<const double> noise_levels) {
    validate(spec);
    const StructureCatalog catalog{spec.n};
    const Rng root{spec.seed};
    std::size_t index = 0;
    if (spec.structure_index) {
        if (*spec.structure_index >= catalog.size()) {
            throw DomainError{"structure index " + std::to_string(*spec.structure_index) + " out of range [0, " +
                              std::to_string(catalog.size()) + ")"};
        }
        index = *spec.structure_index;
    } else {
        Rng pick = root.split("structure");
        index = pick.below(catalog.size());
    }
    const Structure& tau = catalog[index];

    std::vector<Ultrametric> targets;
    for (std::size_t h = 0; h < spec.n_heights; ++h) {
        Rng height_rng = root.split("height", h);
        targets.push_back(compose(tau, sample_height(spec.n, height_rng)));
    }

    EstimatorConfig estimator{spec.mh, spec.likelihood, false};
    std::vector<ComparisonRow> rows;
    for (std::size_t level = 0; level < noise_levels.size(); ++level) {
        const NoiseSpec noise = NoiseSpec::from_std(noise_levels[level]);
        const LogNormalNoise model{noise};
        const Rng level_rng = root.split("noise-level", level);
        const std::size_t trials = spec.n_heights * spec.per_height;

        std::vector<char> mle_hit(trials, 0);
        std::vector<char> slhc_hit(trials, 0);
        std::vector<char> failed(trials, 0);
        parallel_for(trials, [&](std::size_t t) {
            const Ultrametric& u = targets[t / spec.per_height];
            Rng stream = level_rng.split("trial", t);
            Rng theta_rng = stream.split("theta");
            const Metric theta = draw_fiber_point(u, theta_rng);
            Rng noise_rng = stream.split("noise");
            const Dissimilarity x = sample_measurement(theta.values(), model, noise_rng);
            slhc_hit[t] = slhc_estimate(x) == tau;
            try {
                Rng mle_rng = stream.split("mle");
                mle_hit[t] = mle_estimate(x, noise, estimator, mle_rng).chosen == tau;
            } catch (const InsufficientSamples&) {
                failed[t] = 1;
            } catch (const ProposalStuck&) {
                failed[t] = 1;
            }
        });

        ComparisonRow row{noise_levels[level], 0.0, 0.0, 0};
        for (std::size_t h = 0; h < spec.n_heights; ++h) {
            std::size_t mle = 0;
            std::size_t base = 0;
            for (std::size_t m = 0; m < spec.per_height; ++m) {
                const std::size_t t = h * spec.per_height + m;
                mle += mle_hit[t];
                base += slhc_hit[t];
                row.mle_failures += failed[t];
            }
            row.mle_rate += static_cast<double>(mle) / static_cast<double>(spec.per_height);
            row.slhc_rate += static_cast<double>(base) / static_cast<double>(spec.per_height);
        }
        row.mle_rate /= static_cast<double>(spec.n_heights);
        row.slhc_rate /= static_cast<double>(spec.n_heights);
        rows.push_back(row);
    }
    return rows;
}

void write_histogram_csv(std::ostream& out, const BinHistogram& histogram) {
    out << "bin_lo,bin_hi,mean_count\n";
    for (std::size_t b = 0; b < kFrequencyBins; ++b) {
        out << io::format_double(histogram.edges[b]) << ',' << io::format_double(histogram.edges[b + 1]) << ','
            << io::format_double(histogram.mean_counts[b]) << '\n';
    }
}

void write_ranks_csv(std::ostream& out, const RankDistribution& ranks) {
    out << "rank,probability\n";
    for (std::size_t r = 1; r <= ranks.rank_counts.size(); ++r) {
        out << r << ',' << io::format_double(ranks.probability(r)) << '\n';
    }
    out << "unranked," << io::format_double(ranks.unranked_probability()) << '\n';
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
    out << "noise_std,mle_rate,slhc_rate\n";
    for (const auto& row : rows) {
        out << io::format_double(row.noise_std) << ',' << io::format_double(row.mle_rate) << ','
            << io::format_double(row.slhc_rate) << '\n';
    }
}

}  // namespace dendro
