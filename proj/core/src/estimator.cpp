#include "dendro/estimator.hpp"

#include <algorithm>

#include "dendro/errors.hpp"
#include "dendro/parallel.hpp"
#include "dendro/spanning_tree.hpp"

namespace dendro {

NormalizedMeasurement normalize_to_theta(const Dissimilarity& x) {
    const double scale = slhc(x).values().max_value() / (1.0 - 1e-6);
    return NormalizedMeasurement{x.scaled(1.0 / scale), scale};
}

Dendrogram slhc_dendrogram(const Dissimilarity& x) { return decompose(slhc(x)); }

Structure slhc_estimate(const Dissimilarity& x) { return slhc_dendrogram(x).structure; }

EstimateReport mle_estimate(const Dissimilarity& x, const NoiseSpec& noise, const EstimatorConfig& cfg, Rng& rng) {
    validate(cfg.mh);
    validate(cfg.likelihood);

    EstimateReport report;
    const Dendrogram baseline = slhc_dendrogram(x);
    report.baseline = baseline.structure;
    report.baseline_degenerate = baseline.degenerate();

    Dissimilarity data = x;
    NoiseSpec spec = noise;
    if (cfg.rescale) {
        auto normalized = normalize_to_theta(x);
        data = std::move(normalized.x);
        report.scale = normalized.scale;
        spec.variance /= report.scale * report.scale;
    }
    const LogNormalNoise model{spec};

    Rng chain_rng = rng.split("mh");
    const StructureTally tally = mh_sample(data, initial_state(data), model, cfg.mh, chain_rng);

    std::vector<std::pair<Structure, std::size_t>> survivors;
    for (auto& [s, c] : tally.ranked()) {
        if (survivors.size() == cfg.mh.n_hypotheses) {
            break;
        }
        if (s.is_binary()) {
            survivors.emplace_back(s, c);
        }
    }
    if (survivors.empty()) {
        throw Error{"the MH tally contains no binary structure to score"};
    }

    std::vector<double> scores(survivors.size());
    const Rng likelihood_rng = rng.split("likelihood");
    parallel_for(survivors.size(), [&](std::size_t k) {
        Rng stream = likelihood_rng;
        scores[k] = structure_log_likelihood(data, survivors[k].first, model, cfg.likelihood, stream).value;
    });

    for (std::size_t k = 0; k < survivors.size(); ++k) {
        report.ranked.push_back(RankedHypothesis{survivors[k].first, scores[k], survivors[k].second});
    }
    std::sort(report.ranked.begin(), report.ranked.end(), [](const RankedHypothesis& a, const RankedHypothesis& b) {
        if (a.log_likelihood != b.log_likelihood) {
            return a.log_likelihood > b.log_likelihood;
        }
        return a.structure < b.structure;
    });
    report.chosen = report.ranked.front().structure;
    return report;
}

}  // namespace dendro
