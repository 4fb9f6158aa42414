#include "dendro/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dendro/errors.hpp"
#include "dendro/parallel.hpp"

namespace dendro {

void validate(const LikelihoodConfig& cfg) {
    if (cfg.n_omega == 0) {
        throw DomainError{"n_omega must be positive"};
    }
    validate(cfg.fiber_budget);
}

PhiEstimate pooled_log_mean(const Dissimilarity& x, std::span<const FiberSample> samples, const NoiseModel& model) {
    if (samples.empty()) {
        throw InsufficientSamples{"no fiber samples to average"};
    }
    std::vector<double> log_p;
    log_p.reserve(samples.size());
    for (const auto& s : samples) {
        const double lp = model.log_density(x.values(), s.theta.values().values());
        if (!std::isfinite(lp)) {
            throw DomainError{"non-finite log density for a fiber sample"};
        }
        log_p.push_back(lp);
    }
    const double log_mean = weighted_log_mean(log_p, samples);

    // Ratio-estimator standard error with normalized weights.
    double top = samples.front().log_weight;
    for (const auto& s : samples) {
        top = std::max(top, s.log_weight);
    }
    double weight_sum = 0.0;
    double weighted_sq = 0.0;
    for (std::size_t l = 0; l < log_p.size(); ++l) {
        const double w = std::exp(samples[l].log_weight - top);
        const double r = std::exp(log_p[l] - log_mean) - 1.0;
        weight_sum += w;
        weighted_sq += w * w * r * r;
    }
    const double rse = log_p.size() > 1 ? std::sqrt(weighted_sq) / weight_sum : 0.0;
    return PhiEstimate{log_mean, log_p.size(), rse};
}

PhiEstimate phi(const Dissimilarity& x, const Ultrametric& u, const NoiseModel& model, const LikelihoodConfig& cfg,
                Rng& rng) {
    if (x.size() != u.size()) {
        throw DomainError{"measurement and ultrametric sizes differ"};
    }
    const auto draw = sample_fiber(u, cfg.fiber_budget, rng);
    return pooled_log_mean(x, draw.samples, model);
}

LogLikelihood structure_log_likelihood(const Dissimilarity& x, const Structure& tau, const NoiseModel& model,
                                       const LikelihoodConfig& cfg, Rng& rng) {
    validate(cfg);
    if (!tau.is_binary()) {
        throw DomainError{"likelihood evaluation needs a binary structure"};
    }
    if (tau.size() != x.size()) {
        throw DomainError{"structure and measurement sizes differ"};
    }
    const std::size_t n = x.size();
    std::vector<double> per_height(cfg.n_omega, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> failed(cfg.n_omega, 0);

    parallel_for(cfg.n_omega, [&](std::size_t h) {
        Rng stream = rng.split("height", h);
        const HeightVector a = sample_height(n, stream);
        try {
            const Ultrametric u = compose(tau, a);
            Rng fiber_rng = stream.split("fiber");
            per_height[h] = phi(x, u, model, cfg, fiber_rng).log_value;
        } catch (const InsufficientSamples&) {
            failed[h] = 1;
        } catch (const InvalidInput&) {
            // A zero height gives a degenerate ultrametric with no fiber.
            failed[h] = 1;
        }
    });

    std::vector<double> ok;
    ok.reserve(cfg.n_omega);
    for (std::size_t h = 0; h < cfg.n_omega; ++h) {
        if (!failed[h]) {
            ok.push_back(per_height[h]);
        }
    }
    const std::size_t n_failed = cfg.n_omega - ok.size();
    if (ok.empty() || static_cast<double>(n_failed) > cfg.max_failed_fraction * static_cast<double>(cfg.n_omega)) {
        throw InsufficientSamples{std::to_string(n_failed) + " of " + std::to_string(cfg.n_omega) +
                                  " height draws failed fiber sampling"};
    }
    return LogLikelihood{log_mean_exp(ok), ok.size(), n_failed};
}

}  // namespace dendro
