#include "dendro/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <string>

#include "dendro/errors.hpp"
#include "dendro/parallel.hpp"

namespace dendro {

namespace {

constexpr std::size_t kRoundSize = 32;
constexpr std::size_t kPickPool = 64;

/// Proposal state for one cone of a fiber.
class ConeSampler {
  public:
    /// Rejection with every free coordinate uniform on `box`.
    ConeSampler(const ConeSpec& spec, FiberBounds box, Rng rng, std::size_t index)
      : spec_{&spec}, rng_{std::move(rng)}, index_{index} {
        for (const std::size_t k : free_coordinates(spec)) {
            free_.push_back(Free{k, box.lo, box.hi, {}});
        }
    }

    /// Rejection from the cone's own box, or the sequential proposal.
    ConeSampler(const ConeSpec& spec, FiberProposal proposal, Rng rng, std::size_t index)
      : spec_{&spec}, rng_{std::move(rng)}, index_{index}, sequential_{proposal == FiberProposal::sequential} {
        const std::size_t n = spec.tree().size();
        const auto u = spec.ultrametric().values().values();
        const auto upper = spec.upper_bounds();
        std::vector<char> set(spec.tree_mask().begin(), spec.tree_mask().end());
        for (const std::size_t k : free_coordinates(spec)) {
            Free f{k, u[k], upper[k], {}};
            if (sequential_) {
                const auto [i, j] = pair_of(n, k);
                for (std::size_t m = 0; m < n; ++m) {
                    if (m == i || m == j) {
                        continue;
                    }
                    const std::size_t a = pair_index(n, std::min(i, m), std::max(i, m));
                    const std::size_t b = pair_index(n, std::min(j, m), std::max(j, m));
                    if (set[a] && set[b]) {
                        f.sides.emplace_back(a, b);
                    }
                }
            }
            set[k] = 1;
            free_.push_back(std::move(f));
        }
        if (!sequential_) {
            for (const auto& f : free_) {
                box_log_volume_ += std::log(f.hi - f.lo);
            }
        }
    }

    /// Draws `proposals` candidates and appends the accepted ones.
    void run(std::size_t proposals, std::vector<FiberSample>& out) {
        const auto u = spec_->ultrametric().values().values();
        std::vector<double> theta(u.begin(), u.end());
        for (std::size_t p = 0; p < proposals; ++p) {
            const auto log_weight = sequential_ ? propose_sequential(theta) : propose_box(theta);
            if (log_weight) {
                out.push_back(FiberSample{Metric::assume_valid(Dissimilarity{spec_->tree().size(), theta}),
                                          index_, *log_weight});
            }
        }
    }

  private:
    struct Free {
        std::size_t index;
        double lo;
        double hi;
        /// Coordinate pairs that close a triangle with this one and are set before it.
        std::vector<std::pair<std::size_t, std::size_t>> sides;
    };

    static std::vector<std::size_t> free_coordinates(const ConeSpec& spec) {
        std::vector<std::size_t> out;
        const auto& mask = spec.tree_mask();
        for (std::size_t k = 0; k < mask.size(); ++k) {
            if (!mask[k]) {
                out.push_back(k);
            }
        }
        return out;
    }

    static std::pair<std::size_t, std::size_t> pair_of(std::size_t n, std::size_t k) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (pair_index(n, i, j) == k) {
                    return {i, j};
                }
            }
        }
        throw DomainError{"pair index out of range"};
    }

    std::optional<double> propose_box(std::vector<double>& theta) {
        const auto u = spec_->ultrametric().values().values();
        const auto upper = spec_->upper_bounds();
        for (const auto& f : free_) {
            const double v = rng_.uniform(f.lo, f.hi);
            if (!leq_tol(u[f.index], v) || !leq_tol(v, upper[f.index])) {
                return std::nullopt;
            }
            theta[f.index] = v;
        }
        if (find_triangle_violation(spec_->tree().size(), theta)) {
            return std::nullopt;
        }
        return box_log_volume_;
    }

    std::optional<double> propose_sequential(std::vector<double>& theta) {
        double log_weight = 0.0;
        for (const auto& f : free_) {
            double lo = f.lo;
            double hi = f.hi;
            for (const auto& [a, b] : f.sides) {
                lo = std::max(lo, std::abs(theta[a] - theta[b]));
                hi = std::min(hi, theta[a] + theta[b]);
            }
            if (!(hi > lo)) {
                return std::nullopt;
            }
            theta[f.index] = rng_.uniform(lo, hi);
            log_weight += std::log(hi - lo);
        }
        return log_weight;
    }

    const ConeSpec* spec_;
    Rng rng_;
    std::size_t index_;
    bool sequential_ = false;
    double box_log_volume_ = 0.0;
    std::vector<Free> free_;
};

}  // namespace

void validate(const SamplerBudget& budget) {
    if (budget.proposals_per_cone == 0 || budget.min_total_accepted == 0) {
        throw DomainError{"sampler budget counts must be positive"};
    }
}

HeightVector heights_from_simplex(std::span<const double> gamma) {
    if (gamma.size() < 2) {
        throw DomainError{"simplex point needs at least 2 coordinates"};
    }
    std::vector<double> a;
    a.reserve(gamma.size() - 1);
    double running = 0.0;
    for (std::size_t k = 0; k + 1 < gamma.size(); ++k) {
        running += gamma[k];
        a.push_back(std::min(running, 1.0));
    }
    return HeightVector{std::move(a)};
}

HeightVector sample_height(std::size_t n, Rng& rng) {
    if (n < 2) {
        throw DomainError{"height sampling needs n >= 2"};
    }
    std::vector<double> gamma(n);
    double total = 0.0;
    for (double& g : gamma) {
        g = rng.exponential();
        total += g;
    }
    for (double& g : gamma) {
        g /= total;
    }
    return heights_from_simplex(gamma);
}

std::vector<HeightVector> sample_heights(std::size_t n, std::size_t count, Rng& rng) {
    std::vector<HeightVector> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        out.push_back(sample_height(n, rng));
    }
    return out;
}

FiberBounds fiber_bounds(const ConeSpec& spec) {
    const auto upper = spec.upper_bounds();
    return FiberBounds{spec.ultrametric().values().min_value(), *std::max_element(upper.begin(), upper.end())};
}

FiberBounds fiber_bounds(const Ultrametric& u, const SpanningTree& tree) {
    return fiber_bounds(ConeSpec{tree, u});
}

std::vector<FiberSample> sample_cone(const ConeSpec& spec, FiberBounds box, std::size_t proposals, Rng& rng,
                                     std::size_t cone_index) {
    std::vector<FiberSample> out;
    ConeSampler{spec, box, rng, cone_index}.run(proposals, out);
    return out;
}

std::vector<FiberSample> sample_cone(const ConeSpec& spec, const SamplerBudget& budget, Rng& rng) {
    validate(budget);
    if (budget.proposal == FiberProposal::shared_box) {
        return sample_cone(spec, fiber_bounds(spec), budget.proposals_per_cone, rng);
    }
    std::vector<FiberSample> out;
    ConeSampler{spec, budget.proposal, rng, 0}.run(budget.proposals_per_cone, out);
    return out;
}

FiberDraw sample_fiber(const Ultrametric& u, const SamplerBudget& budget, Rng& rng) {
    validate(budget);
    std::vector<ConeSpec> cones;
    for (auto& tree : mst_set(u, budget.max_trees)) {
        cones.emplace_back(std::move(tree), u);
    }
    FiberDraw draw;
    draw.cones = cones.size();
    draw.box = fiber_bounds(cones.front());
    for (const auto& cone : cones) {
        draw.box.hi = std::max(draw.box.hi, fiber_bounds(cone).hi);
    }

    std::vector<ConeSampler> samplers;
    samplers.reserve(cones.size());
    for (std::size_t k = 0; k < cones.size(); ++k) {
        if (budget.proposal == FiberProposal::shared_box) {
            samplers.emplace_back(cones[k], draw.box, rng.split("cone", k), k);
        } else {
            samplers.emplace_back(cones[k], budget.proposal, rng.split("cone", k), k);
        }
    }
    std::vector<std::vector<FiberSample>> accepted(cones.size());
    auto pooled = [&] {
        std::size_t total = 0;
        for (const auto& a : accepted) {
            total += a.size();
        }
        return total;
    };

    std::size_t limit = budget.proposals_per_cone;
    for (std::size_t attempt = 0; attempt <= budget.max_retries; ++attempt) {
        bool satisfied = false;
        while (draw.proposals_per_cone < limit && !satisfied) {
            const std::size_t step = std::min(kRoundSize, limit - draw.proposals_per_cone);
            for (std::size_t k = 0; k < samplers.size(); ++k) {
                samplers[k].run(step, accepted[k]);
            }
            draw.proposals_per_cone += step;
            satisfied = budget.stop_when_satisfied && pooled() >= budget.min_total_accepted;
        }
        if (pooled() >= budget.min_total_accepted) {
            break;
        }
        limit *= 2;
    }
    if (pooled() < budget.min_total_accepted) {
        throw InsufficientSamples{"fiber sampling accepted " + std::to_string(pooled()) + " of the required " +
                                  std::to_string(budget.min_total_accepted) + " samples across " +
                                  std::to_string(cones.size()) + " cones"};
    }
    for (auto& a : accepted) {
        draw.accepted.push_back(a.size());
        std::move(a.begin(), a.end(), std::back_inserter(draw.samples));
    }
    return draw;
}

double weighted_log_mean(std::span<const double> log_values, std::span<const FiberSample> samples) {
    if (log_values.size() != samples.size() || samples.empty()) {
        throw DomainError{"weighted mean needs one value per sample"};
    }
    std::vector<double> numerator(samples.size());
    std::vector<double> weights(samples.size());
    for (std::size_t l = 0; l < samples.size(); ++l) {
        weights[l] = samples[l].log_weight;
        numerator[l] = log_values[l] + weights[l];
    }
    return log_sum_exp(numerator) - log_sum_exp(weights);
}

Metric draw_fiber_point(const Ultrametric& u, Rng& rng, std::size_t max_trees) {
    // A small weighted pool; the pick lands in cone k with probability close to
    // its share of the fiber volume and is uniform within the cone.
    SamplerBudget budget;
    budget.min_total_accepted = kPickPool;
    budget.proposals_per_cone = 1 << 16;
    budget.max_retries = 6;
    budget.max_trees = max_trees;
    auto draw = sample_fiber(u, budget, rng);
    std::vector<double> weights(draw.samples.size());
    const double top = std::max_element(draw.samples.begin(), draw.samples.end(), [](const auto& a, const auto& b) {
                           return a.log_weight < b.log_weight;
                       })->log_weight;
    double total = 0.0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        total += std::exp(draw.samples[l].log_weight - top);
        weights[l] = total;
    }
    const double target = rng.split("pick").uniform() * total;
    const auto it = std::upper_bound(weights.begin(), weights.end(), target);
    const auto pick = std::min<std::size_t>(static_cast<std::size_t>(it - weights.begin()), weights.size() - 1);
    return std::move(draw.samples[pick].theta);
}

}  // namespace dendro
