#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dendro/dendrogram.hpp"
#include "dendro/dissimilarity.hpp"
#include "dendro/rng.hpp"
#include "dendro/spanning_tree.hpp"

namespace dendro {

/// Proposal used inside every cone of a fiber.
enum class FiberProposal {
    /// Rejection from one interval [min u, max U] shared by every free coordinate
    /// of every cone; all samples carry equal weight.
    shared_box,
    /// Rejection from each cone's own box of bounds [u_ij, U_ij]; samples carry
    /// the log volume of their cone's box.
    cone_box,
    /// Free coordinates drawn one at a time, uniform on the interval left by the
    /// cone bounds and the triangle inequalities with coordinates already drawn;
    /// samples carry the log product of those interval widths (1/q). Only empty
    /// intervals reject, so thin cones from very unequal heights stay reachable.
    sequential,
};

/// Proposal budget for rejection sampling of SLHC fibers.
struct SamplerBudget {
    /// Proposals M drawn in every cone (the same M for all cones of a fiber).
    std::size_t proposals_per_cone = 20'000;
    /// Pooled accepted count N required from a fiber.
    std::size_t min_total_accepted = 500;
    /// Times M is doubled before giving up with InsufficientSamples.
    std::size_t max_retries = 3;
    /// Cones advance in lockstep rounds; when set, sampling stops after the first
    /// round whose pooled count reaches min_total_accepted instead of spending all of M.
    bool stop_when_satisfied = true;
    std::size_t max_trees = kDefaultMaxTrees;
    FiberProposal proposal = FiberProposal::sequential;
};

/// Throws DomainError unless both counts are positive.
void validate(const SamplerBudget& budget);

struct FiberSample {
    Metric theta;
    std::size_t cone_index;
    /// Log importance weight. With equal proposal counts per cone, weighting by
    /// exp(log_weight) turns pooled averages into averages over the whole fiber.
    double log_weight = 0.0;
};

/// Shared bounding interval for the free coordinates of a fiber.
struct FiberBounds {
    double lo;
    double hi;
};

/// Prefix sums a_k = gamma_1 + ... + gamma_k, k = 1..n-1, of a point of the n-simplex.
HeightVector heights_from_simplex(std::span<const double> gamma);

/// Uniform draws from the order simplex via a flat Dirichlet on the n-simplex.
HeightVector sample_height(std::size_t n, Rng& rng);
std::vector<HeightVector> sample_heights(std::size_t n, std::size_t count, Rng& rng);

/// lo = min_ij u_ij, hi = max_ij U_ij for the cone's tree.
FiberBounds fiber_bounds(const ConeSpec& spec);
FiberBounds fiber_bounds(const Ultrametric& u, const SpanningTree& tree);

/// Rejection sampling on C(T,u): tree coordinates pinned to u, every other
/// coordinate uniform on `box`. Exactly `proposals` candidates are drawn.
/// All returned samples have log_weight 0.
std::vector<FiberSample> sample_cone(const ConeSpec& spec, FiberBounds box, std::size_t proposals, Rng& rng,
                                     std::size_t cone_index = 0);
/// Same, with budget.proposals_per_cone candidates and budget.proposal.
std::vector<FiberSample> sample_cone(const ConeSpec& spec, const SamplerBudget& budget, Rng& rng);

struct FiberDraw {
    /// Accepted samples, grouped by cone index in ascending order.
    std::vector<FiberSample> samples;
    std::size_t cones = 0;
    /// Proposals actually spent in every cone.
    std::size_t proposals_per_cone = 0;
    /// Global interval over all cones (the proposal box under shared_box).
    FiberBounds box{};
    /// Accepted samples per cone.
    std::vector<std::size_t> accepted;
};

/// Samples every cone of the fiber of u with the same proposal count, so summed
/// weights per cone are proportional to cone volumes and the weighted pooled
/// sample represents the uniform distribution on the whole fiber. Each cone
/// draws from its own sub-stream of `rng`. Throws InsufficientSamples after the
/// retry policy.
FiberDraw sample_fiber(const Ultrametric& u, const SamplerBudget& budget, Rng& rng);

/// log( sum_l w_l f_l / sum_l w_l ) for per-sample log values f and the samples' weights.
double weighted_log_mean(std::span<const double> log_values, std::span<const FiberSample> samples);

/// A single uniform point of the fiber of u.
Metric draw_fiber_point(const Ultrametric& u, Rng& rng, std::size_t max_trees = kDefaultMaxTrees);

}  // namespace dendro
