#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dendro/dendrogram.hpp"
#include "dendro/dissimilarity.hpp"
#include "dendro/noise_model.hpp"
#include "dendro/rng.hpp"

namespace dendro {

struct MHConfig {
    std::size_t burn_in = 1000;
    std::size_t thinning = 3;
    std::size_t n_theta = 3000;
    std::size_t n_hypotheses = 20;
    /// Gaussian proposal scale; the noise standard deviation when unset.
    std::optional<double> proposal_sigma;
    /// Consecutive out-of-space proposals tolerated before ProposalStuck.
    std::size_t max_proposal_attempts = 10'000;

    std::size_t transitions() const noexcept { return burn_in + thinning * n_theta; }
};

void validate(const MHConfig& cfg);

/// Membership in the normalized metric space: positive entries, triangle
/// inequalities, and every single-linkage distance at most 1.
bool theta_membership(const Dissimilarity& theta);
bool theta_membership(std::size_t n, std::span<const double> theta);

/// Occurrence counts of structures, iterated in canonical order.
class StructureTally {
  public:
    void add(const Structure& s, std::size_t count = 1);
    void merge(const StructureTally& other);

    std::size_t total() const noexcept { return total_; }
    std::size_t count(const Structure& s) const;
    const std::map<Structure, std::size_t>& counts() const noexcept { return counts_; }
    /// Entries by descending count, ties in canonical order.
    std::vector<std::pair<Structure, std::size_t>> ranked() const;

  private:
    std::map<Structure, std::size_t> counts_;
    std::size_t total_ = 0;
};

/// One Metropolis step targeting p(x|theta) on the normalized metric space, with
/// the log density of the current state cached between steps.
class MetropolisChain {
  public:
    /// Throws DomainError unless `start` is in the normalized metric space.
    MetropolisChain(const Dissimilarity& x, const Metric& start, const NoiseModel& model, double proposal_sigma,
                    std::size_t max_attempts);

    /// Returns true when the proposal was accepted.
    bool step(Rng& rng);

    const std::vector<double>& state() const noexcept { return state_; }
    Metric metric() const;
    double log_density() const noexcept { return log_p_; }
    std::size_t accepted() const noexcept { return accepted_; }
    std::size_t steps() const noexcept { return steps_; }

  private:
    const Dissimilarity* x_;
    const NoiseModel* model_;
    std::size_t n_;
    double sigma_;
    std::size_t max_attempts_;
    std::vector<double> state_;
    std::vector<double> proposal_;
    double log_p_;
    std::size_t accepted_ = 0;
    std::size_t steps_ = 0;
};

/// Single transition from theta_old: Gaussian proposals redrawn until they land
/// in the normalized metric space, then the Metropolis choice.
Metric mh_transition(const Metric& theta_old, const Dissimilarity& x, const NoiseModel& model, const MHConfig& cfg,
                     Rng& rng);

/// Default chain start: x itself when it lies in the normalized metric space,
/// otherwise slhc(x), shrunk so that its largest entry is 1 - 1e-6 when needed.
Metric initial_state(const Dissimilarity& x);

struct ChainStats {
    std::size_t transitions = 0;
    std::size_t accepted = 0;
};

/// Runs burn_in + thinning * n_theta transitions and tallies the single-linkage
/// structure of the states at k = burn_in + thinning * m, m = 1..n_theta.
StructureTally mh_sample(const Dissimilarity& x, const Metric& theta0, const NoiseModel& model, const MHConfig& cfg,
                         Rng& rng, ChainStats* stats = nullptr);

/// The n_hypotheses most frequent structures; ties in canonical order.
std::vector<Structure> prune(const StructureTally& tally, std::size_t n_hypotheses);

}  // namespace dendro
