#include "dendro/mh_pruning.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "dendro/errors.hpp"
#include "dendro/spanning_tree.hpp"

namespace dendro {

namespace {

/// Longest edge of a minimum spanning tree (Prim), i.e. the largest single-linkage distance.
double mst_max_edge(std::size_t n, std::span<const double> d) {
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<char> in_tree(n, 0);
    in_tree[0] = 1;
    for (std::size_t v = 1; v < n; ++v) {
        best[v] = d[pair_index(n, 0, v)];
    }
    double longest = 0.0;
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v] && (pick == n || best[v] < best[pick])) {
                pick = v;
            }
        }
        longest = std::max(longest, best[pick]);
        in_tree[pick] = 1;
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v]) {
                best[v] = std::min(best[v], d[pair_index(n, pick, v)]);
            }
        }
    }
    return longest;
}

}  // namespace

void validate(const MHConfig& cfg) {
    if (cfg.burn_in == 0 || cfg.thinning == 0 || cfg.n_theta == 0 || cfg.n_hypotheses == 0 ||
        cfg.max_proposal_attempts == 0) {
        throw DomainError{"MH configuration counts must be positive"};
    }
    if (cfg.proposal_sigma && !(*cfg.proposal_sigma > 0.0)) {
        throw DomainError{"MH proposal sigma must be positive"};
    }
}

bool theta_membership(std::size_t n, std::span<const double> theta) {
    if (n < 2 || theta.size() != pair_count(n)) {
        return false;
    }
    for (const double v : theta) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            return false;
        }
    }
    if (find_triangle_violation(n, theta)) {
        return false;
    }
    return mst_max_edge(n, theta) <= 1.0;
}

bool theta_membership(const Dissimilarity& theta) { return theta_membership(theta.size(), theta.values()); }

void StructureTally::add(const Structure& s, std::size_t count) {
    counts_[s] += count;
    total_ += count;
}

void StructureTally::merge(const StructureTally& other) {
    for (const auto& [s, c] : other.counts_) {
        add(s, c);
    }
}

std::size_t StructureTally::count(const Structure& s) const {
    const auto it = counts_.find(s);
    return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<Structure, std::size_t>> StructureTally::ranked() const {
    std::vector<std::pair<Structure, std::size_t>> out(counts_.begin(), counts_.end());
    // counts_ is already in canonical order; a stable sort keeps it for ties.
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

MetropolisChain::MetropolisChain(const Dissimilarity& x, const Metric& start, const NoiseModel& model,
                                 double proposal_sigma, std::size_t max_attempts)
  : x_{&x}
  , model_{&model}
  , n_{x.size()}
  , sigma_{proposal_sigma}
  , max_attempts_{max_attempts}
  , state_(start.values().values().begin(), start.values().values().end())
  , proposal_(state_.size()) {
    if (start.size() != n_) {
        throw DomainError{"chain start and measurement sizes differ"};
    }
    if (!theta_membership(n_, state_)) {
        throw DomainError{"chain start is outside the normalized metric space"};
    }
    log_p_ = model_->log_density(x_->values(), state_);
}

bool MetropolisChain::step(Rng& rng) {
    std::size_t attempts = 0;
    do {
        if (attempts++ == max_attempts_) {
            throw ProposalStuck{max_attempts_};
        }
        for (std::size_t k = 0; k < state_.size(); ++k) {
            proposal_[k] = state_[k] + sigma_ * rng.normal();
        }
    } while (!theta_membership(n_, proposal_));

    const double log_p_new = model_->log_density(x_->values(), proposal_);
    const double q = rng.uniform();
    ++steps_;
    // Only the difference of log densities enters; the normalizer never appears.
    if (q <= std::exp(log_p_new - log_p_)) {
        state_.swap(proposal_);
        log_p_ = log_p_new;
        ++accepted_;
        assert(theta_membership(n_, state_));
        return true;
    }
    return false;
}

Metric MetropolisChain::metric() const { return Metric::assume_valid(Dissimilarity{n_, state_}); }

Metric mh_transition(const Metric& theta_old, const Dissimilarity& x, const NoiseModel& model, const MHConfig& cfg,
                     Rng& rng) {
    MetropolisChain chain{x, theta_old, model, cfg.proposal_sigma.value_or(model.spec().std_dev()),
                          cfg.max_proposal_attempts};
    chain.step(rng);
    return chain.metric();
}

Metric initial_state(const Dissimilarity& x) {
    if (theta_membership(x)) {
        return Metric::assume_valid(x);
    }
    const Ultrametric u = slhc(x);
    constexpr double kCeiling = 1.0 - 1e-6;
    const double top = u.values().max_value();
    if (top <= kCeiling) {
        return u.as_metric();
    }
    return Metric::assume_valid(u.values().scaled(kCeiling / top));
}

StructureTally mh_sample(const Dissimilarity& x, const Metric& theta0, const NoiseModel& model, const MHConfig& cfg,
                         Rng& rng, ChainStats* stats) {
    validate(cfg);
    MetropolisChain chain{x, theta0, model, cfg.proposal_sigma.value_or(model.spec().std_dev()),
                          cfg.max_proposal_attempts};
    StructureTally tally;
    const std::size_t total = cfg.transitions();
    for (std::size_t k = 1; k <= total; ++k) {
        chain.step(rng);
        if (k > cfg.burn_in && (k - cfg.burn_in) % cfg.thinning == 0) {
            const Dissimilarity state{x.size(), chain.state()};
            tally.add(decompose(slhc(state)).structure);
        }
    }
    if (stats != nullptr) {
        stats->transitions = chain.steps();
        stats->accepted = chain.accepted();
    }
    return tally;
}

std::vector<Structure> prune(const StructureTally& tally, std::size_t n_hypotheses) {
    std::vector<Structure> out;
    for (auto& [s, c] : tally.ranked()) {
        if (out.size() == n_hypotheses) {
            break;
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace dendro
