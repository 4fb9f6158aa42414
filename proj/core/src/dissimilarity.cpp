#include "dendro/dissimilarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dendro/errors.hpp"

namespace dendro {

TriangleViolation::TriangleViolation(std::size_t i_, std::size_t j_, std::size_t k_, double slack_)
  : Error{"triangle inequality violated at (" + std::to_string(i_ + 1) + "," + std::to_string(j_ + 1) + ") via " +
          std::to_string(k_ + 1) + ", slack " + std::to_string(slack_)}
  , i{i_}
  , j{j_}
  , k{k_}
  , slack{slack_} {}

UltrametricViolation::UltrametricViolation(std::size_t i_, std::size_t j_, std::size_t k_, double slack_)
  : Error{"strong triangle inequality violated at (" + std::to_string(i_ + 1) + "," + std::to_string(j_ + 1) +
          ") via " + std::to_string(k_ + 1) + ", slack " + std::to_string(slack_)}
  , i{i_}
  , j{j_}
  , k{k_}
  , slack{slack_} {}

KMaxExceeded::KMaxExceeded(std::size_t bound_, std::size_t cap_)
  : Error{"minimum spanning tree count " + std::to_string(bound_) + " exceeds cap " + std::to_string(cap_)}
  , bound{bound_}
  , cap{cap_} {}

ProposalStuck::ProposalStuck(std::size_t attempts_)
  : Error{"no proposal inside the normalized metric space after " + std::to_string(attempts_) + " attempts"}
  , attempts{attempts_} {}

Dissimilarity::Dissimilarity(std::size_t n, std::vector<double> values) : n_{n}, values_{std::move(values)} {
    if (n < 2) {
        throw InvalidInput{"a dissimilarity needs at least 2 points, got " + std::to_string(n)};
    }
    if (values_.size() != pair_count(n)) {
        throw InvalidInput{"expected " + std::to_string(pair_count(n)) + " pairwise values for n=" +
                           std::to_string(n) + ", got " + std::to_string(values_.size())};
    }
    for (const double v : values_) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw InvalidInput{"dissimilarity values must be finite and strictly positive, got " +
                               std::to_string(v)};
        }
    }
}

Dissimilarity Dissimilarity::constant(std::size_t n, double value) {
    return Dissimilarity{n, std::vector<double>(pair_count(n), value)};
}

double Dissimilarity::max_value() const noexcept {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double Dissimilarity::min_value() const noexcept {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

Dissimilarity Dissimilarity::scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& v : out) {
        v *= factor;
    }
    return Dissimilarity{n_, std::move(out)};
}

std::optional<TripleViolation> find_triangle_violation(std::size_t n, std::span<const double> values, double eps) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = values[pair_index(n, i, j)];
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) {
                    continue;
                }
                const double bound = values[pair_index(n, i, k)] + values[pair_index(n, k, j)];
                if (!leq_tol(dij, bound, eps)) {
                    return TripleViolation{i, j, k, dij - bound};
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<TripleViolation> find_ultrametric_violation(std::size_t n, std::span<const double> values,
                                                           double eps) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double uij = values[pair_index(n, i, j)];
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) {
                    continue;
                }
                const double bound = std::max(values[pair_index(n, i, k)], values[pair_index(n, k, j)]);
                if (!leq_tol(uij, bound, eps)) {
                    return TripleViolation{i, j, k, uij - bound};
                }
            }
        }
    }
    return std::nullopt;
}

Metric validate_metric(const Dissimilarity& d) {
    if (const auto v = find_triangle_violation(d.size(), d.values())) {
        throw TriangleViolation{v->i, v->j, v->k, v->slack};
    }
    return Metric::assume_valid(d);
}

Ultrametric validate_ultrametric(const Dissimilarity& d) {
    if (const auto v = find_ultrametric_violation(d.size(), d.values())) {
        throw UltrametricViolation{v->i, v->j, v->k, v->slack};
    }
    return Ultrametric::assume_valid(d);
}

}  // namespace dendro
