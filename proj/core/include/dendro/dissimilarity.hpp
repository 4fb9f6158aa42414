#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dendro {

/// Relative tolerance for triangle, ultrametric and cone checks.
inline constexpr double kTriangleTolerance = 1e-9;

/// True when `lhs <= rhs` up to a relative tolerance.
inline bool leq_tol(double lhs, double rhs, double eps = kTriangleTolerance) noexcept {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return lhs - rhs <= eps * scale;
}

inline constexpr std::size_t pair_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

/// Position of pair (i, j), i != j, in row-major upper-triangular storage.
inline constexpr std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
    if (i > j) {
        const std::size_t t = i;
        i = j;
        j = t;
    }
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Symmetric matrix of strictly positive distances over n labelled points,
/// stored as its upper triangle. Points are 0-based inside the library.
class Dissimilarity {
  public:
    Dissimilarity() = default;
    /// Throws InvalidInput unless n >= 2, values.size() == n(n-1)/2 and every value is
    /// finite and > 0.
    Dissimilarity(std::size_t n, std::vector<double> values);

    static Dissimilarity constant(std::size_t n, double value);

    std::size_t size() const noexcept { return n_; }
    std::size_t pairs() const noexcept { return values_.size(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[pair_index(n_, i, j)]; }
    std::span<const double> values() const noexcept { return values_; }
    double max_value() const noexcept;
    double min_value() const noexcept;

    Dissimilarity scaled(double factor) const;

    friend bool operator==(const Dissimilarity&, const Dissimilarity&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// A violated triple found by a triangle or ultrametric check (0-based).
struct TripleViolation {
    std::size_t i, j, k;
    double slack;
};

/// First triple (in i<j, k ascending order) whose triangle inequality fails.
std::optional<TripleViolation> find_triangle_violation(std::size_t n, std::span<const double> values,
                                                        double eps = kTriangleTolerance);
std::optional<TripleViolation> find_ultrametric_violation(std::size_t n, std::span<const double> values,
                                                           double eps = kTriangleTolerance);

/// A dissimilarity known to satisfy the triangle inequality.
class Metric {
  public:
    /// Wraps `d` without checking. Only for values that are metrics by construction.
    static Metric assume_valid(Dissimilarity d) { return Metric{std::move(d)}; }

    const Dissimilarity& values() const noexcept { return d_; }
    std::size_t size() const noexcept { return d_.size(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_(i, j); }

    friend bool operator==(const Metric&, const Metric&) = default;

  private:
    explicit Metric(Dissimilarity d) : d_{std::move(d)} {}
    Dissimilarity d_;
};

/// A dissimilarity known to satisfy the strong triangle inequality.
class Ultrametric {
  public:
    static Ultrametric assume_valid(Dissimilarity d) { return Ultrametric{std::move(d)}; }

    const Dissimilarity& values() const noexcept { return d_; }
    std::size_t size() const noexcept { return d_.size(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_(i, j); }
    Metric as_metric() const { return Metric::assume_valid(d_); }

    friend bool operator==(const Ultrametric&, const Ultrametric&) = default;

  private:
    explicit Ultrametric(Dissimilarity d) : d_{std::move(d)} {}
    Dissimilarity d_;
};

/// Throws TriangleViolation reporting the first violated triple.
Metric validate_metric(const Dissimilarity& d);
/// Throws UltrametricViolation reporting the first violated triple.
Ultrametric validate_ultrametric(const Dissimilarity& d);

}  // namespace dendro
