#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "dendro/dissimilarity.hpp"

namespace dendro {

/// Undirected edge with a < b.
struct Edge {
    std::size_t a, b;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(std::size_t i, std::size_t j) noexcept { return i < j ? Edge{i, j} : Edge{j, i}; }

/// Tree on n labelled vertices; edges are kept sorted.
class SpanningTree {
  public:
    /// Throws InvalidInput unless the edges form a spanning tree of {0..n-1}.
    SpanningTree(std::size_t n, std::vector<Edge> edges);

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool contains(std::size_t i, std::size_t j) const;
    /// Edges of the unique i-j path, in walking order from i.
    std::vector<Edge> path(std::size_t i, std::size_t j) const;

    friend bool operator==(const SpanningTree&, const SpanningTree&) = default;
    friend auto operator<=>(const SpanningTree& x, const SpanningTree& y) { return x.edges_ <=> y.edges_; }

  private:
    std::size_t n_;
    std::vector<Edge> edges_;
};

inline constexpr std::size_t kDefaultMaxTrees = 10'000;
inline constexpr double kTieTolerance = 1e-9;

/// Kruskal over edges ordered by (weight, i, j); deterministic under ties.
SpanningTree mst(const Dissimilarity& d);

/// Single-linkage ultrametric: u_xy is the largest edge on the x-y path of mst(d).
Ultrametric slhc(const Dissimilarity& d);

/// Every minimum spanning tree of d, sorted by edge list. Weights within a relative
/// `tie_eps` of each other are treated as one weight class. Throws KMaxExceeded
/// when the count exceeds `k_max`.
std::vector<SpanningTree> mst_set(const Dissimilarity& d, std::size_t k_max = kDefaultMaxTrees,
                                  double tie_eps = kTieTolerance);
inline std::vector<SpanningTree> mst_set(const Ultrametric& u, std::size_t k_max = kDefaultMaxTrees) {
    return mst_set(u.values(), k_max);
}

/// Number of minimum spanning trees of d, without materializing them.
std::size_t mst_count(const Dissimilarity& d, std::size_t k_max = kDefaultMaxTrees, double tie_eps = kTieTolerance);

/// A polytope C(T,u): metrics having T as a minimum spanning tree that agree with
/// u on the edges of T. Precomputes the path sums U_ij.
class ConeSpec {
  public:
    /// Throws InvalidInput unless `tree` is a minimum spanning tree of `u`.
    ConeSpec(SpanningTree tree, Ultrametric u);

    const SpanningTree& tree() const noexcept { return tree_; }
    const Ultrametric& ultrametric() const noexcept { return u_; }
    /// U_ij in pair-index order.
    std::span<const double> upper_bounds() const noexcept { return upper_; }
    /// Pair-indexed flags for the tree edges.
    const std::vector<bool>& tree_mask() const noexcept { return on_tree_; }

  private:
    SpanningTree tree_;
    Ultrametric u_;
    std::vector<double> upper_;
    std::vector<bool> on_tree_;
};

/// Sum of u over the edges of the i-j path in the cone's tree.
double path_bound(const ConeSpec& spec, std::size_t i, std::size_t j);

/// Membership in C(T,u): triangle inequalities, u_ij <= theta_ij <= U_ij, and
/// theta pinned to u on the tree edges, all within kTriangleTolerance.
bool cone_contains(const ConeSpec& spec, std::span<const double> theta);
inline bool cone_contains(const ConeSpec& spec, const Dissimilarity& theta) {
    return theta.size() == spec.tree().size() && cone_contains(spec, theta.values());
}

}  // namespace dendro
