#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dendro/dissimilarity.hpp"

namespace dendro {

/// Set of leaves as a bit mask; bit i is leaf i. Limits n to 64.
using LeafSet = std::uint64_t;

inline constexpr std::size_t kMaxLeaves = 64;

inline constexpr LeafSet leaf_bit(std::size_t i) noexcept { return LeafSet{1} << i; }
inline constexpr LeafSet all_leaves(std::size_t n) noexcept { return n >= 64 ? ~LeafSet{0} : leaf_bit(n) - 1; }
inline std::size_t min_leaf(LeafSet s) noexcept { return static_cast<std::size_t>(std::countr_zero(s)); }
std::vector<std::size_t> leaves_of(LeafSet s);

/// Lexicographic order of the sorted leaf lists of two sets.
std::strong_ordering compare_leaf_sets(LeafSet a, LeafSet b) noexcept;

/// Partition of {0..n-1}; blocks are sorted and ordered by smallest element.
struct Partition {
    std::vector<std::vector<std::size_t>> blocks;

    /// True when every block of *this lies inside a block of `coarser`.
    bool refines(const Partition& coarser) const;

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// One fusion of clusters. Binary events have exactly two parts; the parts are
/// kept ordered by smallest leaf.
struct MergeEvent {
    std::vector<LeafSet> parts;

    LeafSet merged() const noexcept;
    bool binary() const noexcept { return parts.size() == 2; }

    friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

/// Merge hierarchy of a dendrogram with the heights forgotten: an ordered
/// sequence of merge events that starts from n singletons and ends with one
/// cluster. Construction canonicalizes part order and validates the sequence.
class Structure {
  public:
    Structure() = default;
    Structure(std::size_t n, std::vector<MergeEvent> merges);

    std::size_t size() const noexcept { return n_; }
    const std::vector<MergeEvent>& merges() const noexcept { return merges_; }
    /// Every event fuses exactly two clusters (so there are n-1 events).
    bool is_binary() const noexcept;

    friend bool operator==(const Structure&, const Structure&) = default;
    /// Canonical total order: event by event, parts compared as sorted leaf lists.
    friend std::strong_ordering operator<=>(const Structure& a, const Structure& b) noexcept;

  private:
    std::size_t n_ = 0;
    std::vector<MergeEvent> merges_;
};

/// Point of the order simplex 0 <= a_1 <= ... <= a_{n-1} <= 1.
class HeightVector {
  public:
    /// Throws DomainError if the values are not in the order simplex.
    explicit HeightVector(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

  private:
    std::vector<double> values_;
};

/// A structure together with one height per merge event.
struct Dendrogram {
    Structure structure;
    std::vector<double> heights;

    /// A non-binary event, or two events sharing a height.
    bool degenerate() const noexcept;
};

Partition cut(const Ultrametric& u, double resolution);

/// u_xy = height of the first merge event uniting x and y.
Ultrametric compose(const Structure& structure, std::span<const double> heights);
inline Ultrametric compose(const Dendrogram& d) { return compose(d.structure, d.heights); }
inline Ultrametric compose(const Structure& s, const HeightVector& a) { return compose(s, a.values()); }

/// Reads the merge sequence off the distinct values of u. Simultaneous merges
/// are kept (flagged through Dendrogram::degenerate()).
Dendrogram decompose(const Ultrametric& u);

/// n!(n-1)!/2^(n-1). Throws CountOverflow past 64 bits.
std::uint64_t count_structures(std::size_t n);

inline constexpr std::size_t kDefaultEnumerationLimit = 7;

/// All binary structures on n leaves in canonical order. Throws SizeLimit for n > n_max.
std::vector<Structure> enumerate_structures(std::size_t n, std::size_t n_max = kDefaultEnumerationLimit);

/// Enumerated structures with index lookup; the index is the canonical rank.
class StructureCatalog {
  public:
    explicit StructureCatalog(std::size_t n, std::size_t n_max = kDefaultEnumerationLimit);

    std::size_t leaves() const noexcept { return n_; }
    std::size_t size() const noexcept { return structures_.size(); }
    const Structure& operator[](std::size_t index) const { return structures_.at(index); }
    const std::vector<Structure>& all() const noexcept { return structures_; }
    std::optional<std::size_t> index_of(const Structure& s) const;

  private:
    std::size_t n_;
    std::vector<Structure> structures_;
};

}  // namespace dendro
