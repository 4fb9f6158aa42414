#include "dendro/dendrogram.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "dendro/errors.hpp"
#include "union_find.hpp"

namespace dendro {

std::vector<std::size_t> leaves_of(LeafSet s) {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(std::popcount(s)));
    while (s != 0) {
        out.push_back(min_leaf(s));
        s &= s - 1;
    }
    return out;
}

std::strong_ordering compare_leaf_sets(LeafSet a, LeafSet b) noexcept {
    const LeafSet diff = a ^ b;
    if (diff == 0) {
        return std::strong_ordering::equal;
    }
    // Below the first differing bit both lists agree. The set holding that bit
    // lists it next; the other either lists something larger or has ended.
    const std::size_t d = min_leaf(diff);
    const bool a_has = (a >> d) & 1U;
    const LeafSet other_rest = (a_has ? b : a) >> d;
    if (other_rest == 0) {
        return a_has ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return a_has ? std::strong_ordering::less : std::strong_ordering::greater;
}

bool Partition::refines(const Partition& coarser) const {
    for (const auto& block : blocks) {
        const bool inside = std::any_of(coarser.blocks.begin(), coarser.blocks.end(), [&](const auto& big) {
            return std::includes(big.begin(), big.end(), block.begin(), block.end());
        });
        if (!inside) {
            return false;
        }
    }
    return true;
}

LeafSet MergeEvent::merged() const noexcept {
    LeafSet out = 0;
    for (const LeafSet p : parts) {
        out |= p;
    }
    return out;
}

Structure::Structure(std::size_t n, std::vector<MergeEvent> merges) : n_{n}, merges_{std::move(merges)} {
    if (n < 2 || n > kMaxLeaves) {
        throw InvalidInput{"structure leaf count must be in [2, 64], got " + std::to_string(n)};
    }
    std::vector<LeafSet> clusters;
    for (std::size_t i = 0; i < n; ++i) {
        clusters.push_back(leaf_bit(i));
    }
    for (auto& event : merges_) {
        if (event.parts.size() < 2) {
            throw InvalidInput{"a merge event must fuse at least two clusters"};
        }
        std::sort(event.parts.begin(), event.parts.end(),
                  [](LeafSet a, LeafSet b) { return min_leaf(a) < min_leaf(b); });
        for (const LeafSet part : event.parts) {
            const auto it = std::find(clusters.begin(), clusters.end(), part);
            if (it == clusters.end()) {
                throw InvalidInput{"merge event names a cluster that does not exist at that point"};
            }
            clusters.erase(it);
        }
        clusters.push_back(event.merged());
    }
    if (clusters.size() != 1) {
        throw InvalidInput{"merge sequence does not end in a single cluster"};
    }
}

bool Structure::is_binary() const noexcept {
    return std::all_of(merges_.begin(), merges_.end(), [](const MergeEvent& e) { return e.binary(); });
}

std::strong_ordering operator<=>(const Structure& a, const Structure& b) noexcept {
    if (const auto c = a.n_ <=> b.n_; c != 0) {
        return c;
    }
    const std::size_t events = std::min(a.merges_.size(), b.merges_.size());
    for (std::size_t e = 0; e < events; ++e) {
        const auto& pa = a.merges_[e].parts;
        const auto& pb = b.merges_[e].parts;
        const std::size_t parts = std::min(pa.size(), pb.size());
        for (std::size_t p = 0; p < parts; ++p) {
            if (const auto c = compare_leaf_sets(pa[p], pb[p]); c != 0) {
                return c;
            }
        }
        if (const auto c = pa.size() <=> pb.size(); c != 0) {
            return c;
        }
    }
    return a.merges_.size() <=> b.merges_.size();
}

HeightVector::HeightVector(std::vector<double> values) : values_{std::move(values)} {
    double previous = 0.0;
    for (const double a : values_) {
        if (!(a >= previous) || a > 1.0) {
            throw DomainError{"height vector must satisfy 0 <= a_1 <= ... <= a_{n-1} <= 1"};
        }
        previous = a;
    }
}

bool Dendrogram::degenerate() const noexcept {
    if (!structure.is_binary()) {
        return true;
    }
    return std::adjacent_find(heights.begin(), heights.end()) != heights.end();
}

Partition cut(const Ultrametric& u, double resolution) {
    const std::size_t n = u.size();
    detail::UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (u(i, j) <= resolution) {
                uf.unite(i, j);
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < n; ++i) {
        by_root[uf.find(i)].push_back(i);
    }
    Partition out;
    for (auto& [root, block] : by_root) {
        out.blocks.push_back(std::move(block));
    }
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
}

Ultrametric compose(const Structure& structure, std::span<const double> heights) {
    const auto& merges = structure.merges();
    if (heights.size() != merges.size()) {
        throw InvalidInput{"expected one height per merge event (" + std::to_string(merges.size()) + "), got " +
                           std::to_string(heights.size())};
    }
    if (!std::is_sorted(heights.begin(), heights.end())) {
        throw DomainError{"merge heights must be nondecreasing"};
    }
    const std::size_t n = structure.size();
    std::vector<double> values(pair_count(n), 0.0);
    for (std::size_t e = 0; e < merges.size(); ++e) {
        const auto& parts = merges[e].parts;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            for (std::size_t q = p + 1; q < parts.size(); ++q) {
                for (const std::size_t x : leaves_of(parts[p])) {
                    for (const std::size_t y : leaves_of(parts[q])) {
                        values[pair_index(n, x, y)] = heights[e];
                    }
                }
            }
        }
    }
    return Ultrametric::assume_valid(Dissimilarity{n, std::move(values)});
}

Dendrogram decompose(const Ultrametric& u) {
    const std::size_t n = u.size();
    const auto values = u.values().values();
    std::vector<double> levels(values.begin(), values.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    detail::UnionFind clusters(n);
    std::vector<LeafSet> members(n);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = leaf_bit(i);
    }

    std::vector<MergeEvent> merges;
    std::vector<double> heights;
    for (const double r : levels) {
        // Group the current clusters joined by pairs at exactly this level.
        detail::UnionFind level(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (u(i, j) == r) {
                    const std::size_t ri = clusters.find(i);
                    const std::size_t rj = clusters.find(j);
                    if (ri != rj) {
                        any |= level.unite(ri, rj);
                    }
                }
            }
        }
        if (!any) {
            continue;
        }
        std::map<std::size_t, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < n; ++i) {
            if (clusters.find(i) == i) {
                groups[level.find(i)].push_back(i);
            }
        }
        std::vector<MergeEvent> events;
        for (auto& [root, roots] : groups) {
            if (roots.size() < 2) {
                continue;
            }
            MergeEvent event;
            for (const std::size_t c : roots) {
                event.parts.push_back(members[c]);
            }
            events.push_back(std::move(event));
            const LeafSet fused = events.back().merged();
            for (std::size_t k = 1; k < roots.size(); ++k) {
                clusters.unite(roots[0], roots[k]);
            }
            members[clusters.find(roots[0])] = fused;
        }
        std::sort(events.begin(), events.end(),
                  [](const MergeEvent& a, const MergeEvent& b) { return min_leaf(a.merged()) < min_leaf(b.merged()); });
        for (auto& event : events) {
            merges.push_back(std::move(event));
            heights.push_back(r);
        }
    }
    return Dendrogram{Structure{n, std::move(merges)}, std::move(heights)};
}

std::uint64_t count_structures(std::size_t n) {
    if (n < 2) {
        throw DomainError{"structure count needs n >= 2"};
    }
    std::uint64_t count = 1;
    for (std::uint64_t k = 2; k <= n; ++k) {
        const std::uint64_t pairs = k * (k - 1) / 2;
        if (count > std::numeric_limits<std::uint64_t>::max() / pairs) {
            throw CountOverflow{"structure count for n=" + std::to_string(n) + " exceeds 64 bits"};
        }
        count *= pairs;
    }
    return count;
}

namespace {

void enumerate_from(std::size_t n, std::vector<LeafSet>& clusters, std::vector<MergeEvent>& prefix,
                    std::vector<Structure>& out) {
    if (clusters.size() == 1) {
        out.emplace_back(n, prefix);
        return;
    }
    const std::size_t m = clusters.size();
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const LeafSet ca = clusters[a];
            const LeafSet cb = clusters[b];
            std::vector<LeafSet> next;
            next.reserve(m - 1);
            for (std::size_t c = 0; c < m; ++c) {
                if (c != a && c != b) {
                    next.push_back(clusters[c]);
                }
            }
            next.push_back(ca | cb);
            prefix.push_back(MergeEvent{{ca, cb}});
            enumerate_from(n, next, prefix, out);
            prefix.pop_back();
        }
    }
}

}  // namespace

std::vector<Structure> enumerate_structures(std::size_t n, std::size_t n_max) {
    if (n < 2) {
        throw DomainError{"structure enumeration needs n >= 2"};
    }
    if (n > n_max) {
        throw SizeLimit{"structure enumeration limited to n <= " + std::to_string(n_max) + ", got " +
                        std::to_string(n)};
    }
    std::vector<Structure> out;
    out.reserve(count_structures(n));
    std::vector<LeafSet> clusters;
    for (std::size_t i = 0; i < n; ++i) {
        clusters.push_back(leaf_bit(i));
    }
    std::vector<MergeEvent> prefix;
    enumerate_from(n, clusters, prefix, out);
    std::sort(out.begin(), out.end());
    return out;
}

StructureCatalog::StructureCatalog(std::size_t n, std::size_t n_max) : n_{n}, structures_{enumerate_structures(n, n_max)} {}

std::optional<std::size_t> StructureCatalog::index_of(const Structure& s) const {
    const auto it = std::lower_bound(structures_.begin(), structures_.end(), s);
    if (it == structures_.end() || *it != s) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - structures_.begin());
}

}  // namespace dendro
