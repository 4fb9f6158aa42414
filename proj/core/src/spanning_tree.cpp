#include "dendro/spanning_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "dendro/errors.hpp"
#include "union_find.hpp"

namespace dendro {

namespace {

struct WeightedEdge {
    double w;
    Edge e;
};

std::vector<WeightedEdge> sorted_edges(const Dissimilarity& d) {
    const std::size_t n = d.size();
    std::vector<WeightedEdge> edges;
    edges.reserve(d.pairs());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({d(i, j), {i, j}});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
        if (x.w != y.w) {
            return x.w < y.w;
        }
        return x.e < y.e;
    });
    return edges;
}

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    return adj;
}

/// Visits every vertex from `root`, reporting (vertex, parent) in DFS preorder.
template <typename Visit>
void walk_tree(const std::vector<std::vector<std::size_t>>& adj, std::size_t root, Visit&& visit) {
    const std::size_t n = adj.size();
    std::vector<std::size_t> parent(n, n);
    std::vector<std::size_t> stack{root};
    parent[root] = root;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        if (v != root) {
            visit(v, parent[v]);
        }
        for (const std::size_t w : adj[v]) {
            if (parent[w] == n) {
                parent[w] = v;
                stack.push_back(w);
            }
        }
    }
}

/// All edge subsets of one weight class that keep the forest acyclic and reach the
/// full rank of the class. `component` labels vertices by their current component.
void enumerate_class_forests(const std::vector<Edge>& candidates, const std::vector<std::size_t>& component,
                             std::size_t k_max, std::vector<std::vector<Edge>>& out) {
    const std::size_t n = component.size();
    std::size_t target = 0;
    {
        detail::UnionFind uf(n);
        for (const auto& e : candidates) {
            target += uf.unite(component[e.a], component[e.b]) ? 1 : 0;
        }
    }
    std::vector<Edge> chosen;
    std::function<void(std::size_t, detail::UnionFind&)> recurse = [&](std::size_t idx, detail::UnionFind& uf) {
        if (out.size() > k_max) {
            return;
        }
        if (chosen.size() == target) {
            out.push_back(chosen);
            return;
        }
        if (candidates.size() - idx < target - chosen.size()) {
            return;
        }
        const Edge e = candidates[idx];
        if (uf.find(component[e.a]) != uf.find(component[e.b])) {
            detail::UnionFind with = uf;
            with.unite(component[e.a], component[e.b]);
            chosen.push_back(e);
            recurse(idx + 1, with);
            chosen.pop_back();
        }
        recurse(idx + 1, uf);
    };
    detail::UnionFind start(n);
    recurse(0, start);
}

/// Per weight class, the list of admissible edge choices.
std::vector<std::vector<std::vector<Edge>>> class_choices(const Dissimilarity& d, std::size_t k_max,
                                                          double tie_eps) {
    const std::size_t n = d.size();
    const auto edges = sorted_edges(d);
    detail::UnionFind uf(n);
    std::vector<std::vector<std::vector<Edge>>> classes;
    std::size_t bound = 1;
    for (std::size_t start = 0; start < edges.size();) {
        std::size_t stop = start + 1;
        while (stop < edges.size() && leq_tol(edges[stop].w, edges[start].w, tie_eps)) {
            ++stop;
        }
        std::vector<std::size_t> component(n);
        for (std::size_t v = 0; v < n; ++v) {
            component[v] = uf.find(v);
        }
        std::vector<Edge> candidates;
        for (std::size_t k = start; k < stop; ++k) {
            const Edge e = edges[k].e;
            if (component[e.a] != component[e.b]) {
                candidates.push_back(e);
            }
        }
        if (!candidates.empty()) {
            std::vector<std::vector<Edge>> forests;
            enumerate_class_forests(candidates, component, k_max, forests);
            if (forests.size() > k_max / bound) {
                throw KMaxExceeded{bound * forests.size(), k_max};
            }
            bound *= forests.size();
            for (const auto& e : candidates) {
                uf.unite(e.a, e.b);
            }
            classes.push_back(std::move(forests));
        }
        start = stop;
    }
    return classes;
}

}  // namespace

SpanningTree::SpanningTree(std::size_t n, std::vector<Edge> edges) : n_{n}, edges_{std::move(edges)} {
    if (n < 2) {
        throw InvalidInput{"a spanning tree needs at least 2 vertices"};
    }
    if (edges_.size() != n - 1) {
        throw InvalidInput{"a spanning tree on " + std::to_string(n) + " vertices has " + std::to_string(n - 1) +
                           " edges, got " + std::to_string(edges_.size())};
    }
    detail::UnionFind uf(n);
    for (auto& e : edges_) {
        e = make_edge(e.a, e.b);
        if (e.b >= n || e.a == e.b) {
            throw InvalidInput{"spanning tree edge out of range"};
        }
        if (!uf.unite(e.a, e.b)) {
            throw InvalidInput{"spanning tree edges contain a cycle"};
        }
    }
    std::sort(edges_.begin(), edges_.end());
}

bool SpanningTree::contains(std::size_t i, std::size_t j) const {
    return std::binary_search(edges_.begin(), edges_.end(), make_edge(i, j));
}

std::vector<Edge> SpanningTree::path(std::size_t i, std::size_t j) const {
    const auto adj = adjacency(n_, edges_);
    std::vector<std::size_t> parent(n_, n_);
    parent[j] = j;
    walk_tree(adj, j, [&](std::size_t v, std::size_t p) { parent[v] = p; });
    std::vector<Edge> out;
    for (std::size_t v = i; v != j; v = parent[v]) {
        out.push_back(make_edge(v, parent[v]));
    }
    return out;
}

SpanningTree mst(const Dissimilarity& d) {
    const std::size_t n = d.size();
    detail::UnionFind uf(n);
    std::vector<Edge> chosen;
    for (const auto& [w, e] : sorted_edges(d)) {
        if (uf.unite(e.a, e.b)) {
            chosen.push_back(e);
            if (chosen.size() == n - 1) {
                break;
            }
        }
    }
    return SpanningTree{n, std::move(chosen)};
}

Ultrametric slhc(const Dissimilarity& d) {
    const std::size_t n = d.size();
    detail::UnionFind uf(n);
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
    }
    std::vector<double> u(d.pairs(), 0.0);
    std::size_t merged = 0;
    for (const auto& [w, e] : sorted_edges(d)) {
        const std::size_t ra = uf.find(e.a);
        const std::size_t rb = uf.find(e.b);
        if (ra == rb) {
            continue;
        }
        // Every pair across the two components first becomes connected through
        // this edge, the longest on their MST path.
        for (const std::size_t x : members[ra]) {
            for (const std::size_t y : members[rb]) {
                u[pair_index(n, x, y)] = w;
            }
        }
        uf.unite(ra, rb);
        const std::size_t root = uf.find(ra);
        const std::size_t other = root == ra ? rb : ra;
        members[root].insert(members[root].end(), members[other].begin(), members[other].end());
        members[other].clear();
        if (++merged == n - 1) {
            break;
        }
    }
    return Ultrametric::assume_valid(Dissimilarity{n, std::move(u)});
}

std::size_t mst_count(const Dissimilarity& d, std::size_t k_max, double tie_eps) {
    std::size_t count = 1;
    for (const auto& forests : class_choices(d, k_max, tie_eps)) {
        count *= forests.size();
    }
    return count;
}

std::vector<SpanningTree> mst_set(const Dissimilarity& d, std::size_t k_max, double tie_eps) {
    const auto classes = class_choices(d, k_max, tie_eps);
    std::vector<std::vector<Edge>> partial{{}};
    for (const auto& forests : classes) {
        std::vector<std::vector<Edge>> next;
        next.reserve(partial.size() * forests.size());
        for (const auto& prefix : partial) {
            for (const auto& forest : forests) {
                auto edges = prefix;
                edges.insert(edges.end(), forest.begin(), forest.end());
                next.push_back(std::move(edges));
            }
        }
        partial = std::move(next);
    }
    std::vector<SpanningTree> out;
    out.reserve(partial.size());
    for (auto& edges : partial) {
        out.emplace_back(d.size(), std::move(edges));
    }
    std::sort(out.begin(), out.end());
    return out;
}

ConeSpec::ConeSpec(SpanningTree tree, Ultrametric u)
  : tree_{std::move(tree)}
  , u_{std::move(u)}
  , upper_(u_.values().pairs(), 0.0)
  , on_tree_(u_.values().pairs(), false) {
    const std::size_t n = u_.size();
    if (tree_.size() != n) {
        throw InvalidInput{"cone tree and ultrametric disagree on the number of points"};
    }
    for (const auto& e : tree_.edges()) {
        on_tree_[pair_index(n, e.a, e.b)] = true;
    }
    const auto adj = adjacency(n, tree_.edges());
    std::vector<double> path_max(u_.values().pairs(), 0.0);
    for (std::size_t root = 0; root < n; ++root) {
        std::vector<double> sum(n, 0.0);
        std::vector<double> longest(n, 0.0);
        walk_tree(adj, root, [&](std::size_t v, std::size_t p) {
            const double w = u_(v, p);
            sum[v] = sum[p] + w;
            longest[v] = std::max(longest[p], w);
            if (root < v) {
                upper_[pair_index(n, root, v)] = sum[v];
                path_max[pair_index(n, root, v)] = longest[v];
            }
        });
    }
    // Cycle property: T is minimum iff every non-tree edge is at least as long as
    // the longest tree edge it would close a cycle with.
    for (std::size_t k = 0; k < path_max.size(); ++k) {
        if (!leq_tol(path_max[k], u_.values().values()[k])) {
            throw InvalidInput{"tree is not a minimum spanning tree of the ultrametric"};
        }
    }
}

double path_bound(const ConeSpec& spec, std::size_t i, std::size_t j) {
    return spec.upper_bounds()[pair_index(spec.tree().size(), i, j)];
}

bool cone_contains(const ConeSpec& spec, std::span<const double> theta) {
    const std::size_t n = spec.tree().size();
    const auto u = spec.ultrametric().values().values();
    const auto upper = spec.upper_bounds();
    const auto& on_tree = spec.tree_mask();
    if (theta.size() != u.size()) {
        return false;
    }
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!leq_tol(u[k], theta[k])) {
            return false;
        }
        if (on_tree[k] ? !leq_tol(theta[k], u[k]) : !leq_tol(theta[k], upper[k])) {
            return false;
        }
    }
    return !find_triangle_violation(n, theta).has_value();
}

}  // namespace dendro
