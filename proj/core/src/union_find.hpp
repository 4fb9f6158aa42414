#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace dendro::detail {

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    /// Returns false when i and j were already joined.
    bool unite(std::size_t i, std::size_t j) {
        i = find(i);
        j = find(j);
        if (i == j) {
            return false;
        }
        if (rank_[i] < rank_[j]) {
            std::swap(i, j);
        }
        parent_[j] = i;
        if (rank_[i] == rank_[j]) {
            ++rank_[i];
        }
        return true;
    }

  private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned> rank_;
};

}  // namespace dendro::detail
