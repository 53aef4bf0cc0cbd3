#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace segcut {

/// Disjoint sets with union by size and path halving. Tracks per-set size
/// and the maximal internal merge weight used by graph-based clustering.
class DisjointSets {
  public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Joins two roots; returns the surviving root. `weight` becomes the
    /// internal difference of the merged set when it is the largest so far.
    std::uint32_t join(std::uint32_t a, std::uint32_t b, double weight) {
        if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        internal_[a] = std::max({internal_[a], internal_[b], weight});
        return a;
    }

    std::uint32_t size(std::uint32_t root) const { return size_[root]; }
    double internal(std::uint32_t root) const { return internal_[root]; }
    std::size_t element_count() const { return parent_.size(); }

  private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<double> internal_;
};

}  // namespace segcut
