#pragma once

#include <bit>
#include <cstddef>
#include <vector>

namespace treelab {

/// Sparse-table range minimum query: O(n log n) build, O(1) query.
/// Queries return the leftmost minimizing index so tie-breaking is stable.
template <typename T>
class SparseTableRmq {
  public:
    SparseTableRmq() = default;

    explicit SparseTableRmq(const std::vector<T>& values) : data_(&values) {
        std::size_t n = values.size();
        if (n == 0) return;
        std::size_t levels = std::bit_width(n);
        table_.resize(levels);
        table_[0].resize(n);
        for (std::size_t i = 0; i < n; ++i) table_[0][i] = static_cast<std::uint32_t>(i);
        for (std::size_t k = 1; k < levels; ++k) {
            std::size_t span = std::size_t{1} << k;
            table_[k].resize(n - span + 1);
            for (std::size_t i = 0; i + span <= n; ++i) {
                std::uint32_t a = table_[k - 1][i];
                std::uint32_t b = table_[k - 1][i + span / 2];
                table_[k][i] = values[b] < values[a] ? b : a;
            }
        }
    }

    /// Leftmost argmin over the inclusive index range [lo, hi].
    std::size_t argmin(std::size_t lo, std::size_t hi) const {
        if (lo == hi) return lo;
        std::size_t k = std::bit_width(hi - lo + 1) - 1;
        std::uint32_t a = table_[k][lo];
        std::uint32_t b = table_[k][hi - (std::size_t{1} << k) + 1];
        const auto& v = *data_;
        if (v[a] < v[b]) return a;
        if (v[b] < v[a]) return b;
        return a < b ? a : b;
    }

    T min(std::size_t lo, std::size_t hi) const { return (*data_)[argmin(lo, hi)]; }

    bool empty() const { return table_.empty(); }

  private:
    const std::vector<T>* data_ = nullptr;
    std::vector<std::vector<std::uint32_t>> table_;
};

}  // namespace treelab
