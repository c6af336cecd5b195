#pragma once

// Dense storage for coefficient tables on {j <= Jmax} x {|k| <= K}.
//
// Crossing indices live in a box [0, K]^N with mixed-radix strides (K+1)^d,
// and the population coordinate (when present) is the slowest axis. Only the
// simplex |k| <= K is populated. Because any two summands with |m| + |n| <= K
// have every component <= K, the flat offset of m + n is offset(m) + offset(n),
// so convolution needs no carry handling.

#include "bpcross/law.hpp"

#include <cstddef>
#include <vector>

namespace bpcross::detail
{

class Lattice
{
public:
    /// max_population < 0 means a marginal lattice (no population axis).
    Lattice(std::size_t dims, int max_order, int max_population = -1);

    std::size_t dims() const noexcept { return dims_; }
    int max_order() const noexcept { return max_order_; }
    bool joint() const noexcept { return max_population_ >= 0; }
    int max_population() const noexcept { return max_population_; }
    std::size_t populations() const noexcept { return joint() ? static_cast<std::size_t>(max_population_) + 1 : 1; }

    /// Flat size including unused box cells.
    std::size_t size() const noexcept { return box_ * populations(); }
    std::size_t box() const noexcept { return box_; }
    std::size_t stride(std::size_t axis) const noexcept { return strides_[axis]; }

    /// Simplex points in nondecreasing order of |k|.
    std::size_t points() const noexcept { return offsets_.size(); }
    std::size_t offset(std::size_t point) const noexcept { return offsets_[point]; }
    int order(std::size_t point) const noexcept { return orders_[point]; }
    const std::vector<int>& coords(std::size_t point) const noexcept { return coords_[point]; }
    /// First point index with order > o (points are sorted by order).
    std::size_t order_end(int o) const noexcept;

    std::size_t index(std::size_t population, std::size_t point) const noexcept
    {
        return population * box_ + offsets_[point];
    }

    std::vector<double> zeros() const { return std::vector<double>(size(), 0.0); }
    std::vector<double> delta(std::size_t population = 0) const;

    /// out = a * b restricted to the lattice. out must not alias a or b.
    void convolve(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) const;

    /// Exact zeros are left out of the sparse table.
    CoeffTable to_table(const std::vector<double>& values, double slack) const;
    std::vector<double> from_table(const CoeffTable& table) const;

private:
    std::size_t dims_;
    int max_order_;
    int max_population_;
    std::size_t box_ = 1;
    std::vector<std::size_t> strides_;
    std::vector<std::size_t> offsets_;
    std::vector<int> orders_;
    std::vector<std::vector<int>> coords_;
    std::vector<std::size_t> order_ends_;
};

} // namespace bpcross::detail
