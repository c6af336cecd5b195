#include "lattice.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bpcross::detail
{

namespace
{

void enumerate(std::size_t axis, int remaining, std::vector<int>& current, std::vector<std::vector<int>>& out)
{
    if (axis == current.size())
    {
        out.push_back(current);
        return;
    }
    for (int c = 0; c <= remaining; ++c)
    {
        current[axis] = c;
        enumerate(axis + 1, remaining - c, current, out);
    }
    current[axis] = 0;
}

} // namespace

Lattice::Lattice(std::size_t dims, int max_order, int max_population)
    : dims_(dims), max_order_(max_order), max_population_(max_population)
{
    if (max_order < 0)
        throw std::invalid_argument("lattice order cap must be nonnegative");
    strides_.resize(dims_);
    for (std::size_t d = 0; d < dims_; ++d)
    {
        strides_[d] = box_;
        box_ *= static_cast<std::size_t>(max_order_) + 1;
    }

    std::vector<int> current(dims_, 0);
    enumerate(0, max_order_, current, coords_);
    std::stable_sort(coords_.begin(), coords_.end(), [](const auto& a, const auto& b) {
        return std::accumulate(a.begin(), a.end(), 0) < std::accumulate(b.begin(), b.end(), 0);
    });

    offsets_.reserve(coords_.size());
    orders_.reserve(coords_.size());
    for (const auto& c : coords_)
    {
        std::size_t off = 0;
        for (std::size_t d = 0; d < dims_; ++d)
            off += static_cast<std::size_t>(c[d]) * strides_[d];
        offsets_.push_back(off);
        orders_.push_back(std::accumulate(c.begin(), c.end(), 0));
    }

    order_ends_.assign(static_cast<std::size_t>(max_order_) + 1, 0);
    for (int o = 0; o <= max_order_; ++o)
        order_ends_[static_cast<std::size_t>(o)] = static_cast<std::size_t>(
            std::upper_bound(orders_.begin(), orders_.end(), o) - orders_.begin());
}

std::size_t Lattice::order_end(int o) const noexcept
{
    if (o < 0)
        return 0;
    if (o >= max_order_)
        return points();
    return order_ends_[static_cast<std::size_t>(o)];
}

std::vector<double> Lattice::delta(std::size_t population) const
{
    auto v = zeros();
    if (population < populations())
        v[population * box_] = 1.0;
    return v;
}

void Lattice::convolve(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) const
{
    out.assign(size(), 0.0);
    const std::size_t npop = populations();
    for (std::size_t pa = 0; pa < points(); ++pa)
    {
        const std::size_t off_a = offsets_[pa];
        const std::size_t end_b = order_end(max_order_ - orders_[pa]);
        for (std::size_t ja = 0; ja < npop; ++ja)
        {
            const double av = a[ja * box_ + off_a];
            if (av == 0.0)
                continue;
            const std::size_t jb_end = npop - ja;
            for (std::size_t pb = 0; pb < end_b; ++pb)
            {
                const std::size_t off_b = offsets_[pb];
                const std::size_t off_c = off_a + off_b + ja * box_;
                for (std::size_t jb = 0; jb < jb_end; ++jb)
                    out[off_c + jb * box_] += av * b[jb * box_ + off_b];
            }
        }
    }
}

CoeffTable Lattice::to_table(const std::vector<double>& values, double slack) const
{
    Truncation trunc{joint() ? std::optional<int>(max_population_) : std::nullopt, max_order_};
    CoeffTable table(joint() ? TableForm::joint : TableForm::marginal, dims_, trunc, slack);
    for (std::size_t j = 0; j < populations(); ++j)
        for (std::size_t p = 0; p < points(); ++p)
        {
            if (values[index(j, p)] == 0.0)
                continue;
            std::vector<int> key;
            key.reserve(dims_ + 1);
            if (joint())
                key.push_back(static_cast<int>(j));
            key.insert(key.end(), coords_[p].begin(), coords_[p].end());
            table.set(MultiIndex(std::move(key)), values[index(j, p)]);
        }
    return table;
}

std::vector<double> Lattice::from_table(const CoeffTable& table) const
{
    if ((table.form() == TableForm::joint) != joint() || table.crossing_dims() != dims_)
        throw std::invalid_argument("table does not match lattice shape");
    auto v = zeros();
    for (const auto& [key, value] : table.entries())
    {
        auto c = key.counts();
        std::size_t j = 0;
        std::size_t first = 0;
        if (joint())
        {
            j = static_cast<std::size_t>(c[0]);
            first = 1;
        }
        int order = 0;
        std::size_t off = 0;
        for (std::size_t d = 0; d < dims_; ++d)
        {
            order += c[first + d];
            off += static_cast<std::size_t>(c[first + d]) * strides_[d];
        }
        if (order > max_order_ || j >= populations())
            continue;
        v[j * box_ + off] = value;
    }
    return v;
}

} // namespace bpcross::detail
