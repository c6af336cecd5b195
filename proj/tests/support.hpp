#pragma once

#include <bpcross/law.hpp>
#include <bpcross/rng.hpp>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace testing
{

inline bpcross::OffspringLaw birth_death(double death = 1.0, double birth = 1.0)
{
    return bpcross::OffspringLaw::make({{0, death}, {2, birth}});
}

inline bpcross::OffspringLaw cubic(double death = 1.0, double birth = 1.0)
{
    return bpcross::OffspringLaw::make({{0, death}, {3, birth}});
}

/// Random law with support inside {0, 2, ..., max_size}; always has a death rate.
inline bpcross::OffspringLaw random_law(bpcross::Xoshiro256& rng, int max_size = 6)
{
    std::map<int, double> rates{{0, 0.1 + rng.uniform()}};
    for (int j = 2; j <= max_size; ++j)
        if (rng.uniform() < 0.5)
            rates[j] = rng.uniform();
    return bpcross::OffspringLaw::make(rates);
}

/// Random nonnegative marginal table with entries on every index of order <= max_order.
inline bpcross::CoeffTable random_table(bpcross::Xoshiro256& rng, std::size_t dims, int max_order)
{
    bpcross::Truncation trunc{std::nullopt, max_order};
    bpcross::CoeffTable table(bpcross::TableForm::marginal, dims, trunc);
    std::vector<bpcross::MultiIndex> frontier{bpcross::MultiIndex(dims)};
    std::map<bpcross::MultiIndex, bool> seen;
    while (!frontier.empty())
    {
        auto k = frontier.back();
        frontier.pop_back();
        if (seen[k])
            continue;
        seen[k] = true;
        table.set(k, rng.uniform() * 0.3);
        if (k.order() < max_order)
            for (std::size_t a = 0; a < dims; ++a)
                frontier.push_back(k.plus_unit(a));
    }
    return table;
}

inline double max_abs_diff(const bpcross::CoeffTable& a, const bpcross::CoeffTable& b)
{
    double worst = 0.0;
    for (const auto& [k, x] : a.entries())
        worst = std::max(worst, std::abs(x - b.at(k)));
    for (const auto& [k, x] : b.entries())
        worst = std::max(worst, std::abs(x - a.at(k)));
    return worst;
}

} // namespace testing
