#include "bpcross/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bpcross
{

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept
{
    SplitMix64 sm(seed);
    for (auto& word : s_)
        word = sm();
}

Xoshiro256 Xoshiro256::stream(std::uint64_t base_seed, std::uint64_t index) noexcept
{
    SplitMix64 mix(index + 1);
    return Xoshiro256(base_seed ^ mix());
}

double Xoshiro256::exponential(double rate) noexcept
{
    return -std::log(uniform_open_closed()) / rate;
}

AliasTable::AliasTable(std::span<const double> weights)
{
    const std::size_t n = weights.size();
    if (n == 0)
        throw std::invalid_argument("alias table needs at least one weight");
    double total = 0.0;
    for (double w : weights)
    {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("alias table weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("alias table weights must have a positive sum");

    prob_.assign(n, 1.0);
    alias_.resize(n);
    std::iota(alias_.begin(), alias_.end(), std::size_t{0});

    std::vector<double> scaled(n);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    for (std::size_t i = 0; i < n; ++i)
    {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty())
    {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0)
        {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t i : large)
        prob_[i] = 1.0;
    for (std::size_t i : small)
        prob_[i] = 1.0;
}

std::vector<double> AliasTable::implied_probabilities() const
{
    const double n = static_cast<double>(prob_.size());
    std::vector<double> out(prob_.size(), 0.0);
    for (std::size_t i = 0; i < prob_.size(); ++i)
    {
        out[i] += prob_[i] / n;
        out[alias_[i]] += (1.0 - prob_[i]) / n;
    }
    return out;
}

} // namespace bpcross
