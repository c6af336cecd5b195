#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace bpcross
{

/// SplitMix64 (Steele, Lea and Flood). Used to expand seeds and derive streams.
class SplitMix64
{
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
///
/// Stream derivation: stream(seed, index) seeds a SplitMix64 with
/// seed ^ mix(index + 1), where mix is one SplitMix64 output for that value,
/// and fills the four state words from four consecutive SplitMix64 outputs.
class Xoshiro256
{
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept;

    static Xoshiro256 stream(std::uint64_t base_seed, std::uint64_t index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0, 1]: the top 53 bits plus one, scaled by 2^-53.
    double uniform_open_closed() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    /// Exponential with the given rate by inversion: -log(U) / rate, U in (0, 1].
    double exponential(double rate) noexcept;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

/// Walker alias table (Vose's construction) for O(1) discrete sampling.
class AliasTable
{
public:
    /// Weights must be nonnegative with a positive sum.
    explicit AliasTable(std::span<const double> weights);

    std::size_t size() const noexcept { return prob_.size(); }

    /// Draws an index: one uniform picks the column, a second decides alias vs. column.
    template <class Rng>
    std::size_t sample(Rng& rng) const noexcept
    {
        const std::size_t column = static_cast<std::size_t>(rng.uniform() * static_cast<double>(prob_.size()));
        const std::size_t c = column < prob_.size() ? column : prob_.size() - 1;
        return rng.uniform() < prob_[c] ? c : alias_[c];
    }

    /// Probability mass implied by the table for each index (for testing).
    std::vector<double> implied_probabilities() const;

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace bpcross
