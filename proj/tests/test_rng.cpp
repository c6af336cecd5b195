#include <doctest.h>

#include <bpcross/rng.hpp>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

using namespace bpcross;

TEST_CASE("SplitMix64 reference outputs")
{
    // First outputs for seed 1234567 from the reference implementation.
    SplitMix64 sm(1234567);
    CHECK(sm() == 6457827717110365317ULL);
    CHECK(sm() == 3203168211198807973ULL);
    CHECK(sm() == 9817491932198370423ULL);
}

TEST_CASE("streams are deterministic and distinct")
{
    auto a = Xoshiro256::stream(42, 0);
    auto b = Xoshiro256::stream(42, 0);
    auto c = Xoshiro256::stream(42, 1);
    auto d = Xoshiro256::stream(43, 0);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i)
    {
        const auto x = a();
        CHECK(x == b());
        firsts.insert(x);
    }
    CHECK(c() != Xoshiro256::stream(42, 0)());
    CHECK(d() != Xoshiro256::stream(42, 0)());
    CHECK(firsts.size() == 100);
}

TEST_CASE("uniform ranges and exponential mean")
{
    Xoshiro256 rng(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double u = rng.uniform();
        const double w = rng.uniform_open_closed();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(w > 0.0);
        CHECK(w <= 1.0);
        sum += rng.exponential(2.0);
    }
    CHECK(std::abs(sum / n - 0.5) < 4 * 0.5 / std::sqrt(double(n)));

    // Works as a standard URBG.
    std::uniform_int_distribution<int> dist(1, 6);
    int x = dist(rng);
    CHECK(x >= 1);
    CHECK(x <= 6);
}

TEST_CASE("alias table")
{
    const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
    AliasTable table(w);
    auto implied = table.implied_probabilities();
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(implied[i] == doctest::Approx(w[i]).epsilon(1e-12));

    Xoshiro256 rng(99);
    std::vector<int> counts(w.size());
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        ++counts[table.sample(rng)];
    CHECK(counts[1] == 0);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(std::abs(counts[i] - n * w[i]) < 4 * std::sqrt(n * w[i] * (1 - w[i])) + 1e-9);

    CHECK_THROWS_AS(AliasTable(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -0.5}), std::invalid_argument);
}
