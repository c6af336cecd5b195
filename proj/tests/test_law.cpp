#include "support.hpp"

#include <doctest.h>

#include <bpcross/law.hpp>

#include "lattice.hpp"

using namespace bpcross;

TEST_CASE("offspring law derives b1 so that B(1) = 0")
{
    auto law = OffspringLaw::make({{0, 0.25}, {2, 0.75}});
    CHECK(law.b1() == doctest::Approx(-1.0));
    CHECK(law.event_rate() == doctest::Approx(1.0));
    CHECK(law.max_offspring() == 2);
    CHECK(law.rate(7) == 0.0);
    CHECK(generator_value(law, 1.0) == 0.0);

    Xoshiro256 rng(11);
    for (int i = 0; i < 200; ++i)
    {
        auto random = testing::random_law(rng, 12);
        CHECK(std::abs(generator_value(random, 1.0)) < 1e-14);
    }
}

TEST_CASE("generator values for small laws")
{
    // B(u) = 0.25 - u + 0.75 u^2 at u = 0.5
    auto law = OffspringLaw::make({{0, 0.25}, {2, 0.75}});
    CHECK(generator_value(law, 0.5) == doctest::Approx(-0.0625).epsilon(1e-14));
    CHECK(generator_derivative(law, 0.5) == doctest::Approx(-0.25).epsilon(1e-14));

    auto death = OffspringLaw::make({{0, 1.0}});
    CHECK(generator_value(death, 0.3) == doctest::Approx(0.7));

    CrossingSet deaths({0});
    const double v[] = {0.0};
    // Marking deaths with v = 0 removes b_0: B(0) - b_0 = 0.
    CHECK(crossing_generator_value(law, deaths, 0.0, v) == 0.0);
}

TEST_CASE("invalid laws are rejected")
{
    CHECK_THROWS_AS(OffspringLaw::make({}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::make({{1, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::make({{-1, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::make({{0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::make({{0, 0.0}, {2, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::make({{70, 1.0}}), std::invalid_argument);
    CHECK_NOTHROW(OffspringLaw::make({{70, 1.0}}, 80));
}

TEST_CASE("crossing sets")
{
    CrossingSet set({3, 0});
    CHECK(set.size() == 2);
    CHECK(set.members()[0] == 0);
    CHECK(set.members()[1] == 3);
    CHECK(set.position(3) == 1u);
    CHECK_FALSE(set.position(2).has_value());
    CHECK_THROWS_AS(CrossingSet({1}), std::invalid_argument);
    CHECK_THROWS_AS(CrossingSet({0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(CrossingSet({-2}), std::invalid_argument);

    auto law = testing::birth_death();
    CHECK_NOTHROW(CrossingSet({0, 2}).validate_for(law));
    CHECK_THROWS_AS(CrossingSet({3}).validate_for(law), std::invalid_argument);
}

TEST_CASE("multi-index arithmetic")
{
    MultiIndex k{2, 1};
    CHECK(k.order() == 3);
    CHECK(k.plus_unit(1) == MultiIndex{2, 2});
    CHECK(k.minus_unit(0) == MultiIndex{1, 1});
    CHECK_THROWS_AS(MultiIndex({0, 1}).minus_unit(0), std::domain_error);
    CHECK_THROWS_AS(MultiIndex({1, 0}) - MultiIndex({0, 1}), std::domain_error);
    CHECK(k + MultiIndex{1, 1} == MultiIndex{3, 2});
    const double v[] = {0.5, 2.0};
    CHECK(k.monomial(v) == doctest::Approx(0.5));
    CHECK(MultiIndex::unit(3, 2) == MultiIndex{0, 0, 1});
}

TEST_CASE("coefficient table validation")
{
    CoeffTable t(TableForm::marginal, 1, {std::nullopt, 3});
    CHECK_THROWS_AS(t.set(MultiIndex{4}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(t.set(MultiIndex{1, 0}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(t.set(MultiIndex{1}, -0.1), std::invalid_argument);
    t.set(MultiIndex{1}, 0.25);
    t.add(MultiIndex{1}, 0.25);
    CHECK(t.at(MultiIndex{1}) == 0.5);
    CHECK(t.at(MultiIndex{2}) == 0.0);
    CHECK(t.total_mass() == 0.5);

    CoeffTable j(TableForm::joint, 1, {2, 3});
    CHECK(j.key_size() == 2);
    CHECK_THROWS_AS(j.set(MultiIndex{3, 0}, 0.1), std::invalid_argument);
    j.set(MultiIndex{1, 2}, 0.25);
    j.set(MultiIndex{2, 2}, 0.5);
    CHECK(j.at(2, MultiIndex{2}) == 0.5);
    auto m = j.marginalize();
    CHECK(m.form() == TableForm::marginal);
    CHECK(m.at(MultiIndex{2}) == 0.75);
}

TEST_CASE("convolution examples")
{
    Truncation trunc{std::nullopt, 5};
    CoeffTable a(TableForm::marginal, 1, trunc);
    a.set(MultiIndex{0}, 0.5);
    a.set(MultiIndex{1}, 0.5);

    auto p0 = convolve_power(a, 0, trunc);
    CHECK(p0.size() == 1);
    CHECK(p0.at(MultiIndex{0}) == 1.0);

    auto p1 = convolve_power(a, 1, trunc);
    CHECK(testing::max_abs_diff(p1, a) == 0.0);

    auto p3 = convolve_power(a, 3, trunc);
    CHECK(p3.at(MultiIndex{0}) == 0.125);
    CHECK(p3.at(MultiIndex{1}) == 0.375);
    CHECK(p3.at(MultiIndex{2}) == 0.375);
    CHECK(p3.at(MultiIndex{3}) == 0.125);

    CHECK_THROWS_AS(convolve_power(a, -1, trunc), std::invalid_argument);

    // Truncation drops orders beyond the cap.
    auto small = convolve_power(a, 3, {std::nullopt, 1});
    CHECK(small.size() == 2);
    CHECK(small.at(MultiIndex{1}) == 0.375);
}

TEST_CASE("joint convolution adds populations")
{
    Truncation trunc{4, 4};
    CoeffTable a(TableForm::joint, 1, trunc);
    a.set(MultiIndex{1, 0}, 0.5);
    a.set(MultiIndex{0, 1}, 0.5);
    auto sq = convolve(a, a, trunc);
    CHECK(sq.at(2, MultiIndex{0}) == 0.25);
    CHECK(sq.at(1, MultiIndex{1}) == 0.5);
    CHECK(sq.at(0, MultiIndex{2}) == 0.25);
}

TEST_CASE("property: marked generator reduces to B at v = 1 and is monotone in v")
{
    Xoshiro256 rng(5);
    for (int trial = 0; trial < 50; ++trial)
    {
        auto law = testing::random_law(rng);
        CrossingSet set({0});
        const double ones[] = {1.0};
        for (int i = 0; i <= 20; ++i)
        {
            const double u = i / 20.0;
            CHECK(std::abs(crossing_generator_value(law, set, u, ones) - generator_value(law, u)) < 1e-14);
            double prev = -1e300;
            for (int s = 0; s <= 10; ++s)
            {
                const double v[] = {s / 10.0};
                const double x = crossing_generator_value(law, set, u, v);
                CHECK(x >= prev - 1e-15);
                prev = x;
            }
        }
    }
}

TEST_CASE("property: convolution is commutative and associative")
{
    Xoshiro256 rng(17);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::size_t dims = 1 + trial % 3;
        const int K = 4;
        Truncation trunc{std::nullopt, K};
        auto a = testing::random_table(rng, dims, K);
        auto b = testing::random_table(rng, dims, K);
        auto c = testing::random_table(rng, dims, K);
        CHECK(testing::max_abs_diff(convolve(a, b, trunc), convolve(b, a, trunc)) < 1e-12);
        CHECK(testing::max_abs_diff(convolve(convolve(a, b, trunc), c, trunc),
                                    convolve(a, convolve(b, c, trunc), trunc)) < 1e-12);
    }
}

TEST_CASE("property: power mass is the mass power when nothing is truncated")
{
    Xoshiro256 rng(23);
    for (int trial = 0; trial < 10; ++trial)
    {
        auto a = testing::random_table(rng, 2, 3);
        for (int i = 0; i <= 4; ++i)
        {
            auto p = convolve_power(a, i, {std::nullopt, 3 * i});
            CHECK(p.total_mass() == doctest::Approx(std::pow(a.total_mass(), i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: dense lattice convolution matches the sparse one")
{
    Xoshiro256 rng(29);
    for (std::size_t dims = 1; dims <= 3; ++dims)
    {
        const int K = 5;
        detail::Lattice lat(dims, K);
        Truncation trunc{std::nullopt, K};
        auto a = testing::random_table(rng, dims, K);
        auto b = testing::random_table(rng, dims, K);
        auto out = lat.zeros();
        lat.convolve(lat.from_table(a), lat.from_table(b), out);
        CHECK(testing::max_abs_diff(lat.to_table(out, 0.0), convolve(a, b, trunc)) < 1e-14);
    }

    detail::Lattice joint(2, 4, 6);
    Truncation trunc{6, 4};
    CoeffTable a(TableForm::joint, 2, trunc);
    CoeffTable b(TableForm::joint, 2, trunc);
    for (int j = 0; j <= 6; ++j)
        for (int x = 0; x <= 4; ++x)
            for (int y = 0; x + y <= 4; ++y)
            {
                a.set(MultiIndex{j, x, y}, rng.uniform());
                b.set(MultiIndex{j, x, y}, rng.uniform());
            }
    auto out = joint.zeros();
    joint.convolve(joint.from_table(a), joint.from_table(b), out);
    CHECK(testing::max_abs_diff(joint.to_table(out, 0.0), convolve(a, b, trunc)) < 1e-13);
}
