#include "support.hpp"

#include <doctest.h>

#include <bpcross/closed_form.hpp>
#include <bpcross/engine.hpp>
#include <bpcross/roots.hpp>

#include <cmath>

using namespace bpcross;

namespace
{

const OdeSettings tight{1e-13, 1e-12};

double partial_pgf(const CoeffTable& table, std::span<const double> v)
{
    double sum = 0.0;
    for (const auto& [k, x] : table.entries())
        sum += x * k.monomial(v);
    return sum;
}

} // namespace

TEST_CASE("pgf solve examples")
{
    auto law = testing::birth_death();
    CrossingSet deaths({0});
    const double half[] = {0.5};
    CHECK(solve_pgf(law, deaths, 0.0, 0.3, half) == 0.3);
    CHECK(solve_pgf(law, deaths, 1.0, 1.0, half) ==
          doctest::Approx(closed_form::bd_pgf(0.5, 0.5, 2.0, 1.0, 1.0, 0.5)).epsilon(1e-9));

    // Starting at the marked root stays there.
    const double root = marked_root(law, deaths, half);
    for (double t : {0.5, 2.0, 10.0})
        CHECK(std::abs(solve_pgf(law, deaths, t, root, half, tight) - root) < 1e-10);

    CHECK_THROWS_AS(solve_pgf(law, deaths, -1.0, 1.0, half), std::invalid_argument);
    CHECK_THROWS_AS(solve_pgf(law, deaths, 1.0, 1.5, half), std::invalid_argument);
    const double bad[] = {1.5};
    CHECK_THROWS_AS(solve_pgf(law, deaths, 1.0, 1.0, bad), std::invalid_argument);
    CHECK_THROWS_AS(solve_pgf(law, deaths, 1.0, 1.0, half, OdeSettings{0.0, 1e-8}), std::invalid_argument);
}

TEST_CASE("crossing distribution examples")
{
    CrossingSet deaths({0});
    auto at_zero = crossing_distribution(testing::birth_death(), deaths, 0.0, 10);
    CHECK(at_zero.size() == 1);
    CHECK(at_zero.at(MultiIndex{0}) == 1.0);

    // b = 1, p = q = 1/2 at t = ln 3: 1 / (1/2 + 3/2) = 1/2.
    auto slow = testing::birth_death(0.5, 0.5);
    auto g = crossing_distribution(slow, deaths, std::log(3.0), 5, tight);
    CHECK(g.at(MultiIndex{0}) == doctest::Approx(0.5).epsilon(1e-10));

    auto cubic = crossing_distribution(testing::cubic(), deaths, 0.7, 5, tight);
    CHECK(cubic.at(MultiIndex{0}) == doctest::Approx(closed_form::cubic_no_death(0.5, 0.5, 2.0, 0.7)).epsilon(1e-10));
}

TEST_CASE("joint distribution examples")
{
    auto law = OffspringLaw::make({{0, 1.5}, {2, 0.5}});
    CrossingSet deaths({0});
    auto at_zero = joint_distribution(law, deaths, 0.0, 10, 10);
    CHECK(at_zero.size() == 1);
    CHECK(at_zero.at(1, MultiIndex{0}) == 1.0);

    auto joint = joint_distribution(law, deaths, 1.0, 40, 12, tight);
    CHECK(joint.at(0, MultiIndex{0}) == 0.0);

    auto marginal = crossing_distribution(law, deaths, 1.0, 12, tight);
    CHECK(testing::max_abs_diff(joint.marginalize(), marginal) < 1e-9);

    CHECK_THROWS_AS(joint_distribution(law, deaths, 1.0, -1, 3), std::invalid_argument);
}

TEST_CASE("pgf from several particles")
{
    auto law = testing::birth_death();
    CrossingSet deaths({0});
    const double half[] = {0.5};
    CHECK(crossing_pgf_from(law, deaths, 1.0, half, 0) == 1.0);
    const double one = crossing_pgf_from(law, deaths, 1.0, half, 1);
    CHECK(one == doctest::Approx(solve_pgf(law, deaths, 1.0, 1.0, half)).epsilon(1e-15));
    CHECK(crossing_pgf_from(law, deaths, 1.0, half, 3) == doctest::Approx(one * one * one).epsilon(1e-14));
}

TEST_CASE("extinction-conditioned distribution")
{
    CrossingSet deaths({0});
    auto bd = extinction_conditioned_distribution(testing::birth_death(), deaths, 50);
    CHECK(bd.at(MultiIndex{1}) == doctest::Approx(0.5).epsilon(1e-10));

    auto cubic = extinction_conditioned_distribution(testing::cubic(), deaths, 5);
    CHECK(cubic.at(MultiIndex{1}) == doctest::Approx(1.0 / (std::sqrt(5.0) - 1.0)).epsilon(1e-10));

    // The critical series has an n^{-3/2} tail, so mass missing beyond order 50
    // is about 0.08; it must match the explicit series exactly.
    auto series = closed_form::bd_extinction_series(0.5, 0.5, 50);
    double explicit_sum = 0.0;
    for (double x : series)
        explicit_sum += x;
    CHECK(bd.total_mass() == doctest::Approx(explicit_sum).epsilon(1e-10));
    CHECK(bd.total_mass() < 1.0);
    auto longer = extinction_conditioned_distribution(testing::birth_death(), deaths, 400);
    CHECK(longer.total_mass() > bd.total_mass());
    CHECK(1.0 - longer.total_mass() < 0.04);

    // Strongly subcritical: the series is geometric and the mass is 1 up to rounding.
    auto sub = extinction_conditioned_distribution(OffspringLaw::make({{0, 0.7}, {2, 0.3}}), deaths, 50);
    CHECK(std::abs(sub.total_mass() - 1.0) < 1e-4);

    CHECK_THROWS_AS(extinction_conditioned_distribution(OffspringLaw::make({{2, 1.0}}), CrossingSet({2}), 5),
                    std::domain_error);
}

TEST_CASE("property: coefficients are nonnegative, subnormalized and monotone in the cap")
{
    Xoshiro256 rng(41);
    for (int trial = 0; trial < 8; ++trial)
    {
        auto law = testing::random_law(rng, 4);
        std::vector<int> members{0};
        if (law.rate(2) > 0.0)
            members.push_back(2);
        CrossingSet set(members);
        const double t = 0.2 + rng.uniform();
        double prev_mass = 0.0;
        for (int K : {2, 5, 8})
        {
            auto g = crossing_distribution(law, set, t, K);
            for (const auto& [k, x] : g.entries())
                CHECK(x >= -1e-9);
            CHECK(g.total_mass() <= 1.0 + 1e-9);
            CHECK(g.total_mass() >= prev_mass - 1e-12);
            prev_mass = g.total_mass();
        }
    }

    auto sub = OffspringLaw::make({{0, 1.5}, {2, 0.5}});
    auto g = crossing_distribution(sub, CrossingSet({0}), 2.0, 40, tight);
    CHECK(g.total_mass() >= 1.0 - 1e-6);
}

TEST_CASE("property: truncation does not change retained coefficients")
{
    auto law = OffspringLaw::make({{0, 1.0}, {2, 0.6}, {3, 0.3}});
    CrossingSet set({0, 3});
    auto small = crossing_distribution(law, set, 1.3, 6, tight);
    auto large = crossing_distribution(law, set, 1.3, 8, tight);
    double worst = 0.0;
    for (const auto& [k, x] : small.entries())
        worst = std::max(worst, std::abs(x - large.at(k)));
    CHECK(worst < 1e-10);

    auto jsmall = joint_distribution(law, set, 0.8, 10, 5, tight);
    auto jlarge = joint_distribution(law, set, 0.8, 12, 7, tight);
    worst = 0.0;
    for (const auto& [k, x] : jsmall.entries())
        worst = std::max(worst, std::abs(x - jlarge.at(k)));
    CHECK(worst < 1e-10);
}

TEST_CASE("property: truncated pgf agrees with the scalar solve")
{
    auto law = OffspringLaw::make({{0, 1.2}, {2, 0.8}, {4, 0.1}});
    CrossingSet set({0, 2});
    const int K = 30;
    auto g = crossing_distribution(law, set, 0.9, K, tight);
    for (double a : {0.2, 0.5})
        for (double b : {0.1, 0.6})
        {
            const double v[] = {a, b};
            const double vmax = std::max(a, b);
            const double tail = std::pow(vmax, K + 1) / (1.0 - vmax);
            CHECK(std::abs(partial_pgf(g, v) - solve_pgf(law, set, 0.9, 1.0, v, tight)) < tail + 1e-8);
        }
}

TEST_CASE("property: pgf moves monotonically to the marked root")
{
    auto law = OffspringLaw::make({{0, 1.5}, {2, 0.5}});
    CrossingSet deaths({0});
    for (double vv : {0.3, 0.8})
    {
        const double v[] = {vv};
        const double root = marked_root(law, deaths, v);
        double from_above = 1.0;
        double from_below = 0.0;
        for (double t = 0.5; t <= 50.0; t += 0.5)
        {
            const double a = solve_pgf(law, deaths, t, 1.0, v, tight);
            const double b = solve_pgf(law, deaths, t, 0.5 * root, v, tight);
            CHECK(a <= from_above + 1e-12);
            CHECK(b >= from_below - 1e-12);
            from_above = a;
            from_below = b;
        }
        CHECK(std::abs(from_above - root) < 1e-6);
        CHECK(std::abs(from_below - root) < 1e-6);
    }
}

TEST_CASE("property: forward identity G - u = phi * integral of dG/du")
{
    auto law = OffspringLaw::make({{0, 1.0}, {2, 0.7}, {3, 0.2}});
    CrossingSet set({0, 3});
    const double h = 1e-5;
    for (double t : {0.4, 1.5})
        for (double u : {0.2, 0.7})
        {
            const double v[] = {0.4, 0.9};
            auto dgdu = [&](double s) {
                return (solve_pgf(law, set, s, u + h, v, tight) - solve_pgf(law, set, s, u - h, v, tight)) / (2 * h);
            };
            const int n = 40;
            const double step = t / n;
            double integral = dgdu(0.0) + dgdu(t);
            for (int i = 1; i < n; ++i)
                integral += (i % 2 ? 4.0 : 2.0) * dgdu(i * step);
            integral *= step / 3.0;
            const double lhs = solve_pgf(law, set, t, u, v, tight) - u;
            const double rhs = crossing_generator_value(law, set, u, v) * integral;
            CHECK(std::abs(lhs - rhs) < 1e-5);
        }
}

TEST_CASE("property: quadrature evaluator agrees with the ODE system")
{
    auto law = OffspringLaw::make({{0, 1.5}, {2, 0.5}});
    CrossingSet set({0, 2});
    auto ode = joint_distribution(law, set, 1.0, 12, 6, tight);
    auto quad = joint_distribution_by_quadrature(law, set, 1.0, 12, 6);
    CHECK(testing::max_abs_diff(ode, quad) < 1e-8);

    CHECK_THROWS_AS(joint_distribution_by_quadrature(law, CrossingSet({2}), 1.0, 5, 3), std::invalid_argument);
}

TEST_CASE("property: branching power rule")
{
    auto law = testing::birth_death();
    CrossingSet deaths({0});
    auto one = crossing_distribution(law, deaths, 0.6, 20, tight);
    auto three = convolve_power(one, 3, one.truncation());
    const double v[] = {0.4};
    const double pgf3 = crossing_pgf_from(law, deaths, 0.6, v, 3, tight);
    CHECK(std::abs(partial_pgf(three, v) - pgf3) < 1e-8);
}
