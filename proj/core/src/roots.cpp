#include "bpcross/roots.hpp"

#include "lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpcross
{

namespace
{

constexpr int max_newton_iterations = 200;

RootResult bisect(const OffspringLaw& law, const CrossingSet& set, std::span<const double> v, double lo, double hi,
                  double tol, int iterations)
{
    // Invariant: phi(lo) > 0 >= phi(hi). Convexity puts the leftmost root in (lo, hi].
    while (hi - lo > tol && iterations < 10 * max_newton_iterations)
    {
        const double mid = 0.5 * (lo + hi);
        if (crossing_generator_value(law, set, mid, v) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iterations;
    }
    return {hi, iterations, true};
}

} // namespace

RootResult find_marked_root(const OffspringLaw& law, const CrossingSet& set, std::span<const double> v, double tol)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("root tolerance must be positive");
    set.validate_for(law);

    double u = 0.0;
    double f = crossing_generator_value(law, set, u, v);
    if (f <= 0.0)
        return {0.0, 0, false};

    // With every mark at 1 the function vanishes at 1. If it is also
    // nonincreasing there, convexity leaves no root below 1 (mean offspring <= 1).
    bool unmarked = true;
    for (double x : v)
        unmarked = unmarked && x == 1.0;
    if (unmarked)
    {
        double scale = 0.0;
        const auto b = law.coefficients();
        for (std::size_t j = 1; j < b.size(); ++j)
            scale += static_cast<double>(j) * std::abs(b[j]);
        if (crossing_generator_derivative(law, set, 1.0, v) <= 64 * 0x1.0p-52 * scale)
            return {1.0, 0, false};
    }

    double hi = 1.0;
    for (int it = 1; it <= max_newton_iterations; ++it)
    {
        const double slope = crossing_generator_derivative(law, set, u, v);
        if (!(slope < 0.0))
            return bisect(law, set, v, u, hi, tol, it);
        const double step = -f / slope;
        const double next = u + step;
        if (!(next > u) || next > hi)
            return bisect(law, set, v, u, hi, tol, it);
        const double f_next = crossing_generator_value(law, set, next, v);
        if (f_next < 0.0)
            return bisect(law, set, v, u, next, tol, it);
        u = next;
        f = f_next;
        if (step <= tol || f == 0.0)
            return {u, it, false};
    }
    return bisect(law, set, v, u, hi, tol, max_newton_iterations);
}

double extinction_probability(const OffspringLaw& law, double tol)
{
    return find_marked_root(law, CrossingSet{}, {}, tol).value;
}

double marked_root(const OffspringLaw& law, const CrossingSet& set, std::span<const double> v, double tol)
{
    return find_marked_root(law, set, v, tol).value;
}

CoeffTable marked_root_series(const OffspringLaw& law, const CrossingSet& set, int max_order)
{
    if (max_order < 0)
        throw std::invalid_argument("series order must be nonnegative");
    set.validate_for(law);

    const std::vector<double> zero_marks(set.size(), 0.0);
    const double rho0 = marked_root(law, set, zero_marks);

    const int top = law.max_offspring();
    double slope = 0.0;
    for (int j = 1; j <= top; ++j)
        if (!set.contains(j))
            slope += j * law.rate(j) * std::pow(rho0, j - 1);
    if (!(slope < 0.0))
        throw std::domain_error("untracked generator derivative at the constant term is " + std::to_string(slope) +
                                "; the root series is not defined");

    detail::Lattice lat(set.size(), max_order);
    std::vector<double> rho = lat.zeros();
    rho[0] = rho0;

    std::vector<std::vector<double>> powers(static_cast<std::size_t>(top) + 1);
    for (int o = 1; o <= max_order; ++o)
    {
        powers[0] = lat.delta();
        for (int j = 1; j <= top; ++j)
        {
            if (j == 1)
                powers[1] = rho;
            else
                lat.convolve(powers[static_cast<std::size_t>(j - 1)], rho, powers[static_cast<std::size_t>(j)]);
        }

        for (std::size_t p = lat.order_end(o - 1); p < lat.order_end(o); ++p)
        {
            const std::size_t off = lat.offset(p);
            const auto& k = lat.coords(p);
            double residual = 0.0;
            for (int j = 0; j <= top; ++j)
            {
                const double b = law.rate(j);
                if (b == 0.0)
                    continue;
                const auto& pw = powers[static_cast<std::size_t>(j)];
                if (auto axis = set.position(j))
                {
                    if (k[*axis] > 0)
                        residual += b * pw[off - lat.stride(*axis)];
                }
                else
                {
                    residual += b * pw[off];
                }
            }
            rho[off] = -residual / slope;
        }
    }
    return lat.to_table(rho, CoeffTable::default_slack);
}

} // namespace bpcross
