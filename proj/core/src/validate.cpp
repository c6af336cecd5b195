#include "bpcross/validate.hpp"

#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpcross
{

namespace
{

constexpr double poisson_tail_tol = 1e-12;
constexpr double negative_tol = 1e-12;

struct Move
{
    int population_shift;
    int axis;
    double rate;
};

} // namespace

UniformizationResult uniformization_distribution(const OffspringLaw& law, const CrossingSet& set,
                                                 int initial_population, double t, int max_population, int max_order)
{
    if (initial_population < 0 || max_population < initial_population)
        throw std::invalid_argument("population cap Jmax must be at least the initial population");
    if (max_order < 0)
        throw std::invalid_argument("order cap K must be nonnegative");
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("time must be finite and >= 0");
    set.validate_for(law);

    detail::Lattice lat(set.size(), max_order, max_population);
    std::vector<double> pi = lat.delta(static_cast<std::size_t>(initial_population));
    if (t == 0.0)
        return {lat.to_table(pi, CoeffTable::default_slack), 0.0, 0};

    std::vector<Move> moves;
    for (const auto& [j, rate] : law.rates())
    {
        auto axis = set.position(j);
        moves.push_back({j - 1, axis ? static_cast<int>(*axis) : -1, rate});
    }
    const double lambda = std::max(max_population, 1) * law.event_rate();
    const double mean = lambda * t;

    std::vector<double> acc = lat.zeros();
    std::vector<double> next = lat.zeros();
    std::uint64_t n = 0;
    for (;; ++n)
    {
        const double log_w = -mean + static_cast<double>(n) * std::log(mean) - std::lgamma(static_cast<double>(n) + 1.0);
        const double w = std::exp(log_w);
        for (std::size_t i = 0; i < pi.size(); ++i)
            acc[i] += w * pi[i];

        const double ratio = mean / (static_cast<double>(n) + 1.0);
        if (ratio < 1.0 && w * ratio / (1.0 - ratio) < poisson_tail_tol)
            break;
        if (n > 100'000'000)
            throw std::runtime_error("uniformization series did not converge");

        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t pop = 0; pop < lat.populations(); ++pop)
        {
            const double exit = static_cast<double>(pop) * law.event_rate() / lambda;
            for (std::size_t p = 0; p < lat.points(); ++p)
            {
                const std::size_t src = lat.index(pop, p);
                const double mass = pi[src];
                if (mass == 0.0)
                    continue;
                next[src] += mass * (1.0 - exit);
                if (pop == 0)
                    continue;
                const int order = lat.order(p);
                for (const Move& mv : moves)
                {
                    const long target_pop = static_cast<long>(pop) + mv.population_shift;
                    if (target_pop > max_population)
                        continue;
                    std::size_t dst = static_cast<std::size_t>(target_pop) * lat.box() + lat.offset(p);
                    if (mv.axis >= 0)
                    {
                        if (order + 1 > max_order)
                            continue;
                        dst += lat.stride(static_cast<std::size_t>(mv.axis));
                    }
                    next[dst] += mass * static_cast<double>(pop) * mv.rate / lambda;
                }
            }
        }
        pi.swap(next);
    }

    double retained = 0.0;
    for (double x : acc)
        retained += x;
    UniformizationResult out{lat.to_table(acc, CoeffTable::default_slack), std::max(0.0, 1.0 - retained), n + 1};
    return out;
}

double total_variation(const Distribution& a, const Distribution& b)
{
    auto check = [](const Distribution& d) {
        double mass = 0.0;
        for (const auto& [key, value] : d)
        {
            if (value < -negative_tol || std::isnan(value))
                throw std::invalid_argument("distribution entry at " + key.to_string() + " is negative");
            mass += std::max(0.0, value);
        }
        return mass;
    };
    const double mass_a = check(a);
    const double mass_b = check(b);

    double l1 = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end())
    {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first))
        {
            l1 += std::max(0.0, ia->second);
            ++ia;
        }
        else if (ia == a.end() || ib->first < ia->first)
        {
            l1 += std::max(0.0, ib->second);
            ++ib;
        }
        else
        {
            l1 += std::abs(std::max(0.0, ia->second) - std::max(0.0, ib->second));
            ++ia;
            ++ib;
        }
    }
    return std::clamp(0.5 * l1 + 0.5 * std::abs(mass_a - mass_b), 0.0, 1.0);
}

double total_variation(const CoeffTable& a, const CoeffTable& b)
{
    if (a.form() != b.form() || a.crossing_dims() != b.crossing_dims())
        throw std::invalid_argument("tables have different index spaces");
    return total_variation(a.entries(), b.entries());
}

ZReport mc_z_report(const EmpiricalTable& empirical, const CoeffTable& analytic, const ZReportOptions& options)
{
    if (empirical.replicates == 0 || (empirical.counts.empty() && empirical.capped == 0))
        throw std::invalid_argument("empirical table is empty");
    if (analytic.crossing_dims() != empirical.crossing_dims)
        throw std::invalid_argument("empirical and analytic tables index different crossing sets");

    const std::map<MultiIndex, std::uint64_t> observed =
        analytic.form() == TableForm::marginal ? empirical.crossing_counts() : empirical.counts;
    const std::uint64_t n = empirical.replicates;
    const double nd = static_cast<double>(n);

    ZReport report;
    report.options = options;
    report.replicates = n;

    auto z_score = [nd](double obs, double p) {
        p = std::clamp(p, 0.0, 1.0);
        const double expected = nd * p;
        const double var = nd * p * (1.0 - p);
        if (var <= 0.0)
            return obs == expected ? 0.0 : std::numeric_limits<double>::infinity();
        return (obs - expected) / std::sqrt(var);
    };

    double tested_p = 0.0;
    std::uint64_t tested_obs = 0;
    for (const auto& [key, value] : analytic.entries())
    {
        const double p = std::max(0.0, value);
        const double expected = nd * p;
        if (expected < options.min_expected)
        {
            ++report.pooled_cells;
            continue;
        }
        auto it = observed.find(key);
        const std::uint64_t obs = it == observed.end() ? 0 : it->second;
        ZCell cell{key, obs, expected, z_score(static_cast<double>(obs), p)};
        report.max_abs_z = std::max(report.max_abs_z, std::abs(cell.z));
        report.cells.push_back(std::move(cell));
        tested_p += p;
        tested_obs += obs;
    }

    const double pooled_p = std::clamp(1.0 - tested_p, 0.0, 1.0);
    report.pooled_observed = n - tested_obs;
    report.pooled_expected = nd * pooled_p;
    report.pooled_z = z_score(static_cast<double>(report.pooled_observed), pooled_p);
    report.max_abs_z = std::max(report.max_abs_z, std::abs(report.pooled_z));

    Distribution emp;
    for (const auto& [key, c] : observed)
        emp[key] = static_cast<double>(c) / nd;
    report.tv_distance = total_variation(emp, analytic.entries());
    report.passed = report.max_abs_z < options.max_abs_z;
    return report;
}

} // namespace bpcross
