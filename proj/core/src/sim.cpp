#include "bpcross/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace bpcross
{

namespace
{

std::vector<double> event_weights(const OffspringLaw& law, std::vector<int>& sizes)
{
    std::vector<double> weights;
    for (const auto& [j, rate] : law.rates())
    {
        sizes.push_back(j);
        weights.push_back(rate);
    }
    return weights;
}

unsigned resolve_threads(unsigned threads)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    return threads;
}

/// Splits [0, n) into `threads` contiguous blocks and runs work(lo, hi, slot)
/// for each. Results are merged by the caller in slot order.
template <class Work>
void run_blocks(std::uint64_t n, unsigned threads, Work work)
{
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n, 1)));
    if (threads <= 1)
    {
        work(0, n, 0u);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned slot = 0; slot < threads; ++slot)
    {
        const std::uint64_t lo = std::min(n, chunk * slot);
        const std::uint64_t hi = std::min(n, lo + chunk);
        pool.emplace_back([=, &work] { work(lo, hi, slot); });
    }
}

} // namespace

PathSimulator::PathSimulator(const OffspringLaw& law, const CrossingSet& set, SimOptions options)
    : set_(set), options_(options), event_rate_(law.event_rate()), alias_(event_weights(law, sizes_))
{
    set_.validate_for(law);
    if (options_.population_cap <= 0)
        throw std::invalid_argument("population cap must be positive");
    axes_.reserve(sizes_.size());
    for (int j : sizes_)
    {
        auto a = set_.position(j);
        axes_.push_back(a ? static_cast<int>(*a) : -1);
    }
}

PathRecord PathSimulator::run(std::int64_t initial_population, double horizon, Xoshiro256& rng) const
{
    if (initial_population < 0)
        throw std::invalid_argument("initial population must be nonnegative");
    if (!(horizon >= 0.0) || std::isnan(horizon))
        throw std::invalid_argument("horizon must be >= 0");

    PathRecord path;
    path.initial_population = initial_population;
    path.final_population = initial_population;
    path.crossings = MultiIndex(set_.size());
    path.horizon = horizon;
    std::vector<int> crossings(set_.size(), 0);

    std::int64_t pop = initial_population;
    double time = 0.0;
    const bool escape = options_.escape_population > 0;
    if (pop == 0)
        path.absorbed = true;
    else if (escape && pop >= options_.escape_population)
        path.escaped = true;

    while (!path.absorbed && !path.escaped)
    {
        const double wait = rng.exponential(static_cast<double>(pop) * event_rate_);
        if (time + wait > horizon)
            break;
        time += wait;
        const std::size_t column = alias_.sample(rng);
        const int size = sizes_[column];
        pop += size - 1;
        ++path.event_count;
        if (axes_[column] >= 0)
            ++crossings[static_cast<std::size_t>(axes_[column])];
        if (options_.record_events)
            path.events.push_back({time, size});
        if (pop == 0)
            path.absorbed = true;
        else if (pop > options_.population_cap)
        {
            path.capped = true;
            break;
        }
        else if (escape && pop >= options_.escape_population)
            path.escaped = true;
    }
    path.final_population = pop;
    path.crossings = MultiIndex(std::move(crossings));
    return path;
}

PathRecord simulate_path(const OffspringLaw& law, const CrossingSet& set, std::int64_t initial_population,
                         double horizon, Xoshiro256& rng, const SimOptions& options)
{
    return PathSimulator(law, set, options).run(initial_population, horizon, rng);
}

std::uint64_t EmpiricalTable::total() const
{
    std::uint64_t s = 0;
    for (const auto& [key, c] : counts)
        s += c;
    return s;
}

std::map<MultiIndex, std::uint64_t> EmpiricalTable::crossing_counts() const
{
    std::map<MultiIndex, std::uint64_t> out;
    for (const auto& [key, c] : counts)
    {
        auto k = key.counts();
        out[MultiIndex(std::vector<int>(k.begin() + 1, k.end()))] += c;
    }
    return out;
}

std::map<std::int64_t, std::uint64_t> EmpiricalTable::population_counts() const
{
    std::map<std::int64_t, std::uint64_t> out;
    for (const auto& [key, c] : counts)
        out[key[0]] += c;
    return out;
}

EmpiricalTable monte_carlo(const OffspringLaw& law, const CrossingSet& set, std::int64_t initial_population, double t,
                           std::uint64_t replicates, std::uint64_t base_seed, unsigned threads,
                           const SimOptions& options)
{
    if (replicates == 0)
        throw std::invalid_argument("replicate count must be positive");
    if (initial_population < 0)
        throw std::invalid_argument("initial population must be nonnegative");
    if (options.population_cap > std::numeric_limits<int>::max())
        throw std::invalid_argument("population cap must fit a table key");
    SimOptions opts = options;
    opts.record_events = false;
    opts.escape_population = 0;
    const PathSimulator sim(law, set, opts);

    threads = resolve_threads(threads);
    struct Partial
    {
        std::map<MultiIndex, std::uint64_t> counts;
        std::uint64_t capped = 0;
    };
    std::vector<Partial> partials(threads);
    run_blocks(replicates, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned slot) {
        Partial& part = partials[slot];
        std::vector<int> key(set.size() + 1);
        for (std::uint64_t r = lo; r < hi; ++r)
        {
            Xoshiro256 rng = Xoshiro256::stream(base_seed, r);
            const PathRecord path = sim.run(initial_population, t, rng);
            if (path.capped)
            {
                ++part.capped;
                continue;
            }
            key[0] = static_cast<int>(path.final_population);
            std::copy(path.crossings.counts().begin(), path.crossings.counts().end(), key.begin() + 1);
            ++part.counts[MultiIndex(key)];
        }
    });

    EmpiricalTable table;
    table.crossing_dims = set.size();
    table.replicates = replicates;
    table.base_seed = base_seed;
    table.initial_population = initial_population;
    table.t = t;
    for (const auto& part : partials)
    {
        for (const auto& [key, c] : part.counts)
            table.counts[key] += c;
        table.capped += part.capped;
    }
    return table;
}

ExtinctionEstimate estimate_extinction(const OffspringLaw& law, std::int64_t initial_population,
                                       std::uint64_t replicates, double horizon, std::uint64_t base_seed,
                                       unsigned threads, std::int64_t escape_population)
{
    if (replicates == 0)
        throw std::invalid_argument("replicate count must be positive");
    SimOptions opts;
    opts.escape_population = escape_population;
    const PathSimulator sim(law, CrossingSet{}, opts);

    threads = resolve_threads(threads);
    std::vector<std::uint64_t> absorbed(threads, 0);
    std::vector<std::uint64_t> escaped(threads, 0);
    run_blocks(replicates, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned slot) {
        for (std::uint64_t r = lo; r < hi; ++r)
        {
            Xoshiro256 rng = Xoshiro256::stream(base_seed, r);
            const PathRecord path = sim.run(initial_population, horizon, rng);
            absorbed[slot] += path.absorbed ? 1 : 0;
            escaped[slot] += (path.escaped || path.capped) ? 1 : 0;
        }
    });

    ExtinctionEstimate out;
    out.replicates = replicates;
    for (unsigned s = 0; s < threads; ++s)
    {
        out.absorbed += absorbed[s];
        out.escaped += escaped[s];
    }
    const double n = static_cast<double>(replicates);
    out.estimate = static_cast<double>(out.absorbed) / n;
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    return out;
}

} // namespace bpcross
