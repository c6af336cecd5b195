#pragma once

#include "bpcross/law.hpp"
#include "bpcross/rng.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace bpcross
{

struct SimEvent
{
    double time = 0.0;
    int offspring = 0;
};

/// One trajectory of (X(t), Y(t)) on [0, horizon].
struct PathRecord
{
    std::vector<SimEvent> events; ///< empty unless SimOptions::record_events
    std::uint64_t event_count = 0;
    std::int64_t initial_population = 0;
    std::int64_t final_population = 0;
    MultiIndex crossings;
    double horizon = 0.0;
    bool absorbed = false; ///< hit 0 before the horizon
    bool escaped = false;  ///< reached SimOptions::escape_population and was stopped
    bool capped = false;   ///< exceeded SimOptions::population_cap and was aborted
};

struct SimOptions
{
    bool record_events = false;
    /// Hard cap on the population; exceeding it aborts the path with capped = true.
    std::int64_t population_cap = 10'000'000;
    /// When positive, stop a path as soon as its population reaches this value.
    /// Used by the extinction estimator; leaves the crossing counts incomplete.
    std::int64_t escape_population = 0;
};

/// Exact event-driven sampler for the augmented chain. In state i >= 1 the
/// holding time is Exponential(i * (-b_1)); the event size j is drawn with
/// probability b_j / (-b_1) from an alias table; the population moves to
/// i + j - 1 and the counter for j increments when j is tracked.
class PathSimulator
{
public:
    PathSimulator(const OffspringLaw& law, const CrossingSet& set, SimOptions options = {});

    PathRecord run(std::int64_t initial_population, double horizon, Xoshiro256& rng) const;

    const CrossingSet& crossing_set() const noexcept { return set_; }
    const SimOptions& options() const noexcept { return options_; }

private:
    CrossingSet set_;
    SimOptions options_;
    double event_rate_;
    std::vector<int> sizes_; ///< offspring size for each alias column
    AliasTable alias_;
    std::vector<int> axes_;  ///< crossing axis per alias column, -1 if untracked
};

PathRecord simulate_path(const OffspringLaw& law, const CrossingSet& set, std::int64_t initial_population,
                         double horizon, Xoshiro256& rng, const SimOptions& options = {});

/// Aggregated replicate outcomes. Keys are (population, crossings...).
struct EmpiricalTable
{
    std::size_t crossing_dims = 0;
    std::map<MultiIndex, std::uint64_t> counts;
    std::uint64_t replicates = 0;
    std::uint64_t capped = 0; ///< aborted paths; not present in counts
    std::uint64_t base_seed = 0;
    std::int64_t initial_population = 0;
    double t = 0.0;

    std::uint64_t total() const;
    /// Counts keyed by crossings only.
    std::map<MultiIndex, std::uint64_t> crossing_counts() const;
    std::map<std::int64_t, std::uint64_t> population_counts() const;

    friend bool operator==(const EmpiricalTable&, const EmpiricalTable&) = default;
};

/// Runs `replicates` paths. Replicate r uses Xoshiro256::stream(base_seed, r),
/// so the table is identical for any thread count. threads = 0 picks the
/// hardware concurrency.
EmpiricalTable monte_carlo(const OffspringLaw& law, const CrossingSet& set, std::int64_t initial_population, double t,
                           std::uint64_t replicates, std::uint64_t base_seed, unsigned threads = 1,
                           const SimOptions& options = {});

struct ExtinctionEstimate
{
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t absorbed = 0;
    std::uint64_t escaped = 0;
    std::uint64_t replicates = 0;
};

/// Fraction of paths absorbed by `horizon`, with binomial standard error.
/// Paths that reach escape_population count as surviving; from there the
/// chance of extinction is rho^escape_population, which bounds the bias.
/// A horizon of at least 50 / (-b_1) is a reasonable default.
ExtinctionEstimate estimate_extinction(const OffspringLaw& law, std::int64_t initial_population,
                                       std::uint64_t replicates, double horizon, std::uint64_t base_seed,
                                       unsigned threads = 1, std::int64_t escape_population = 1000);

} // namespace bpcross
