#pragma once

#include "bpcross/law.hpp"
#include "bpcross/sim.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace bpcross
{

struct UniformizationResult
{
    CoeffTable table; ///< joint form over {j <= Jmax, |k| <= K}
    /// 1 - retained mass. Retained entries never exceed the true
    /// probabilities, so every entry is within leaked_mass of the truth.
    double leaked_mass = 0.0;
    std::uint64_t poisson_terms = 0;
};

/// Transient law of (X(t), Y(t)) from (i0, 0) by uniformization on the
/// truncated chain. The uniformization rate is max(Jmax, 1) * (-b_1) and
/// transitions leaving the truncation are dropped. The Poisson series stops
/// once its remaining tail is below 1e-12.
UniformizationResult uniformization_distribution(const OffspringLaw& law, const CrossingSet& set,
                                                 int initial_population, double t, int max_population, int max_order);

using Distribution = std::map<MultiIndex, double>;

/// Half the L1 distance over the union of supports plus half the gap in total
/// mass, so missing mass counts as disjoint. Entries below -1e-12 are rejected.
double total_variation(const Distribution& a, const Distribution& b);
double total_variation(const CoeffTable& a, const CoeffTable& b);

struct ZReportOptions
{
    double max_abs_z = 4.0;
    /// Cells with a smaller expected count are pooled into a single tail cell.
    double min_expected = 10.0;
};

struct ZCell
{
    MultiIndex key;
    std::uint64_t observed = 0;
    double expected = 0.0;
    double z = 0.0;
};

struct ZReport
{
    std::vector<ZCell> cells;
    /// Pooled sparse cells plus everything outside the analytic table.
    std::uint64_t pooled_observed = 0;
    double pooled_expected = 0.0;
    double pooled_z = 0.0;
    std::size_t pooled_cells = 0;
    double max_abs_z = 0.0;
    double tv_distance = 0.0;
    std::uint64_t replicates = 0;
    ZReportOptions options;
    bool passed = false;
};

/// Per-cell binomial z-scores of an empirical table against analytic
/// probabilities. A marginal analytic table is compared with the crossing
/// projection of the empirical counts, a joint table with the full counts.
/// Throws std::invalid_argument when the empirical table has no replicates.
ZReport mc_z_report(const EmpiricalTable& empirical, const CoeffTable& analytic, const ZReportOptions& options = {});

} // namespace bpcross
