#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bpcross
{

/// Largest offspring size accepted by make_law unless the caller raises it.
inline constexpr int default_max_support = 64;

/// Finite-support branching generator. Holds the rates b_j for j != 1 and
/// derives b_1 = -sum_{j != 1} b_j so that B(1) = 0 holds by construction.
class OffspringLaw
{
public:
    /// Throws std::invalid_argument for a key equal to 1, a negative key or
    /// rate, an empty or all-zero table, or a key above max_support.
    static OffspringLaw make(const std::map<int, double>& rates, int max_support = default_max_support);

    /// b_j for any j >= 0, including the derived b_1. Zero beyond the support.
    double rate(int j) const noexcept;
    double b1() const noexcept { return coeffs_[1]; }
    /// -b_1: the per-particle event rate.
    double event_rate() const noexcept { return -coeffs_[1]; }
    int max_offspring() const noexcept { return max_offspring_; }

    /// Dense coefficients b_0..b_M (index 1 holds b_1). Always at least two entries.
    std::span<const double> coefficients() const noexcept { return coeffs_; }

    /// The j != 1 rates that are strictly positive, ascending in j.
    std::map<int, double> rates() const;

private:
    OffspringLaw() = default;

    std::vector<double> coeffs_;
    int max_offspring_ = 0;
};

/// Tracked offspring sizes N. Members are distinct, ascending and never 1.
class CrossingSet
{
public:
    CrossingSet() = default;
    /// Sorts the input. Throws std::invalid_argument on 1, negatives or duplicates.
    explicit CrossingSet(std::vector<int> members);

    std::span<const int> members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(int j) const noexcept;
    /// Position of j among the members, if tracked.
    std::optional<std::size_t> position(int j) const noexcept;

    /// Throws std::invalid_argument unless every member has a positive rate in law.
    void validate_for(const OffspringLaw& law) const;

    friend bool operator==(const CrossingSet&, const CrossingSet&) = default;

private:
    std::vector<int> members_;
};

/// Nonnegative integer tuple. Subtraction that would go below zero throws.
class MultiIndex
{
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t dims) : counts_(dims, 0) {}
    MultiIndex(std::initializer_list<int> counts);
    explicit MultiIndex(std::vector<int> counts);

    static MultiIndex unit(std::size_t dims, std::size_t axis);

    std::size_t size() const noexcept { return counts_.size(); }
    int operator[](std::size_t i) const { return counts_[i]; }
    std::span<const int> counts() const noexcept { return counts_; }
    /// |k|, the sum of all counts.
    int order() const noexcept;

    MultiIndex plus_unit(std::size_t axis) const;
    /// Throws std::domain_error when counts[axis] is zero.
    MultiIndex minus_unit(std::size_t axis) const;

    MultiIndex operator+(const MultiIndex& other) const;
    /// Throws std::domain_error when any component would become negative.
    MultiIndex operator-(const MultiIndex& other) const;

    /// Product of v[i]^counts[i].
    double monomial(std::span<const double> v) const;

    std::string to_string() const;

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<int> counts_;
};

enum class TableForm
{
    marginal, ///< keys are crossing multi-indices k
    joint,    ///< keys are (population j, k...) with the population first
};

/// Index region on which a table is complete: |k| <= max_order and, for joint
/// tables, population <= max_population.
struct Truncation
{
    std::optional<int> max_population;
    int max_order = 0;

    friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// Sparse coefficient table. Missing keys read as zero.
class CoeffTable
{
public:
    static constexpr double default_slack = 1e-12;

    CoeffTable(TableForm form, std::size_t crossing_dims, Truncation truncation, double slack = default_slack);

    static CoeffTable delta(TableForm form, std::size_t crossing_dims, Truncation truncation);

    TableForm form() const noexcept { return form_; }
    std::size_t crossing_dims() const noexcept { return dims_; }
    const Truncation& truncation() const noexcept { return truncation_; }
    double slack() const noexcept { return slack_; }

    /// Key length is crossing_dims for marginal tables and crossing_dims + 1 for joint ones.
    std::size_t key_size() const noexcept { return form_ == TableForm::joint ? dims_ + 1 : dims_; }
    bool within_truncation(const MultiIndex& key) const;

    /// Throws std::invalid_argument for a wrong-length key, a key outside the
    /// truncation, or a value below -slack.
    void set(const MultiIndex& key, double value);
    void add(const MultiIndex& key, double value);

    double at(const MultiIndex& key) const;
    /// Joint lookup by population and crossings.
    double at(int population, const MultiIndex& crossings) const;

    const std::map<MultiIndex, double>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    double total_mass() const;

    /// Sums joint entries over the population coordinate.
    CoeffTable marginalize() const;

private:
    void check_key(const MultiIndex& key) const;

    TableForm form_;
    std::size_t dims_;
    Truncation truncation_;
    double slack_;
    std::map<MultiIndex, double> entries_;
};

/// B(u) = sum_j b_j u^j, u in [0, 1].
double generator_value(const OffspringLaw& law, double u);
/// B'(u).
double generator_derivative(const OffspringLaw& law, double u);

/// B(u) - sum_{k in N} b_k (1 - v_k) u^k: the generator with tracked sizes
/// marked by v. Reduces to generator_value at v = 1.
double crossing_generator_value(const OffspringLaw& law, const CrossingSet& set, double u, std::span<const double> v);
/// d/du of crossing_generator_value.
double crossing_generator_derivative(const OffspringLaw& law, const CrossingSet& set, double u,
                                     std::span<const double> v);

/// Cauchy product restricted to the truncation. Joint tables also add populations.
CoeffTable convolve(const CoeffTable& a, const CoeffTable& b, const Truncation& trunc);

/// a^{*(0)}, ..., a^{*(max_power)} built incrementally.
std::vector<CoeffTable> convolve_powers(const CoeffTable& a, int max_power, const Truncation& trunc);
CoeffTable convolve_power(const CoeffTable& a, int power, const Truncation& trunc);

} // namespace bpcross
