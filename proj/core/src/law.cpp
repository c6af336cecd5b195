#include "bpcross/law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bpcross
{

OffspringLaw OffspringLaw::make(const std::map<int, double>& rates, int max_support)
{
    int top = 0;
    bool any_positive = false;
    for (const auto& [j, rate] : rates)
    {
        if (j == 1)
            throw std::invalid_argument("offspring size 1 carries no event and cannot have a rate");
        if (j < 0)
            throw std::invalid_argument("offspring size must be nonnegative, got " + std::to_string(j));
        if (j > max_support)
            throw std::invalid_argument("offspring size " + std::to_string(j) + " exceeds the support limit " +
                                        std::to_string(max_support));
        if (!std::isfinite(rate) || rate < 0.0)
            throw std::invalid_argument("rate for offspring size " + std::to_string(j) + " must be finite and >= 0");
        if (rate > 0.0)
        {
            any_positive = true;
            top = std::max(top, j);
        }
    }
    if (!any_positive)
        throw std::invalid_argument("offspring law needs at least one positive rate");

    OffspringLaw law;
    law.max_offspring_ = top;
    law.coeffs_.assign(static_cast<std::size_t>(std::max(top, 1)) + 1, 0.0);
    double total = 0.0;
    for (const auto& [j, rate] : rates)
    {
        if (rate > 0.0)
        {
            law.coeffs_[static_cast<std::size_t>(j)] = rate;
            total += rate;
        }
    }
    law.coeffs_[1] = -total;
    return law;
}

double OffspringLaw::rate(int j) const noexcept
{
    if (j < 0 || static_cast<std::size_t>(j) >= coeffs_.size())
        return 0.0;
    return coeffs_[static_cast<std::size_t>(j)];
}

std::map<int, double> OffspringLaw::rates() const
{
    std::map<int, double> out;
    for (std::size_t j = 0; j < coeffs_.size(); ++j)
        if (j != 1 && coeffs_[j] > 0.0)
            out.emplace(static_cast<int>(j), coeffs_[j]);
    return out;
}

CrossingSet::CrossingSet(std::vector<int> members) : members_(std::move(members))
{
    std::sort(members_.begin(), members_.end());
    for (std::size_t i = 0; i < members_.size(); ++i)
    {
        if (members_[i] < 0)
            throw std::invalid_argument("crossing set members must be nonnegative");
        if (members_[i] == 1)
            throw std::invalid_argument("crossing set cannot contain offspring size 1");
        if (i > 0 && members_[i] == members_[i - 1])
            throw std::invalid_argument("crossing set has duplicate member " + std::to_string(members_[i]));
    }
}

bool CrossingSet::contains(int j) const noexcept
{
    return std::binary_search(members_.begin(), members_.end(), j);
}

std::optional<std::size_t> CrossingSet::position(int j) const noexcept
{
    auto it = std::lower_bound(members_.begin(), members_.end(), j);
    if (it == members_.end() || *it != j)
        return std::nullopt;
    return static_cast<std::size_t>(it - members_.begin());
}

void CrossingSet::validate_for(const OffspringLaw& law) const
{
    for (int k : members_)
        if (!(law.rate(k) > 0.0))
            throw std::invalid_argument("crossing set member " + std::to_string(k) +
                                        " has zero rate in the offspring law");
}

MultiIndex::MultiIndex(std::initializer_list<int> counts) : MultiIndex(std::vector<int>(counts)) {}

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts))
{
    for (int c : counts_)
        if (c < 0)
            throw std::domain_error("multi-index counts must be nonnegative");
}

MultiIndex MultiIndex::unit(std::size_t dims, std::size_t axis)
{
    MultiIndex e(dims);
    e.counts_.at(axis) = 1;
    return e;
}

int MultiIndex::order() const noexcept
{
    return std::accumulate(counts_.begin(), counts_.end(), 0);
}

MultiIndex MultiIndex::plus_unit(std::size_t axis) const
{
    MultiIndex out = *this;
    ++out.counts_.at(axis);
    return out;
}

MultiIndex MultiIndex::minus_unit(std::size_t axis) const
{
    if (counts_.at(axis) == 0)
        throw std::domain_error("multi-index subtraction below zero on axis " + std::to_string(axis));
    MultiIndex out = *this;
    --out.counts_[axis];
    return out;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const
{
    if (other.size() != size())
        throw std::invalid_argument("multi-index dimension mismatch");
    MultiIndex out = *this;
    for (std::size_t i = 0; i < size(); ++i)
        out.counts_[i] += other.counts_[i];
    return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const
{
    if (other.size() != size())
        throw std::invalid_argument("multi-index dimension mismatch");
    MultiIndex out = *this;
    for (std::size_t i = 0; i < size(); ++i)
    {
        out.counts_[i] -= other.counts_[i];
        if (out.counts_[i] < 0)
            throw std::domain_error("multi-index subtraction below zero on axis " + std::to_string(i));
    }
    return out;
}

double MultiIndex::monomial(std::span<const double> v) const
{
    if (v.size() != size())
        throw std::invalid_argument("monomial argument has wrong dimension");
    double out = 1.0;
    for (std::size_t i = 0; i < size(); ++i)
        out *= std::pow(v[i], counts_[i]);
    return out;
}

std::string MultiIndex::to_string() const
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < counts_.size(); ++i)
        os << (i ? "," : "") << counts_[i];
    os << ')';
    return os.str();
}

CoeffTable::CoeffTable(TableForm form, std::size_t crossing_dims, Truncation truncation, double slack)
    : form_(form), dims_(crossing_dims), truncation_(truncation), slack_(slack)
{
    if (truncation_.max_order < 0)
        throw std::invalid_argument("truncation order must be nonnegative");
    if (form_ == TableForm::joint && !truncation_.max_population)
        throw std::invalid_argument("joint tables need a population cap");
    if (truncation_.max_population && *truncation_.max_population < 0)
        throw std::invalid_argument("population cap must be nonnegative");
}

CoeffTable CoeffTable::delta(TableForm form, std::size_t crossing_dims, Truncation truncation)
{
    CoeffTable out(form, crossing_dims, truncation);
    out.set(MultiIndex(out.key_size()), 1.0);
    return out;
}

bool CoeffTable::within_truncation(const MultiIndex& key) const
{
    if (key.size() != key_size())
        return false;
    int order = key.order();
    if (form_ == TableForm::joint)
    {
        if (key[0] > *truncation_.max_population)
            return false;
        order -= key[0];
    }
    return order <= truncation_.max_order;
}

void CoeffTable::check_key(const MultiIndex& key) const
{
    if (key.size() != key_size())
        throw std::invalid_argument("table key " + key.to_string() + " has wrong length");
    if (!within_truncation(key))
        throw std::invalid_argument("table key " + key.to_string() + " lies outside the truncation");
}

void CoeffTable::set(const MultiIndex& key, double value)
{
    check_key(key);
    if (!(value >= -slack_))
        throw std::invalid_argument("table value at " + key.to_string() + " is negative beyond slack");
    entries_[key] = value;
}

void CoeffTable::add(const MultiIndex& key, double value)
{
    check_key(key);
    double& slot = entries_[key];
    slot += value;
    if (!(slot >= -slack_))
        throw std::invalid_argument("table value at " + key.to_string() + " is negative beyond slack");
}

double CoeffTable::at(const MultiIndex& key) const
{
    auto it = entries_.find(key);
    return it == entries_.end() ? 0.0 : it->second;
}

double CoeffTable::at(int population, const MultiIndex& crossings) const
{
    if (form_ != TableForm::joint)
        throw std::logic_error("population lookup on a marginal table");
    std::vector<int> key;
    key.reserve(crossings.size() + 1);
    key.push_back(population);
    key.insert(key.end(), crossings.counts().begin(), crossings.counts().end());
    return at(MultiIndex(std::move(key)));
}

double CoeffTable::total_mass() const
{
    double s = 0.0;
    for (const auto& [key, value] : entries_)
        s += value;
    return s;
}

CoeffTable CoeffTable::marginalize() const
{
    if (form_ != TableForm::joint)
        return *this;
    CoeffTable out(TableForm::marginal, dims_, Truncation{std::nullopt, truncation_.max_order}, slack_);
    for (const auto& [key, value] : entries_)
    {
        auto c = key.counts();
        out.add(MultiIndex(std::vector<int>(c.begin() + 1, c.end())), value);
    }
    return out;
}

namespace
{

void check_unit_interval(double u, const char* what)
{
    if (!(u >= 0.0 && u <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void check_marks(const CrossingSet& set, std::span<const double> v)
{
    if (v.size() != set.size())
        throw std::invalid_argument("mark vector has " + std::to_string(v.size()) + " entries but the crossing set has " +
                                    std::to_string(set.size()));
    for (double x : v)
        check_unit_interval(x, "mark value");
}

double horner_derivative(std::span<const double> c, double u)
{
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 1;)
        acc = acc * u + static_cast<double>(j) * c[j];
    return acc;
}

std::vector<double> marked_coefficients(const OffspringLaw& law, const CrossingSet& set, std::span<const double> v)
{
    auto base = law.coefficients();
    std::vector<double> c(base.begin(), base.end());
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        auto j = static_cast<std::size_t>(set.members()[i]);
        if (j < c.size())
            c[j] *= v[i];
    }
    return c;
}

} // namespace

double generator_value(const OffspringLaw& law, double u)
{
    check_unit_interval(u, "generator argument");
    // Summing b_j (u^j - u) keeps B(1) = 0 exact.
    auto c = law.coefficients();
    double acc = 0.0;
    double pw = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j, pw *= u)
        if (j != 1)
            acc += c[j] * (pw - u);
    return acc;
}

double generator_derivative(const OffspringLaw& law, double u)
{
    return horner_derivative(law.coefficients(), u);
}

double crossing_generator_value(const OffspringLaw& law, const CrossingSet& set, double u, std::span<const double> v)
{
    check_unit_interval(u, "generator argument");
    check_marks(set, v);
    double acc = generator_value(law, u);
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        int k = set.members()[i];
        acc -= law.rate(k) * (1.0 - v[i]) * std::pow(u, k);
    }
    return acc;
}

double crossing_generator_derivative(const OffspringLaw& law, const CrossingSet& set, double u,
                                     std::span<const double> v)
{
    check_marks(set, v);
    auto c = marked_coefficients(law, set, v);
    return horner_derivative(c, u);
}

CoeffTable convolve(const CoeffTable& a, const CoeffTable& b, const Truncation& trunc)
{
    if (a.form() != b.form())
        throw std::invalid_argument("cannot convolve marginal and joint tables");
    if (a.crossing_dims() != b.crossing_dims())
        throw std::invalid_argument("cannot convolve tables of different dimension");
    CoeffTable out(a.form(), a.crossing_dims(), trunc, std::max(a.slack(), b.slack()));
    for (const auto& [ka, va] : a.entries())
        for (const auto& [kb, vb] : b.entries())
        {
            MultiIndex key = ka + kb;
            if (out.within_truncation(key))
                out.add(key, va * vb);
        }
    return out;
}

std::vector<CoeffTable> convolve_powers(const CoeffTable& a, int max_power, const Truncation& trunc)
{
    if (max_power < 0)
        throw std::invalid_argument("convolution power must be nonnegative");
    std::vector<CoeffTable> out;
    out.reserve(static_cast<std::size_t>(max_power) + 1);
    out.push_back(CoeffTable::delta(a.form(), a.crossing_dims(), trunc));
    for (int i = 1; i <= max_power; ++i)
        out.push_back(convolve(out.back(), a, trunc));
    return out;
}

CoeffTable convolve_power(const CoeffTable& a, int power, const Truncation& trunc)
{
    return std::move(convolve_powers(a, power, trunc).back());
}

} // namespace bpcross
