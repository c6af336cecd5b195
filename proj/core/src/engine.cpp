#include "bpcross/engine.hpp"

#include "bpcross/roots.hpp"
#include "lattice.hpp"
#include "quadrature.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace bpcross
{

void OdeSettings::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument("ODE tolerances must be positive");
    if (!(max_step > 0.0))
        throw std::invalid_argument("ODE max_step must be positive");
}

namespace
{

using State = std::vector<double>;

void check_time(double t)
{
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("time must be finite and >= 0");
}

void check_marks(const CrossingSet& set, std::span<const double> v)
{
    if (v.size() != set.size())
        throw std::invalid_argument("mark vector has " + std::to_string(v.size()) + " entries but the crossing set has " +
                                    std::to_string(set.size()));
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("mark values must lie in [0, 1]");
}

template <class System>
void integrate(System system, State& x, double t_end, const OdeSettings& settings)
{
    namespace odeint = boost::numeric::odeint;
    settings.validate();
    const double max_dt = std::isfinite(settings.max_step) ? settings.max_step : 0.0;
    auto stepper = odeint::make_controlled(settings.abs_tol, settings.rel_tol, max_dt,
                                           odeint::runge_kutta_dopri5<State>());

    double t = 0.0;
    double dt = std::min(t_end, 1e-2);
    if (max_dt > 0.0)
        dt = std::min(dt, max_dt);
    const double min_dt = 1e-14 * std::max(1.0, t_end);
    while (t < t_end)
    {
        const double remaining = t_end - t;
        if (remaining <= 1e-15 * std::max(1.0, t_end))
            break;
        const bool last = dt >= remaining;
        if (last)
            dt = remaining;
        const double before = t;
        const auto result = stepper.try_step(system, x, t, dt);
        if (result == odeint::success)
        {
            if (last)
                t = t_end;
        }
        else if (dt < min_dt)
        {
            throw IntegrationError("step size underflow in adaptive integrator", before);
        }
        for (double value : x)
            if (!std::isfinite(value))
                throw IntegrationError("non-finite state in adaptive integrator", before);
    }
}

/// Right-hand side of the coefficient system on a lattice.
class CoefficientSystem
{
public:
    CoefficientSystem(const OffspringLaw& law, const CrossingSet& set, const detail::Lattice& lattice)
        : lattice_(lattice)
    {
        auto c = law.coefficients();
        rates_.assign(c.begin(), c.end());
        axis_.assign(rates_.size(), -1);
        for (std::size_t j = 0; j < rates_.size(); ++j)
            if (auto a = set.position(static_cast<int>(j)))
                axis_[j] = static_cast<int>(*a);
        powers_.resize(rates_.size());
    }

    void operator()(const State& g, State& dg, double /*t*/)
    {
        const auto& lat = lattice_;
        dg.assign(lat.size(), 0.0);
        const std::size_t top = rates_.size() - 1;
        for (std::size_t j = 2; j <= top; ++j)
            lat.convolve(j == 2 ? g : powers_[j - 1], g, powers_[j]);

        for (std::size_t j = 0; j <= top; ++j)
        {
            const double b = rates_[j];
            if (b == 0.0)
                continue;
            const int axis = axis_[j];
            if (j == 0)
            {
                // g^{*0} is the delta at the origin.
                if (axis < 0)
                    dg[0] += b;
                else if (lat.max_order() >= 1)
                    dg[lat.stride(static_cast<std::size_t>(axis))] += b;
                continue;
            }
            const State& pw = j == 1 ? g : powers_[j];
            if (axis < 0)
            {
                for (std::size_t i = 0; i < dg.size(); ++i)
                    dg[i] += b * pw[i];
            }
            else
            {
                const std::size_t stride = lat.stride(static_cast<std::size_t>(axis));
                const std::size_t end = lat.order_end(lat.max_order() - 1);
                for (std::size_t pop = 0; pop < lat.populations(); ++pop)
                    for (std::size_t p = 0; p < end; ++p)
                    {
                        const std::size_t src = lat.index(pop, p);
                        dg[src + stride] += b * pw[src];
                    }
            }
        }
    }

private:
    const detail::Lattice& lattice_;
    std::vector<double> rates_;
    std::vector<int> axis_;
    std::vector<State> powers_;
};

constexpr double engine_slack = 1e-9;

CoeffTable integrate_lattice(const OffspringLaw& law, const CrossingSet& set, const detail::Lattice& lattice,
                             State initial, double t, const OdeSettings& settings)
{
    CoefficientSystem system(law, set, lattice);
    integrate(std::ref(system), initial, t, settings);
    return lattice.to_table(initial, engine_slack);
}

} // namespace

double solve_pgf(const OffspringLaw& law, const CrossingSet& set, double t, double u, std::span<const double> v,
                 const OdeSettings& settings)
{
    check_time(t);
    if (!(u >= 0.0 && u <= 1.0))
        throw std::invalid_argument("initial value u must lie in [0, 1]");
    check_marks(set, v);
    set.validate_for(law);
    settings.validate();
    if (t == 0.0)
        return u;

    auto base = law.coefficients();
    std::vector<double> c(base.begin(), base.end());
    for (std::size_t i = 0; i < set.size(); ++i)
        c[static_cast<std::size_t>(set.members()[i])] *= v[i];

    auto rhs = [&c](const State& y, State& dy, double) {
        double acc = 0.0;
        for (std::size_t j = c.size(); j-- > 0;)
            acc = acc * y[0] + c[j];
        dy[0] = acc;
    };
    State y{u};
    integrate(rhs, y, t, settings);
    return std::clamp(y[0], 0.0, 1.0);
}

CoeffTable crossing_distribution(const OffspringLaw& law, const CrossingSet& set, double t, int max_order,
                                 const OdeSettings& settings)
{
    check_time(t);
    if (max_order < 0)
        throw std::invalid_argument("order cap K must be nonnegative");
    set.validate_for(law);
    settings.validate();
    if (t == 0.0)
        return CoeffTable::delta(TableForm::marginal, set.size(), Truncation{std::nullopt, max_order});

    detail::Lattice lattice(set.size(), max_order);
    return integrate_lattice(law, set, lattice, lattice.delta(), t, settings);
}

CoeffTable joint_distribution(const OffspringLaw& law, const CrossingSet& set, double t, int max_population,
                              int max_order, const OdeSettings& settings)
{
    check_time(t);
    if (max_order < 0 || max_population < 0)
        throw std::invalid_argument("population cap Jmax and order cap K must be nonnegative");
    set.validate_for(law);
    settings.validate();
    const Truncation trunc{max_population, max_order};
    if (t == 0.0)
    {
        CoeffTable out(TableForm::joint, set.size(), trunc);
        if (max_population >= 1)
            out.set(MultiIndex(std::vector<int>(set.size() + 1, 0)).plus_unit(0), 1.0);
        return out;
    }

    detail::Lattice lattice(set.size(), max_order, max_population);
    return integrate_lattice(law, set, lattice, lattice.delta(1), t, settings);
}

CoeffTable joint_distribution_by_quadrature(const OffspringLaw& law, const CrossingSet& set, double t,
                                            int max_population, int max_order, int intervals)
{
    check_time(t);
    if (!set.contains(0))
        throw std::invalid_argument("quadrature cross-check requires 0 in the crossing set");
    if (max_order < 0 || max_population < 0)
        throw std::invalid_argument("population cap Jmax and order cap K must be nonnegative");
    if (intervals < 2 || intervals % 2 != 0)
        throw std::invalid_argument("quadrature needs a positive even number of intervals");
    set.validate_for(law);

    detail::Lattice lat(set.size(), max_order, max_population);
    if (t == 0.0)
        return lat.to_table(lat.delta(1), engine_slack);

    const auto nodes = static_cast<std::size_t>(intervals) + 1;
    const double h = t / intervals;
    const double b1 = law.b1();
    std::vector<State> g(nodes, lat.zeros());
    CoefficientSystem system(law, set, lat);
    State rhs;

    // Level-L coefficients depend only on levels below L because g_{0,0} = 0.
    const int top_level = max_population + max_order;
    for (int level = 1; level <= top_level; ++level)
    {
        std::vector<std::size_t> cells;
        for (std::size_t pop = 0; pop < lat.populations(); ++pop)
            for (std::size_t p = 0; p < lat.points(); ++p)
                if (static_cast<int>(pop) + lat.order(p) == level)
                    cells.push_back(lat.index(pop, p));
        if (cells.empty())
            continue;

        std::vector<std::vector<double>> integrand(cells.size(), std::vector<double>(nodes));
        for (std::size_t n = 0; n < nodes; ++n)
        {
            const double s = h * static_cast<double>(n);
            system(g[n], rhs, s);
            for (std::size_t c = 0; c < cells.size(); ++c)
                integrand[c][n] = rhs[cells[c]] * std::exp(-b1 * s);
        }
        for (std::size_t c = 0; c < cells.size(); ++c)
        {
            const auto running = detail::cumulative_simpson(integrand[c], h);
            const double start = cells[c] == lat.index(1, 0) ? 1.0 : 0.0;
            for (std::size_t n = 0; n < nodes; ++n)
                g[n][cells[c]] = std::exp(b1 * h * static_cast<double>(n)) * (start + running[n]);
        }
    }
    return lat.to_table(g.back(), engine_slack);
}

double crossing_pgf_from(const OffspringLaw& law, const CrossingSet& set, double t, std::span<const double> v,
                         int initial_population, const OdeSettings& settings)
{
    if (initial_population < 0)
        throw std::invalid_argument("initial population must be nonnegative");
    if (initial_population == 0)
        return 1.0;
    const double g = solve_pgf(law, set, t, 1.0, v, settings);
    return std::pow(g, initial_population);
}

CoeffTable extinction_conditioned_distribution(const OffspringLaw& law, const CrossingSet& set, int max_order)
{
    const double rho = extinction_probability(law);
    if (!(rho > 0.0))
        throw std::domain_error("extinction probability is zero; conditioning on extinction is degenerate");
    const CoeffTable series = marked_root_series(law, set, max_order);
    CoeffTable out(TableForm::marginal, set.size(), series.truncation(), series.slack());
    for (const auto& [key, value] : series.entries())
        out.set(key, value / rho);
    return out;
}

} // namespace bpcross
