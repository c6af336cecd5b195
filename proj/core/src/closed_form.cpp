#include "bpcross/closed_form.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bpcross::closed_form
{

namespace
{

constexpr int initial_intervals = 64;
constexpr int max_intervals = 1 << 20;

void check_probabilities(double p, double q)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("p must lie in (0, 1)");
    if (!(std::abs(p + q - 1.0) <= 1e-12))
        throw std::invalid_argument("p + q must equal 1");
}

void check_common(double p, double q, double b, double t, int nmax)
{
    check_probabilities(p, q);
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("rate b must be positive");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("time must be finite and >= 0");
    if (nmax < 0)
        throw std::invalid_argument("nmax must be nonnegative");
}

/// Values of g_n at every grid node for a recursion of the form
/// g_n(t) = int_0^t weight(s) F_n(s) ds / weight(t), n >= 1.
using Grid = std::vector<std::vector<double>>; // [n][node]
using Forcing = std::function<double(int n, const Grid& g, std::size_t node)>;

Grid solve_on_grid(double t, int nmax, int intervals, const std::function<double(double)>& no_death,
                   const std::function<double(double)>& weight, const Forcing& forcing)
{
    const auto nodes = static_cast<std::size_t>(intervals) + 1;
    const double h = t / intervals;
    Grid g(static_cast<std::size_t>(nmax) + 1, std::vector<double>(nodes, 0.0));
    std::vector<double> w(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
    {
        const double s = h * static_cast<double>(i);
        g[0][i] = no_death(s);
        w[i] = weight(s);
    }
    std::vector<double> integrand(nodes);
    for (int n = 1; n <= nmax; ++n)
    {
        for (std::size_t i = 0; i < nodes; ++i)
            integrand[i] = w[i] * forcing(n, g, i);
        const auto running = detail::cumulative_simpson(integrand, h);
        for (std::size_t i = 0; i < nodes; ++i)
            g[static_cast<std::size_t>(n)][i] = running[i] / w[i];
    }
    return g;
}

std::vector<double> refine(double t, int nmax, double tol, const std::function<double(double)>& no_death,
                           const std::function<double(double)>& weight, const Forcing& forcing)
{
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
    if (t == 0.0)
    {
        out[0] = 1.0;
        return out;
    }
    auto last_column = [&](const Grid& g) {
        std::vector<double> col(g.size());
        for (std::size_t n = 0; n < g.size(); ++n)
            col[n] = g[n].back();
        return col;
    };

    int intervals = initial_intervals;
    auto coarse = last_column(solve_on_grid(t, nmax, intervals, no_death, weight, forcing));
    while (intervals < max_intervals)
    {
        intervals *= 2;
        auto fine = last_column(solve_on_grid(t, nmax, intervals, no_death, weight, forcing));
        double change = 0.0;
        for (std::size_t n = 0; n < fine.size(); ++n)
            change = std::max(change, std::abs(fine[n] - coarse[n]));
        if (change <= tol)
            return fine;
        coarse = std::move(fine);
    }
    throw QuadratureError("grid refinement did not reach the requested tolerance");
}

} // namespace

double bd_pgf(double p, double q, double b, double t, double u, double v)
{
    check_common(p, q, b, t, 0);
    if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("u and v must lie in [0, 1]");
    if (t == 0.0)
        return u;

    const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * p * q * v));
    const double alpha = (1.0 + disc) / (2.0 * q);
    const double beta = (1.0 - disc) / (2.0 * q);
    if (disc < 1e-6)
    {
        // The solution is even in alpha - beta, so the confluent limit is O(disc^2) accurate.
        const double mid = 0.5 * (alpha + beta);
        return mid + (u - mid) / (1.0 - (u - mid) * b * q * t);
    }
    if (u == beta)
        return beta;
    const double ratio = (alpha - u) / (beta - u);
    const double growth = std::exp((alpha - beta) * b * q * t);
    return beta + (alpha - beta) / (1.0 - ratio * growth);
}

double bd_no_death(double p, double q, double b, double t)
{
    check_common(p, q, b, t, 0);
    return 1.0 / (q + p * std::exp(b * t));
}

std::vector<double> bd_death_coeffs(double p, double q, double b, double t, int nmax, double tol)
{
    check_common(p, q, b, t, nmax);
    auto no_death = [=](double s) { return 1.0 / (q + p * std::exp(b * s)); };
    auto weight = [=](double s) {
        const double a = q + p * std::exp(b * s);
        return a * a * std::exp(-b * s);
    };
    Forcing forcing = [=](int n, const Grid& g, std::size_t i) {
        double acc = n == 1 ? b * p : 0.0;
        double conv = 0.0;
        for (int k = 1; k < n; ++k)
            conv += g[static_cast<std::size_t>(k)][i] * g[static_cast<std::size_t>(n - k)][i];
        return acc + b * q * conv;
    };
    return refine(t, nmax, tol, no_death, weight, forcing);
}

std::vector<double> bd_extinction_series(double p, double q, int nmax)
{
    check_probabilities(p, q);
    if (nmax < 0)
        throw std::invalid_argument("nmax must be nonnegative");
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    if (nmax == 0)
        return out;
    // Term ratio (2n-3) 2 p q / n is below 1, so the running product never overflows.
    out[1] = p;
    for (int n = 2; n <= nmax; ++n)
        out[static_cast<std::size_t>(n)] = out[static_cast<std::size_t>(n - 1)] * (2.0 * n - 3.0) * 2.0 * p * q / n;
    return out;
}

double cubic_no_death(double p, double q, double b, double t)
{
    check_common(p, q, b, t, 0);
    return 1.0 / std::sqrt(q + p * std::exp(2.0 * b * t));
}

std::vector<double> cubic_death_coeffs(double p, double q, double b, double t, int nmax, double tol)
{
    check_common(p, q, b, t, nmax);
    auto no_death = [=](double s) { return 1.0 / std::sqrt(q + p * std::exp(2.0 * b * s)); };
    auto weight = [=](double s) { return std::exp(-2.0 * b * s) * std::pow(q + p * std::exp(2.0 * b * s), 1.5); };
    Forcing forcing = [=](int n, const Grid& g, std::size_t i) {
        auto at = [&](int k) { return g[static_cast<std::size_t>(k)][i]; };
        // Triples k1 + k2 + k3 = n with every part below n.
        double triple = 0.0;
        for (int k3 = 1; k3 < n; ++k3)
        {
            const int m = n - k3;
            double pair = 0.0;
            for (int k1 = 0; k1 <= m; ++k1)
                pair += at(k1) * at(m - k1);
            triple += at(k3) * pair;
        }
        double pair_n = 0.0;
        for (int k1 = 1; k1 < n; ++k1)
            pair_n += at(k1) * at(n - k1);
        triple += at(0) * pair_n;
        return (n == 1 ? b * p : 0.0) + b * q * triple;
    };
    return refine(t, nmax, tol, no_death, weight, forcing);
}

namespace
{

template <class T>
std::vector<T> cubic_limit_recursion(const T& p, const T& q, int nmax)
{
    std::vector<T> g(static_cast<std::size_t>(nmax) + 1, T(0));
    if (nmax >= 1)
        g[1] = p;
    // pair[m] = sum_{i+j=m} g_i g_j, filled once g_m is known.
    std::vector<T> pair(static_cast<std::size_t>(nmax) + 1, T(0));
    auto fill_pair = [&](int m) {
        T acc(0);
        for (int i = 1; i < m; ++i)
            acc += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(m - i)];
        pair[static_cast<std::size_t>(m)] = acc;
    };
    if (nmax >= 1)
        fill_pair(1);
    for (int n = 2; n <= nmax; ++n)
    {
        T acc(0);
        for (int k = 1; k < n; ++k)
            acc += g[static_cast<std::size_t>(k)] * pair[static_cast<std::size_t>(n - k)];
        g[static_cast<std::size_t>(n)] = q * acc;
        fill_pair(n);
    }
    return g;
}

} // namespace

std::vector<double> cubic_extinction_series(double p, double q, int nmax)
{
    check_probabilities(p, q);
    if (nmax < 0)
        throw std::invalid_argument("nmax must be nonnegative");
    return cubic_limit_recursion<double>(p, q, nmax);
}

std::vector<Rational> cubic_extinction_series_exact(const Rational& p, int nmax)
{
    if (!(p > Rational(0) && p < Rational(1)))
        throw std::invalid_argument("p must lie in (0, 1)");
    if (nmax < 0)
        throw std::invalid_argument("nmax must be nonnegative");
    return cubic_limit_recursion<Rational>(p, Rational(1) - p, nmax);
}

} // namespace bpcross::closed_form
