#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bpcross::detail
{

/// Running integral of samples f on a uniform grid with spacing h.
///
/// Even nodes use composite Simpson. Odd nodes add the exact integral of the
/// quadratic through the neighbouring three samples over the last interval, so
/// every node is fourth-order accurate. Needs an even number of intervals.
inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h)
{
    const std::size_t n = f.size();
    if (n < 3 || (n - 1) % 2 != 0)
        throw std::invalid_argument("cumulative_simpson needs an even number of intervals");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 2; i < n; i += 2)
        out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    for (std::size_t i = 1; i < n; i += 2)
        out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    return out;
}

} // namespace bpcross::detail
