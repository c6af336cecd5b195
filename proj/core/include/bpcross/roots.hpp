#pragma once

#include "bpcross/law.hpp"

#include <span>

namespace bpcross
{

inline constexpr double default_root_tol = 1e-12;

struct RootResult
{
    double value = 0.0;
    int iterations = 0;
    /// Set when Newton stalled near a double root and the bisection fallback
    /// was used; the result is then only accurate to about 1e-8.
    bool degraded = false;
};

/// Leftmost root in [0, 1] of the marked generator u -> crossing_generator_value(u, v).
///
/// The marked generator is convex on [0, 1], nonnegative at 0 and nonpositive
/// at 1, so Newton's method started from 0 climbs monotonically to the
/// leftmost root. Bisection takes over if an iterate escapes the bracket or
/// convergence stalls.
RootResult find_marked_root(const OffspringLaw& law, const CrossingSet& set, std::span<const double> v,
                            double tol = default_root_tol);

/// Extinction probability from one particle: the minimal root of B on [0, 1].
double extinction_probability(const OffspringLaw& law, double tol = default_root_tol);

/// Minimal nonnegative root of the marked generator; never exceeds extinction_probability.
double marked_root(const OffspringLaw& law, const CrossingSet& set, std::span<const double> v,
                   double tol = default_root_tol);

/// Taylor coefficients of v -> marked_root(v) about v = 0 for |k| <= max_order.
///
/// Solved order by order: with coefficients below order m fixed, every order-m
/// coefficient appears linearly through the derivative of the untracked part of
/// the generator at the constant term. Throws std::domain_error if that
/// derivative is not strictly negative.
CoeffTable marked_root_series(const OffspringLaw& law, const CrossingSet& set, int max_order);

} // namespace bpcross
