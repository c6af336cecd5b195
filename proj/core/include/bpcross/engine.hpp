#pragma once

#include "bpcross/law.hpp"

#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace bpcross
{

enum class OdeMethod
{
    dormand_prince45, ///< embedded adaptive Runge-Kutta 4(5)
};

struct OdeSettings
{
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    /// Upper bound on the step size; infinity leaves it to the controller.
    double max_step = std::numeric_limits<double>::infinity();
    OdeMethod method = OdeMethod::dormand_prince45;

    /// Throws std::invalid_argument unless both tolerances are positive.
    void validate() const;
};

/// Raised when the adaptive integrator cannot make progress.
class IntegrationError : public std::runtime_error
{
public:
    IntegrationError(const std::string& what, double reached_time)
        : std::runtime_error(what + " (reached t = " + std::to_string(reached_time) + ")"), reached_time_(reached_time)
    {
    }

    double reached_time() const noexcept { return reached_time_; }

private:
    double reached_time_;
};

/// Solves dy/dt = crossing_generator(y, v), y(0) = u, and returns y(t) clamped
/// to [0, 1]. This is E[u^X(t) v^Y(t) | X(0) = 1].
double solve_pgf(const OffspringLaw& law, const CrossingSet& set, double t, double u, std::span<const double> v,
                 const OdeSettings& settings = {});

/// P(Y(t) = k | X(0) = 1) for |k| <= max_order.
///
/// Integrates the coefficient system g'_k = sum_{i in N} b_i g^{*i}_{k-e_i} +
/// sum_{i not in N} b_i g^{*i}_k on the whole lattice at once. Every term on
/// the right only involves indices componentwise <= k, so the truncated
/// system is closed and the retained coefficients carry solver error only.
CoeffTable crossing_distribution(const OffspringLaw& law, const CrossingSet& set, double t, int max_order,
                                 const OdeSettings& settings = {});

/// P(X(t) = j, Y(t) = k | X(0) = 1) for j <= max_population and |k| <= max_order.
/// Same closed-system argument as crossing_distribution with populations summed
/// inside every convolution.
CoeffTable joint_distribution(const OffspringLaw& law, const CrossingSet& set, double t, int max_population,
                              int max_order, const OdeSettings& settings = {});

/// Cross-check evaluator for joint_distribution when 0 is tracked. Uses the
/// variation-of-constants form g = e^{b_1 t}[delta + int_0^t F e^{-b_1 s} ds]
/// level by level (level = j + |k|) on a uniform grid of `intervals` steps.
CoeffTable joint_distribution_by_quadrature(const OffspringLaw& law, const CrossingSet& set, double t,
                                            int max_population, int max_order, int intervals = 2048);

/// E[v^Y(t) | X(0) = i] = solve_pgf(t, 1, v)^i.
double crossing_pgf_from(const OffspringLaw& law, const CrossingSet& set, double t, std::span<const double> v,
                         int initial_population, const OdeSettings& settings = {});

/// Distribution of Y(tau) given extinction: the Taylor coefficients of the
/// marked root divided by the extinction probability. Throws std::domain_error
/// when extinction is impossible.
CoeffTable extinction_conditioned_distribution(const OffspringLaw& law, const CrossingSet& set, int max_order);

} // namespace bpcross
