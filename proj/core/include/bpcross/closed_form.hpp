#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace bpcross::closed_form
{

/// Analytic results for two offspring laws with death counting (N = {0}):
///
///   birth-death: b_0 = p b, b_2 = q b
///   cubic:       b_0 = p b, b_3 = q b
///
/// with p in (0, 1) and q = 1 - p.

class QuadratureError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using Rational = boost::rational<boost::multiprecision::cpp_int>;

/// E[u^X(t) v^Y(t)] for the birth-death law. The generator factors as
/// b q (y - alpha)(y - beta), which gives a logistic solution; when the two
/// roots coincide (v = 1, p = q) the solution is the limit
/// alpha + (u - alpha) / (1 - (u - alpha) b q t).
double bd_pgf(double p, double q, double b, double t, double u, double v);

/// g_0(t) = P(no deaths by t) = 1 / (q + p e^{bt}).
double bd_no_death(double p, double q, double b, double t);

/// P(Y(t) = n), n = 0..nmax, for the birth-death law via the integral recursion
/// g_n(t) = e^{bt} (q + p e^{bt})^{-2} int_0^t (q + p e^{bs})^2 e^{-bs} F_n(s) ds,
/// F_n = b p [n = 1] + b q sum_{k=1}^{n-1} g_k g_{n-k}.
/// Throws QuadratureError if grid refinement fails to reach tol.
std::vector<double> bd_death_coeffs(double p, double q, double b, double t, int nmax, double tol = 1e-10);

/// Coefficients of v -> (1 - sqrt(1 - 4pqv)) / (2q): term 1 is p and term
/// n >= 2 is p (2n-3)!! 2^{n-1} (pq)^{n-1} / n!. Index 0 is zero.
std::vector<double> bd_extinction_series(double p, double q, int nmax);

/// g_0(t) = (q + p e^{2bt})^{-1/2} for the cubic law.
double cubic_no_death(double p, double q, double b, double t);

/// P(Y(t) = n), n = 0..nmax, for the cubic law via
/// g_n(t) = e^{2bt} (q + p e^{2bt})^{-3/2} int_0^t e^{-2bs} (q + p e^{2bs})^{3/2} F_n(s) ds,
/// F_n = b p [n = 1] + b q sum_{k1,k2,k3 < n, k1+k2+k3 = n} g_k1 g_k2 g_k3.
std::vector<double> cubic_death_coeffs(double p, double q, double b, double t, int nmax, double tol = 1e-10);

/// Deaths before extinction for the cubic law: g_0 = 0, g_1 = p,
/// g_n = q sum_{i,j,k < n, i+j+k = n} g_i g_j g_k.
std::vector<double> cubic_extinction_series(double p, double q, int nmax);

/// The same recursion in exact rational arithmetic with q = 1 - p.
std::vector<Rational> cubic_extinction_series_exact(const Rational& p, int nmax);

} // namespace bpcross::closed_form
