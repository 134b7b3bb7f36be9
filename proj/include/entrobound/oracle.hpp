#pragma once

// Ground truth independent of the estimator: dyadic midpoint quadrature,
// exact discrete computations, and grid checks of the inequalities behind
// the confidence bound.

#include "entrobound/densities.hpp"
#include "entrobound/samples.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace entrobound::oracle {

struct QuadratureResult
{
  double value = 0.0;
  double est_error = 0.0; //!< difference of the last two refinements
  std::uint64_t grid_cells = 0;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Midpoint rule over `box`, halving the cell width until three consecutive
/// levels agree within tol (est_error is the larger of the two gaps). Sums are pairwise, so results do not
/// depend on evaluation order. Throws ConvergenceError after 24 levels or
/// when a level would exceed `max_cells`.
QuadratureResult integrate(const Box& box, const Integrand& f, double tol,
                           std::uint64_t max_cells = std::uint64_t{ 1 } << 27);

//! -integral of p ln p over the model's support.
QuadratureResult numeric_entropy(const DensityModel& model, double tol);

//! integral of p ln(p/q) over p's support; +inf if q vanishes where p does not.
QuadratureResult numeric_kl(const DensityModel& p, const DensityModel& q, double tol);

//! Probability mass of each of the M^K cells (row-major, last axis fastest).
std::vector<double> cell_masses(const DensityModel& model, std::uint64_t M);

//! Piecewise-constant density equal to the cell average of p on each cell.
//! Requires support within [0,1]^K.
DensityModel quantized_companion(const DensityModel& model, std::uint64_t M);

//! max |p - q| over >= 64 points per cell per axis (8 for K = 3).
double check_density_gap(const DensityModel& model, std::uint64_t M);

struct SupBound
{
  double sup_p = 0.0;   //!< grid maximum of the pdf
  double bound = 0.0;   //!< (L^K (K+1)! / 2^K)^(1/(K+1))
};

SupBound check_sup_bound(const DensityModel& model);

//! (L^K (K+1)! / 2^K)^(1/(K+1)).
double sup_bound(std::size_t K, double L);

struct Inequality
{
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack = 0.0) const { return lhs <= rhs + slack; }
};

//! |x ln x - y ln y| against -a ln a for a = |x - y| <= alpha.
Inequality check_xlogx_gap(double x, double y);

struct XlogxScan
{
  std::size_t pairs = 0;
  double max_excess = 0.0; //!< largest lhs - rhs; <= 0 when the gap bound holds
};

//! check_xlogx_gap on random pairs x in [0,1], y >= 0, |x - y| <= alpha.
//! Every 16th pair sits exactly at |x - y| = alpha.
XlogxScan scan_xlogx_gap(std::size_t pairs, std::uint64_t seed);

struct ContinuityCheck
{
  Inequality bound;
  double quad_error = 0.0; //!< combined quadrature error of both entropies
};

/// |h(p) - h(q)| against eps ln(A / eps), with no precondition checks.
ContinuityCheck entropy_continuity_gap(const DensityModel& p, const DensityModel& q,
                                       double eps, double A, double tol);

/// As entropy_continuity_gap after verifying eps / A <= alpha, and on a grid
/// |p - q| <= eps and p <= A. Throws DomainError otherwise.
ContinuityCheck check_entropy_continuity(const DensityModel& p, const DensityModel& q,
                                         double eps, double A, double tol);

/// Largest integral of |p - p(t0)| over a cell, anchors t0 at the cell's
/// corners and center, against (1/M)^(K+1) L K / 2.
Inequality check_cell_lipschitz_integral(const DensityModel& model, std::uint64_t M);

//! Largest |p(x) - p(y)| / |x - y|_1 over random pairs in the support.
double max_lipschitz_ratio(const DensityModel& model, std::size_t pairs, std::uint64_t seed);

//! Two-sided Kolmogorov-Smirnov statistic of 1-D samples against a CDF.
double ks_statistic(std::span<const double> values, const std::function<double(double)>& cdf);

//! Throws DomainError unless entries are >= 0 and sum to 1 within 1e-12.
double exact_discrete_entropy(std::span<const double> pmf);

//! E[H(empirical law of N draws)] by enumerating every count vector;
//! alphabet <= 5 and N <= 10.
double expected_plugin_entropy_enum(std::span<const double> pmf, std::uint64_t N);

//! Entropy of U[0,1] + U[0,c] by quadrature.
double trapezoid_entropy(double c, double tol = 1e-9);

//! k + (1 - e^-a) ln((1 - e^-a) / (1 - e^-(a + k e^a))).
double kl_true_divergence(double a, double k);

} // namespace entrobound::oracle
