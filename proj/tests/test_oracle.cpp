#include "frozen_values.hpp"

#include "entrobound/bounds.hpp"
#include "entrobound/densities.hpp"
#include "entrobound/errors.hpp"
#include "entrobound/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <vector>

using namespace entrobound;
using namespace entrobound::oracle;
using doctest::Approx;

TEST_CASE("quadrature")
{
  CHECK(numeric_entropy(uniform_density(1), 1e-8).value == Approx(0.0));
  CHECK(std::abs(numeric_entropy(uniform_density(2), 1e-8).value) < 1e-8);

  const QuadratureResult t = numeric_entropy(tent_density(1), 1e-5);
  CHECK(std::abs(t.value - frozen::tent_entropy) < 1e-5);
  CHECK(t.est_error >= 0.0);
  CHECK(t.est_error < 1e-5);
  CHECK(t.grid_cells >= 16);

  const QuadratureResult s = numeric_entropy(scaled_tent_density(1, std::log(0.5)), 1e-5);
  CHECK(std::abs(s.value - (frozen::tent_entropy - std::numbers::ln2)) < 1e-5);

  // Polynomials and a kink off the dyadic grid.
  const Box unit = Box::unit(1);
  CHECK(integrate(unit, [](std::span<const double> x) { return x[0] * x[0]; }, 1e-10).value ==
        Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(integrate(unit, [](std::span<const double> x) { return std::abs(x[0] - 0.3); }, 1e-10).value ==
        Approx(0.29).epsilon(1e-9));
  CHECK(integrate(Box::unit(3), [](std::span<const double> x) { return x[0] * x[1] * x[2]; }, 1e-8).value ==
        Approx(0.125).epsilon(1e-8));

  CHECK_THROWS_AS(integrate(unit, [](std::span<const double>) { return 1.0; }, 0.0), DomainError);
  CHECK_THROWS_AS(integrate(unit, [](std::span<const double>) { return NAN; }, 1e-3), ConvergenceError);
  CHECK_THROWS_AS(
    integrate(Box::unit(2), [](std::span<const double> x) { return std::sin(1e4 * x[0]); }, 1e-12, 1u << 12),
    ConvergenceError);
}

TEST_CASE("quadrature is independent of the thread count")
{
  const DensityModel t = tent_density(2);
  setenv("ENTROBOUND_THREADS", "1", 1);
  const double one = numeric_entropy(t, 1e-4).value;
  const std::vector<double> m1 = cell_masses(t, 16);
  setenv("ENTROBOUND_THREADS", "4", 1);
  const double four = numeric_entropy(t, 1e-4).value;
  const std::vector<double> m4 = cell_masses(t, 16);
  unsetenv("ENTROBOUND_THREADS");
  CHECK(one == four);
  CHECK(m1 == m4);
}

TEST_CASE("quantized companion")
{
  const DensityModel t = tent_density(1);
  const DensityModel q1 = quantized_companion(t, 1);
  CHECK(q1.pdf(std::vector<double>{ 0.1 }) == Approx(1.0).epsilon(1e-12));
  CHECK(q1.pdf(std::vector<double>{ 0.9 }) == Approx(1.0).epsilon(1e-12));

  const DensityModel q2 = quantized_companion(t, 2);
  CHECK(q2.pdf(std::vector<double>{ 0.25 }) == Approx(1.0).epsilon(1e-12));
  CHECK(q2.pdf(std::vector<double>{ 0.75 }) == Approx(1.0).epsilon(1e-12));

  const std::vector<double> masses = cell_masses(tent_density(2), 8);
  CHECK(std::accumulate(masses.begin(), masses.end(), 0.0) == Approx(1.0).epsilon(1e-12));
  // Exact cell mass of the 1-D tent on [1/8, 2/8]: 4 (t^2/2) = 3/32.
  CHECK(cell_masses(t, 8)[1] == Approx(3.0 / 32.0).epsilon(1e-12));

  const DensityModel q = quantized_companion(tent_density(2), 8);
  CHECK(integrate(q.support(), [&](std::span<const double> x) { return q.pdf(x); }, 1e-10).value ==
        Approx(1.0).epsilon(1e-10));
  CHECK(quantized_companion(t, 16).sample(100, 1) == quantized_companion(t, 16).sample(100, 1));
  const auto xs = quantized_companion(t, 8).sample(100000, 2);
  const DensityModel q8 = quantized_companion(t, 8);
  CHECK(ks_statistic(xs.data(), [&](double x) { return q8.cdf(x); }) < 1.9495 / std::sqrt(100000.0));

  CHECK_THROWS_AS(quantized_companion(scaled_tent_density(1, 0.0), 0), DomainError);
  const auto [p, unused] = kl_step_pair(1.0, 1.0);
  CHECK_THROWS_AS(quantized_companion(p, 4), DomainError); // support leaves [0,1]
}

TEST_CASE("quantized entropy identity")
{
  for (std::size_t K : { 1, 2 })
    for (std::uint64_t M : { 3, 8, 16 }) {
      const DensityModel t = tent_density(K);
      const double discrete = exact_discrete_entropy(cell_masses(t, M));
      const DensityModel q = quantized_companion(t, M);
      // Off-dyadic cell edges make the midpoint error O(h); in 2-D that
      // outruns the cell cap, so M = 3 is only integrated in 1-D.
      if (K == 1 || M != 3) {
        const double tol = 1e-6;
        const double via_q = numeric_entropy(q, tol).value + static_cast<double>(K) * std::log(static_cast<double>(M));
        CHECK(std::abs(discrete - via_q) < 4.0 * tol);
      }
      CHECK(*q.analytic_entropy() + static_cast<double>(K) * std::log(static_cast<double>(M)) ==
            Approx(discrete).epsilon(1e-12));
    }
}

TEST_CASE("density gap")
{
  const DensityModel t = tent_density(1);
  const double g8 = check_density_gap(t, 8);
  const double g16 = check_density_gap(t, 16);
  const double g32 = check_density_gap(t, 32);
  CHECK(g16 <= 4.0 / (2.0 * 16.0) * (1.0 + 1e-9));
  CHECK(g16 / g8 >= 0.4);
  CHECK(g16 / g8 <= 0.6);
  CHECK(g32 / g16 >= 0.4);
  CHECK(g32 / g16 <= 0.6);
  CHECK(check_density_gap(uniform_density(2), 4) < 1e-12);
  CHECK_THROWS_AS(check_density_gap(tent_density(4), 2), DomainError);
}

TEST_CASE("sup bound")
{
  const SupBound t = check_sup_bound(tent_density(1));
  CHECK(t.bound == Approx(2.0).epsilon(1e-14));
  CHECK(t.sup_p == 2.0);
  CHECK(sup_bound(1, 1.0) == Approx(1.0).epsilon(1e-15));
  const SupBound h = check_sup_bound(scaled_tent_density(1, std::log(0.5)));
  CHECK(h.bound == Approx(4.0).epsilon(1e-12));
  CHECK(h.sup_p == Approx(4.0).epsilon(1e-12));
  const SupBound t2 = check_sup_bound(tent_density(2));
  CHECK(t2.sup_p == 4.0);
  CHECK(t2.sup_p <= t2.bound);
  const SupBound t3 = check_sup_bound(tent_density(3));
  CHECK(t3.sup_p == 8.0);
  CHECK(t3.sup_p <= t3.bound);
  CHECK_THROWS_AS(check_sup_bound(uniform_density(1)), DomainError);
  CHECK_THROWS_AS(sup_bound(0, 1.0), DomainError);
}

TEST_CASE("x ln x gap")
{
  const Inequality same = check_xlogx_gap(0.4, 0.4);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  CHECK(same.holds());
  const Inequality tight = check_xlogx_gap(0.0, 0.1);
  CHECK(tight.lhs == Approx(frozen::xlogx_0_01).epsilon(1e-15));
  CHECK(tight.rhs == Approx(frozen::xlogx_0_01).epsilon(1e-15));
  CHECK(check_xlogx_gap(0.0, alpha_const()).holds(1e-16));
  CHECK_THROWS_AS(check_xlogx_gap(0.0, 0.2), DomainError);
  CHECK_THROWS_AS(check_xlogx_gap(1.2, 1.2), DomainError);
  CHECK_THROWS_AS(check_xlogx_gap(0.5, -0.01), DomainError);

  const XlogxScan scan = scan_xlogx_gap(1000000, 1);
  CHECK(scan.pairs == 1000000);
  CHECK(scan.max_excess <= 1e-15);
}

TEST_CASE("entropy continuity")
{
  const DensityModel t = tent_density(1);
  const ContinuityCheck same = check_entropy_continuity(t, t, 0.01, 2.0, 1e-6);
  CHECK(same.bound.lhs == 0.0);

  const DensityModel q = quantized_companion(t, 32);
  const ContinuityCheck c = check_entropy_continuity(t, q, 0.0625, 2.0, 1e-6);
  CHECK(c.bound.rhs == Approx(frozen::continuity_rhs_m32).epsilon(1e-14));
  CHECK(c.bound.lhs < c.bound.rhs);
  CHECK(c.bound.holds(2e-6));

  // eps ln(A / eps) increases on (0, A / e).
  double prev = 0.0;
  for (double eps = 0.01; eps < 2.0 / std::numbers::e; eps += 0.01) {
    const double r = eps * std::log(2.0 / eps);
    CHECK(r > prev);
    prev = r;
  }

  CHECK_THROWS_AS(check_entropy_continuity(t, q, 0.5, 2.0, 1e-6), DomainError);  // eps/A > alpha
  CHECK_THROWS_AS(check_entropy_continuity(t, q, 0.01, 2.0, 1e-6), DomainError); // |p - q| > eps
  CHECK_THROWS_AS(check_entropy_continuity(t, q, 0.0625, 1.0, 1e-6), DomainError); // p > A
}

TEST_CASE("cell Lipschitz integral")
{
  for (std::size_t K : { 1, 2 })
    for (std::uint64_t M : { 4, 8, 16 }) {
      const Inequality c = check_cell_lipschitz_integral(tent_density(K), M);
      CHECK(c.lhs > 0.0);
      CHECK(c.holds(c.rhs * 1e-9));
    }
}

TEST_CASE("discrete entropy and enumeration")
{
  CHECK(exact_discrete_entropy(std::vector<double>{ 1.0 }) == 0.0);
  CHECK(exact_discrete_entropy(std::vector<double>{ 0.5, 0.5 }) == Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(exact_discrete_entropy(std::vector<double>{ 0.5, 0.3, 0.2 }) == Approx(frozen::H_532).epsilon(1e-14));
  CHECK(exact_discrete_entropy(std::vector<double>{ 0.0, 1.0 }) == 0.0);
  CHECK_THROWS_AS(exact_discrete_entropy(std::vector<double>{ 0.5, 0.4 }), DomainError);
  CHECK_THROWS_AS(exact_discrete_entropy(std::vector<double>{ 1.5, -0.5 }), DomainError);
  CHECK_THROWS_AS(exact_discrete_entropy(std::vector<double>{}), DomainError);

  CHECK(expected_plugin_entropy_enum(std::vector<double>{ 0.2, 0.8 }, 1) == 0.0);
  CHECK(std::abs(expected_plugin_entropy_enum(std::vector<double>{ 0.5, 0.5 }, 2) - frozen::EH_55_n2) < 1e-12);
  const double v = expected_plugin_entropy_enum(std::vector<double>{ 0.5, 0.3, 0.2 }, 5);
  CHECK(v == Approx(frozen::EH_532_n5).epsilon(1e-13));
  CHECK(std::abs(frozen::H_532 - v) <= std::log(1.4));
  CHECK_THROWS_AS(expected_plugin_entropy_enum(std::vector<double>(6, 1.0 / 6.0), 3), DomainError);
  CHECK_THROWS_AS(expected_plugin_entropy_enum(std::vector<double>{ 0.5, 0.5 }, 11), DomainError);
}

TEST_CASE("plug-in bias bound over the enumeration regime")
{
  const std::vector<std::vector<double>> laws{
    { 1.0 }, { 0.5, 0.5 }, { 0.9, 0.1 }, { 0.5, 0.3, 0.2 }, { 0.25, 0.25, 0.25, 0.25 }, { 0.6, 0.1, 0.1, 0.1, 0.1 },
    { 0.2, 0.2, 0.2, 0.2, 0.2 },
  };
  for (const auto& pmf : laws)
    for (std::uint64_t N = 1; N <= 10; ++N) {
      const double H = exact_discrete_entropy(pmf);
      const double E = expected_plugin_entropy_enum(pmf, N);
      CHECK(E <= H + 1e-12); // the plug-in is biased downwards
      CHECK(H - E <= discrete_entropy_bounds(pmf.size(), N, 0.5).bias + 1e-12);
    }
}

TEST_CASE("trapezoid entropy")
{
  CHECK(trapezoid_entropy(1.0, 1e-8) == Approx(frozen::trapezoid_c1).epsilon(1e-6));
  CHECK(std::abs(trapezoid_entropy(1e-6, 1e-8)) < 1e-3);
  double prev = -1.0;
  for (int i = 1; i <= 10; ++i) {
    const double h = trapezoid_entropy(0.1 * i, 1e-8);
    CHECK(h > prev);
    prev = h;
  }
  CHECK_THROWS_AS(trapezoid_entropy(0.0), DomainError);
}

TEST_CASE("KL closed form")
{
  CHECK(kl_true_divergence(2.0, 0.0) == 0.0);
  CHECK(kl_true_divergence(2.0, 1.0) >= 1.0 - std::exp(-1.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double a = frozen::kl_a[i];
      const double k = frozen::kl_k[j];
      const double D = kl_true_divergence(a, k);
      CHECK(D == Approx(frozen::kl_D[i][j]).epsilon(1e-13));
      CHECK(D >= k - std::exp(-1.0));
      const auto [p, q] = kl_step_pair(a, k);
      CHECK(std::abs(numeric_kl(p, q, 1e-12).value - D) < 1e-8);
    }
  CHECK_THROWS_AS(kl_true_divergence(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(kl_true_divergence(1.0, -1.0), DomainError);
  CHECK(std::isinf(numeric_kl(tent_density(1), scaled_tent_density(1, std::log(0.5)), 1e-6).value));
}

TEST_CASE("Kolmogorov-Smirnov statistic")
{
  CHECK(ks_statistic(std::vector<double>{ 0.5 }, [](double x) { return x; }) == Approx(0.5));
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, [](double x) { return x; }), EmptySampleError);
}
