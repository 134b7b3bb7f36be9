#include "frozen_values.hpp"

#include "entrobound/densities.hpp"
#include "entrobound/errors.hpp"
#include "entrobound/estimators.hpp"
#include "entrobound/histogram.hpp"
#include "entrobound/oracle.hpp"
#include "entrobound/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace entrobound;
using doctest::Approx;

namespace {

// 0.001-level Kolmogorov-Smirnov critical value.
double
ks_critical(std::size_t n)
{
  return 1.9495 / std::sqrt(static_cast<double>(n));
}

std::vector<double>
first_column(const SampleSet& s)
{
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    v[i] = s.row(i)[0];
  return v;
}

} // namespace

TEST_CASE("counter generator")
{
  CounterRng a(0), b(0);
  CHECK(a() != 0); // seed 0 must not start at the fixed point of the mix
  CHECK(b() == CounterRng(0)());
  CounterRng c(5);
  c();
  c();
  CHECK(c.counter() == 2);
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 0) != split_seed(2, 0));
  double lo = 1.0, hi = 0.0, mean = 0.0;
  CounterRng d(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = d.uniform_open();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u / 100000.0;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CounterRng e(3);
  for (int i = 0; i < 1000; ++i)
    CHECK(e.below(7) < 7);
}

TEST_CASE("tent density")
{
  const DensityModel t1 = tent_density(1);
  CHECK(*t1.analytic_entropy() == Approx(frozen::tent_entropy).epsilon(1e-15));
  CHECK(*t1.lipschitz() == 4.0);
  CHECK(t1.pdf(std::vector<double>{ 0.5 }) == 2.0);
  CHECK(t1.pdf(std::vector<double>{ 0.0 }) == 0.0);
  CHECK(t1.pdf(std::vector<double>{ 1.0 }) == 0.0);
  CHECK(t1.pdf(std::vector<double>{ 1.5 }) == 0.0);
  CHECK(t1.pdf(std::vector<double>{ -0.5 }) == 0.0);

  const DensityModel t2 = tent_density(2);
  CHECK(*t2.analytic_entropy() == Approx(2 * frozen::tent_entropy).epsilon(1e-15));
  CHECK(*t2.lipschitz() == 8.0);
  CHECK(t2.pdf(std::vector<double>{ 0.5, 0.5 }) == 4.0);
  CHECK_THROWS_AS(tent_density(0), DomainError);

  // Closed form against quadrature.
  CHECK(oracle::numeric_entropy(t1, 1e-7).value == Approx(frozen::tent_entropy).epsilon(1e-6));
}

TEST_CASE("densities integrate to one")
{
  const auto one = [](const DensityModel& d) {
    return oracle::integrate(d.support(), [&](std::span<const double> x) { return d.pdf(x); }, 1e-8).value;
  };
  CHECK(one(tent_density(1)) == Approx(1.0).epsilon(1e-6));
  CHECK(one(tent_density(2)) == Approx(1.0).epsilon(1e-6));
  CHECK(one(uniform_density(3)) == Approx(1.0).epsilon(1e-6));
  CHECK(one(scaled_tent_density(1, std::log(0.3))) == Approx(1.0).epsilon(1e-6));
  CHECK(one(trapezoid_density(0.25)) == Approx(1.0).epsilon(1e-6));
  const auto [p, q] = kl_step_pair(2.0, 1.0);
  CHECK(one(p) == Approx(1.0).epsilon(1e-12));
  CHECK(one(q) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Lipschitz constants hold on random pairs")
{
  for (const DensityModel& d : { tent_density(1), tent_density(2), tent_density(3),
                                 scaled_tent_density(2, std::log(0.5)), trapezoid_density(0.3) }) {
    const double ratio = oracle::max_lipschitz_ratio(d, 100000, 17);
    CHECK(ratio <= *d.lipschitz() * (1.0 + 1e-9));
    CHECK(ratio > 0.5 * *d.lipschitz()); // the check actually probes steep regions
  }
}

TEST_CASE("samplers")
{
  const DensityModel t = tent_density(1);
  CHECK(t.sample(100, 5) == t.sample(100, 5));
  for (std::uint64_t s = 0; s < 10; ++s)
    CHECK_FALSE(t.sample(20, 2 * s) == t.sample(20, 2 * s + 1));

  const SampleSet big = t.sample(1000000, 1);
  const auto v = first_column(big);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  CHECK(std::abs(mean - 0.5) < 0.002);

  SUBCASE("Kolmogorov-Smirnov")
  {
    const std::size_t n = 100000;
    for (const DensityModel& d : { tent_density(1), uniform_density(1), trapezoid_density(0.4),
                                   scaled_tent_density(1, std::log(0.25)) }) {
      const auto xs = first_column(d.sample(n, 42));
      CHECK(oracle::ks_statistic(xs, [&](double x) { return d.cdf(x); }) < ks_critical(n));
    }
    const auto [p, q] = kl_step_pair(1.0, 0.1);
    const auto xs = first_column(p.sample(n, 3));
    CHECK(oracle::ks_statistic(xs, [&](double x) { return p.cdf(x); }) < ks_critical(n));
    const auto ys = first_column(q.sample(n, 4));
    CHECK(oracle::ks_statistic(ys, [&](double x) { return q.cdf(x); }) < ks_critical(n));

    const DensityModel mix =
      prop1_mixture({ tent_density(1), scaled_tent_density(1, std::log(0.5)), 0.3, std::numbers::ln2 });
    const auto ms = first_column(mix.sample(n, 8));
    CHECK(oracle::ks_statistic(ms, [&](double x) { return mix.cdf(x); }) < ks_critical(n));
  }
  SUBCASE("the KS check rejects a wrong law")
  {
    const auto xs = first_column(uniform_density(1).sample(100000, 42));
    const DensityModel t1 = tent_density(1);
    CHECK(oracle::ks_statistic(xs, [&](double x) { return t1.cdf(x); }) > ks_critical(100000));
  }
}

TEST_CASE("low_entropy_alt")
{
  CHECK(std::exp(low_entropy_alt_log_scale(1, frozen::tent_entropy)) == 1.0);
  CHECK(std::exp(low_entropy_alt_log_scale(2, 2 * frozen::tent_entropy)) == 1.0);
  CHECK(std::exp(low_entropy_alt_log_scale(1, -2.0)) == Approx(frozen::alt_scale_k1_hm2).epsilon(1e-14));
  const DensityModel alt = low_entropy_alt(1, -2.0);
  CHECK(*alt.analytic_entropy() == Approx(-2.0).epsilon(1e-14));
  CHECK(oracle::numeric_entropy(alt, 1e-7).value == Approx(-2.0).epsilon(1e-4));
  const double s = frozen::alt_scale_k1_hm2;
  CHECK(*alt.lipschitz() == Approx(4.0 / (s * s)).epsilon(1e-12));

  const DensityModel alt2 = low_entropy_alt(2, -3.0);
  CHECK(*alt2.analytic_entropy() == Approx(-3.0).epsilon(1e-14));
  // L = 2^(K+1) / s^(K+1); the Lipschitz scan confirms the cube, not the square.
  const double s2 = std::exp(low_entropy_alt_log_scale(2, -3.0));
  CHECK(*alt2.lipschitz() == Approx(8.0 / (s2 * s2 * s2)).epsilon(1e-12));
  CHECK(oracle::max_lipschitz_ratio(alt2, 100000, 5) > 8.0 / (s2 * s2) * 1.5);

  CHECK_THROWS_AS(low_entropy_alt(1, 0.0), DomainError);
  // Far below the smallest double scale the model still has exact entropy.
  const DensityModel tiny = low_entropy_alt(1, -5000.0);
  CHECK(*tiny.analytic_entropy() == -5000.0);
  CHECK_FALSE(tiny.lipschitz().has_value());
  const SampleSet ts = tiny.sample(4, 1);
  for (double v : ts.data())
    CHECK(v == 0.0);
}

TEST_CASE("scaled tent")
{
  const DensityModel half = scaled_tent_density(1, std::log(0.5));
  CHECK(*half.lipschitz() == Approx(16.0).epsilon(1e-12));
  CHECK(half.pdf(std::vector<double>{ 0.25 }) == Approx(4.0).epsilon(1e-15));
  CHECK(oracle::numeric_entropy(half, 1e-7).value == Approx(frozen::tent_entropy - std::numbers::ln2).epsilon(1e-6));
  CHECK_THROWS_AS(scaled_tent_density(1, 0.5), DomainError);
}

TEST_CASE("trapezoid")
{
  CHECK(trapezoid_entropy_closed_form(1.0) == frozen::trapezoid_c1);
  for (double c : { 0.05, 0.3, 1.0 }) {
    const DensityModel d = trapezoid_density(c);
    CHECK(*d.analytic_entropy() == Approx(c / 2.0).epsilon(1e-15));
    CHECK(oracle::numeric_entropy(d, 1e-8).value == Approx(c / 2.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(trapezoid_density(0.0), DomainError);
  CHECK_THROWS_AS(trapezoid_density(1.5), DomainError);
}

TEST_CASE("binary entropy")
{
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(binary_entropy(0.2) == Approx(binary_entropy(0.8)).epsilon(1e-15));
  CHECK_THROWS_AS(binary_entropy(-0.1), DomainError);
}

TEST_CASE("contamination mixture")
{
  const DensityModel base = tent_density(1);
  SUBCASE("no contamination")
  {
    const DensityModel m = prop1_mixture({ base, low_entropy_alt(1, -3.0), 0.0, 1.0 });
    CHECK(*m.analytic_entropy() == *base.analytic_entropy());
  }
  SUBCASE("equal halves of uniforms")
  {
    const DensityModel m = prop1_mixture({ uniform_density(1), uniform_density(1), 0.5, 0.0 });
    CHECK(*m.analytic_entropy() == Approx(std::numbers::ln2).epsilon(1e-15));
  }
  SUBCASE("the worked example")
  {
    const DensityModel alt = low_entropy_alt(1, -20.0);
    const DensityModel m = prop1_mixture({ base, alt, 5e-4, 19.8 });
    CHECK(*m.analytic_entropy() == Approx(frozen::mixture_5e4_minus20).epsilon(1e-13));
  }
  SUBCASE("analytic entropy matches quadrature")
  {
    const DensityModel alt = scaled_tent_density(1, std::log(0.5));
    for (double eps : { 0.1, 0.5, 0.9 }) {
      const DensityModel m = prop1_mixture({ base, alt, eps, std::numbers::ln2 });
      CHECK(oracle::numeric_entropy(m, 1e-8).value == Approx(*m.analytic_entropy()).epsilon(1e-6));
      const double mass =
        oracle::integrate(m.support(), [&](std::span<const double> x) { return m.pdf(x); }, 1e-9).value;
      CHECK(mass == Approx(1.0).epsilon(1e-8));
    }
    const DensityModel m2 = prop1_mixture({ tent_density(2), scaled_tent_density(2, std::log(0.5)), 0.3,
                                            2 * std::numbers::ln2 });
    CHECK(std::abs(oracle::numeric_entropy(m2, 1e-5).value - *m2.analytic_entropy()) < 1e-4);
  }
  SUBCASE("sampling uses both pieces")
  {
    const DensityModel m = prop1_mixture({ base, scaled_tent_density(1, -1.0), 0.25, 1.0 });
    const SampleSet s = m.sample(100000, 9);
    std::size_t negative = 0;
    for (double v : s.data())
      negative += v < 0.0 ? 1 : 0;
    CHECK(static_cast<double>(negative) / 100000.0 == Approx(0.25).epsilon(0.02));
    CHECK(m.sample(1000, 4) == m.sample(1000, 4));
  }
  SUBCASE("preconditions")
  {
    CHECK_THROWS_AS(prop1_mixture({ base, base, 1.0, 0.0 }), DomainError);
    CHECK_THROWS_AS(prop1_mixture({ base, base, 0.1, 0.5 }), DomainError);
    CHECK_THROWS_AS(prop1_mixture({ base, tent_density(2), 0.1, 0.0 }), DomainError);
  }
}

TEST_CASE("MI adversary")
{
  CHECK(mi_adversary(3.0, 1e-9).true_mi() < 1e-8);
  CHECK(mi_adversary(0.0, 0.2).lower_bound() == 0.0);
  const MiAdversary adv = mi_adversary(10.0, 1e-3);
  CHECK(adv.lower_bound() == Approx(0.01).epsilon(1e-15));
  CHECK(adv.true_mi() >= 0.01);
  // h(x + w) for w ~ U[0, e^-a] against the trapezoid quadrature.
  for (double a : { 0.0, 0.5, 2.0 }) {
    const MiAdversary m(a, 0.3);
    const double h = oracle::trapezoid_entropy(std::exp(-a), 1e-8);
    CHECK(m.true_mi() == Approx(0.3 * (a + h)).epsilon(1e-7));
  }
  const SampleSet s = adv.sample(10000, 3);
  CHECK(s.dim() == 2);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(MiAdversary::support().contains(s.row(i)));
  CHECK(adv.sample(50, 1) == adv.sample(50, 1));
  CHECK_THROWS_AS(mi_adversary(-1.0, 0.1), DomainError);
  CHECK_THROWS_AS(mi_adversary(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(mi_adversary(1.0, 1.0), DomainError);
}

TEST_CASE("discrete MI adversary")
{
  CHECK(DiscreteMiAdversary({ 1, 1 }, 2).true_mi() == 0.0);
  CHECK(DiscreteMiAdversary({ 1, 2 }, 2).true_mi() == Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK_THROWS_AS(DiscreteMiAdversary({ 1, 1 }, 1), DomainError);
  CHECK_THROWS_AS(DiscreteMiAdversary({ 1, 3 }, 2), DomainError);
  CHECK_THROWS_AS(discrete_mi_adversary(0, 2, 1), DomainError);

  const DiscreteMiAdversary big = discrete_mi_adversary(100000, 4, 7);
  CHECK(big.true_mi() == Approx(std::log(4.0)).epsilon(1e-3));
  CHECK(big.codebook() == discrete_mi_adversary(100000, 4, 7).codebook());

  // y is v[floor(M x)] exactly.
  const DiscreteMiAdversary d = discrete_mi_adversary(16, 3, 2);
  const SampleSet s = d.sample(1000, 5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto z = static_cast<std::size_t>(std::floor(16 * s.row(i)[0]));
    CHECK(s.row(i)[1] == static_cast<double>(d.codebook()[z]));
  }

  // A constant codebook gives a plug-in MI estimate near zero.
  const DiscreteMiAdversary flat(std::vector<std::uint32_t>(64, 2), 3);
  const SampleSet fs = flat.sample(100000, 1);
  SampleSet unit(2);
  for (std::size_t i = 0; i < fs.size(); ++i)
    unit.push_back(std::vector<double>{ fs.row(i)[0], 0.5 });
  const double h_x = estimate_differential_entropy(unit.columns(0, 1), 100);
  const double h_y = estimate_differential_entropy(unit.columns(1, 1), 100);
  const double h_xy = estimate_differential_entropy(unit, 100);
  CHECK(std::abs(h_x + h_y - h_xy) < 1e-9);
}

TEST_CASE("collision probability")
{
  CHECK(collision_probability(1000000, 1000) == Approx(frozen::collision_exact_1e6_1e3).epsilon(1e-12));
  CHECK(collision_probability_bound(1000000, 1000) == Approx(frozen::collision_bound_1e6_1e3).epsilon(1e-12));
  CHECK(collision_probability(10, 1) == 0.0);
  CHECK(collision_probability(10, 11) == 1.0);
  CHECK(collision_probability(365, 23) == Approx(0.5072972343239857).epsilon(1e-12));
  for (std::uint64_t M : { 10, 1000, 100000 })
    for (std::uint64_t N : { 2, 5, 9 })
      CHECK(collision_probability(M, N) <= collision_probability_bound(M, N) + 1e-15);
}

TEST_CASE("KL step pair")
{
  const auto [p, q] = kl_step_pair(2.0, 1.0);
  CHECK(q.pdf(std::vector<double>{ 0.5 }) == Approx(frozen::kl_q_level_a2_k1).epsilon(1e-13));
  CHECK(p.pdf(std::vector<double>{ 0.5 }) == Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(p.pdf(std::vector<double>{ -0.5 }) == Approx(1.0 - std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(kl_step_pair(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(kl_step_pair(1.0, 0.0), DomainError);
}

TEST_CASE("affine rescale")
{
  const SampleSet s = tent_density(2).sample(100, 1);
  const Rescaled id = affine_rescale(s, Box::unit(2), 8.0);
  CHECK(id.samples == s);
  CHECK(id.lipschitz == 8.0);
  CHECK(id.entropy_offset == 0.0);

  const Rescaled r = affine_rescale(SampleSet(1, { 0.0, 1.0, 2.0 }), Box{ { 0.0 }, { 2.0 } }, 1.0);
  CHECK(r.lipschitz == 4.0);
  CHECK(r.entropy_offset == Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(r.samples == SampleSet(1, { 0.0, 0.5, 1.0 }));

  const Rescaled uneven = affine_rescale(SampleSet(2, { 1.0, 1.0 }), Box{ { 0.0, 0.0 }, { 2.0, 3.0 } }, 1.0);
  CHECK(uneven.lipschitz == 3.0 * 6.0);
  CHECK(uneven.entropy_offset == Approx(std::log(6.0)).epsilon(1e-15));

  CHECK_THROWS_AS(affine_rescale(SampleSet(1, { 2.5 }), Box{ { 0.0 }, { 2.0 } }, 1.0), OutOfSupportError);
  CHECK_THROWS_AS(affine_rescale(SampleSet(1, { 0.5 }), Box{ { 1.0 }, { 1.0 } }, 1.0), DomainError);

  // A tent stretched to [0, 2]: rescale, estimate, add the offset.
  const SampleSet base = tent_density(1).sample(100000, 12);
  SampleSet stretched(1);
  for (double v : base.data())
    stretched.push_back(std::vector<double>{ 2.0 * v });
  const Rescaled back = affine_rescale(stretched, Box{ { 0.0 }, { 2.0 } }, 1.0);
  CHECK(back.lipschitz == 4.0);
  const EstimateReport direct = estimate_entropy_certified(base, 4.0, 0.1);
  const EstimateReport via = estimate_entropy_certified(back.samples, 4.0, 0.1);
  const double truth = frozen::tent_entropy + std::numbers::ln2;
  CHECK(std::abs(via.estimate + back.entropy_offset - truth) <= via.bound.total);
  CHECK(std::abs(via.estimate + back.entropy_offset - (direct.estimate + std::numbers::ln2)) <=
        via.bound.total + direct.bound.total);
}
