#include "entrobound/oracle.hpp"

#include "entrobound/bounds.hpp"
#include "entrobound/errors.hpp"
#include "entrobound/parallel.hpp"
#include "entrobound/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>

namespace entrobound::oracle {

namespace {

constexpr std::size_t kBlock = 4096;
constexpr int kMaxLevels = 24;
constexpr int kMinLevel = 4;

double
pairwise_sum(std::span<const double> v)
{
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v)
      s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::uint64_t
checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t limit)
{
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > limit / std::max<std::uint64_t>(base, 1))
      return limit + 1;
    r *= base;
  }
  return r;
}

// Midpoint sum of f over an n^K grid on box, last axis fastest, reduced
// in fixed blocks so the result does not depend on the thread count.
double
midpoint_sum(const Box& box, std::uint64_t n, std::uint64_t cells, const Integrand& f)
{
  const std::size_t K = box.dim();
  std::vector<double> width(K);
  for (std::size_t k = 0; k < K; ++k)
    width[k] = (box.hi[k] - box.lo[k]) / static_cast<double>(n);
  const std::size_t blocks = static_cast<std::size_t>((cells + kBlock - 1) / kBlock);
  std::vector<double> block_sums(blocks);
  parallel_for_index(blocks, [&](std::size_t b) {
    std::vector<double> values;
    values.reserve(kBlock);
    std::vector<double> x(K);
    const std::uint64_t first = b * kBlock;
    const std::uint64_t last = std::min<std::uint64_t>(cells, first + kBlock);
    for (std::uint64_t idx = first; idx < last; ++idx) {
      std::uint64_t rem = idx;
      for (std::size_t k = K; k-- > 0;) {
        const std::uint64_t j = rem % n;
        rem /= n;
        x[k] = box.lo[k] + (static_cast<double>(j) + 0.5) * width[k];
      }
      values.push_back(f(x));
    }
    block_sums[b] = pairwise_sum(values);
  });
  double volume = 1.0;
  for (double w : width)
    volume *= w;
  return pairwise_sum(block_sums) * volume;
}

double
neg_xlogx(double p)
{
  return p > 0.0 ? -p * std::log(p) : 0.0;
}

void
require_low_dim(std::size_t K)
{
  if (K < 1 || K > 3)
    throw DomainError("grid checks are limited to dimensions 1 to 3, got " + std::to_string(K));
}

void
require_unit_support(const DensityModel& model)
{
  for (std::size_t k = 0; k < model.dim(); ++k)
    if (model.support().lo[k] < 0.0 || model.support().hi[k] > 1.0)
      throw DomainError("model '" + model.name() + "' is not supported within [0,1]^K");
}

// Visits every point of a grid with `per_axis` points per axis spanning
// [lo_k, hi_k] inclusive.
template<class Visit>
void
for_each_grid_point(const Box& box, std::uint64_t per_axis, Visit&& visit)
{
  const std::size_t K = box.dim();
  std::vector<std::uint64_t> j(K, 0);
  std::vector<double> x(K);
  const double denom = static_cast<double>(per_axis - 1);
  for (;;) {
    for (std::size_t k = 0; k < K; ++k)
      x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * (static_cast<double>(j[k]) / denom);
    visit(std::span<const double>(x));
    std::size_t k = K;
    while (k-- > 0) {
      if (++j[k] < per_axis)
        break;
      j[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1))
      return;
  }
}

std::uint64_t
subgrid_points(std::size_t K)
{
  switch (K) {
    case 1:
      return 64;
    case 2:
      return 16;
    default:
      return 8;
  }
}

std::uint64_t
gap_points(std::size_t K)
{
  return K <= 2 ? 64 : 8;
}

// Cell bounds of flat cell index c (last axis fastest).
Box
cell_box(std::uint64_t c, std::uint64_t M, std::size_t K)
{
  Box b{ std::vector<double>(K), std::vector<double>(K) };
  const double h = 1.0 / static_cast<double>(M);
  for (std::size_t k = K; k-- > 0;) {
    const std::uint64_t j = c % M;
    c /= M;
    b.lo[k] = static_cast<double>(j) * h;
    b.hi[k] = static_cast<double>(j + 1) * h;
  }
  return b;
}

// Midpoint rule with S^K points inside `cell` (no refinement).
double
cell_integral(const Box& cell, std::uint64_t S, const Integrand& f)
{
  const std::size_t K = cell.dim();
  const std::uint64_t pts = checked_pow(S, K, std::numeric_limits<std::uint64_t>::max() / 2);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(pts));
  std::vector<double> x(K);
  for (std::uint64_t idx = 0; idx < pts; ++idx) {
    std::uint64_t rem = idx;
    for (std::size_t k = K; k-- > 0;) {
      const std::uint64_t j = rem % S;
      rem /= S;
      x[k] = cell.lo[k] + (static_cast<double>(j) + 0.5) * (cell.hi[k] - cell.lo[k]) / static_cast<double>(S);
    }
    values.push_back(f(x));
  }
  return pairwise_sum(values) * cell.volume() / static_cast<double>(pts);
}

} // namespace

QuadratureResult
integrate(const Box& box, const Integrand& f, double tol, std::uint64_t max_cells)
{
  if (!(tol > 0.0))
    throw DomainError("quadrature tolerance must be positive");
  const std::size_t K = box.dim();
  if (K == 0)
    throw DomainError("quadrature over an empty box");
  double previous = std::numeric_limits<double>::quiet_NaN();
  double last_diff = 0.0;
  int passes = 0;
  for (int level = 0; level <= kMaxLevels; ++level) {
    const std::uint64_t n = std::uint64_t{ 1 } << level;
    const std::uint64_t cells = checked_pow(n, K, max_cells);
    if (cells > max_cells)
      throw ConvergenceError("quadrature exceeded " + std::to_string(max_cells) +
                             " cells before reaching tolerance " + std::to_string(tol));
    const double value = midpoint_sum(box, n, cells, f);
    if (!std::isfinite(value))
      throw ConvergenceError("quadrature produced a non-finite value");
    // Kinks off the dyadic grid can make two levels agree by accident, so
    // two consecutive differences must pass.
    const double diff = std::abs(value - previous);
    passes = diff < tol ? passes + 1 : 0;
    if (level >= kMinLevel && passes >= 2)
      return { value, std::max(diff, last_diff), cells };
    last_diff = diff;
    previous = value;
  }
  throw ConvergenceError("quadrature did not converge within " + std::to_string(kMaxLevels) + " levels");
}

QuadratureResult
numeric_entropy(const DensityModel& model, double tol)
{
  return integrate(model.support(), [&](std::span<const double> x) { return neg_xlogx(model.pdf(x)); }, tol);
}

QuadratureResult
numeric_kl(const DensityModel& p, const DensityModel& q, double tol)
{
  if (p.dim() != q.dim())
    throw DomainError("KL between densities of different dimension");
  std::atomic<bool> infinite{ false }; // written from worker threads
  auto f = [&](std::span<const double> x) {
    const double pp = p.pdf(x);
    if (pp <= 0.0)
      return 0.0;
    const double qq = q.pdf(x);
    if (qq <= 0.0) {
      infinite = true;
      return 0.0;
    }
    return pp * (std::log(pp) - std::log(qq));
  };
  QuadratureResult r = integrate(p.support(), f, tol);
  if (infinite)
    r.value = std::numeric_limits<double>::infinity();
  return r;
}

std::vector<double>
cell_masses(const DensityModel& model, std::uint64_t M)
{
  require_unit_support(model);
  if (M < 1)
    throw DomainError("M must be >= 1");
  const std::size_t K = model.dim();
  constexpr std::uint64_t kMaxCells = std::uint64_t{ 1 } << 24;
  const std::uint64_t cells = checked_pow(M, K, kMaxCells);
  if (cells > kMaxCells)
    throw DomainError("M^K exceeds the dense cell limit of 2^24");
  const std::uint64_t S = subgrid_points(K);
  std::vector<double> masses(static_cast<std::size_t>(cells));
  auto pdf = [&](std::span<const double> x) { return model.pdf(x); };
  parallel_for_index(masses.size(), [&](std::size_t c) { masses[c] = cell_integral(cell_box(c, M, K), S, pdf); });
  return masses;
}

DensityModel
quantized_companion(const DensityModel& model, std::uint64_t M)
{
  const std::size_t K = model.dim();
  auto masses = std::make_shared<const std::vector<double>>(cell_masses(model, M));
  const double cells = static_cast<double>(masses->size());

  double h = 0.0;
  for (double m : *masses)
    h += neg_xlogx(m);

  DensityModel::Parts parts;
  parts.name = model.name() + "_quantized";
  parts.support = Box::unit(K);
  parts.entropy = h - std::log(cells);
  parts.pdf = [masses, M, cells](std::span<const double> x) {
    std::uint64_t c = 0;
    for (double v : x) {
      const auto j = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(v * static_cast<double>(M))), M - 1);
      c = c * M + j;
    }
    return (*masses)[static_cast<std::size_t>(c)] * cells;
  };
  auto cumulative = std::make_shared<std::vector<double>>(masses->size());
  std::partial_sum(masses->begin(), masses->end(), cumulative->begin());
  parts.sampler = [cumulative, M, K](std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    const double total = cumulative->back();
    std::vector<double> data(n * K);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cumulative->begin(), cumulative->end(), u);
      auto c = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cumulative->begin(),
                                                                   static_cast<std::ptrdiff_t>(cumulative->size()) - 1));
      for (std::size_t k = K; k-- > 0;) {
        const std::uint64_t j = c % M;
        c /= M;
        data[i * K + k] = (static_cast<double>(j) + rng.uniform()) / static_cast<double>(M);
      }
    }
    return SampleSet(K, std::move(data));
  };
  if (K == 1)
    parts.cdf = [cumulative, M](double x) {
      if (x <= 0.0)
        return 0.0;
      if (x >= 1.0)
        return 1.0;
      const double pos = x * static_cast<double>(M);
      const auto j = static_cast<std::size_t>(pos);
      const double before = j == 0 ? 0.0 : (*cumulative)[j - 1];
      return before + ((*cumulative)[j] - before) * (pos - static_cast<double>(j));
    };
  return DensityModel(std::move(parts));
}

double
check_density_gap(const DensityModel& model, std::uint64_t M)
{
  const std::size_t K = model.dim();
  require_low_dim(K);
  const std::vector<double> masses = cell_masses(model, M);
  const double cells = static_cast<double>(masses.size());
  const std::uint64_t P = gap_points(K);
  std::vector<double> gaps(masses.size());
  parallel_for_index(masses.size(), [&](std::size_t c) {
    const double q = masses[c] * cells;
    double worst = 0.0;
    for_each_grid_point(cell_box(c, M, K), P, [&](std::span<const double> x) {
      worst = std::max(worst, std::abs(model.pdf(x) - q));
    });
    gaps[c] = worst;
  });
  return *std::max_element(gaps.begin(), gaps.end());
}

double
sup_bound(std::size_t K, double L)
{
  if (K < 1 || !(L > 0.0))
    throw DomainError("sup bound needs K >= 1 and L > 0");
  const double dk = static_cast<double>(K);
  if (K <= 8) {
    // Direct product while it cannot overflow; exact for K = 1 and square L.
    double v = 1.0;
    for (std::size_t k = 1; k <= K; ++k)
      v *= L * static_cast<double>(k + 1) / 2.0;
    if (std::isfinite(v) && v > 0.0)
      return K == 1 ? std::sqrt(v) : std::pow(v, 1.0 / (dk + 1.0));
  }
  const double log_value = dk * std::log(L) + std::lgamma(dk + 2.0) - dk * std::numbers::ln2;
  return std::exp(log_value / (dk + 1.0));
}

SupBound
check_sup_bound(const DensityModel& model)
{
  const std::size_t K = model.dim();
  require_low_dim(K);
  if (!model.lipschitz())
    throw DomainError("model '" + model.name() + "' has no Lipschitz constant");
  // 2^j + 1 points per axis put the box center on the grid.
  const std::uint64_t per_axis = K == 1 ? 4097 : (K == 2 ? 1025 : 129);
  SupBound out;
  for_each_grid_point(model.support(), per_axis, [&](std::span<const double> x) {
    out.sup_p = std::max(out.sup_p, model.pdf(x));
  });
  out.bound = sup_bound(K, *model.lipschitz());
  return out;
}

Inequality
check_xlogx_gap(double x, double y)
{
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0) || !std::isfinite(y))
    throw DomainError("x ln x gap needs x in [0,1] and y >= 0");
  const double a = std::abs(x - y);
  // A few ulps of slack so that y = x + alpha computed in floating point
  // still counts as the boundary case.
  if (a > alpha_const() * (1.0 + 1e-14))
    throw DomainError("x ln x gap needs |x - y| <= alpha, got " + std::to_string(a));
  return { std::abs(neg_xlogx(x) - neg_xlogx(y)), neg_xlogx(a) };
}

XlogxScan
scan_xlogx_gap(std::size_t pairs, std::uint64_t seed)
{
  CounterRng rng(seed);
  const double alpha = alpha_const();
  XlogxScan out;
  out.pairs = pairs;
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs; ++i) {
    const double x = rng.uniform();
    const double a = i % 16 == 15 ? alpha : alpha * rng.uniform();
    double y = rng.uniform() < 0.5 ? x - a : x + a;
    if (y < 0.0)
      y = x + a;
    const Inequality g = check_xlogx_gap(x, y);
    out.max_excess = std::max(out.max_excess, g.lhs - g.rhs);
  }
  return out;
}

ContinuityCheck
entropy_continuity_gap(const DensityModel& p, const DensityModel& q, double eps, double A, double tol)
{
  if (!(eps > 0.0) || !(A > 0.0))
    throw DomainError("entropy continuity needs eps > 0 and A > 0");
  const QuadratureResult hp = numeric_entropy(p, tol);
  const QuadratureResult hq = numeric_entropy(q, tol);
  ContinuityCheck out;
  out.bound = { std::abs(hp.value - hq.value), eps * std::log(A / eps) };
  out.quad_error = hp.est_error + hq.est_error;
  return out;
}

ContinuityCheck
check_entropy_continuity(const DensityModel& p, const DensityModel& q, double eps, double A, double tol)
{
  if (p.dim() != q.dim())
    throw DomainError("entropy continuity needs densities of equal dimension");
  require_low_dim(p.dim());
  if (!(eps > 0.0) || !(A > 0.0))
    throw DomainError("entropy continuity needs eps > 0 and A > 0");
  if (eps / A > alpha_const())
    throw DomainError("entropy continuity needs eps / A <= alpha, got " + std::to_string(eps / A));
  Box both = p.support();
  for (std::size_t k = 0; k < both.dim(); ++k) {
    both.lo[k] = std::min(both.lo[k], q.support().lo[k]);
    both.hi[k] = std::max(both.hi[k], q.support().hi[k]);
  }
  const std::uint64_t per_axis = p.dim() == 1 ? 1025 : (p.dim() == 2 ? 257 : 65);
  const double slack = 1.0 + 1e-9;
  for_each_grid_point(both, per_axis, [&](std::span<const double> x) {
    const double px = p.pdf(x);
    if (px > A * slack)
      throw DomainError("entropy continuity: p exceeds A on the check grid");
    if (std::abs(px - q.pdf(x)) > eps * slack)
      throw DomainError("entropy continuity: |p - q| exceeds eps on the check grid");
  });
  return entropy_continuity_gap(p, q, eps, A, tol);
}

Inequality
check_cell_lipschitz_integral(const DensityModel& model, std::uint64_t M)
{
  const std::size_t K = model.dim();
  require_low_dim(K);
  require_unit_support(model);
  if (!model.lipschitz())
    throw DomainError("model '" + model.name() + "' has no Lipschitz constant");
  const std::uint64_t cells = checked_pow(M, K, std::uint64_t{ 1 } << 20);
  if (cells > (std::uint64_t{ 1 } << 20))
    throw DomainError("M^K exceeds the cell limit of 2^20");
  const std::uint64_t S = subgrid_points(K);
  std::vector<double> worst(static_cast<std::size_t>(cells), 0.0);
  parallel_for_index(worst.size(), [&](std::size_t c) {
    const Box cell = cell_box(c, M, K);
    std::vector<std::vector<double>> anchors;
    for (std::uint64_t corner = 0; corner < (std::uint64_t{ 1 } << K); ++corner) {
      std::vector<double> t(K);
      for (std::size_t k = 0; k < K; ++k)
        t[k] = (corner >> k) & 1 ? cell.hi[k] : cell.lo[k];
      anchors.push_back(std::move(t));
    }
    std::vector<double> center(K);
    for (std::size_t k = 0; k < K; ++k)
      center[k] = 0.5 * (cell.lo[k] + cell.hi[k]);
    anchors.push_back(std::move(center));
    for (const auto& t0 : anchors) {
      const double p0 = model.pdf(t0);
      const double v = cell_integral(cell, S, [&](std::span<const double> x) { return std::abs(model.pdf(x) - p0); });
      worst[c] = std::max(worst[c], v);
    }
  });
  const double h = 1.0 / static_cast<double>(M);
  const double rhs = std::pow(h, static_cast<double>(K) + 1.0) * *model.lipschitz() * static_cast<double>(K) / 2.0;
  return { *std::max_element(worst.begin(), worst.end()), rhs };
}

double
max_lipschitz_ratio(const DensityModel& model, std::size_t pairs, std::uint64_t seed)
{
  const std::size_t K = model.dim();
  const Box& box = model.support();
  CounterRng rng(seed);
  std::vector<double> x(K), y(K);
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    // Separation scale log-uniform in [1e-4, 1] of the box side.
    const double scale = std::pow(10.0, -4.0 * rng.uniform());
    double dist = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double side = box.hi[k] - box.lo[k];
      x[k] = box.lo[k] + side * rng.uniform();
      y[k] = std::clamp(x[k] + side * scale * (2.0 * rng.uniform() - 1.0), box.lo[k], box.hi[k]);
      dist += std::abs(x[k] - y[k]);
    }
    if (dist > 0.0)
      worst = std::max(worst, std::abs(model.pdf(x) - model.pdf(y)) / dist);
  }
  return worst;
}

double
ks_statistic(std::span<const double> values, const std::function<double(double)>& cdf)
{
  if (values.empty())
    throw EmptySampleError("KS statistic of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    d = std::max({ d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F });
  }
  return d;
}

double
exact_discrete_entropy(std::span<const double> pmf)
{
  if (pmf.empty())
    throw DomainError("entropy of an empty probability vector");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw DomainError("probability vector has a negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw DomainError("probability vector sums to " + std::to_string(total) + ", not 1");
  double h = 0.0;
  for (double p : pmf)
    h += neg_xlogx(p);
  return h;
}

double
expected_plugin_entropy_enum(std::span<const double> pmf, std::uint64_t N)
{
  exact_discrete_entropy(pmf); // normalization check
  if (pmf.size() > 5 || N > 10 || N < 1)
    throw DomainError("enumeration is limited to alphabets <= 5 and 1 <= N <= 10");
  const std::size_t m = pmf.size();
  std::vector<double> factorial(N + 1, 1.0);
  for (std::uint64_t i = 1; i <= N; ++i)
    factorial[i] = factorial[i - 1] * static_cast<double>(i);
  const double n = static_cast<double>(N);

  std::vector<std::uint64_t> counts(m, 0);
  double expectation = 0.0;
  // Recursive enumeration of all count vectors summing to N.
  auto visit = [&](auto&& self, std::size_t letter, std::uint64_t remaining) -> void {
    if (letter + 1 == m) {
      counts[letter] = remaining;
      double prob = factorial[N];
      double h = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        prob *= std::pow(pmf[j], static_cast<double>(counts[j])) / factorial[counts[j]];
        h += neg_xlogx(static_cast<double>(counts[j]) / n);
      }
      expectation += prob * h;
      return;
    }
    for (std::uint64_t c = 0; c <= remaining; ++c) {
      counts[letter] = c;
      self(self, letter + 1, remaining - c);
    }
  };
  visit(visit, 0, N);
  return expectation;
}

double
trapezoid_entropy(double c, double tol)
{
  return numeric_entropy(trapezoid_density(c), tol).value;
}

double
kl_true_divergence(double a, double k)
{
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("KL divergence needs a > 0");
  if (!(k >= 0.0) || !std::isfinite(k))
    throw DomainError("KL divergence needs k >= 0");
  if (k == 0.0)
    return 0.0;
  const double p_neg = -std::expm1(-a);
  const double q_neg = -std::expm1(-a - k * std::exp(a));
  return k + p_neg * (std::log(p_neg) - std::log(q_neg));
}

} // namespace entrobound::oracle
