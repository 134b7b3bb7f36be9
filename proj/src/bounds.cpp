#include "entrobound/bounds.hpp"

#include "entrobound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace entrobound {

namespace {

void
require_dim(std::size_t K)
{
  if (K < 1)
    throw DomainError("dimension K must be >= 1");
}

void
require_lipschitz(double L)
{
  if (!(L > 0.0) || !std::isfinite(L))
    throw DomainError("Lipschitz constant L must be positive and finite, got " + std::to_string(L));
}

} // namespace

void
BoundParams::validate() const
{
  require_dim(K);
  require_lipschitz(L);
  if (M < 1)
    throw DomainError("M must be >= 1");
  if (N < 1)
    throw DomainError("N must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("delta must lie in (0, 1), got " + std::to_string(delta));
}

bool
BoundParams::valid_for_theorem() const
{
  return M >= min_valid_M(K, L);
}

double
alpha_const()
{
  constexpr double e = std::numbers::e;
  return (std::sqrt(e * e + 4.0) - e) / (2.0 * e);
}

double
eta(std::size_t K, double L)
{
  require_dim(K);
  require_lipschitz(L);
  const double k1 = static_cast<double>(K) + 1.0;
  if (K <= 20) {
    double f = 1.0;
    for (std::size_t i = 2; i <= K + 1; ++i)
      f *= static_cast<double>(i);
    return std::pow(2.0 * f / L, 1.0 / k1) / static_cast<double>(K);
  }
  // (K+1)! overflows integer types; use log-gamma.
  const double log_inner = std::numbers::ln2 + std::lgamma(k1 + 1.0) - std::log(L);
  return std::exp(log_inner / k1) / static_cast<double>(K);
}

std::uint64_t
min_valid_M(std::size_t K, double L)
{
  const double threshold = 1.0 / (alpha_const() * eta(K, L));
  const double m = std::ceil(threshold);
  if (!(m < 1.8e19))
    throw DomainError("minimum bin count overflows for L = " + std::to_string(L));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
}

double
quantization_bias(std::size_t K, double L, std::uint64_t M)
{
  const std::uint64_t m_min = min_valid_M(K, L);
  if (M < m_min)
    throw ValidityError("M = " + std::to_string(M) + " is below the minimum valid M = " +
                        std::to_string(m_min) + " for K = " + std::to_string(K) +
                        ", L = " + std::to_string(L));
  const double m = static_cast<double>(M);
  return L * static_cast<double>(K) / (2.0 * m) * std::log(m * eta(K, L));
}

double
statistical_deviation(std::uint64_t N, double delta)
{
  if (N < 1)
    throw DomainError("N must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("delta must lie in (0, 1), got " + std::to_string(delta));
  const double n = static_cast<double>(N);
  return std::sqrt(2.0 / n * std::log(2.0 / delta)) * std::log(n);
}

double
empirical_bias(std::size_t K, std::uint64_t M, std::uint64_t N)
{
  require_dim(K);
  if (M < 1 || N < 1)
    throw DomainError("M and N must be >= 1");
  if (M == 1)
    return 0.0;
  const double n = static_cast<double>(N);
  const double log_mk = static_cast<double>(K) * std::log(static_cast<double>(M));
  if (log_mk <= 700.0) {
    // M^K - 1 without cancellation when M^K is close to 1.
    const double mk_minus_1 = std::expm1(log_mk);
    const double exact = std::pow(static_cast<double>(M), static_cast<double>(K));
    const double numer = exact <= 9007199254740992.0 ? exact - 1.0 : mk_minus_1;
    return std::log1p(numer / n);
  }
  return log_mk - std::log(n) + std::log1p((n - 1.0) * std::exp(-log_mk));
}

ConfidenceBound
total_bound(const BoundParams& params)
{
  params.validate();
  if (!params.valid_for_theorem())
    throw ValidityError("M = " + std::to_string(params.M) + " is below the minimum valid M = " +
                        std::to_string(min_valid_M(params.K, params.L)));
  return ConfidenceBound::from_terms(quantization_bias(params.K, params.L, params.M),
                                     statistical_deviation(params.N, params.delta),
                                     empirical_bias(params.K, params.M, params.N));
}

std::uint64_t
optimize_M_cap(std::size_t K, double L, std::uint64_t N)
{
  const std::uint64_t m_min = min_valid_M(K, L);
  const double cap = std::ceil(std::pow(10.0 * static_cast<double>(N), 1.0 / static_cast<double>(K)));
  // Bin coordinates are stored as 32-bit integers.
  const double limited = std::min(cap, 4294967295.0);
  return std::max(m_min, static_cast<std::uint64_t>(limited));
}

OptimizedM
optimize_M(std::size_t K, double L, std::uint64_t N, double delta)
{
  if (N < 2)
    throw DomainError("optimize_M requires N >= 2");
  BoundParams probe{ K, L, 1, N, delta };
  probe.M = min_valid_M(K, L);
  probe.validate();

  const std::uint64_t lo = probe.M;
  const std::uint64_t hi = optimize_M_cap(K, L, N);

  auto objective = [&](std::uint64_t m) {
    BoundParams p = probe;
    p.M = m;
    return total_bound(p);
  };

  constexpr std::uint64_t kMaxCandidates = 4096;
  std::vector<std::uint64_t> candidates;
  if (hi - lo + 1 <= kMaxCandidates) {
    for (std::uint64_t m = lo; m <= hi; ++m)
      candidates.push_back(m);
  } else {
    const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
    for (std::uint64_t i = 0; i < kMaxCandidates; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(kMaxCandidates - 1);
      auto m = static_cast<std::uint64_t>(std::llround(static_cast<double>(lo) * std::exp(ratio * t)));
      candidates.push_back(std::clamp(m, lo, hi));
    }
    candidates.front() = lo;
    candidates.back() = hi;
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }

  OptimizedM best{ candidates.front(), objective(candidates.front()) };
  for (std::uint64_t m : candidates) {
    const ConfidenceBound b = objective(m);
    if (b.total < best.bound.total)
      best = { m, b };
  }

  // Unit-step descent from the best grid point, in both directions.
  for (;;) {
    bool moved = false;
    if (best.M > lo) {
      const ConfidenceBound b = objective(best.M - 1);
      if (b.total <= best.bound.total) {
        best = { best.M - 1, b };
        moved = true;
      }
    }
    if (!moved && best.M < hi) {
      const ConfidenceBound b = objective(best.M + 1);
      if (b.total < best.bound.total) {
        best = { best.M + 1, b };
        moved = true;
      }
    }
    if (!moved)
      break;
  }
  return best;
}

DiscreteEntropyBounds
discrete_entropy_bounds(std::uint64_t alphabet, std::uint64_t N, double delta)
{
  if (alphabet < 1 || N < 1)
    throw DomainError("alphabet size and N must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0))
    throw DomainError("delta must lie in (0, 1], got " + std::to_string(delta));
  const double n = static_cast<double>(N);
  DiscreteEntropyBounds out;
  out.bias = std::log1p((static_cast<double>(alphabet) - 1.0) / n);
  out.deviation = std::sqrt(2.0 / n * std::log(2.0 / delta)) * std::log(n);
  return out;
}

} // namespace entrobound
