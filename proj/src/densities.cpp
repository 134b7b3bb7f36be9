#include "entrobound/densities.hpp"

#include "entrobound/errors.hpp"
#include "entrobound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace entrobound {

namespace {

// Entropy of the one-dimensional tent: 1/2 - ln 2.
constexpr double kTentEntropy = 0.5 - std::numbers::ln2;

double
tent_pdf_1d(double t)
{
  if (t < 0.0 || t > 1.0)
    return 0.0;
  return t <= 0.5 ? 4.0 * t : 4.0 * (1.0 - t);
}

double
tent_cdf_1d(double t)
{
  if (t <= 0.0)
    return 0.0;
  if (t <= 0.5)
    return 2.0 * t * t;
  if (t < 1.0)
    return 1.0 - 2.0 * (1.0 - t) * (1.0 - t);
  return 1.0;
}

double
tent_quantile_1d(double u)
{
  return u <= 0.5 ? std::sqrt(u / 2.0) : 1.0 - std::sqrt((1.0 - u) / 2.0);
}

void
require_dim(std::size_t K)
{
  if (K < 1)
    throw DomainError("dimension K must be >= 1");
}

// Independent coordinates drawn by inverse CDF.
DensityModel::Sampler
product_sampler(std::size_t K, double (*quantile)(double), double scale)
{
  return [K, quantile, scale](std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> data(n * K);
    for (double& v : data)
      v = scale * quantile(rng.uniform());
    return SampleSet(K, std::move(data));
  };
}

double
identity_quantile(double u)
{
  return u;
}

} // namespace

DensityModel::DensityModel(Parts parts)
  : parts_(std::move(parts))
{
  if (parts_.support.dim() == 0 || parts_.support.lo.size() != parts_.support.hi.size())
    throw DomainError("density support must be a non-empty box");
  for (std::size_t k = 0; k < parts_.support.dim(); ++k)
    if (!(parts_.support.hi[k] >= parts_.support.lo[k]))
      throw DomainError("density support box has hi < lo");
  if (!parts_.pdf || !parts_.sampler)
    throw DomainError("density model needs a pdf and a sampler");
}

double
DensityModel::pdf(std::span<const double> x) const
{
  if (x.size() != dim())
    throw DomainError("pdf evaluated at a point of the wrong dimension");
  if (!parts_.support.contains(x))
    return 0.0;
  return parts_.pdf(x);
}

double
DensityModel::cdf(double x) const
{
  if (!parts_.cdf)
    throw DomainError("model '" + parts_.name + "' has no one-dimensional CDF");
  return parts_.cdf(x);
}

SampleSet
DensityModel::sample(std::size_t n, std::uint64_t seed) const
{
  return parts_.sampler(n, seed);
}

double
binary_entropy(double e)
{
  if (!(e >= 0.0 && e <= 1.0))
    throw DomainError("binary entropy needs a probability, got " + std::to_string(e));
  if (e == 0.0 || e == 1.0)
    return 0.0;
  return -e * std::log(e) - (1.0 - e) * std::log1p(-e);
}

DensityModel
tent_density(std::size_t K)
{
  return scaled_tent_density(K, 0.0);
}

DensityModel
scaled_tent_density(std::size_t K, double log_scale)
{
  require_dim(K);
  if (!(log_scale <= 0.0) || !std::isfinite(log_scale))
    throw DomainError("tent scale must satisfy 0 < s <= 1");
  const double s = std::exp(log_scale);
  const double dk = static_cast<double>(K);
  // s^-K and the l1 Lipschitz constant 2^(K+1) / s^(K+1).
  const double inv_volume = std::exp(-dk * log_scale);
  const double L = std::ldexp(std::exp(-(dk + 1.0) * log_scale), static_cast<int>(K) + 1);

  DensityModel::Parts parts;
  parts.name = log_scale == 0.0 ? "tent" : "scaled_tent";
  parts.support = { std::vector<double>(K, 0.0), std::vector<double>(K, s) };
  if (std::isfinite(L))
    parts.lipschitz = L;
  parts.entropy = dk * kTentEntropy + dk * log_scale;
  if (s > 0.0) {
    parts.pdf = [s, inv_volume](std::span<const double> x) {
      double p = 1.0;
      for (double v : x)
        p *= tent_pdf_1d(v / s);
      return p == 0.0 ? 0.0 : p * inv_volume;
    };
  } else {
    // Scale below the smallest double: the support collapses to the origin.
    parts.pdf = [](std::span<const double> x) {
      for (double v : x)
        if (v != 0.0)
          return 0.0;
      return std::numeric_limits<double>::infinity();
    };
  }
  parts.sampler = product_sampler(K, tent_quantile_1d, s);
  if (K == 1)
    parts.cdf = [s](double x) { return s > 0.0 ? tent_cdf_1d(x / s) : (x >= 0.0 ? 1.0 : 0.0); };
  return DensityModel(std::move(parts));
}

double
low_entropy_alt_log_scale(std::size_t K, double target_h)
{
  require_dim(K);
  if (!std::isfinite(target_h))
    throw DomainError("target entropy must be finite");
  const double dk = static_cast<double>(K);
  const double h_max = dk * kTentEntropy;
  if (target_h > h_max + 1e-12 * std::max(1.0, std::abs(h_max)))
    throw DomainError("target entropy " + std::to_string(target_h) +
                      " exceeds the tent maximum " + std::to_string(h_max));
  return std::min(0.0, target_h / dk - kTentEntropy);
}

DensityModel
low_entropy_alt(std::size_t K, double target_h)
{
  return scaled_tent_density(K, low_entropy_alt_log_scale(K, target_h));
}

DensityModel
uniform_density(std::size_t K)
{
  require_dim(K);
  DensityModel::Parts parts;
  parts.name = "uniform";
  parts.support = Box::unit(K);
  parts.pdf = [](std::span<const double>) { return 1.0; };
  parts.entropy = 0.0;
  parts.sampler = product_sampler(K, identity_quantile, 1.0);
  if (K == 1)
    parts.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  return DensityModel(std::move(parts));
}

double
trapezoid_entropy_closed_form(double c)
{
  if (!(c > 0.0 && c <= 1.0))
    throw DomainError("trapezoid width c must lie in (0, 1]");
  // Each linear ramp of width c contributes c/4; the flat part contributes 0.
  return c / 2.0;
}

DensityModel
trapezoid_density(double c)
{
  const double h = trapezoid_entropy_closed_form(c);
  DensityModel::Parts parts;
  parts.name = "trapezoid";
  parts.support = { { 0.0 }, { 1.0 + c } };
  parts.lipschitz = 1.0 / c;
  parts.entropy = h;
  parts.pdf = [c](std::span<const double> x) {
    const double t = x[0];
    if (t < c)
      return std::max(t, 0.0) / c;
    if (t <= 1.0)
      return 1.0;
    return std::max(1.0 + c - t, 0.0) / c;
  };
  parts.sampler = [c](std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> data(n);
    for (double& v : data) {
      const double x = rng.uniform();
      v = x + c * rng.uniform();
    }
    return SampleSet(1, std::move(data));
  };
  parts.cdf = [c](double t) {
    if (t <= 0.0)
      return 0.0;
    if (t < c)
      return t * t / (2.0 * c);
    if (t <= 1.0)
      return t - c / 2.0;
    if (t < 1.0 + c)
      return 1.0 - (1.0 + c - t) * (1.0 + c - t) / (2.0 * c);
    return 1.0;
  };
  return DensityModel(std::move(parts));
}

DensityModel
prop1_mixture(const ContaminationSpec& spec)
{
  const double eps = spec.epsilon;
  if (!(eps >= 0.0 && eps < 1.0))
    throw DomainError("contamination probability must lie in [0, 1)");
  const std::size_t K = spec.base.dim();
  if (spec.alt.dim() != K)
    throw DomainError("base and alternative densities differ in dimension");
  for (std::size_t k = 0; k < K; ++k)
    if (spec.base.support().lo[k] < 0.0 || spec.alt.support().lo[k] < 0.0)
      throw DomainError("base and alternative must live on the positive orthant");
  if (!spec.base.analytic_entropy() || !spec.alt.analytic_entropy())
    throw DomainError("contamination needs analytic entropies of both pieces");
  const double h_base = *spec.base.analytic_entropy();
  const double h_alt = *spec.alt.analytic_entropy();
  if (!(spec.a >= 0.0) || std::abs(h_alt - h_base) < spec.a * (1.0 - 1e-12))
    throw DomainError("entropy gap |h_alt - h_base| = " + std::to_string(std::abs(h_alt - h_base)) +
                      " is below a = " + std::to_string(spec.a));

  DensityModel::Parts parts;
  parts.name = "prop1_mixture";
  Box box{ std::vector<double>(K), std::vector<double>(K) };
  for (std::size_t k = 0; k < K; ++k) {
    box.lo[k] = std::min(spec.base.support().lo[k], -spec.alt.support().hi[k]);
    box.hi[k] = std::max(spec.base.support().hi[k], -spec.alt.support().lo[k]);
  }
  parts.support = box;
  if (eps == 0.0) {
    parts.entropy = h_base;
    parts.lipschitz = spec.base.lipschitz();
  } else {
    parts.entropy = binary_entropy(eps) + (1.0 - eps) * h_base + eps * h_alt;
    if (spec.base.lipschitz() && spec.alt.lipschitz())
      parts.lipschitz = (1.0 - eps) * *spec.base.lipschitz() + eps * *spec.alt.lipschitz();
  }

  DensityModel base = spec.base;
  DensityModel alt = spec.alt;
  parts.pdf = [base, alt, eps](std::span<const double> x) {
    std::vector<double> reflected(x.begin(), x.end());
    for (double& v : reflected)
      v = -v;
    double p = (1.0 - eps) * base.pdf(x);
    if (eps > 0.0)
      p += eps * alt.pdf(reflected);
    return p;
  };
  parts.sampler = [base, alt, eps, K](std::size_t n, std::uint64_t seed) {
    CounterRng coin(split_seed(seed, 0));
    std::vector<char> from_base(n);
    std::size_t n_alt = 0;
    for (std::size_t i = 0; i < n; ++i) {
      from_base[i] = coin.uniform() >= eps;
      n_alt += from_base[i] ? 0 : 1;
    }
    const SampleSet xb = base.sample(n - n_alt, split_seed(seed, 1));
    const SampleSet xa = alt.sample(n_alt, split_seed(seed, 2));
    SampleSet out(K);
    out.reserve(n);
    std::size_t ib = 0, ia = 0;
    std::vector<double> point(K);
    for (std::size_t i = 0; i < n; ++i) {
      if (from_base[i]) {
        out.push_back(xb.row(ib++));
      } else {
        auto r = xa.row(ia++);
        for (std::size_t k = 0; k < K; ++k)
          point[k] = -r[k];
        out.push_back(point);
      }
    }
    return out;
  };
  if (K == 1 && base.has_cdf() && alt.has_cdf())
    parts.cdf = [base, alt, eps](double x) {
      return (1.0 - eps) * base.cdf(x) + eps * (1.0 - alt.cdf(-x));
    };
  return DensityModel(std::move(parts));
}

MiAdversary::MiAdversary(double a, double epsilon)
  : a_(a)
  , epsilon_(epsilon)
{
  if (!(a >= 0.0) || !std::isfinite(a))
    throw DomainError("MI adversary needs a >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("MI adversary needs epsilon in (0, 1)");
}

double
MiAdversary::true_mi() const
{
  // I = h(y) - h(y|x) = eps h(x + w) - eps ln(e^-a), the binary entropies cancel.
  return epsilon_ * (a_ + std::exp(-a_) / 2.0);
}

Box
MiAdversary::support()
{
  return { { 0.0, -2.0 }, { 1.0, 1.0 } };
}

SampleSet
MiAdversary::sample(std::size_t n, std::uint64_t seed) const
{
  CounterRng rx(split_seed(seed, 0));
  CounterRng rz(split_seed(seed, 1));
  CounterRng rq(split_seed(seed, 2));
  CounterRng rw(split_seed(seed, 3));
  const double c = std::exp(-a_);
  std::vector<double> data(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rx.uniform();
    const double z = rz.uniform();
    const bool q = rq.uniform() >= epsilon_;
    const double w = c * rw.uniform();
    data[2 * i] = x;
    data[2 * i + 1] = q ? z : -(x + w);
  }
  return SampleSet(2, std::move(data));
}

SampleSet
MiAdversary::sample_independent(std::size_t n, std::uint64_t seed) const
{
  CounterRng rx(split_seed(seed, 0));
  CounterRng rz(split_seed(seed, 1));
  std::vector<double> data(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    data[2 * i] = rx.uniform();
    data[2 * i + 1] = rz.uniform();
  }
  return SampleSet(2, std::move(data));
}

MiAdversary
mi_adversary(double a, double epsilon)
{
  return MiAdversary(a, epsilon);
}

DiscreteMiAdversary::DiscreteMiAdversary(std::vector<std::uint32_t> codebook, std::uint32_t alphabet)
  : codebook_(std::move(codebook))
  , alphabet_(alphabet)
{
  if (alphabet_ < 2)
    throw DomainError("discrete MI adversary needs an alphabet of at least 2 letters");
  if (codebook_.empty())
    throw DomainError("codebook must have at least one bin");
  for (std::uint32_t v : codebook_)
    if (v < 1 || v > alphabet_)
      throw DomainError("codebook letter " + std::to_string(v) + " outside {1.." +
                        std::to_string(alphabet_) + "}");
}

double
DiscreteMiAdversary::true_mi() const
{
  std::vector<std::uint64_t> freq(alphabet_, 0);
  for (std::uint32_t v : codebook_)
    ++freq[v - 1];
  const double m = static_cast<double>(codebook_.size());
  double h = 0.0;
  for (std::uint64_t f : freq)
    if (f > 0) {
      const double p = static_cast<double>(f) / m;
      h -= p * std::log(p);
    }
  return h;
}

SampleSet
DiscreteMiAdversary::sample(std::size_t n, std::uint64_t seed) const
{
  CounterRng rng(seed);
  const auto M = static_cast<std::uint64_t>(codebook_.size());
  std::vector<double> data(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const auto z = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(x * static_cast<double>(M))), M - 1);
    data[2 * i] = x;
    data[2 * i + 1] = static_cast<double>(codebook_[z]);
  }
  return SampleSet(2, std::move(data));
}

DiscreteMiAdversary
discrete_mi_adversary(std::uint64_t bins, std::uint32_t alphabet, std::uint64_t seed)
{
  if (bins < 1)
    throw DomainError("discrete MI adversary needs at least one bin");
  if (alphabet < 2)
    throw DomainError("discrete MI adversary needs an alphabet of at least 2 letters");
  CounterRng rng(seed);
  std::vector<std::uint32_t> codebook(bins);
  for (auto& v : codebook)
    v = 1 + static_cast<std::uint32_t>(rng.below(alphabet));
  return DiscreteMiAdversary(std::move(codebook), alphabet);
}

double
collision_probability(std::uint64_t M, std::uint64_t N)
{
  if (M < 1)
    throw DomainError("collision probability needs M >= 1");
  if (N > M)
    return 1.0;
  const double m = static_cast<double>(M);
  double log_no_collision = 0.0;
  for (std::uint64_t i = 1; i < N; ++i)
    log_no_collision += std::log1p(-static_cast<double>(i) / m);
  return -std::expm1(log_no_collision);
}

double
collision_probability_bound(std::uint64_t M, std::uint64_t N)
{
  if (M < 1)
    throw DomainError("collision probability needs M >= 1");
  if (N > M || N == 0)
    return N == 0 ? 0.0 : 1.0;
  const double m = static_cast<double>(M);
  const double n = static_cast<double>(N);
  return -std::expm1(n * std::log1p(-(n - 1.0) / m));
}

namespace {

DensityModel
step_pair_member(std::string name, double log_pos)
{
  // Mass e^log_pos on [0,1), the rest on [-1,0).
  const double pos = std::exp(log_pos);
  const double neg = -std::expm1(log_pos);
  DensityModel::Parts parts;
  parts.name = std::move(name);
  parts.support = { { -1.0 }, { 1.0 } };
  parts.entropy = binary_entropy(pos);
  parts.pdf = [pos, neg](std::span<const double> x) {
    if (x[0] < 0.0)
      return neg;
    return x[0] < 1.0 ? pos : 0.0;
  };
  parts.sampler = [pos](std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> data(n);
    for (double& v : data) {
      const bool positive = rng.uniform() < pos;
      const double u = rng.uniform();
      v = positive ? u : u - 1.0;
    }
    return SampleSet(1, std::move(data));
  };
  parts.cdf = [pos, neg](double x) {
    if (x <= -1.0)
      return 0.0;
    if (x < 0.0)
      return (x + 1.0) * neg;
    if (x < 1.0)
      return neg + x * pos;
    return 1.0;
  };
  return DensityModel(std::move(parts));
}

} // namespace

std::pair<DensityModel, DensityModel>
kl_step_pair(double a, double k)
{
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("KL step pair needs a > 0");
  if (!(k > 0.0) || !std::isfinite(k))
    throw DomainError("KL step pair needs k > 0");
  const double b = k * std::exp(a);
  return { step_pair_member("kl_p", -a), step_pair_member("kl_q", -a - b) };
}

Rescaled
affine_rescale(const SampleSet& samples, const Box& box, double lipschitz)
{
  const std::size_t K = samples.dim();
  if (box.dim() != K || box.hi.size() != K)
    throw DomainError("rescaling box has the wrong dimension");
  std::vector<double> side(K);
  Rescaled out;
  double max_side = 0.0, volume = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    side[k] = box.hi[k] - box.lo[k];
    if (!(side[k] > 0.0) || !std::isfinite(side[k]))
      throw DomainError("rescaling box needs positive finite side lengths");
    max_side = std::max(max_side, side[k]);
    volume *= side[k];
    out.entropy_offset += std::log(side[k]);
  }
  out.lipschitz = lipschitz * max_side * volume;
  std::vector<double> data(samples.data().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto x = samples.row(i);
    if (!box.contains(x))
      throw OutOfSupportError("sample " + std::to_string(i) + " lies outside the rescaling box");
    for (std::size_t k = 0; k < K; ++k)
      data[i * K + k] = std::clamp((x[k] - box.lo[k]) / side[k], 0.0, 1.0);
  }
  out.samples = SampleSet(K, std::move(data));
  return out;
}

} // namespace entrobound
