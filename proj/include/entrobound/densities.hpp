#pragma once

// Evaluable, sampleable test distributions: Lipschitz densities with known
// entropy and the adversarial mixtures that defeat any entropy, mutual
// information or relative entropy estimator without regularity assumptions.

#include "entrobound/samples.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace entrobound {

/// Immutable density on R^K with bounded support and a seeded sampler.
class DensityModel
{
public:
  using Pdf = std::function<double(std::span<const double>)>;
  using Sampler = std::function<SampleSet(std::size_t n, std::uint64_t seed)>;
  using Cdf = std::function<double(double)>;

  struct Parts
  {
    std::string name;
    Box support;
    std::optional<double> lipschitz; //!< w.r.t. l1, on all of R^K
    Pdf pdf;                         //!< only called inside the support
    std::optional<double> entropy;   //!< analytic differential entropy
    Sampler sampler;
    Cdf cdf; //!< one-dimensional models only; may be empty
  };

  explicit DensityModel(Parts parts);

  const std::string& name() const noexcept { return parts_.name; }
  std::size_t dim() const noexcept { return parts_.support.dim(); }
  const Box& support() const noexcept { return parts_.support; }
  const std::optional<double>& lipschitz() const noexcept { return parts_.lipschitz; }
  const std::optional<double>& analytic_entropy() const noexcept { return parts_.entropy; }
  bool has_cdf() const noexcept { return static_cast<bool>(parts_.cdf); }

  //! Density at x; zero outside the support.
  double pdf(std::span<const double> x) const;
  double cdf(double x) const;
  //! n i.i.d. draws, a pure function of (model, n, seed).
  SampleSet sample(std::size_t n, std::uint64_t seed) const;

private:
  Parts parts_;
};

//! sample(model, N, seed) as a free function.
inline SampleSet
sample(const DensityModel& model, std::size_t n, std::uint64_t seed)
{
  return model.sample(n, seed);
}

//! -e ln e - (1-e) ln(1-e), zero at the endpoints.
double binary_entropy(double e);

/// Product of one-dimensional tents 4t on [0,1/2], 4(1-t) on [1/2,1].
/// L = 2^(K+1), entropy K (1/2 - ln 2).
DensityModel tent_density(std::size_t K);

//! Tent squeezed onto [0, s]^K with s = exp(log_scale) <= 1.
DensityModel scaled_tent_density(std::size_t K, double log_scale);

//! Scaled tent whose entropy equals target_h (<= K (1/2 - ln 2)).
DensityModel low_entropy_alt(std::size_t K, double target_h);

//! Scale s (as ln s) at which the scaled tent has entropy target_h.
double low_entropy_alt_log_scale(std::size_t K, double target_h);

//! Uniform density on [0,1]^K (a step function; no Lipschitz constant).
DensityModel uniform_density(std::size_t K);

//! Density of x + w with x ~ U[0,1], w ~ U[0,c], 0 < c <= 1.
DensityModel trapezoid_density(double c);

//! Closed form of the entropy of trapezoid_density(c): c / 2.
double trapezoid_entropy_closed_form(double c);

//! Mixture q x_base - (1 - q) x_alt with q ~ Bernoulli(1 - epsilon).
struct ContaminationSpec
{
  DensityModel base;
  DensityModel alt;
  double epsilon = 0.0;
  double a = 0.0; //!< required entropy gap |h_alt - h_base|
};

/// Two-piece mixture: base on the positive orthant, alt reflected to the
/// negative one. The pieces are disjoint, so the entropy is exactly
/// H_b(eps) + (1 - eps) h_base + eps h_alt.
DensityModel prop1_mixture(const ContaminationSpec& spec);

/// Pairs (x, y) with y = q z - (1 - q)(x + w), x, z ~ U[0,1],
/// w ~ U[0, e^-a], q ~ Bernoulli(1 - epsilon).
class MiAdversary
{
public:
  MiAdversary(double a, double epsilon);

  double a() const noexcept { return a_; }
  double epsilon() const noexcept { return epsilon_; }
  //! eps (a + h(x + w)); h(x + w) = e^-a / 2.
  double true_mi() const;
  //! a eps.
  double lower_bound() const { return a_ * epsilon_; }
  //! Box containing every draw: [0,1] x [-2, 1].
  static Box support();

  SampleSet sample(std::size_t n, std::uint64_t seed) const;
  //! Independent pairs (x, z), the law of (x, y) given q = 1.
  SampleSet sample_independent(std::size_t n, std::uint64_t seed) const;

private:
  double a_;
  double epsilon_;
};

MiAdversary mi_adversary(double a, double epsilon);

/// y = v[floor(M x)] for a random codebook v over {1..alphabet}^M.
class DiscreteMiAdversary
{
public:
  DiscreteMiAdversary(std::vector<std::uint32_t> codebook, std::uint32_t alphabet);

  const std::vector<std::uint32_t>& codebook() const noexcept { return codebook_; }
  std::uint32_t alphabet() const noexcept { return alphabet_; }
  std::uint64_t bins() const noexcept { return codebook_.size(); }
  //! H(y), exact for the codebook's letter frequencies; y is a function of x.
  double true_mi() const;
  //! Rows (x, y) with y in {1..alphabet} stored as a double.
  SampleSet sample(std::size_t n, std::uint64_t seed) const;

private:
  std::vector<std::uint32_t> codebook_;
  std::uint32_t alphabet_;
};

DiscreteMiAdversary discrete_mi_adversary(std::uint64_t bins, std::uint32_t alphabet, std::uint64_t seed);

//! 1 - M! / (M^N (M-N)!): some two of N uniform draws share one of M bins.
double collision_probability(std::uint64_t M, std::uint64_t N);
//! 1 - ((M - N + 1) / M)^N, an upper bound on collision_probability.
double collision_probability_bound(std::uint64_t M, std::uint64_t N);

/// Step densities on [-1,1): p has mass e^-a on [0,1), q has e^-(a+b)
/// with b = k e^a.
std::pair<DensityModel, DensityModel> kl_step_pair(double a, double k);

struct Rescaled
{
  SampleSet samples;          //!< in [0,1]^K
  double lipschitz = 0.0;     //!< L max_k s_k prod_k s_k
  double entropy_offset = 0.0; //!< sum_k ln s_k; add to estimates on rescaled data
};

/// Maps x_k to (x_k - lo_k) / s_k with s_k = hi_k - lo_k.
///
/// Entropy estimated on the rescaled samples plus entropy_offset estimates
/// the entropy of the original samples. Throws OutOfSupportError for
/// points outside the box.
Rescaled affine_rescale(const SampleSet& samples, const Box& box, double lipschitz);

} // namespace entrobound
