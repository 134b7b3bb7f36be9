#pragma once

// Closed-form arithmetic of the finite-sample confidence bound for the
// histogram differential-entropy estimator. All quantities are in nats.
//
// For an L-Lipschitz density (l1 norm) on [0,1]^K, N samples, M bins per
// axis with M >= min_valid_M(K, L), the estimate misses the true entropy by
// at most quant_bias + stat_dev + emp_bias with probability > 1 - delta.

#include <cstddef>
#include <cstdint>

namespace entrobound {

//! Parameters of the confidence bound.
struct BoundParams
{
  std::size_t K = 1;   //!< dimension
  double L = 1.0;      //!< Lipschitz constant w.r.t. the l1 norm
  std::uint64_t M = 1; //!< quantization steps per axis
  std::uint64_t N = 1; //!< sample count
  double delta = 0.05; //!< error probability

  //! Throws DomainError unless K, M, N >= 1, L > 0 and 0 < delta < 1.
  void validate() const;
  //! True iff M >= min_valid_M(K, L).
  bool valid_for_theorem() const;

  friend bool operator==(const BoundParams&, const BoundParams&) = default;
};

//! The three error terms and their sum.
struct ConfidenceBound
{
  double quant_bias = 0.0; //!< quantization of the density
  double stat_dev = 0.0;   //!< fluctuation of the plug-in entropy
  double emp_bias = 0.0;   //!< bias of the plug-in entropy
  double total = 0.0;

  static ConfidenceBound from_terms(double quant_bias, double stat_dev, double emp_bias)
  {
    return { quant_bias, stat_dev, emp_bias, quant_bias + stat_dev + emp_bias };
  }
};

//! (sqrt(e^2 + 4) - e) / (2e), about 0.12075.
double alpha_const();

//! (1/K) (2 (K+1)! / L)^(1/(K+1)).
double eta(std::size_t K, double L);

//! Smallest M with M >= 1 / (alpha * eta(K, L)).
std::uint64_t min_valid_M(std::size_t K, double L);

//! (L K / 2M) ln(M eta(K, L)); throws ValidityError if M < min_valid_M(K, L).
double quantization_bias(std::size_t K, double L, std::uint64_t M);

//! sqrt((2/N) ln(2/delta)) ln N, for 0 < delta < 1.
double statistical_deviation(std::uint64_t N, double delta);

//! ln(1 + (M^K - 1)/N), finite for any K and M.
double empirical_bias(std::size_t K, std::uint64_t M, std::uint64_t N);

//! Throws ValidityError if !params.valid_for_theorem().
ConfidenceBound total_bound(const BoundParams& params);

struct OptimizedM
{
  std::uint64_t M = 0;
  ConfidenceBound bound;
};

/// Bin count minimizing total_bound over [min_valid_M, M_cap] with
/// M_cap = max(min_valid_M, ceil((10 N)^(1/K))).
///
/// Ranges longer than 4096 are scanned on a geometric grid and the best
/// grid point is refined by unit steps while the bound improves. Ties go to
/// the smaller M. Requires N >= 2.
OptimizedM optimize_M(std::size_t K, double L, std::uint64_t N, double delta);

//! Upper end of the optimize_M search range.
std::uint64_t optimize_M_cap(std::size_t K, double L, std::uint64_t N);

struct DiscreteEntropyBounds
{
  double bias = 0.0;      //!< |H - E[H_hat]| <= ln(1 + (M-1)/N)
  double deviation = 0.0; //!< |H_hat - E[H_hat]| w.p. > 1 - delta
};

//! Bias and deviation bounds for the plug-in entropy of an M-letter law;
//! here delta may equal 1.
DiscreteEntropyBounds discrete_entropy_bounds(std::uint64_t alphabet, std::uint64_t N, double delta);

} // namespace entrobound
