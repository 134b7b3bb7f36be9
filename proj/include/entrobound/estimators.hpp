#pragma once

#include "entrobound/bounds.hpp"
#include "entrobound/samples.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace entrobound {

enum class EstimateKind
{
  entropy,
  mutual_information
};

/// A point estimate with its confidence radius: with probability at least
/// 1 - delta the true value lies in [estimate - total, estimate + total].
struct EstimateReport
{
  double estimate = 0.0;
  ConfidenceBound bound;
  BoundParams params; //!< joint-space parameters for mutual information
  std::uint64_t seed = 0;
  EstimateKind kind = EstimateKind::entropy;
  //! h(x), h(y), h(x,y) reports for mutual information; empty otherwise.
  std::vector<EstimateReport> components;
};

/// Differential entropy of samples in [0,1]^K drawn from an L-Lipschitz
/// density. Without an explicit M the bound-minimizing M is used (the
/// smallest valid M when N = 1). `seed` is recorded for provenance only.
EstimateReport estimate_entropy_certified(const SampleSet& samples, double L, double delta,
                                          std::optional<std::uint64_t> M = std::nullopt,
                                          std::uint64_t seed = 0);

/// I(x; y) = h(x) + h(y) - h(x, y) for joint rows (x, y) in
/// [0,1]^dim_x x [0,1]^(K - dim_x). Each entropy is certified at delta/3,
/// so the summed radius holds with probability at least 1 - delta.
EstimateReport estimate_mi_certified(const SampleSet& joint, std::size_t dim_x, double L,
                                     double delta, std::uint64_t seed = 0);

//! Any estimator of a scalar from a sample set; NaN marks a failed run.
using SampleEstimator = std::function<double(const SampleSet&)>;

/// Runs `command` through the shell once per call with the rows as CSV on
/// standard input and parses one decimal from its standard output. A
/// nonzero exit status or unparsable output yields NaN.
SampleEstimator external_estimator(std::string command);

struct DemoConfig
{
  double C = 1.0;
  double delta = 0.1;
  std::size_t N = 100;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t K = 1;          //!< dimension (entropy demo only)
  double assumed_L = 1.0;     //!< Lipschitz constant the built-in MI victim assumes
  SampleEstimator estimator;  //!< empty selects the built-in victim
};

/// Outcome of an impossibility demonstration.
///
/// failure_fraction is the fraction of trials in which the estimator was
/// fooled: |estimate - truth| > C for entropy, estimate <= calibrated_b for
/// mutual information and relative entropy.
struct DemoReport
{
  std::size_t trials = 0;
  double failure_fraction = 0.0;
  double C = 0.0;
  double delta = 0.0;
  double calibrated_b = 0.0; //!< pilot (1 - delta/2) quantile
  double true_value = 0.0;
  double epsilon = 0.0;      //!< contamination probability
  double a = 0.0;            //!< adversary's gap parameter
  std::vector<double> estimates;
};

//! Empirical q-quantile (lower order statistic at ceil(q n)); NaNs dropped.
double empirical_quantile(std::vector<double> values, double q);

//! Built-in victim for the entropy demo: histogram estimate on [-1,1]^K.
SampleEstimator histogram_entropy_victim(std::size_t K, double L, std::size_t N, double delta);
//! Built-in victim for the MI demo: certified MI on [0,1] x [-2,1].
SampleEstimator histogram_mi_victim(double L, double delta);
//! Two-cell plug-in KL of rows (x_i, y_i) split at 0.
double two_cell_kl(const SampleSet& pairs);

/// Contaminates a tent with a reflected low-entropy tent of probability
/// delta / (2N) so that the estimate misses the entropy by more than C.
DemoReport prop1_demo(const DemoConfig& config);

//! Mutual information demo: estimates stay below b while I >= b + C.
DemoReport mi_adversary_demo(const DemoConfig& config);

//! Relative entropy demo: estimates stay below c while D >= c + C.
DemoReport kl_demo(const DemoConfig& config);

struct DiscreteMiDemoReport
{
  std::vector<double> per_codebook_fraction; //!< P(estimate < delta) per codebook
  double averaged_fraction = 0.0;            //!< mean over codebooks
  std::vector<double> true_mi;               //!< per codebook
};

/// Continuous x with a discrete y = v[floor(M x)]. The plug-in MI at a
/// resolution of ceil(sqrt(N)) bins rarely reaches delta although y is a
/// function of x.
DiscreteMiDemoReport discrete_mi_demo(std::uint64_t bins, std::uint32_t alphabet, std::size_t N,
                                      double delta, std::size_t trials, std::size_t codebooks,
                                      std::uint64_t seed);

} // namespace entrobound
