#include "entrobound/estimators.hpp"

#include "entrobound/densities.hpp"
#include "entrobound/errors.hpp"
#include "entrobound/histogram.hpp"
#include "entrobound/io.hpp"
#include "entrobound/oracle.hpp"
#include "entrobound/parallel.hpp"
#include "entrobound/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <sys/wait.h>

namespace entrobound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void
validate_demo(const DemoConfig& c)
{
  if (!(c.C > 0.0) || !std::isfinite(c.C))
    throw DomainError("demo needs C > 0");
  if (!(c.delta > 0.0 && c.delta < 1.0))
    throw DomainError("demo needs 0 < delta < 1");
  if (c.N < 2)
    throw DomainError("demo needs N >= 2");
  if (c.trials < 10)
    throw DomainError("demo needs at least 10 trials");
}

// Runs `estimator` on `trials` independent draws, trial t seeded with
// split_seed(stream, t). Exceptions inside the estimator count as NaN.
std::vector<double>
run_trials(std::size_t trials, std::uint64_t stream, const SampleEstimator& estimator,
           const std::function<SampleSet(std::uint64_t)>& draw)
{
  return ordered_parallel_map<double>(trials, [&](std::size_t t) {
    const SampleSet s = draw(split_seed(stream, t));
    try {
      return estimator(s);
    } catch (const Error&) {
      return kNaN;
    }
  });
}

double
entropy_of_counts(const std::map<std::uint64_t, std::uint64_t>& counts, double n)
{
  double h = 0.0;
  for (const auto& [key, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

} // namespace

EstimateReport
estimate_entropy_certified(const SampleSet& samples, double L, double delta,
                           std::optional<std::uint64_t> M, std::uint64_t seed)
{
  if (samples.empty())
    throw EmptySampleError("no samples to estimate from");
  BoundParams params{ samples.dim(), L, 1, samples.size(), delta };
  params.M = min_valid_M(params.K, L);
  params.validate();
  if (M) {
    params.M = *M;
    params.validate();
    if (!params.valid_for_theorem())
      throw ValidityError("M = " + std::to_string(*M) + " is below the minimum valid M = " +
                          std::to_string(min_valid_M(params.K, L)));
  } else if (params.N >= 2) {
    params.M = optimize_M(params.K, L, params.N, delta).M;
  }
  EstimateReport r;
  r.estimate = estimate_differential_entropy(samples, params.M);
  r.bound = total_bound(params);
  r.params = params;
  r.seed = seed;
  return r;
}

EstimateReport
estimate_mi_certified(const SampleSet& joint, std::size_t dim_x, double L, double delta,
                      std::uint64_t seed)
{
  const std::size_t K = joint.dim();
  if (dim_x < 1 || dim_x >= K)
    throw DomainError("x dimension must lie in [1, K-1], got " + std::to_string(dim_x));
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("delta must lie in (0, 1)");
  const double share = delta / 3.0;
  EstimateReport hx = estimate_entropy_certified(joint.columns(0, dim_x), L, share, std::nullopt, seed);
  EstimateReport hy = estimate_entropy_certified(joint.columns(dim_x, K - dim_x), L, share, std::nullopt, seed);
  EstimateReport hxy = estimate_entropy_certified(joint, L, share, std::nullopt, seed);

  EstimateReport r;
  r.kind = EstimateKind::mutual_information;
  r.estimate = hx.estimate + hy.estimate - hxy.estimate;
  const ConfidenceBound& a = hx.bound;
  const ConfidenceBound& b = hy.bound;
  const ConfidenceBound& c = hxy.bound;
  r.bound = ConfidenceBound::from_terms(a.quant_bias + b.quant_bias + c.quant_bias,
                                        a.stat_dev + b.stat_dev + c.stat_dev,
                                        a.emp_bias + b.emp_bias + c.emp_bias);
  r.bound.total = a.total + b.total + c.total; // the radius is the sum of the three radii
  r.params = hxy.params;
  r.params.delta = delta;
  r.seed = seed;
  r.components = { std::move(hx), std::move(hy), std::move(hxy) };
  return r;
}

SampleEstimator
external_estimator(std::string command)
{
  return [command = std::move(command)](const SampleSet& samples) {
    char path[] = "/tmp/entrobound-XXXXXX";
    const int fd = ::mkstemp(path);
    if (fd < 0)
      throw IoError("cannot create a temporary file for the external estimator");
    ::close(fd);
    {
      std::ofstream out(path, std::ios::binary);
      io::write_csv_samples(out, samples);
      if (!out)
        throw IoError(std::string("cannot write ") + path);
    }
    const std::string shell = command + " < '" + path + "'";
    FILE* pipe = ::popen(shell.c_str(), "r");
    if (!pipe) {
      std::remove(path);
      throw IoError("cannot start external estimator: " + command);
    }
    std::string text;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe))
      text += buf;
    const int status = ::pclose(pipe);
    std::remove(path);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
      return kNaN;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
      return kNaN;
    const auto last = text.find_last_not_of(" \t\r\n");
    double v = kNaN;
    const char* b = text.data() + first;
    const char* e = text.data() + last + 1;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
      return kNaN;
    return v;
  };
}

double
empirical_quantile(std::vector<double> values, double q)
{
  if (!(q >= 0.0 && q <= 1.0))
    throw DomainError("quantile level must lie in [0, 1]");
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty())
    throw EmptySampleError("quantile of no finite values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q * n)));
  return values[std::min(rank, values.size()) - 1];
}

SampleEstimator
histogram_entropy_victim(std::size_t K, double L, std::size_t N, double delta)
{
  Box box{ std::vector<double>(K, -1.0), std::vector<double>(K, 1.0) };
  // The Lipschitz constant after mapping [-1,1]^K onto the unit cube.
  const double rescaled_L = L * 2.0 * std::pow(2.0, static_cast<double>(K));
  const std::uint64_t M = optimize_M(K, rescaled_L, N, delta).M;
  return [box, M](const SampleSet& samples) {
    const Rescaled r = affine_rescale(samples, box, 1.0);
    return estimate_differential_entropy(r.samples, M) + r.entropy_offset;
  };
}

SampleEstimator
histogram_mi_victim(double L, double delta)
{
  return [L, delta](const SampleSet& samples) {
    const Rescaled r = affine_rescale(samples, MiAdversary::support(), L);
    // The offsets of h(x) + h(y) and h(x, y) cancel.
    return estimate_mi_certified(r.samples, 1, r.lipschitz, delta).estimate;
  };
}

double
two_cell_kl(const SampleSet& pairs)
{
  if (pairs.dim() != 2)
    throw DomainError("two-cell KL expects rows (x, y)");
  if (pairs.empty())
    throw EmptySampleError("two-cell KL of no samples");
  const double n = static_cast<double>(pairs.size());
  double px = 0.0, qy = 0.0; // mass on [0, 1)
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    px += pairs.row(i)[0] >= 0.0 ? 1.0 : 0.0;
    qy += pairs.row(i)[1] >= 0.0 ? 1.0 : 0.0;
  }
  px /= n;
  qy /= n;
  auto term = [](double p, double q) {
    if (p == 0.0)
      return 0.0;
    if (q == 0.0)
      return std::numeric_limits<double>::infinity();
    return p * std::log(p / q);
  };
  return term(px, qy) + term(1.0 - px, 1.0 - qy);
}

DemoReport
prop1_demo(const DemoConfig& config)
{
  validate_demo(config);
  const std::size_t K = config.K;
  const DensityModel base = tent_density(K);
  const double h_base = *base.analytic_entropy();
  const SampleEstimator estimator =
    config.estimator ? config.estimator
                     : histogram_entropy_victim(K, *base.lipschitz(), config.N, config.delta);

  DemoReport r;
  r.trials = config.trials;
  r.C = config.C;
  r.delta = config.delta;

  const std::vector<double> pilot = run_trials(config.trials, split_seed(config.seed, 0), estimator,
                                               [&](std::uint64_t s) { return base.sample(config.N, s); });
  std::vector<double> deviation(pilot.size());
  std::transform(pilot.begin(), pilot.end(), deviation.begin(), [&](double v) { return std::abs(v - h_base); });
  r.calibrated_b = empirical_quantile(deviation, 1.0 - config.delta / 2.0);

  r.epsilon = config.delta / (2.0 * static_cast<double>(config.N));
  // One nat above the requirement a eps > b + C + ln 2.
  r.a = (r.calibrated_b + config.C + std::numbers::ln2) / r.epsilon + 1.0;
  if (!std::isfinite(r.a))
    throw InfeasibleError("required entropy gap a is not finite (b = " + std::to_string(r.calibrated_b) + ")");
  const DensityModel alt = low_entropy_alt(K, h_base - r.a);
  const DensityModel mixture = prop1_mixture({ base, alt, r.epsilon, r.a });
  r.true_value = *mixture.analytic_entropy();

  r.estimates = run_trials(config.trials, split_seed(config.seed, 1), estimator,
                           [&](std::uint64_t s) { return mixture.sample(config.N, s); });
  const auto failed = std::count_if(r.estimates.begin(), r.estimates.end(), [&](double v) {
    return !(std::abs(v - r.true_value) <= config.C);
  });
  r.failure_fraction = static_cast<double>(failed) / static_cast<double>(config.trials);
  return r;
}

DemoReport
mi_adversary_demo(const DemoConfig& config)
{
  validate_demo(config);
  const SampleEstimator estimator =
    config.estimator ? config.estimator : histogram_mi_victim(config.assumed_L, config.delta);

  DemoReport r;
  r.trials = config.trials;
  r.C = config.C;
  r.delta = config.delta;
  r.epsilon = config.delta / (2.0 * static_cast<double>(config.N));

  const MiAdversary independent(0.0, r.epsilon);
  const std::vector<double> pilot =
    run_trials(config.trials, split_seed(config.seed, 0), estimator,
               [&](std::uint64_t s) { return independent.sample_independent(config.N, s); });
  r.calibrated_b = empirical_quantile(pilot, 1.0 - config.delta / 2.0);

  r.a = std::max(0.0, (r.calibrated_b + config.C) / r.epsilon + 1.0);
  if (!std::isfinite(r.a))
    throw InfeasibleError("required gap a is not finite");
  const MiAdversary adversary(r.a, r.epsilon);
  r.true_value = adversary.true_mi();

  r.estimates = run_trials(config.trials, split_seed(config.seed, 1), estimator,
                           [&](std::uint64_t s) { return adversary.sample(config.N, s); });
  const auto fooled = std::count_if(r.estimates.begin(), r.estimates.end(),
                                    [&](double v) { return v <= r.calibrated_b; });
  r.failure_fraction = static_cast<double>(fooled) / static_cast<double>(config.trials);
  return r;
}

DemoReport
kl_demo(const DemoConfig& config)
{
  validate_demo(config);
  const SampleEstimator estimator = config.estimator ? config.estimator : SampleEstimator(two_cell_kl);
  const std::size_t N = config.N;

  DemoReport r;
  r.trials = config.trials;
  r.C = config.C;
  r.delta = config.delta;

  auto negative_pairs = [N](std::uint64_t s) {
    CounterRng rng(s);
    std::vector<double> data(2 * N);
    for (double& v : data)
      v = -rng.uniform_open();
    return SampleSet(2, std::move(data));
  };
  const std::vector<double> pilot = run_trials(config.trials, split_seed(config.seed, 0), estimator, negative_pairs);
  r.calibrated_b = empirical_quantile(pilot, 1.0 - config.delta / 2.0);

  r.a = std::log(4.0 * static_cast<double>(N) / config.delta);
  const double k = r.calibrated_b + config.C + std::exp(-1.0);
  if (!std::isfinite(k))
    throw InfeasibleError("calibrated threshold is not finite");
  r.epsilon = std::exp(-r.a);
  r.true_value = oracle::kl_true_divergence(r.a, k);
  const auto [p, q] = kl_step_pair(r.a, k);

  r.estimates = run_trials(config.trials, split_seed(config.seed, 1), estimator, [&](std::uint64_t s) {
    const SampleSet x = p.sample(N, split_seed(s, 0));
    const SampleSet y = q.sample(N, split_seed(s, 1));
    std::vector<double> data(2 * N);
    for (std::size_t i = 0; i < N; ++i) {
      data[2 * i] = x.row(i)[0];
      data[2 * i + 1] = y.row(i)[0];
    }
    return SampleSet(2, std::move(data));
  });
  const auto fooled = std::count_if(r.estimates.begin(), r.estimates.end(),
                                    [&](double v) { return v <= r.calibrated_b; });
  r.failure_fraction = static_cast<double>(fooled) / static_cast<double>(config.trials);
  return r;
}

DiscreteMiDemoReport
discrete_mi_demo(std::uint64_t bins, std::uint32_t alphabet, std::size_t N, double delta,
                 std::size_t trials, std::size_t codebooks, std::uint64_t seed)
{
  if (N < 1 || trials < 1 || codebooks < 1)
    throw DomainError("discrete MI demo needs N, trials and codebooks >= 1");
  if (!(delta > 0.0))
    throw DomainError("discrete MI demo needs a positive threshold");
  const auto resolution = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(N))));
  const double n = static_cast<double>(N);

  DiscreteMiDemoReport r;
  for (std::size_t c = 0; c < codebooks; ++c) {
    const DiscreteMiAdversary adversary = discrete_mi_adversary(bins, alphabet, split_seed(seed, 2 * c));
    r.true_mi.push_back(adversary.true_mi());
    const std::vector<double> estimates = ordered_parallel_map<double>(trials, [&](std::size_t t) {
      const SampleSet s = adversary.sample(N, split_seed(split_seed(seed, 2 * c + 1), t));
      std::map<std::uint64_t, std::uint64_t> cx, cy, cxy;
      for (std::size_t i = 0; i < N; ++i) {
        const std::uint64_t bx = quantize_index(s.row(i).first(1), resolution)[0];
        const auto y = static_cast<std::uint64_t>(s.row(i)[1]);
        ++cx[bx];
        ++cy[y];
        ++cxy[bx * (std::uint64_t{ alphabet } + 1) + y];
      }
      return entropy_of_counts(cx, n) + entropy_of_counts(cy, n) - entropy_of_counts(cxy, n);
    });
    const auto below = std::count_if(estimates.begin(), estimates.end(), [&](double v) { return v < delta; });
    r.per_codebook_fraction.push_back(static_cast<double>(below) / static_cast<double>(trials));
  }
  r.averaged_fraction = std::accumulate(r.per_codebook_fraction.begin(), r.per_codebook_fraction.end(), 0.0) /
                        static_cast<double>(codebooks);
  return r;
}

} // namespace entrobound
