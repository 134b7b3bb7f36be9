#include "entrobound/histogram.hpp"

#include "entrobound/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace entrobound {

namespace {

constexpr std::uint64_t kMaxSteps = std::uint64_t{ 1 } << 32;

void
require_steps(std::uint64_t M)
{
  if (M < 1 || M > kMaxSteps)
    throw DomainError("M must lie in [1, 2^32], got " + std::to_string(M));
}

std::uint32_t
quantize_coordinate(double x, std::uint64_t M, std::size_t row, std::size_t axis)
{
  if (!(x >= 0.0 && x <= 1.0))
    throw OutOfSupportError("sample " + std::to_string(row) + " coordinate " + std::to_string(axis) +
                            " = " + std::to_string(x) + " lies outside [0, 1]");
  const auto bin = static_cast<std::uint64_t>(std::floor(static_cast<double>(M) * x));
  return static_cast<std::uint32_t>(std::min(bin, M - 1));
}

int
compare_rows(const std::uint32_t* a, const std::uint32_t* b, std::size_t K)
{
  for (std::size_t k = 0; k < K; ++k)
    if (a[k] != b[k])
      return a[k] < b[k] ? -1 : 1;
  return 0;
}

} // namespace

BinIndex
quantize_index(std::span<const double> x, std::uint64_t M)
{
  require_steps(M);
  BinIndex out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    out[k] = quantize_coordinate(x[k], M, 0, k);
  return out;
}

SparseHistogram::SparseHistogram(std::size_t K, std::uint64_t M)
  : K_(K)
  , M_(M)
{
  if (K < 1)
    throw DomainError("histogram dimension must be >= 1");
  require_steps(M);
}

std::uint64_t
SparseHistogram::count_of(std::span<const std::uint32_t> bin) const
{
  if (bin.size() != K_)
    throw DomainError("bin index has wrong dimension");
  std::size_t lo = 0, hi = counts_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const int c = compare_rows(keys_.data() + mid * K_, bin.data(), K_);
    if (c == 0)
      return counts_[mid];
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return 0;
}

SparseHistogram
SparseHistogram::merge(const SparseHistogram& other) const
{
  if (other.K_ != K_ || other.M_ != M_)
    throw DomainError("cannot merge histograms over different grids");
  SparseHistogram out(K_, M_);
  out.N_ = N_ + other.N_;
  std::size_t i = 0, j = 0;
  auto take = [&](const SparseHistogram& h, std::size_t idx, std::uint64_t c) {
    out.keys_.insert(out.keys_.end(), h.keys_.begin() + static_cast<std::ptrdiff_t>(idx * K_),
                     h.keys_.begin() + static_cast<std::ptrdiff_t>((idx + 1) * K_));
    out.counts_.push_back(c);
  };
  while (i < size() || j < other.size()) {
    int c;
    if (i == size())
      c = 1;
    else if (j == other.size())
      c = -1;
    else
      c = compare_rows(keys_.data() + i * K_, other.keys_.data() + j * K_, K_);
    if (c < 0) {
      take(*this, i, counts_[i]);
      ++i;
    } else if (c > 0) {
      take(other, j, other.counts_[j]);
      ++j;
    } else {
      take(*this, i, counts_[i] + other.counts_[j]);
      ++i;
      ++j;
    }
  }
  return out;
}

SparseHistogram
build_histogram(const SampleSet& samples, std::uint64_t M)
{
  if (samples.empty())
    throw EmptySampleError("cannot build a histogram from zero samples");
  const std::size_t K = samples.dim();
  const std::size_t N = samples.size();
  SparseHistogram hist(K, M);
  hist.N_ = N;

  const unsigned bits = static_cast<unsigned>(std::bit_width(M - 1));
  if (static_cast<std::size_t>(bits) * K <= 64) {
    // Pack coordinates into one word, axis 0 most significant, so numeric
    // order equals lexicographic order.
    std::vector<std::uint64_t> packed(N);
    for (std::size_t i = 0; i < N; ++i) {
      auto x = samples.row(i);
      std::uint64_t key = 0;
      for (std::size_t k = 0; k < K; ++k) {
        key = bits == 64 ? 0 : key << bits;
        key |= quantize_coordinate(x[k], M, i, k);
      }
      packed[i] = key;
    }
    std::sort(packed.begin(), packed.end());
    const std::uint64_t mask = bits == 64 ? ~std::uint64_t{ 0 } : (std::uint64_t{ 1 } << bits) - 1;
    for (std::size_t i = 0; i < N;) {
      std::size_t j = i + 1;
      while (j < N && packed[j] == packed[i])
        ++j;
      const std::size_t base = hist.keys_.size();
      hist.keys_.resize(base + K);
      std::uint64_t key = packed[i];
      for (std::size_t k = K; k-- > 0;) {
        hist.keys_[base + k] = static_cast<std::uint32_t>(key & mask);
        key = bits >= 64 ? 0 : key >> bits;
      }
      hist.counts_.push_back(j - i);
      i = j;
    }
    return hist;
  }

  std::vector<std::uint32_t> coords(N * K);
  for (std::size_t i = 0; i < N; ++i) {
    auto x = samples.row(i);
    for (std::size_t k = 0; k < K; ++k)
      coords[i * K + k] = quantize_coordinate(x[k], M, i, k);
  }
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return compare_rows(&coords[a * K], &coords[b * K], K) < 0;
  });
  for (std::size_t i = 0; i < N;) {
    std::size_t j = i + 1;
    while (j < N && compare_rows(&coords[order[j] * K], &coords[order[i] * K], K) == 0)
      ++j;
    hist.keys_.insert(hist.keys_.end(), coords.begin() + static_cast<std::ptrdiff_t>(order[i] * K),
                      coords.begin() + static_cast<std::ptrdiff_t>((order[i] + 1) * K));
    hist.counts_.push_back(j - i);
    i = j;
  }
  return hist;
}

double
plugin_entropy(const SparseHistogram& hist)
{
  if (hist.total() == 0)
    throw EmptySampleError("entropy of an empty histogram");
  // Summing over sorted counts makes the result depend only on the multiset
  // of counts, not on bin labels.
  std::vector<std::uint64_t> counts(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i)
    counts[i] = hist.count(i);
  std::sort(counts.begin(), counts.end());
  const double n = static_cast<double>(hist.total());
  double h = 0.0;
  for (std::uint64_t c : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double
estimate_differential_entropy(const SparseHistogram& hist)
{
  const double correction = static_cast<double>(hist.dim()) * std::log(static_cast<double>(hist.steps()));
  return std::clamp(plugin_entropy(hist) - correction, -correction, 0.0);
}

double
estimate_differential_entropy(const SampleSet& samples, std::uint64_t M)
{
  return estimate_differential_entropy(build_histogram(samples, M));
}

} // namespace entrobound
