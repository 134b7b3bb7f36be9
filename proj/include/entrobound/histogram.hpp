#pragma once

#include "entrobound/samples.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace entrobound {

//! Per-axis bin coordinates, each in [0, M-1].
using BinIndex = std::vector<std::uint32_t>;

//! Bin of a point in [0,1]^K: min(floor(M x_k), M - 1) per axis.
//! Throws OutOfSupportError for coordinates outside [0,1] (or NaN).
BinIndex quantize_index(std::span<const double> x, std::uint64_t M);

/// Sparse bin counts over the M^K grid.
///
/// Bins are kept in lexicographic order of their coordinates, so two
/// histograms of the same multiset of points are identical regardless of
/// sample order. Only occupied bins are stored.
class SparseHistogram
{
public:
  SparseHistogram(std::size_t K, std::uint64_t M);

  std::size_t dim() const noexcept { return K_; }
  std::uint64_t steps() const noexcept { return M_; }
  std::uint64_t total() const noexcept { return N_; }
  //! Number of occupied bins.
  std::size_t size() const noexcept { return counts_.size(); }

  std::span<const std::uint32_t> key(std::size_t i) const { return { keys_.data() + i * K_, K_ }; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  //! Count of a bin, zero when absent.
  std::uint64_t count_of(std::span<const std::uint32_t> bin) const;

  //! Key-wise sum; both histograms must share K and M.
  SparseHistogram merge(const SparseHistogram& other) const;

  friend bool operator==(const SparseHistogram&, const SparseHistogram&) = default;

private:
  friend SparseHistogram build_histogram(const SampleSet&, std::uint64_t);

  std::size_t K_;
  std::uint64_t M_;
  std::uint64_t N_ = 0;
  std::vector<std::uint32_t> keys_; // size() * K_, lexicographically sorted rows
  std::vector<std::uint64_t> counts_;
};

//! Throws EmptySampleError for no samples, OutOfSupportError as quantize_index.
SparseHistogram build_histogram(const SampleSet& samples, std::uint64_t M);

//! Shannon entropy of the normalized counts (0 ln 0 = 0).
double plugin_entropy(const SparseHistogram& hist);

//! Histogram entropy minus K ln M; always in [-K ln M, 0].
double estimate_differential_entropy(const SampleSet& samples, std::uint64_t M);
double estimate_differential_entropy(const SparseHistogram& hist);

} // namespace entrobound
