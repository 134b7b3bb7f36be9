#pragma once

#include <cstdint>
#include <limits>

namespace entrobound {

//! SplitMix64 finalizer; a bijective avalanche mix of 64 bits.
constexpr std::uint64_t
mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Derives the seed of independent stream `index` from `seed`.
constexpr std::uint64_t
split_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
  return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + mix64(index + 1));
}

/// Counter-based generator: draw i is mix64(key + (i + 1) gamma).
///
/// The whole stream is a pure function of (seed, counter), so generators
/// can be split or jumped without shared state. Satisfies
/// UniformRandomBitGenerator.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) noexcept
    : key_(mix64(seed))
  {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept
  {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept
  {
    return mix64(key_ + (++counter_) * kGamma);
  }

  //! Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept
  {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  //! Uniform double in (0, 1); safe as an argument of log.
  double uniform_open() noexcept
  {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  //! Uniform integer in [0, n) by rejection (unbiased).
  std::uint64_t below(std::uint64_t n) noexcept
  {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r;
    do {
      r = (*this)();
    } while (r >= limit);
    return r % n;
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace entrobound
