#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entrobound {

/// N points in R^K stored row-major.
class SampleSet
{
public:
  SampleSet() = default;
  explicit SampleSet(std::size_t dim)
    : dim_(dim)
  {}
  SampleSet(std::size_t dim, std::vector<double> data);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ ? data_.size() / dim_ : 0; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> row(std::size_t i) const
  {
    return { data_.data() + i * dim_, dim_ };
  }
  std::span<double> row(std::size_t i) { return { data_.data() + i * dim_, dim_ }; }

  void push_back(std::span<const double> point);
  void reserve(std::size_t n) { data_.reserve(n * dim_); }

  //! Columns [first, first + count) of every row.
  SampleSet columns(std::size_t first, std::size_t count) const;
  //! Rows of `this` followed by rows of `other`.
  SampleSet concat(const SampleSet& other) const;

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

//! Axis-aligned box [lo_k, hi_k] per coordinate.
struct Box
{
  std::vector<double> lo;
  std::vector<double> hi;

  static Box unit(std::size_t dim) { return { std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0) }; }
  std::size_t dim() const noexcept { return lo.size(); }
  double volume() const;
  bool contains(std::span<const double> x) const;

  friend bool operator==(const Box&, const Box&) = default;
};

} // namespace entrobound
