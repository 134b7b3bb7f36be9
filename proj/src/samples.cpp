#include "entrobound/samples.hpp"

#include "entrobound/errors.hpp"

#include <algorithm>
#include <string>

namespace entrobound {

SampleSet::SampleSet(std::size_t dim, std::vector<double> data)
  : dim_(dim)
  , data_(std::move(data))
{
  if (dim_ == 0 && !data_.empty())
    throw DomainError("sample dimension must be positive");
  if (dim_ != 0 && data_.size() % dim_ != 0)
    throw DomainError("sample data length " + std::to_string(data_.size()) +
                      " is not a multiple of dimension " + std::to_string(dim_));
}

void
SampleSet::push_back(std::span<const double> point)
{
  if (point.size() != dim_)
    throw DomainError("point of dimension " + std::to_string(point.size()) +
                      " pushed into sample set of dimension " + std::to_string(dim_));
  data_.insert(data_.end(), point.begin(), point.end());
}

SampleSet
SampleSet::columns(std::size_t first, std::size_t count) const
{
  if (count == 0 || first + count > dim_)
    throw DomainError("column range out of bounds");
  std::vector<double> out;
  out.reserve(size() * count);
  for (std::size_t i = 0; i < size(); ++i) {
    auto r = row(i).subspan(first, count);
    out.insert(out.end(), r.begin(), r.end());
  }
  return SampleSet(count, std::move(out));
}

SampleSet
SampleSet::concat(const SampleSet& other) const
{
  if (other.dim_ != dim_)
    throw DomainError("cannot concatenate sample sets of different dimension");
  std::vector<double> out = data_;
  out.insert(out.end(), other.data_.begin(), other.data_.end());
  return SampleSet(dim_, std::move(out));
}

double
Box::volume() const
{
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k)
    v *= hi[k] - lo[k];
  return v;
}

bool
Box::contains(std::span<const double> x) const
{
  if (x.size() != lo.size())
    return false;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(x[k] >= lo[k] && x[k] <= hi[k]))
      return false;
  return true;
}

} // namespace entrobound
