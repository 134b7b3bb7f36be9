#pragma once

#include "entrobound/samples.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace entrobound::io {

enum class SampleFormat
{
  csv,
  f64le
};

SampleFormat parse_format(std::string_view name);

/// Reads K-dimensional points.
///
/// csv: one point per line, K comma-separated decimals; a first line whose
/// first token is not numeric is a header. f64le: little-endian doubles,
/// row-major. NaN and infinities are rejected.
SampleSet ingest(const std::filesystem::path& path, SampleFormat format, std::size_t K);

SampleSet parse_csv_samples(std::string_view text, std::size_t K);
SampleSet parse_f64le(std::string_view bytes, std::size_t K);

void emit_f64le(const std::filesystem::path& path, const SampleSet& samples);
void write_csv_samples(std::ostream& out, const SampleSet& samples);

//! Shortest round-trip text, at most 17 significant digits.
std::string format_double(double v);

/// Comma-separated table writer; the header names every column.
class CsvTable
{
public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& add(std::vector<std::string> row);
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  void write(std::ostream& out) const;
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace entrobound::io
