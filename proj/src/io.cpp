#include "entrobound/io.hpp"

#include "entrobound/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace entrobound::io {

namespace {

std::string_view
trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool
parse_number(std::string_view token, double& out)
{
  token = trim(token);
  if (!token.empty() && token.front() == '+')
    token.remove_prefix(1);
  if (token.empty())
    return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string
read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad())
    throw IoError("cannot read " + path.string());
  return bytes;
}

void
require_dim(std::size_t K)
{
  if (K < 1)
    throw DomainError("sample dimension must be >= 1");
}

} // namespace

SampleFormat
parse_format(std::string_view name)
{
  if (name == "csv")
    return SampleFormat::csv;
  if (name == "f64le")
    return SampleFormat::f64le;
  throw DomainError("unknown sample format '" + std::string(name) + "' (expected csv or f64le)");
}

SampleSet
parse_csv_samples(std::string_view text, std::size_t K)
{
  require_dim(K);
  SampleSet out(K);
  std::vector<double> point(K);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty())
      continue;

    std::size_t field = 0;
    bool header = false;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view token = line.substr(0, comma);
      if (field >= K)
        throw ParseError("line " + std::to_string(line_no) + ": more than " + std::to_string(K) + " fields");
      double v = 0.0;
      if (!parse_number(token, v)) {
        if (field == 0 && out.empty() && line_no == 1) {
          header = true;
          break;
        }
        throw ParseError("line " + std::to_string(line_no) + ": field " + std::to_string(field + 1) +
                         " '" + std::string(trim(token)) + "' is not a number");
      }
      if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": field " + std::to_string(field + 1) +
                         " is not finite");
      point[field++] = v;
      if (comma == std::string_view::npos)
        break;
      line.remove_prefix(comma + 1);
    }
    if (header)
      continue;
    if (field != K)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(K) + " fields, got " +
                       std::to_string(field));
    out.push_back(point);
  }
  return out;
}

SampleSet
parse_f64le(std::string_view bytes, std::size_t K)
{
  require_dim(K);
  if (bytes.size() % (8 * K) != 0)
    throw ParseError("f64le input of " + std::to_string(bytes.size()) + " bytes is not a multiple of " +
                     std::to_string(8 * K));
  std::vector<double> data(bytes.size() / 8);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint64_t raw;
    std::memcpy(&raw, bytes.data() + 8 * i, 8);
    if constexpr (std::endian::native == std::endian::big)
      raw = __builtin_bswap64(raw);
    data[i] = std::bit_cast<double>(raw);
    if (!std::isfinite(data[i]))
      throw ParseError("f64le value at byte offset " + std::to_string(8 * i) + " is not finite");
  }
  return SampleSet(K, std::move(data));
}

SampleSet
ingest(const std::filesystem::path& path, SampleFormat format, std::size_t K)
{
  const std::string bytes = read_file(path);
  try {
    return format == SampleFormat::csv ? parse_csv_samples(bytes, K) : parse_f64le(bytes, K);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void
emit_f64le(const std::filesystem::path& path, const SampleSet& samples)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  for (double v : samples.data()) {
    auto raw = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big)
      raw = __builtin_bswap64(raw);
    char buf[8];
    std::memcpy(buf, &raw, 8);
    out.write(buf, 8);
  }
  if (!out)
    throw IoError("cannot write " + path.string());
}

void
write_csv_samples(std::ostream& out, const SampleSet& samples)
{
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto row = samples.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k)
        out << ',';
      out << format_double(row[k]);
    }
    out << '\n';
  }
}

std::string
format_double(double v)
{
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvTable::CsvTable(std::vector<std::string> header)
  : header_(std::move(header))
{
  if (header_.empty())
    throw DomainError("a CSV table needs at least one column");
}

CsvTable&
CsvTable::add(std::vector<std::string> row)
{
  if (row.size() != header_.size())
    throw DomainError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                      std::to_string(header_.size()));
  rows_.push_back(std::move(row));
  return *this;
}

void
CsvTable::write(std::ostream& out) const
{
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i)
        out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_)
    line(r);
}

std::string
CsvTable::str() const
{
  std::ostringstream s;
  write(s);
  return s.str();
}

} // namespace entrobound::io
