#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace entrobound {

enum class Command
{
  estimate,
  bound,
  optimize_m,
  mi_estimate,
  coverage,
  prop1_demo,
  mi_demo,
  kl_demo,
  verify_lemmas
};

std::string_view command_name(Command c);
Command parse_command(std::string_view name);

/// One experiment, mirroring the command-line flags one to one.
struct ExperimentConfig
{
  Command command = Command::estimate;
  std::string density = "tent";  //!< built-in density when no input is given
  std::string input;             //!< sample file
  std::string format = "csv";    //!< csv | f64le
  std::string box;               //!< "lo1,hi1,...": rescale input from this box
  std::size_t K = 1;
  std::size_t K1 = 0;            //!< x dimension for mi-estimate (default K/2)
  std::optional<double> L;
  std::optional<std::uint64_t> M;
  std::uint64_t N = 100000;
  double delta = 0.05;
  double C = 1.0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string output;            //!< CSV path; stdout when empty
  std::string estimator_cmd;     //!< external estimator for the demos
  double tol = 1e-5;             //!< quadrature tolerance
  std::uint64_t pairs = 1000000; //!< random pairs for the x ln x check

  //! Flat key=value pairs using the long flag names.
  std::map<std::string, std::string> to_kv() const;
  static ExperimentConfig from_kv(const std::map<std::string, std::string>& kv);
  //! Applies every key of kv over this config.
  void apply(const std::map<std::string, std::string>& kv);

  //! Throws DomainError / ValidityError exactly where the modules would.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

//! Parses "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_kv_text(std::string_view text);
std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path);
std::string format_kv(const std::map<std::string, std::string>& kv);

/// Executes the experiment. Writes the CSV to config.output (plus a
/// ".meta" sidecar) or to `out`. Returns 0 on success, 2 on a domain or
/// validity error, 1 on an I/O error; errors print one line to `err`.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

//! Library version string.
std::string_view version();

} // namespace entrobound
