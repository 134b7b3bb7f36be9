#include "entrobound/experiment.hpp"

#include "entrobound/bounds.hpp"
#include "entrobound/densities.hpp"
#include "entrobound/errors.hpp"
#include "entrobound/estimators.hpp"
#include "entrobound/histogram.hpp"
#include "entrobound/io.hpp"
#include "entrobound/oracle.hpp"
#include "entrobound/parallel.hpp"
#include "entrobound/rng.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

#ifndef ENTROBOUND_VERSION
#define ENTROBOUND_VERSION "0.0.0"
#endif

namespace entrobound {

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 9> kCommands{ {
  { Command::estimate, "estimate" },
  { Command::bound, "bound" },
  { Command::optimize_m, "optimize-m" },
  { Command::mi_estimate, "mi-estimate" },
  { Command::coverage, "coverage" },
  { Command::prop1_demo, "prop1-demo" },
  { Command::mi_demo, "mi-demo" },
  { Command::kl_demo, "kl-demo" },
  { Command::verify_lemmas, "verify-lemmas" },
} };

using io::format_double;

std::string
fmt(std::uint64_t v)
{
  return std::to_string(v);
}

template<class T>
T
parse_unsigned(const std::string& key, const std::string& text)
{
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DomainError("--" + key + " expects a non-negative integer, got '" + text + "'");
  return static_cast<T>(v);
}

double
parse_real(const std::string& key, const std::string& text)
{
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw DomainError("--" + key + " expects a finite number, got '" + text + "'");
  return v;
}

Box
parse_box(const std::string& text, std::size_t K)
{
  std::vector<double> v;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    v.push_back(parse_real("box", std::string(rest.substr(0, comma))));
    if (comma == std::string_view::npos)
      break;
    rest.remove_prefix(comma + 1);
  }
  if (v.size() != 2 * K)
    throw DomainError("--box needs 2K = " + std::to_string(2 * K) + " numbers lo1,hi1,...");
  Box box{ std::vector<double>(K), std::vector<double>(K) };
  for (std::size_t k = 0; k < K; ++k) {
    box.lo[k] = v[2 * k];
    box.hi[k] = v[2 * k + 1];
    if (!(box.hi[k] > box.lo[k]))
      throw DomainError("--box side " + std::to_string(k + 1) + " is empty");
  }
  return box;
}

DensityModel
builtin_density(const std::string& name, std::size_t K)
{
  if (name == "tent")
    return tent_density(K);
  if (name == "uniform")
    return uniform_density(K);
  throw DomainError("unknown density '" + name + "' (expected tent or uniform)");
}

double
effective_L(const ExperimentConfig& c)
{
  if (c.L)
    return *c.L;
  const DensityModel model = builtin_density(c.density, c.K);
  if (!model.lipschitz())
    throw DomainError("density '" + c.density + "' has no Lipschitz constant; pass --l");
  return *model.lipschitz();
}

std::size_t
effective_K1(const ExperimentConfig& c)
{
  return c.K1 ? c.K1 : c.K / 2;
}

// Samples for estimation: from --input (rescaled from --box if given) or
// drawn from the built-in density. Returns the Lipschitz constant that
// applies to the returned samples and the entropy offset.
struct Prepared
{
  SampleSet samples;
  double L = 0.0;
  double offset = 0.0;
};

Prepared
prepare_samples(const ExperimentConfig& c)
{
  Prepared p;
  if (c.input.empty()) {
    p.samples = builtin_density(c.density, c.K).sample(c.N, c.seed);
    p.L = effective_L(c);
  } else {
    if (!c.L)
      throw DomainError("--input needs an explicit --l");
    p.samples = io::ingest(c.input, io::parse_format(c.format), c.K);
    p.L = *c.L;
  }
  if (!c.box.empty()) {
    Rescaled r = affine_rescale(p.samples, parse_box(c.box, c.K), p.L);
    p.samples = std::move(r.samples);
    p.L = r.lipschitz;
    p.offset = r.entropy_offset;
  }
  return p;
}

std::vector<std::string>
bound_fields(const ConfidenceBound& b)
{
  return { format_double(b.quant_bias), format_double(b.stat_dev), format_double(b.emp_bias),
           format_double(b.total) };
}

io::CsvTable
run_estimate(const ExperimentConfig& c)
{
  const Prepared p = prepare_samples(c);
  const EstimateReport r = estimate_entropy_certified(p.samples, p.L, c.delta, c.M, c.seed);
  io::CsvTable t({ "estimate", "total_bound", "quant_bias", "stat_dev", "emp_bias", "M", "N" });
  t.add({ format_double(r.estimate + p.offset), format_double(r.bound.total), format_double(r.bound.quant_bias),
          format_double(r.bound.stat_dev), format_double(r.bound.emp_bias), fmt(r.params.M), fmt(r.params.N) });
  return t;
}

io::CsvTable
run_bound(const ExperimentConfig& c)
{
  BoundParams params{ c.K, effective_L(c), *c.M, c.N, c.delta };
  const ConfidenceBound b = total_bound(params);
  io::CsvTable t({ "K", "L", "M", "N", "delta", "quant_bias", "stat_dev", "emp_bias", "total" });
  std::vector<std::string> row{ fmt(params.K), format_double(params.L), fmt(params.M), fmt(params.N),
                                format_double(params.delta) };
  for (auto& f : bound_fields(b))
    row.push_back(std::move(f));
  t.add(std::move(row));
  return t;
}

io::CsvTable
run_optimize_m(const ExperimentConfig& c)
{
  const double L = effective_L(c);
  const OptimizedM best = optimize_M(c.K, L, c.N, c.delta);
  io::CsvTable t({ "K", "L", "N", "delta", "M", "M_min", "M_cap", "quant_bias", "stat_dev", "emp_bias", "total" });
  std::vector<std::string> row{ fmt(c.K),     format_double(L),           fmt(c.N),
                                format_double(c.delta), fmt(best.M), fmt(min_valid_M(c.K, L)),
                                fmt(optimize_M_cap(c.K, L, c.N)) };
  for (auto& f : bound_fields(best.bound))
    row.push_back(std::move(f));
  t.add(std::move(row));
  return t;
}

io::CsvTable
run_mi_estimate(const ExperimentConfig& c)
{
  const Prepared p = prepare_samples(c);
  const EstimateReport r = estimate_mi_certified(p.samples, effective_K1(c), p.L, c.delta, c.seed);
  io::CsvTable t({ "estimate", "total_bound", "quant_bias", "stat_dev", "emp_bias", "h_x", "h_y", "h_xy", "M_x",
                   "M_y", "M_xy", "N" });
  t.add({ format_double(r.estimate), format_double(r.bound.total), format_double(r.bound.quant_bias),
          format_double(r.bound.stat_dev), format_double(r.bound.emp_bias),
          format_double(r.components[0].estimate), format_double(r.components[1].estimate),
          format_double(r.components[2].estimate), fmt(r.components[0].params.M),
          fmt(r.components[1].params.M), fmt(r.components[2].params.M), fmt(r.params.N) });
  return t;
}

io::CsvTable
run_coverage(const ExperimentConfig& c)
{
  const DensityModel model = builtin_density(c.density, c.K);
  const double truth = *model.analytic_entropy();
  const double L = effective_L(c);
  const std::vector<EstimateReport> reports = ordered_parallel_map<EstimateReport>(c.trials, [&](std::size_t t) {
    const std::uint64_t s = split_seed(c.seed, t);
    return estimate_entropy_certified(model.sample(c.N, s), L, c.delta, c.M, s);
  });
  io::CsvTable t({ "trial", "seed", "estimate", "truth", "abs_err", "bound", "covered", "coverage" });
  std::size_t covered = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double err = std::abs(reports[i].estimate - truth);
    const bool ok = err <= reports[i].bound.total;
    covered += ok ? 1 : 0;
    t.add({ fmt(i), fmt(reports[i].seed), format_double(reports[i].estimate), format_double(truth),
            format_double(err), format_double(reports[i].bound.total), ok ? "1" : "0", "" });
  }
  t.add({ "summary", "", "", format_double(truth), "", "", fmt(covered),
          format_double(static_cast<double>(covered) / static_cast<double>(c.trials)) });
  return t;
}

io::CsvTable
demo_table(const DemoReport& r, const std::function<bool(double)>& failed)
{
  io::CsvTable t({ "trial", "estimate", "true_value", "calibrated_b", "epsilon", "a", "failed", "failure_fraction" });
  for (std::size_t i = 0; i < r.estimates.size(); ++i)
    t.add({ fmt(i), format_double(r.estimates[i]), format_double(r.true_value), format_double(r.calibrated_b),
            format_double(r.epsilon), format_double(r.a), failed(r.estimates[i]) ? "1" : "0", "" });
  t.add({ "summary", "", format_double(r.true_value), format_double(r.calibrated_b), format_double(r.epsilon),
          format_double(r.a), "", format_double(r.failure_fraction) });
  return t;
}

DemoConfig
demo_config(const ExperimentConfig& c)
{
  DemoConfig d;
  d.C = c.C;
  d.delta = c.delta;
  d.N = c.N;
  d.trials = c.trials;
  d.seed = c.seed;
  d.K = c.K;
  if (c.L)
    d.assumed_L = *c.L;
  if (!c.estimator_cmd.empty())
    d.estimator = external_estimator(c.estimator_cmd);
  return d;
}

io::CsvTable
run_verify_lemmas(const ExperimentConfig& c)
{
  const std::size_t K = c.K;
  const DensityModel tent = tent_density(K);
  const double L = *tent.lipschitz();
  const double dk = static_cast<double>(K);
  io::CsvTable t({ "lemma", "K", "M", "lhs", "rhs", "applicable", "holds" });
  auto row = [&](const std::string& lemma, const std::string& M, double lhs, double rhs, bool applicable,
                 bool holds) {
    t.add({ lemma, fmt(K), M, format_double(lhs), format_double(rhs), applicable ? "1" : "0", holds ? "1" : "0" });
  };

  const oracle::SupBound sup = oracle::check_sup_bound(tent);
  row("sup_bound", "", sup.sup_p, sup.bound, true, sup.sup_p <= sup.bound * (1.0 + 1e-9));

  const std::vector<std::uint64_t> steps = c.M ? std::vector<std::uint64_t>{ *c.M }
                                               : std::vector<std::uint64_t>{ 8, 16, 32 };
  for (std::uint64_t M : steps) {
    const std::string m = fmt(M);
    const double eps = L * dk / (2.0 * static_cast<double>(M));
    const double gap = oracle::check_density_gap(tent, M);
    row("density_gap", m, gap, eps, true, gap <= eps * (1.0 + 1e-9));

    const oracle::Inequality cell = oracle::check_cell_lipschitz_integral(tent, M);
    row("cell_lipschitz_integral", m, cell.lhs, cell.rhs, true, cell.holds(cell.rhs * 1e-9));

    const DensityModel q = oracle::quantized_companion(tent, M);
    const bool applicable = M >= min_valid_M(K, L);
    const oracle::ContinuityCheck cont = applicable
                                           ? oracle::check_entropy_continuity(tent, q, eps, sup.bound, c.tol)
                                           : oracle::entropy_continuity_gap(tent, q, eps, sup.bound, c.tol);
    row("entropy_continuity", m, cont.bound.lhs, cont.bound.rhs, applicable, cont.bound.holds(2.0 * c.tol));

    // H(cell masses) = h(q) + K ln M.
    const double discrete = oracle::exact_discrete_entropy(oracle::cell_masses(tent, M));
    const double via_q = oracle::numeric_entropy(q, c.tol).value + dk * std::log(static_cast<double>(M));
    row("quantized_identity", m, std::abs(discrete - via_q), c.tol, true, std::abs(discrete - via_q) <= c.tol);
  }

  const oracle::XlogxScan scan = oracle::scan_xlogx_gap(c.pairs, c.seed);
  row("xlogx_gap", "", scan.max_excess, 0.0, true, scan.max_excess <= 1e-15);

  const std::array<double, 3> pmf{ 0.5, 0.3, 0.2 };
  const double H = oracle::exact_discrete_entropy(pmf);
  const double EH = oracle::expected_plugin_entropy_enum(pmf, 5);
  const double bias = discrete_entropy_bounds(3, 5, 1.0).bias;
  row("discrete_bias", "", std::abs(H - EH), bias, true, std::abs(H - EH) <= bias);
  return t;
}

io::CsvTable
dispatch(const ExperimentConfig& c)
{
  switch (c.command) {
    case Command::estimate:
      return run_estimate(c);
    case Command::bound:
      return run_bound(c);
    case Command::optimize_m:
      return run_optimize_m(c);
    case Command::mi_estimate:
      return run_mi_estimate(c);
    case Command::coverage:
      return run_coverage(c);
    case Command::prop1_demo: {
      const DemoReport r = prop1_demo(demo_config(c));
      return demo_table(r, [&](double v) { return !(std::abs(v - r.true_value) <= r.C); });
    }
    case Command::mi_demo: {
      const DemoReport r = mi_adversary_demo(demo_config(c));
      return demo_table(r, [&](double v) { return v <= r.calibrated_b; });
    }
    case Command::kl_demo: {
      const DemoReport r = kl_demo(demo_config(c));
      return demo_table(r, [&](double v) { return v <= r.calibrated_b; });
    }
    case Command::verify_lemmas:
      return run_verify_lemmas(c);
  }
  throw DomainError("unhandled command");
}

std::string
one_line(std::string s)
{
  for (char& ch : s)
    if (ch == '\n' || ch == '\r')
      ch = ' ';
  return s;
}

std::string
utc_timestamp(std::chrono::system_clock::time_point tp)
{
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace

std::string_view
command_name(Command c)
{
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c)
      return name;
  return "unknown";
}

Command
parse_command(std::string_view name)
{
  for (const auto& [cmd, n] : kCommands)
    if (n == name)
      return cmd;
  throw DomainError("unknown command '" + std::string(name) + "'");
}

std::map<std::string, std::string>
ExperimentConfig::to_kv() const
{
  std::map<std::string, std::string> kv{
    { "command", std::string(command_name(command)) },
    { "density", density },
    { "input", input },
    { "format", format },
    { "box", box },
    { "k", fmt(K) },
    { "k1", fmt(K1) },
    { "n", fmt(N) },
    { "delta", format_double(delta) },
    { "c", format_double(C) },
    { "trials", fmt(trials) },
    { "seed", fmt(seed) },
    { "out", output },
    { "estimator", estimator_cmd },
    { "tol", format_double(tol) },
    { "pairs", fmt(pairs) },
  };
  if (L)
    kv["l"] = format_double(*L);
  if (M)
    kv["m"] = fmt(*M);
  return kv;
}

ExperimentConfig
ExperimentConfig::from_kv(const std::map<std::string, std::string>& kv)
{
  ExperimentConfig c;
  c.apply(kv);
  return c;
}

void
ExperimentConfig::apply(const std::map<std::string, std::string>& kv)
{
  for (const auto& [key, value] : kv) {
    if (key == "command")
      command = parse_command(value);
    else if (key == "density")
      density = value;
    else if (key == "input")
      input = value;
    else if (key == "format")
      format = value;
    else if (key == "box")
      box = value;
    else if (key == "k")
      K = parse_unsigned<std::size_t>(key, value);
    else if (key == "k1")
      K1 = parse_unsigned<std::size_t>(key, value);
    else if (key == "l")
      L = value.empty() ? std::nullopt : std::optional<double>(parse_real(key, value));
    else if (key == "m")
      M = value.empty() ? std::nullopt : std::optional<std::uint64_t>(parse_unsigned<std::uint64_t>(key, value));
    else if (key == "n")
      N = parse_unsigned<std::uint64_t>(key, value);
    else if (key == "delta")
      delta = parse_real(key, value);
    else if (key == "c")
      C = parse_real(key, value);
    else if (key == "trials")
      trials = parse_unsigned<std::size_t>(key, value);
    else if (key == "seed")
      seed = parse_unsigned<std::uint64_t>(key, value);
    else if (key == "out")
      output = value;
    else if (key == "estimator")
      estimator_cmd = value;
    else if (key == "tol")
      tol = parse_real(key, value);
    else if (key == "pairs")
      pairs = parse_unsigned<std::uint64_t>(key, value);
    else
      throw DomainError("unknown configuration key '" + key + "'");
  }
}

void
ExperimentConfig::validate() const
{
  if (K < 1)
    throw DomainError("--k must be >= 1");
  if (L && !(*L > 0.0))
    throw DomainError("--l must be positive");
  if (M && *M < 1)
    throw DomainError("--m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("--delta must lie in (0, 1)");
  if (!(tol > 0.0))
    throw DomainError("--tol must be positive");
  io::parse_format(format);
  if (!box.empty())
    parse_box(box, K);
  const bool sampled = input.empty();
  if (sampled || command == Command::coverage)
    builtin_density(density, K);

  switch (command) {
    case Command::estimate:
    case Command::mi_estimate:
    case Command::coverage: {
      if (sampled && N < 1)
        throw DomainError("--n must be >= 1");
      if (!sampled && !L)
        throw DomainError("--input needs an explicit --l");
      if (sampled)
        effective_L(*this);
      if (command == Command::mi_estimate) {
        if (K < 2)
          throw DomainError("mi-estimate needs --k >= 2");
        if (effective_K1(*this) < 1 || effective_K1(*this) >= K)
          throw DomainError("--k1 must lie in [1, K-1]");
        if (M)
          throw DomainError("mi-estimate chooses M per term; drop --m");
      }
      if (command == Command::coverage) {
        if (trials < 1)
          throw DomainError("--trials must be >= 1");
        if (!builtin_density(density, K).analytic_entropy())
          throw DomainError("density '" + density + "' has no analytic entropy");
      }
      // A box is applied after ingestion, so M can only be checked against
      // the constant that holds on the rescaled data.
      if (M && box.empty()) {
        const double l = sampled ? effective_L(*this) : *L;
        if (*M < min_valid_M(K, l))
          throw ValidityError("M = " + std::to_string(*M) + " is below the minimum valid M = " +
                              std::to_string(min_valid_M(K, l)));
      }
      break;
    }
    case Command::bound: {
      if (!M)
        throw DomainError("bound needs --m");
      BoundParams p{ K, effective_L(*this), *M, N, delta };
      p.validate();
      if (!p.valid_for_theorem())
        throw ValidityError("M = " + std::to_string(*M) + " is below the minimum valid M = " +
                            std::to_string(min_valid_M(K, p.L)));
      break;
    }
    case Command::optimize_m:
      if (N < 2)
        throw DomainError("optimize-m needs --n >= 2");
      effective_L(*this);
      break;
    case Command::prop1_demo:
    case Command::mi_demo:
    case Command::kl_demo:
      if (!(C > 0.0))
        throw DomainError("--c must be positive");
      if (N < 2)
        throw DomainError("demos need --n >= 2");
      if (trials < 10)
        throw DomainError("demos need --trials >= 10");
      break;
    case Command::verify_lemmas:
      if (K > 3)
        throw DomainError("verify-lemmas supports --k 1 to 3");
      if (pairs < 1)
        throw DomainError("--pairs must be >= 1");
      break;
  }
}

std::map<std::string, std::string>
parse_kv_text(std::string_view text)
{
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
      return std::string_view{};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty())
      throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

std::map<std::string, std::string>
read_kv_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_kv_text(text);
}

std::string
format_kv(const std::map<std::string, std::string>& kv)
{
  std::string out;
  for (const auto& [k, v] : kv)
    out += k + " = " + v + "\n";
  return out;
}

int
run(const ExperimentConfig& config, std::ostream& out, std::ostream& err)
{
  try {
    config.validate();
    const auto started = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();
    const io::CsvTable table = dispatch(config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (config.output.empty()) {
      table.write(out);
      return 0;
    }
    {
      std::ofstream f(config.output, std::ios::binary);
      if (!f)
        throw IoError("cannot open " + config.output + " for writing");
      table.write(f);
      if (!f)
        throw IoError("cannot write " + config.output);
    }
    std::ofstream meta(config.output + ".meta", std::ios::binary);
    if (!meta)
      throw IoError("cannot open " + config.output + ".meta for writing");
    meta << format_kv(config.to_kv()) << "version = " << version() << "\n"
         << "started = " << utc_timestamp(started) << "\n"
         << "wall_seconds = " << format_double(seconds) << "\n";
    if (!meta)
      throw IoError("cannot write " + config.output + ".meta");
    return 0;
  } catch (const IoError& e) {
    err << "error kind=" << e.kind() << " msg=" << one_line(e.what()) << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error kind=" << e.kind() << " msg=" << one_line(e.what()) << "\n";
    return 2;
  }
}

std::string_view
version()
{
  return ENTROBOUND_VERSION;
}

} // namespace entrobound
