// entrobound: certified histogram entropy estimates and the adversarial
// demonstrations, one command per invocation.

#include "entrobound/errors.hpp"
#include "entrobound/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

int
main(int argc, char** argv)
{
  CLI::App app{ "Certified differential entropy estimation" };
  app.set_version_flag("--version", std::string(entrobound::version()));

  std::string command;
  std::string config_path;
  app.add_option("command", command,
                 "estimate | bound | optimize-m | mi-estimate | coverage | prop1-demo | mi-demo | kl-demo | "
                 "verify-lemmas")
    ->required();
  app.add_option("--config", config_path, "key = value file; flags override its entries");

  // Every flag is collected as text and applied through the config parser,
  // so the flag and file paths share one validation.
  const std::vector<std::pair<std::string, std::string>> flags{
    { "density", "built-in density: tent | uniform" },
    { "input", "sample file" },
    { "format", "csv | f64le" },
    { "box", "lo1,hi1,...: rescale input samples from this box" },
    { "k", "dimension" },
    { "k1", "x dimension for mi-estimate (default K/2)" },
    { "l", "Lipschitz constant (l1)" },
    { "m", "bins per axis" },
    { "n", "sample count" },
    { "delta", "error probability" },
    { "c", "demo accuracy C" },
    { "trials", "trial count" },
    { "seed", "master seed" },
    { "out", "CSV output path (stdout when absent)" },
    { "estimator", "external estimator command for the demos" },
    { "tol", "quadrature tolerance" },
    { "pairs", "random pairs for the x ln x check" },
  };
  std::map<std::string, std::string> given;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (const auto& [name, help] : flags)
    options.emplace_back(name, app.add_option("--" + name, given[name], help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=usage msg=" << e.what() << "\n";
    return 2;
  }

  entrobound::ExperimentConfig config;
  try {
    config.command = entrobound::parse_command(command);
    if (!config_path.empty()) {
      auto file = entrobound::read_kv_file(config_path);
      file.erase("command");
      config.apply(file);
    }
    std::map<std::string, std::string> overrides;
    for (const auto& [name, opt] : options)
      if (opt->count() > 0)
        overrides[name] = given[name];
    config.apply(overrides);
  } catch (const entrobound::IoError& e) {
    std::cerr << "error kind=" << e.kind() << " msg=" << e.what() << "\n";
    return 1;
  } catch (const entrobound::Error& e) {
    std::cerr << "error kind=" << e.kind() << " msg=" << e.what() << "\n";
    return 2;
  }
  return entrobound::run(config, std::cout, std::cerr);
}
