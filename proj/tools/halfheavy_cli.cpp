// halfheavy command-line front end over the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "halfheavy/halfheavy.h"

namespace {

int fail(const std::string& message) {
  std::cerr << "halfheavy: " << message << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-heavy-tailed Wigner matrix laboratory"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::NonNegativeNumber);
  app.add_option("--set", overrides, "override a config value, key=value (repeatable)");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"calibrate", "write the calibrated entry law (dist.json)"},
      {"simulate", "sample the ensemble and write resolvent traces (traces.csv)"},
      {"scaling", "fit the variance scaling exponent (scaling.json, scaling.txt)"},
      {"kernel", "evaluate the covariance kernel at configured pairs (kernel.json)"},
      {"covariance", "compare empirical covariances with the kernel (covariance.json, covariance.txt)"},
      {"diagnostics", "identity, branch, expansion and concentration checks (diagnostics.json, diagnostics.txt)"},
      {"report", "scaling, gaussianity and covariance in one report (report.json, summary.txt)"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(e.what());
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path);
  if (!in) return fail("cannot read config file " + config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  const std::string overrides_json = nlohmann::json(overrides).dump();
  const std::uint64_t seed_value = seed.value_or(0);
  const hh_status status = hh_dispatch(subcommand.c_str(), buffer.str().c_str(), out_dir.c_str(),
                                       overrides_json.c_str(), seed ? &seed_value : nullptr, threads);
  switch (status) {
    case HH_OK:
      return 0;
    case HH_ACCEPTANCE_FAILED:
      std::cerr << "halfheavy: " << subcommand << " finished with failed acceptance flags\n";
      return 2;
    default:
      return fail(std::string(hh_status_string(status)) + ": " + hh_last_error());
  }
}
