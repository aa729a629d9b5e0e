// Drives the halfheavy executable end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path root = fs::path(HH_CLI_SCRATCH);

fs::path fresh(const std::string& name) {
  const fs::path p = root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& cfg) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << cfg.dump(2);
  return p;
}

struct Run {
  int code = -1;
  std::string err;
};

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + HH_CLI_PATH + "\" " + args + " 2>\"" + err.string() + "\" >/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CSV body without the "# " comment lines.
std::string data_lines(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string l; std::getline(in, l);) {
    if (l.rfind("# ", 0) != 0) out += l + "\n";
  }
  return out;
}

json small_plan() {
  return {{"alpha", 3.0}, {"N_list", {32, 48, 64}}, {"replicates_per_N", 100}, {"z_grid", {{0.0, 2.0}}}};
}

}  // namespace

TEST_CASE("calibrate writes the entry law") {
  const auto dir = fresh("calibrate");
  const auto cfg = write_config(dir, {{"alpha", 3.0}, {"N_list", {100, 1000}}});
  const auto r = cli("calibrate --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "out" / "dist.json"));
  CHECK(j["dist"]["t0"].get<double>() == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(j["truncation"].size() == 2);
  CHECK(j["invocation"]["subcommand"] == "calibrate");
  CHECK(fs::exists(dir / "out" / "run.log"));
}

TEST_CASE("missing config fails without writing") {
  const auto dir = fresh("missing");
  const auto r = cli("calibrate --config " + (dir / "nope.json").string() + " --out " + (dir / "out").string(), dir);
  CHECK(r.code == 1);
  CHECK(r.err.rfind("halfheavy: ", 0) == 0);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("bad invocations exit with status 1") {
  const auto dir = fresh("bad");
  const auto cfg = write_config(dir, {{"alpha", 3.0}});
  CHECK(cli("frobnicate --config " + cfg.string(), dir).code == 1);
  CHECK(cli("calibrate", dir).code == 1);

  const auto domain = write_config(dir, {{"alpha", 5.0}});
  const auto r = cli("calibrate --config " + domain.string() + " --out " + (dir / "out").string(), dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("domain error") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{ \"alpha\": ";
  CHECK(cli("calibrate --config " + (dir / "broken.json").string() + " --out " + (dir / "o2").string(), dir).code ==
        1);
}

TEST_CASE("kernel subcommand reports convergence and symmetry") {
  const auto dir = fresh("kernel");
  const json cfg = {{"alpha", 3.0}, {"kernel", {{"pairs", {{{0.0, 2.0}, {1.0, 1.0}}}}}}};
  const auto r = cli("kernel --config " + write_config(dir, cfg).string() + " --out " + dir.string(), dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "kernel.json"));
  REQUIRE(j["records"].size() == 1);
  const json& rec = j["records"][0];
  CHECK(rec["converged"].get<bool>());
  CHECK(rec["symmetric_pair_check"].get<bool>());
  CHECK(rec["value_re"].get<double>() == doctest::Approx(-0.011869).epsilon(1e-3));
  CHECK(rec["value_im"].get<double>() == doctest::Approx(-0.014077).epsilon(1e-3));
}

TEST_CASE("failed acceptance flags exit with status 2") {
  const auto dir = fresh("acceptance");
  json cfg = small_plan();
  cfg["tolerances"] = {{"slope_abs", -1.0}};
  const auto r = cli("scaling --config " + write_config(dir, cfg).string() + " --out " + dir.string(), dir);
  CHECK(r.code == 2);
  const json j = json::parse(slurp(dir / "scaling.json"));
  CHECK_FALSE(j["all_pass"].get<bool>());
  CHECK(fs::exists(dir / "scaling.txt"));
}

TEST_CASE("simulate is reproducible and echoes overrides") {
  const auto dir = fresh("simulate");
  const auto cfg = write_config(dir, small_plan());
  const std::string common = "simulate --config " + cfg.string() + " --seed 5 --set replicates_per_N=60";
  REQUIRE(cli(common + " --out " + (dir / "a").string(), dir).code == 0);
  REQUIRE(cli(common + " --threads 3 --out " + (dir / "b").string(), dir).code == 0);
  const std::string a = slurp(dir / "a" / "traces.csv");
  CHECK(data_lines(a) == data_lines(slurp(dir / "b" / "traces.csv")));
  REQUIRE(cli(common + " --out " + (dir / "a2").string(), dir).code == 0);
  CHECK(a == slurp(dir / "a2" / "traces.csv"));
  CHECK_FALSE(fs::exists(dir / "a" / "traces.csv.partial"));

  // header comment line, column line, then 60 replicates x 3 N x 1 z
  std::istringstream lines(a);
  std::string first;
  std::getline(lines, first);
  CHECK(first.rfind("# ", 0) == 0);
  CHECK(first.find("replicates_per_N=60") != std::string::npos);
  const json header = json::parse(first.substr(2));
  CHECK(header["config"]["replicates_per_N"] == 60);
  CHECK(header["config"]["master_seed"] == 5);
  std::size_t rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 1 + 60 * 3);

  REQUIRE(cli("simulate --config " + cfg.string() + " --seed 6 --set replicates_per_N=60 --out " +
                  (dir / "c").string(),
              dir)
              .code == 0);
  CHECK(slurp(dir / "c" / "traces.csv") != a);
}

TEST_CASE("diagnostics subcommand on a small configuration") {
  const auto dir = fresh("diagnostics");
  const json cfg = {{"alpha", 3.0},
                    {"diagnostics",
                     {{"leave_one_out", {{"triples", 10}, {"N_max", 40}}},
                      {"branch", {{"grid", 8}}},
                      {"quadratic_form", {{"N", 40}, {"draws", 300}}},
                      {"diag_concentration", {{"N_list", {32, 64, 128}}, {"replicates", 10}}},
                      {"exceedance", {{"N", 64}, {"replicates", 20}}}}}};
  const auto r = cli("diagnostics --config " + write_config(dir, cfg).string() + " --out " + dir.string(), dir);
  CHECK((r.code == 0 || r.code == 2));
  const json j = json::parse(slurp(dir / "diagnostics.json"));
  CHECK(j["flags"].size() == 7);
  CHECK(j["leave_one_out"]["max_rel_residual"].get<double>() < 1e-9);
  CHECK(j["branch"]["min_re_K"].get<double>() > 0.0);
}
