#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = CASCADE_SCENARIO_DIR;

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "cascade_cli_test";
  fs::create_directories(d);
  return d;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CASCADE_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("successful subcommands exit with 0") {
  const auto out = scratch() / "run.csv";
  CHECK(cli("run " + quoted(kDir / "variance_vs_time.json") + " --out " + quoted(out)) == 0);
  const auto text = slurp(out);
  CHECK(text.find("Gamma1_t,") != std::string::npos);
  CHECK(cli("sweep " + quoted(kDir / "lambda_sweep_eps09.json") + " --out " + quoted(scratch() / "s.csv")) == 0);
  CHECK(cli("compare " + quoted(kDir / "variance_lambda2_eps.json") + " --engine analytic,adiabatic --out " +
            quoted(scratch() / "c.csv")) == 0);
  CHECK(cli("validate " + quoted(kDir / "physical_regime.json")) == 0);
  CHECK(cli("run " + quoted(kDir / "variance_vs_time.json") + " --engine adiabatic --threads 2 --out " +
            quoted(scratch() / "a.csv")) == 0);
}

TEST_CASE("reproducible output is byte identical") {
  const auto a = scratch() / "r1.csv", b = scratch() / "r2.csv";
  const auto file = quoted(kDir / "nonideal_lambda2.json");
  REQUIRE(cli("run " + file + " --reproducible --out " + quoted(a)) == 0);
  REQUIRE(cli("run " + file + " --reproducible --threads 2 --out " + quoted(b)) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("generated") == std::string::npos);
}

TEST_CASE("validation errors exit with 2") {
  CHECK(cli("run " + quoted(write("bad.json", "{\"name\": \"x\",\n \"grid\": }"))) == 2);
  CHECK(cli("run " + quoted(kDir / "variance_vs_time.json") + " --engine spectral") == 2);
  CHECK(cli("run " + quoted(write("unknown.json", R"({"name": "x", "reduced": {"gamma1": 1, "lambda": 1},
      "grid": {"t_end": 1, "step": 0.1}, "colour": "red"})"))) == 2);
  CHECK(cli("sweep " + quoted(kDir / "variance_vs_time.json")) == 2);  // no sweep section
  CHECK(cli("bogus") == 2);
  CHECK(cli("run") == 2);
}

TEST_CASE("truncation failure exits with 3") {
  const auto p = write("tight.json", R"({
    "name": "tight",
    "engine": "fock",
    "effective": {"kappa1": 1.0, "kappa2": 1.0, "epsilon": 1.0, "omega1": 0.5, "omega2": 0.5},
    "grid": {"t_start": 0.0, "t_end": 4.0, "step": 0.5},
    "fock": {"cutoffs": [3, 3, 3, 3]}
  })");
  CHECK(cli("run " + quoted(p) + " --out " + quoted(scratch() / "tight.csv")) == 3);
}

TEST_CASE("I/O errors exit with 4") {
  CHECK(cli("run " + quoted(scratch() / "does_not_exist.json")) == 4);
  CHECK(cli("run " + quoted(kDir / "variance_vs_time.json") + " --out /nonexistent_dir/x.csv") == 4);
}
