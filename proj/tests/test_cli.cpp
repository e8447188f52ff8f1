// End-to-end tests of the command-line binary. The test runner passes the
// binary location through EPSHARM_CLI_BIN; everything runs in scratch
// directories under the current working directory.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>

#include "doctest.h"
#include "epsharm/common.hpp"

namespace {

std::string cli_bin() {
  const char* p = std::getenv("EPSHARM_CLI_BIN");
  REQUIRE_MESSAGE(p != nullptr, "EPSHARM_CLI_BIN must point at the binary");
  return p;
}

std::string scratch_dir(const std::string& name) {
  std::string dir = "cli_scratch_" + name;
  ::mkdir(dir.c_str(), 0755);
  return dir;
}

int run_cli(const std::string& args, const std::string& outdir,
            const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + cli_bin() + " --out " +
                    outdir + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + path).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double number_after(const std::string& text, const std::string& key) {
  std::size_t pos = text.find(key);
  REQUIRE_MESSAGE(pos != std::string::npos, ("key not found: " + key).c_str());
  pos += key.size();
  return std::strtod(text.c_str() + pos, nullptr);
}

}  // namespace

TEST_CASE("cli: help and usage errors") {
  std::string dir = scratch_dir("usage");
  CHECK(run_cli("--help", dir) == 0);
  CHECK(run_cli("", dir) == 2);              // a subcommand is required
  CHECK(run_cli("--no-such-flag", dir) == 2);
  CHECK(run_cli("frobnicate", dir) == 2);
}

TEST_CASE("cli: configuration validation") {
  std::string dir = scratch_dir("badcfg");
  CHECK(run_cli("minimize --n 1 --eps 0.3 --modes 8", dir) == 2);
  CHECK(run_cli("minimize --n 1 --eps 0.05 --modes 2", dir) == 2);
  CHECK(run_cli("sweep --eps-min 0.05 --eps-max 0.01 --steps 2", dir) == 2);
  CHECK(run_cli("sweep --eps-min 0.01 --eps-max 0.04 --steps 0", dir) == 2);
  CHECK(run_cli("spectral --kmax 0", dir) == 2);
  CHECK(run_cli("mobius --matrix 1,0,1,0,1,0,1,0", dir) == 2);  // singular
  CHECK(run_cli("--grid-polar 1 verify", dir) == 2);
}

TEST_CASE("cli: minimize writes the report and the profile table") {
  std::string dir = scratch_dir("minimize");
  REQUIRE(run_cli("--nodes1d 128 minimize --n 1 --eps 0.05 --modes 8", dir) == 0);

  std::string json = slurp(dir + "/minimize.json");
  CHECK(number_after(json, "\"n\":") == 1.0);
  CHECK(number_after(json, "\"epsilon\":") == 0.05);
  CHECK(number_after(json, "\"energy\":") ==
        doctest::Approx(4.4 * epsharm::kPi).epsilon(1e-8));
  CHECK(number_after(json, "\"el_residual\":") < 1e-8);
  CHECK(json.find('\r') == std::string::npos);

  std::string csv = slurp(dir + "/profile.csv");
  CHECK(csv.rfind("r,f,fprime\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 1025);  // header + 1024 samples
  // the final sample hits r = pi, f = n pi
  std::size_t tail = csv.rfind('\n', csv.size() - 2);
  std::string last = csv.substr(tail + 1);
  CHECK(std::strtod(last.c_str(), nullptr) ==
        doctest::Approx(epsharm::kPi).epsilon(1e-12));
}

TEST_CASE("cli: reports are byte-identical across runs and thread counts") {
  std::string d1 = scratch_dir("det1"), d2 = scratch_dir("det2"),
              d3 = scratch_dir("det3");
  std::string args = "--nodes1d 128 minimize --n 1 --eps 0.05 --modes 8";
  REQUIRE(run_cli(args, d1, "OMP_NUM_THREADS=1") == 0);
  REQUIRE(run_cli(args, d2, "OMP_NUM_THREADS=4") == 0);
  REQUIRE(run_cli(args, d3, "OMP_NUM_THREADS=4") == 0);
  CHECK(slurp(d1 + "/minimize.json") == slurp(d2 + "/minimize.json"));
  CHECK(slurp(d2 + "/minimize.json") == slurp(d3 + "/minimize.json"));
  CHECK(slurp(d1 + "/profile.csv") == slurp(d2 + "/profile.csv"));
}

TEST_CASE("cli: sweep emits sorted rows and a machine-readable summary") {
  std::string d1 = scratch_dir("sweep1"), d2 = scratch_dir("sweep2");
  std::string args =
      "--nodes1d 128 sweep --eps-min 0.04 --eps-max 0.05 --steps 2 --n 1 "
      "--modes 8";
  REQUIRE(run_cli(args, d1, "OMP_NUM_THREADS=1") == 0);
  REQUIRE(run_cli(args, d2, "OMP_NUM_THREADS=4") == 0);

  std::string csv = slurp(d1 + "/sweep.csv");
  CHECK(csv.rfind(
            "epsilon,energy,gradient_term,biharmonic_term,lower_bound,"
            "upper_bound\n",
            0) == 0);
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);
  // ascending epsilon order
  std::size_t row1 = csv.find('\n') + 1;
  std::size_t row2 = csv.find('\n', row1) + 1;
  double e1 = std::strtod(csv.c_str() + row1, nullptr);
  double e2 = std::strtod(csv.c_str() + row2, nullptr);
  CHECK(e1 == doctest::Approx(0.04));
  CHECK(e2 == doctest::Approx(0.05));
  // deterministic across thread counts despite the parallel outer loop
  CHECK(csv == slurp(d2 + "/sweep.csv"));
  CHECK(slurp(d1 + "/sweep.json") == slurp(d2 + "/sweep.json"));
}

TEST_CASE("cli: mobius analysis") {
  std::string dir = scratch_dir("mobius");
  REQUIRE(run_cli("mobius --matrix 2,0,0,0,0,0,0.5,0", dir) == 0);
  std::string json = slurp(dir + "/mobius.json");
  CHECK(number_after(json, "\"lambda\":") == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(json.find("\"is_rotation\": false") != std::string::npos);
  CHECK(json.find("\"rotation\": null") != std::string::npos);

  REQUIRE(run_cli("mobius --matrix 0,0,1,0,-1,0,0,0", dir) == 0);
  json = slurp(dir + "/mobius.json");
  CHECK(number_after(json, "\"lambda\":") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(json.find("\"is_rotation\": true") != std::string::npos);
}

TEST_CASE("cli: spectral diagnostics pass on an adequate grid") {
  std::string dir = scratch_dir("spectral");
  REQUIRE(run_cli("--grid-polar 24 --grid-az 48 spectral --kmax 2", dir) == 0);
  std::string json = slurp(dir + "/spectral.json");
  CHECK(json.find("\"status\": \"pass\"") != std::string::npos);
}

TEST_CASE("cli: config file feeds options and flags override it") {
  std::string dir = scratch_dir("config");
  {
    std::ofstream out(dir + "/run.ini");
    out << "nodes1d=128\n\n[minimize]\nn=1\neps=0.05\nmodes=8\n";
  }
  REQUIRE(run_cli("--config " + dir + "/run.ini minimize", dir) == 0);
  std::string json = slurp(dir + "/minimize.json");
  CHECK(number_after(json, "\"epsilon\":") == 0.05);
  CHECK(number_after(json, "\"energy\":") ==
        doctest::Approx(4.4 * epsharm::kPi).epsilon(1e-8));

  REQUIRE(run_cli("--config " + dir + "/run.ini minimize --eps 0.06", dir) == 0);
  json = slurp(dir + "/minimize.json");
  CHECK(number_after(json, "\"epsilon\":") == 0.06);
  CHECK(number_after(json, "\"energy\":") ==
        doctest::Approx(4.48 * epsharm::kPi).epsilon(1e-8));
}

TEST_CASE("cli: output directory falls back to the environment") {
  std::string dir = scratch_dir("envout");
  std::string cmd = "EPSHARM_OUTDIR=" + dir + " " + cli_bin() +
                    " --nodes1d 128 minimize --n 0 --eps 0.05 --modes 8 "
                    ">/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  REQUIRE(WEXITSTATUS(status) == 0);
  CHECK(slurp(dir + "/minimize.json").find("\"n\": 0") != std::string::npos);
}

TEST_CASE("cli: verify fails honestly on an inadequate grid") {
  std::string dir = scratch_dir("verify_coarse");
  CHECK(run_cli("--grid-polar 4 --grid-az 8 --nodes1d 64 verify", dir) == 1);
  std::string json = slurp(dir + "/verify.json");
  CHECK(json.find("\"status\": \"fail\"") != std::string::npos);
}

TEST_CASE("cli: the full verification suite passes") {
  std::string dir = scratch_dir("verify_full");
  REQUIRE(run_cli("verify", dir) == 0);
  std::string json = slurp(dir + "/verify.json");
  CHECK(json.find("\"status\": \"pass\"") != std::string::npos);
  CHECK(json.find("\"failed\": 0") != std::string::npos);
  // determinism of the full report
  std::string dir2 = scratch_dir("verify_full2");
  REQUIRE(run_cli("verify", dir2, "OMP_NUM_THREADS=2") == 0);
  CHECK(json == slurp(dir2 + "/verify.json"));
}
