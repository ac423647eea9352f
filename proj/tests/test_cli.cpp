#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "ecdiv/config.hpp"
#include "ecdiv/experiment.hpp"

using namespace ecdiv;
namespace fs = std::filesystem;

namespace {

const char* kSmallSweep = R"(
# two dephasing channels, small cutoff
experiment = sweep_energy
channel = dephasing
gamma1 = 0.1      # variance of the phase noise, rad^2
gamma2 = 0.4
cutoff = 3        # largest Fock index
energies = 0.2:0.6:0.2
methods = measured_re, re_lower, re_upper, bs, grd
r = 6
)";

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / ("ecdiv_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ECDIV_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const auto c = parse_config(kSmallSweep);
  CHECK(c.experiment == Experiment::sweep_energy);
  CHECK(c.cutoff == 3);
  REQUIRE(c.energies.size() == 3);
  CHECK(c.energies[2] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(c.methods.size() == 5);
  CHECK(c.params.r == 6);
  CHECK(c.params.ell == 8);

  const auto d = parse_config("experiment = sweep_truncation\ncutoffs = 3:9:1\nmethods = all\n");
  CHECK(d.cutoffs == std::vector<Index>{3, 4, 5, 6, 7, 8, 9});
  CHECK(d.methods == default_methods());
  CHECK(parse_config("").energies.size() == 20);

  CHECK_THROWS_AS(parse_config("colour = blue\n"), Error);
  CHECK_THROWS_AS(parse_config("energies = 0.5, 0.2\n"), Error);
  CHECK_THROWS_AS(parse_config("cutoff = eight\n"), Error);
  CHECK_THROWS_AS(parse_config("methods = umegaki\n"), Error);
  CHECK_THROWS_AS(parse_config("experiment = sweep_gamma\n"), Error);  // no gamma grid
  CHECK_THROWS_AS(parse_config("eta1 = 1.5\n"), Error);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), Error);
}

TEST_CASE("csv round trip keeps twelve significant digits") {
  std::vector<ResultRow> rows(2);
  rows[0] = {"sweep_energy", "bs", 0.5, 0.123456789012345, "optimal", 12.5, std::vector<double>{0.25, 0.75}};
  rows[1] = {"sweep_energy", "grd", 1.0, std::numeric_limits<double>::infinity(), "infinite", std::nullopt, std::nullopt};
  const auto text = to_csv(rows, "cfg");
  CHECK(text.find("0.123456789012,") != std::string::npos);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].value == 0.123456789012);
  CHECK(back[0].probe == std::vector<double>{0.25, 0.75});
  CHECK(back[0].wall_ms == 12.5);
  CHECK(std::isinf(back[1].value));
  CHECK_FALSE(back[1].probe.has_value());
  CHECK(plot_svg(back, "t").find("<polyline") != std::string::npos);
}

TEST_CASE("runs are independent of the number of jobs") {
  const auto c = parse_config(kSmallSweep);
  const auto one = run_experiment(c, {1, ""});
  const auto four = run_experiment(c, {4, ""});
  CHECK(to_csv(one.rows, c.summary()) == to_csv(four.rows, c.summary()));
  CHECK(one.rows.size() == 15);
  CHECK(one.exit_code == 0);
  for (const auto& r : one.rows) {
    CHECK(r.status == "optimal");
    CHECK_FALSE(r.wall_ms.has_value());
  }
}

TEST_CASE("experiments") {
  auto audit = parse_config(std::string(kSmallSweep) + "experiment = hierarchy_audit\n");
  const auto a = run_experiment(audit);
  CHECK(a.exit_code == 0);
  CHECK(a.report.find("0 violation") != std::string::npos);

  const auto g = run_experiment(parse_config(
      "experiment = sweep_gamma\ngamma1 = 1.0\ngammas = 0.5, 1.5, 2.0\nenergy = 0.5\ncutoff = 3\nmethods = bs\n"));
  std::map<double, double> bs, ceiling;
  for (const auto& r : g.rows) (r.method == "classical_kl" ? ceiling : bs)[r.x] = r.value;
  REQUIRE(ceiling.size() == 3);
  for (const auto& [x, v] : bs) CHECK(v <= ceiling[x] + 1e-6);

  const auto p = run_experiment(parse_config("experiment = probe_report\ngamma2 = 0.1\ncutoff = 3\nmethods = bs\n"));
  CHECK(p.report.find("degenerate") != std::string::npos);

  auto bad = parse_config(kSmallSweep);
  bad.solver = "nonexistent";
  try {
    run_experiment(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::backend);
  }
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch_dir();
  write(dir / "ok.conf", kSmallSweep);
  write(dir / "bad.conf", "cutoff = -3\n");
  write(dir / "solver.conf", std::string(kSmallSweep) + "solver = nonexistent\n");

  CHECK(run_cli("run --config " + (dir / "ok.conf").string() + " --out " + (dir / "a.csv").string() + " --jobs 1") == 0);
  CHECK(run_cli("run --config " + (dir / "ok.conf").string() + " --out " + (dir / "b.csv").string() + " --jobs 3 --dump-sdp " +
                (dir / "sdp").string()) == 0);
  CHECK(read(dir / "a.csv") == read(dir / "b.csv"));
  CHECK_FALSE(fs::is_empty(dir / "sdp"));
  CHECK(run_cli("run --config " + (dir / "bad.conf").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.conf").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "solver.conf").string()) == 3);
  CHECK(run_cli("plot --csv " + (dir / "a.csv").string() + " --out " + (dir / "a.svg").string()) == 0);
  CHECK(read(dir / "a.svg").find("measured_re") != std::string::npos);
  fs::remove_all(dir);
}

}
