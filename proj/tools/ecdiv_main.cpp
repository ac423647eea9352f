// ecdiv run --config <path> [--out <path>] [--jobs <n>] [--dump-sdp <dir>]
// ecdiv plot --csv <path> --out <svg> [--title <text>]
//
// Exit codes: 0 success, 1 hierarchy violation, 2 config error, 3 backend error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ecdiv/error.hpp"
#include "ecdiv/experiment.hpp"

namespace {

int run(const std::string& config_path, std::string out_path, unsigned jobs, const std::string& dump_dir) {
  ecdiv::RunConfig cfg;
  try {
    cfg = ecdiv::load_config(config_path);
  } catch (const ecdiv::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (out_path.empty()) out_path = cfg.out;

  ecdiv::RunOutput result;
  try {
    result = ecdiv::run_experiment(cfg, {jobs, dump_dir});
  } catch (const ecdiv::Error& e) {
    std::cerr << (e.kind() == ecdiv::ErrorKind::backend ? "backend error: " : "error: ") << e.what() << "\n";
    return e.kind() == ecdiv::ErrorKind::config ? 2 : 3;
  }

  const std::string csv = ecdiv::to_csv(result.rows, cfg.summary());
  if (out_path.empty()) {
    std::cout << csv;
    std::cerr << result.report;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "config error: cannot write '" << out_path << "'\n";
      return 2;
    }
    f << csv;
    std::cout << result.report;
  }
  return result.exit_code;
}

int plot(const std::string& csv_path, const std::string& out_path, const std::string& title) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot read '" << csv_path << "'\n";
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write '" << out_path << "'\n";
    return 2;
  }
  out << ecdiv::plot_svg(ecdiv::parse_csv(ss.str()), title.empty() ? csv_path : title);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-constrained divergences of bosonic dephasing and loss-dephasing channels"};
  app.require_subcommand(1);

  std::string config, out, dump_dir, csv, svg, title;
  unsigned jobs = 0;
  auto* run_cmd = app.add_subcommand("run", "run an experiment described by a config file");
  run_cmd->add_option("--config", config, "key = value config file")->required();
  run_cmd->add_option("--out", out, "CSV output path (overrides the config's out key)");
  run_cmd->add_option("--jobs", jobs, "worker threads, 0 for all cores");
  run_cmd->add_option("--dump-sdp", dump_dir, "write every SDP in SDPA format into this directory");

  auto* plot_cmd = app.add_subcommand("plot", "render a result CSV as a static SVG line plot");
  plot_cmd->add_option("--csv", csv, "result CSV")->required();
  plot_cmd->add_option("--out", svg, "SVG output path")->required();
  plot_cmd->add_option("--title", title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*run_cmd) return run(config, out, jobs, dump_dir);
  return plot(csv, svg, title);
}
