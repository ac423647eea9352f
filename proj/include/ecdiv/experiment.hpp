#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecdiv/config.hpp"

namespace ecdiv {

struct ResultRow {
  std::string experiment;
  std::string method;
  double x = 0.0;  // E, gamma2 or cutoff depending on the experiment
  double value = 0.0;
  std::string status;
  std::optional<double> wall_ms;
  std::optional<std::vector<double>> probe;
};

struct RunOptions {
  unsigned jobs = 0;     // 0 picks the number of hardware threads
  std::string dump_dir;  // SDPA dumps of every program when non-empty
};

struct RunOutput {
  std::vector<ResultRow> rows;
  std::string report;  // human-readable summary for stdout
  int exit_code = 0;   // 1 when hierarchy_audit found a violation
};

/// Runs the experiment. Rows come out in grid order, then in the order of the
/// configured methods, whatever the number of jobs. Throws Error(backend)
/// when the configured solver does not exist.
RunOutput run_experiment(const RunConfig& config, const RunOptions& options = {});

/// Header, then one line per row; values with 12 significant digits.
/// The first line is a '#' comment carrying the config summary.
std::string to_csv(const std::vector<ResultRow>& rows, const std::string& preamble);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Static line plot of value against x, one polyline per method.
std::string plot_svg(const std::vector<ResultRow>& rows, const std::string& title);

}  // namespace ecdiv
