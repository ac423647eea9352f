#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecdiv/channels.hpp"
#include "ecdiv/divergences.hpp"

namespace ecdiv {

enum class Experiment { sweep_energy, sweep_gamma, sweep_truncation, probe_report, hierarchy_audit };
const char* to_string(Experiment e);

/// Flat key = value run description. See README for the keys and units.
struct RunConfig {
  Experiment experiment = Experiment::sweep_energy;
  ChannelKind channel = ChannelKind::dephasing;
  double gamma1 = 0.1;
  double gamma2 = 0.4;
  double eta1 = 1.0;
  double eta2 = 1.0;
  Index cutoff = 8;
  double energy = 1.0;                  // fixed E for sweep_gamma, sweep_truncation, probe_report
  std::vector<double> energies;         // x-grid of sweep_energy and hierarchy_audit
  std::vector<double> gammas;           // x-grid of sweep_gamma, applied to gamma2
  std::vector<Index> cutoffs;           // x-grid of sweep_truncation
  std::vector<Method> methods;
  MethodParameters params;
  std::uint64_t seed = 1;
  std::string out;                      // CSV path, stdout when empty
  std::string solver = "ipm";
  ProbeMode mode = ProbeMode::fock_diagonal;
  double tolerance = 1e-8;
  bool record_timing = false;

  ChannelModel first() const;   // the channel under hypothesis N
  ChannelModel second() const;  // the channel under hypothesis M
  /// Throws Error(config) on empty or unsorted grids and bad parameters.
  void validate() const;
  /// One line of key=value pairs for the CSV preamble.
  std::string summary() const;
};

/// Methods that "all" expands to: the four curves of the hierarchy plus the GRD.
std::vector<Method> default_methods();

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace ecdiv
