#include "ecdiv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ecdiv/error.hpp"

namespace ecdiv {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::sweep_energy: return "sweep_energy";
    case Experiment::sweep_gamma: return "sweep_gamma";
    case Experiment::sweep_truncation: return "sweep_truncation";
    case Experiment::probe_report: return "probe_report";
    case Experiment::hierarchy_audit: return "hierarchy_audit";
  }
  return "?";
}

std::vector<Method> default_methods() {
  return {Method::measured_re, Method::re_lower, Method::re_upper, Method::bs_closed_form, Method::grd_direct};
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::config, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) fail(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) fail(key + ": not an integer: '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "a, b, c" or the inclusive range "start:stop:step"
std::vector<double> to_grid(const std::string& key, const std::string& v) {
  if (v.find(':') == std::string::npos) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3) fail(key + ": range must be start:stop:step");
  const double a = to_double(key, parts[0]), b = to_double(key, parts[1]), h = to_double(key, parts[2]);
  if (!(h > 0.0) || b < a) fail(key + ": range needs step > 0 and stop >= start");
  const long long n = std::llround(std::floor((b - a) / h + 1e-9));
  std::vector<double> out;
  // a + i h rather than accumulation keeps grid points reproducible
  for (long long i = 0; i <= n; ++i) out.push_back(a + double(i) * h);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(key + ": expected true or false");
}

}  // namespace

ChannelModel RunConfig::first() const {
  switch (channel) {
    case ChannelKind::loss: return ChannelModel::loss(eta1, cutoff);
    case ChannelKind::loss_dephasing: return ChannelModel::loss_dephasing(eta1, gamma1, cutoff);
    default: return ChannelModel::dephasing(gamma1, cutoff);
  }
}

ChannelModel RunConfig::second() const {
  switch (channel) {
    case ChannelKind::loss: return ChannelModel::loss(eta2, cutoff);
    case ChannelKind::loss_dephasing: return ChannelModel::loss_dephasing(eta2, gamma2, cutoff);
    default: return ChannelModel::dephasing(gamma2, cutoff);
  }
}

void RunConfig::validate() const {
  auto ascending = [](const auto& v) { return std::is_sorted(v.begin(), v.end()) &&
                                              std::adjacent_find(v.begin(), v.end()) == v.end(); };
  if (methods.empty()) fail("methods must not be empty");
  if (cutoff < 1) fail("cutoff must be >= 1");
  if (gamma1 < 0 || gamma2 < 0) fail("gamma1 and gamma2 must be >= 0");
  if (eta1 < 0 || eta1 > 1 || eta2 < 0 || eta2 > 1) fail("eta1 and eta2 must lie in [0, 1]");
  if (energy < 0) fail("energy must be >= 0");
  if (params.m < 1 || params.k < 0 || params.r < 1 || params.ell < 1) fail("need m >= 1, k >= 0, r >= 1, ell >= 1");
  if (!(tolerance > 0)) fail("tolerance must be positive");
  switch (experiment) {
    case Experiment::sweep_energy:
    case Experiment::hierarchy_audit:
      if (energies.empty() || !ascending(energies)) fail("energies must be a non-empty ascending grid");
      if (energies.front() < 0) fail("energies must be >= 0");
      break;
    case Experiment::sweep_gamma:
      if (gammas.empty() || !ascending(gammas)) fail("gammas must be a non-empty ascending grid");
      if (gammas.front() < 0) fail("gammas must be >= 0");
      break;
    case Experiment::sweep_truncation:
      if (cutoffs.empty() || !ascending(cutoffs)) fail("cutoffs must be a non-empty ascending grid");
      if (cutoffs.front() < 1) fail("cutoffs must be >= 1");
      break;
    case Experiment::probe_report: break;
  }
}

std::string RunConfig::summary() const {
  std::ostringstream os;
  os.precision(12);
  os << "experiment=" << to_string(experiment) << " channel="
     << (channel == ChannelKind::loss ? "loss" : channel == ChannelKind::loss_dephasing ? "loss_dephasing" : "dephasing")
     << " gamma1=" << gamma1 << " gamma2=" << gamma2 << " eta1=" << eta1 << " eta2=" << eta2 << " cutoff=" << cutoff
     << " energy=" << energy << " m=" << params.m << " k=" << params.k << " r=" << params.r << " ell=" << params.ell
     << " mode=" << (mode == ProbeMode::full ? "full" : "fock_diagonal") << " solver=" << solver
     << " tolerance=" << tolerance << " seed=" << seed;
  return os.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  c.energies = to_grid("energies", "0.1:2.0:0.1");
  c.methods = default_methods();
  std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
      {"experiment", [&](auto& k, auto& v) {
         for (Experiment e : {Experiment::sweep_energy, Experiment::sweep_gamma, Experiment::sweep_truncation,
                              Experiment::probe_report, Experiment::hierarchy_audit})
           if (v == to_string(e)) return void(c.experiment = e);
         fail(k + ": unknown experiment '" + v + "'");
       }},
      {"channel", [&](auto& k, auto& v) {
         if (v == "dephasing") c.channel = ChannelKind::dephasing;
         else if (v == "loss") c.channel = ChannelKind::loss;
         else if (v == "loss_dephasing") c.channel = ChannelKind::loss_dephasing;
         else fail(k + ": unknown channel '" + v + "'");
       }},
      {"gamma1", [&](auto& k, auto& v) { c.gamma1 = to_double(k, v); }},
      {"gamma2", [&](auto& k, auto& v) { c.gamma2 = to_double(k, v); }},
      {"eta1", [&](auto& k, auto& v) { c.eta1 = to_double(k, v); }},
      {"eta2", [&](auto& k, auto& v) { c.eta2 = to_double(k, v); }},
      {"cutoff", [&](auto& k, auto& v) { c.cutoff = to_int(k, v); }},
      {"energy", [&](auto& k, auto& v) { c.energy = to_double(k, v); }},
      {"energies", [&](auto& k, auto& v) { c.energies = to_grid(k, v); }},
      {"gammas", [&](auto& k, auto& v) { c.gammas = to_grid(k, v); }},
      {"cutoffs", [&](auto& k, auto& v) {
         c.cutoffs.clear();
         for (double x : to_grid(k, v)) {
           if (x != std::floor(x)) fail(k + ": cutoffs must be integers");
           c.cutoffs.push_back(Index(x));
         }
       }},
      {"methods", [&](auto& k, auto& v) {
         c.methods.clear();
         for (const auto& s : split_list(v)) {
           if (s == "all") {
             for (Method m : default_methods()) c.methods.push_back(m);
             continue;
           }
           const auto m = parse_method(s);
           if (!m) fail(k + ": unknown method '" + s + "'");
           c.methods.push_back(*m);
         }
       }},
      {"m", [&](auto& k, auto& v) { c.params.m = int(to_int(k, v)); }},
      {"k", [&](auto& k, auto& v) { c.params.k = int(to_int(k, v)); }},
      {"r", [&](auto& k, auto& v) { c.params.r = int(to_int(k, v)); }},
      {"ell", [&](auto& k, auto& v) { c.params.ell = int(to_int(k, v)); }},
      {"seed", [&](auto& k, auto& v) { c.seed = std::uint64_t(to_int(k, v)); }},
      {"out", [&](auto&, auto& v) { c.out = v; }},
      {"solver", [&](auto&, auto& v) { c.solver = v; }},
      {"mode", [&](auto& k, auto& v) {
         if (v == "fock_diagonal") c.mode = ProbeMode::fock_diagonal;
         else if (v == "full") c.mode = ProbeMode::full;
         else fail(k + ": expected fock_diagonal or full");
       }},
      {"tolerance", [&](auto& k, auto& v) { c.tolerance = to_double(k, v); }},
      {"record_timing", [&](auto& k, auto& v) { c.record_timing = to_bool(k, v); }},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) fail("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(key, value);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ecdiv
