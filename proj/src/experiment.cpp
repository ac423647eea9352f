#include "ecdiv/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "ecdiv/error.hpp"
#include "ecdiv/hilbert.hpp"
#include "ecdiv/truncation.hpp"

namespace ecdiv {

namespace {

// Runs work(i) for i in [0, n) on a pool of threads. The first exception, by
// index, is rethrown after all workers finish.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& work) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = unsigned(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Point {
  double x = 0.0;
  std::vector<DivergenceResult> results;
  std::vector<double> wall_ms;
};

ResultRow make_row(const RunConfig& c, double x, const DivergenceResult& r, std::optional<double> ms) {
  ResultRow row;
  row.experiment = to_string(c.experiment);
  row.method = to_string(r.method);
  row.x = x;
  row.value = r.value;
  row.status = to_string(r.status);
  if (c.record_timing) row.wall_ms = ms;
  row.probe = r.probe;
  return row;
}

std::vector<Point> evaluate_grid(const RunConfig& c, const std::vector<double>& xs, const std::vector<Method>& methods,
                                 const RunOptions& o, const conic::Backend* backend) {
  std::vector<Point> points(xs.size());
  parallel_for(xs.size(), o.jobs, [&](std::size_t i) {
    RunConfig local = c;
    double e = c.energy;
    switch (c.experiment) {
      case Experiment::sweep_energy:
      case Experiment::hierarchy_audit: e = xs[i]; break;
      case Experiment::sweep_gamma: local.gamma2 = xs[i]; break;
      case Experiment::sweep_truncation: local.cutoff = Index(xs[i]); break;
      case Experiment::probe_report: break;
    }
    SolveOptions opts;
    opts.tolerance = c.tolerance;
    opts.backend = backend;
    opts.mode = c.mode;
    opts.dump_dir = o.dump_dir;
    opts.tag = std::string(to_string(c.experiment)) + "_x" + fmt(xs[i]);
    const auto jn = choi(local.first());
    const auto jm = choi(local.second());
    points[i].x = xs[i];
    points[i].results =
        evaluate_methods(methods, jn, jm, photon_budget(local.cutoff + 1, e), c.params, opts, &points[i].wall_ms);
  });
  return points;
}

void append_rows(const RunConfig& c, const std::vector<Point>& points, std::vector<ResultRow>& rows) {
  for (const auto& p : points)
    for (std::size_t j = 0; j < p.results.size(); ++j) rows.push_back(make_row(c, p.x, p.results[j], p.wall_ms[j]));
}

// Ordering of the hierarchy, smallest first, as far as the methods are present.
std::vector<Method> hierarchy_chain() {
  return {Method::measured_re, Method::re_lower, Method::re_upper, Method::bs_closed_form, Method::grd_direct};
}

std::string check_energy_monotone(const std::vector<Method>& methods, const std::vector<Point>& points) {
  std::ostringstream os;
  for (std::size_t j = 0; j < methods.size(); ++j) {
    if (methods[j] == Method::grd_sdp || methods[j] == Method::dmax) continue;  // budget-independent
    for (std::size_t i = 1; i < points.size(); ++i) {
      const auto& a = points[i - 1].results[j];
      const auto& b = points[i].results[j];
      if (a.ok() && b.ok() && b.value < a.value - 1e-6)
        os << "  " << to_string(methods[j]) << " decreases between E=" << fmt(points[i - 1].x)
           << " and E=" << fmt(points[i].x) << " by " << fmt(a.value - b.value) << "\n";
    }
  }
  return os.str();
}

int audit_hierarchy(const std::vector<Method>& methods, const std::vector<Point>& points, std::ostringstream& os) {
  constexpr double slack = 2e-5;
  std::vector<std::size_t> order;
  for (Method m : hierarchy_chain())
    for (std::size_t j = 0; j < methods.size(); ++j)
      if (methods[j] == m) {
        order.push_back(j);
        break;
      }
  int violations = 0;
  for (const auto& p : points) {
    for (std::size_t s = 1; s < order.size(); ++s) {
      const auto& lo = p.results[order[s - 1]];
      const auto& hi = p.results[order[s]];
      if (!lo.ok() || !hi.ok()) {
        if (!lo.infinite() && !hi.infinite())
          os << "  E=" << fmt(p.x) << ": cannot compare " << to_string(lo.method) << " (" << to_string(lo.status)
             << ") with " << to_string(hi.method) << " (" << to_string(hi.status) << ")\n";
        continue;
      }
      if (lo.value > hi.value + slack) {
        ++violations;
        os << "  VIOLATION E=" << fmt(p.x) << ": " << to_string(lo.method) << " = " << fmt(lo.value) << " > "
           << to_string(hi.method) << " = " << fmt(hi.value) << "\n";
      }
    }
  }
  return violations;
}

void probe_summary(const RunConfig& c, const std::vector<Point>& points, std::ostringstream& os) {
  const auto& p = points.front();
  os << "probe report at E=" << fmt(c.energy) << ", cutoff " << c.cutoff << "\n";
  const bool identical = c.first().kind == c.second().kind && c.gamma1 == c.gamma2 &&
                         (c.channel == ChannelKind::dephasing || c.eta1 == c.eta2);
  if (identical) os << "  degenerate: the channels coincide, every probe is optimal and the spectra carry no information\n";
  for (const auto& r : p.results) {
    os << "  " << to_string(r.method) << ": value " << fmt(r.value) << " (" << to_string(r.status) << ")\n";
    if (!r.probe) continue;
    os << "    dominant components:";
    for (std::size_t n = 0; n < r.probe->size(); ++n)
      if ((*r.probe)[n] >= 0.01) os << " |" << n << ">:" << fmt((*r.probe)[n]);
    os << "\n    purified coefficients sqrt(p_n):";
    for (double q : *r.probe) os << " " << fmt(std::sqrt(std::max(0.0, q)));
    os << "\n";
  }
}

}  // namespace

RunOutput run_experiment(const RunConfig& c, const RunOptions& o) {
  c.validate();
  const conic::Backend* backend = conic::find_backend(c.solver);
  if (!backend) throw Error(ErrorKind::backend, "unknown solver backend '" + c.solver + "'");

  RunOutput out;
  std::ostringstream report;
  std::vector<Method> methods = c.methods;
  std::vector<double> xs;
  switch (c.experiment) {
    case Experiment::sweep_energy: xs = c.energies; break;
    case Experiment::hierarchy_audit:
      xs = c.energies;
      methods = hierarchy_chain();
      break;
    case Experiment::sweep_gamma: xs = c.gammas; break;
    case Experiment::sweep_truncation:
      for (Index n : c.cutoffs) xs.push_back(double(n));
      break;
    case Experiment::probe_report: xs = {c.energy}; break;
  }

  const auto points = evaluate_grid(c, xs, methods, o, backend);
  append_rows(c, points, out.rows);

  switch (c.experiment) {
    case Experiment::sweep_energy: {
      const auto msg = check_energy_monotone(methods, points);
      report << (msg.empty() ? "all curves non-decreasing in E\n" : "non-monotone curves:\n" + msg);
      break;
    }
    case Experiment::hierarchy_audit: {
      const int v = audit_hierarchy(methods, points, report);
      report << "hierarchy audit: " << v << " violation(s) above 2e-05 over " << points.size() << " energies\n";
      if (v > 0) out.exit_code = 1;
      break;
    }
    case Experiment::sweep_gamma:
      if (c.channel == ChannelKind::dephasing && c.gamma1 > 0) {
        // unconstrained ceiling of every curve
        for (const auto& p : points) {
          ResultRow row;
          row.experiment = to_string(c.experiment);
          row.method = "classical_kl";
          row.x = p.x;
          row.value = p.x > 0 ? classical_kl_wrapped_normal(c.gamma1, p.x) : std::numeric_limits<double>::infinity();
          row.status = to_string(p.x > 0 ? ResultStatus::optimal : ResultStatus::infinite);
          out.rows.push_back(row);
        }
      }
      break;
    case Experiment::sweep_truncation: {
      TruncationSweep sweep;
      sweep.cutoffs = c.cutoffs;
      for (std::size_t j = 0; j < methods.size(); ++j) {
        TruncationSeries s{methods[j], {}, std::nullopt, false};
        for (const auto& p : points) s.values.push_back(p.results[j]);
        sweep.series.push_back(std::move(s));
      }
      analyze_stability(sweep);
      report << "truncation stability at E=" << fmt(c.energy) << " (successive change < " << fmt(sweep.threshold)
             << "):\n";
      for (const auto& s : sweep.series) {
        report << "  " << to_string(s.method) << ": ";
        if (s.first_stable) report << "stable from cutoff " << *s.first_stable;
        else report << "not stable within the grid";
        if (s.non_monotone) report << ", non-monotone";
        report << (s.method == Method::bs_closed_form && c.channel == ChannelKind::dephasing ? ", certified"
                                                                                            : ", empirical only")
               << "\n";
      }
      if (c.channel == ChannelKind::dephasing && c.gamma1 > 0 && c.gamma2 > 0) {
        for (Index n : c.cutoffs) {
          const auto cert = bs_truncation_bound(c.gamma1, c.gamma2, c.energy, n);
          ResultRow row;
          row.experiment = to_string(c.experiment);
          row.method = "bs_truncation_bound";
          row.x = double(n);
          row.value = cert.bound;
          row.status = to_string(ResultStatus::optimal);
          out.rows.push_back(row);
        }
      }
      break;
    }
    case Experiment::probe_report: probe_summary(c, points, report); break;
  }

  // a method that failed at every grid point points at the solver, not the data
  for (std::size_t j = 0; j < methods.size(); ++j) {
    bool all_failed = true;
    for (const auto& p : points) all_failed = all_failed && p.results[j].status == ResultStatus::numerical_failure;
    if (all_failed) {
      report << "solver failed at every point for " << to_string(methods[j]) << "\n";
      if (out.exit_code == 0) out.exit_code = 3;
    }
  }
  out.report = report.str();
  return out;
}

}  // namespace ecdiv
