#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecdiv/channels.hpp"
#include "ecdiv/conic.hpp"
#include "ecdiv/reduction.hpp"

namespace ecdiv {

enum class Method { measured_re, re_lower, re_upper, grd_direct, grd_sdp, grd_dual_lower, bs_closed_form, dmax };
const char* to_string(Method m);
std::optional<Method> parse_method(const std::string& s);

enum class ResultStatus { optimal, near_optimal, infinite, infeasible, unbounded, numerical_failure, schedule_rejected };
const char* to_string(ResultStatus s);

struct MethodParameters {
  int m = 3;     // Gauss-Legendre nodes
  int k = 3;     // square-root levels
  int r = 13;    // knots of the relative-entropy bounds
  int ell = 8;   // alpha = 1 + 2^-ell
};

struct DivergenceResult {
  double value = 0.0;
  std::optional<std::vector<double>> probe;  // Fock populations of the optimal probe
  ResultStatus status = ResultStatus::numerical_failure;
  Method method = Method::bs_closed_form;
  MethodParameters params;
  double solver_gap = 0.0;

  bool infinite() const { return status == ResultStatus::infinite; }
  bool ok() const { return status == ResultStatus::optimal || status == ResultStatus::near_optimal; }
};

struct SolveOptions {
  double tolerance = 1e-8;
  const conic::Backend* backend = nullptr;  // default interior-point backend when null
  ProbeMode mode = ProbeMode::fock_diagonal;
  std::string dump_dir;  // write every program in SDPA format here when non-empty
  std::string tag = "sdp";
};

// ------------------------------------------------------------------ states

/// Tr[rho (ln rho - ln sigma)]; +inf when supp rho is not inside supp sigma.
double state_umegaki(const HermitianMatrix& rho, const HermitianMatrix& sigma);
/// (alpha - 1)^-1 ln Tr[G_{1-alpha}(rho, sigma)] for alpha in [0, 1) or (1, 2].
double state_grd(const HermitianMatrix& rho, const HermitianMatrix& sigma, double alpha);
/// Tr[D_op(rho || sigma)].
double state_bs(const HermitianMatrix& rho, const HermitianMatrix& sigma);

struct MeasuredReResult {
  double value = 0.0;
  HermitianMatrix omega;  // maximizer of Tr[rho ln w] - Tr[sigma w] + 1
  int iterations = 0;
  bool converged = false;
};

/// sup_{w > 0} Tr[rho ln w] - Tr[sigma w] + 1 by quasi-Newton ascent over
/// ln w, stopping at gradient norm 1e-10 or after max_iterations. converged
/// also holds when the line search stalls at gradient norm below 1e-8.
MeasuredReResult state_measured_re(const HermitianMatrix& rho, const HermitianMatrix& sigma,
                                   int max_iterations = 10000);

// ------------------------------------------------------------------ channels

/// lambda = min{l : l J^M - J^N >= 0}, by SDP. value holds lambda itself.
DivergenceResult dmax_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const SolveOptions& opts = {});
/// mu = max{m : J^N - m J^M >= 0} on supp J^M, clamped at 0.
DivergenceResult dmin_ratio_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const SolveOptions& opts = {});

/// 2^ell ln max_rho Tr[rho Tr_B G_{-2^-ell}(J^N, J^M)] over rho with Tr[H rho] <= E.
DivergenceResult ec_grd_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int ell,
                                const SolveOptions& opts = {});
/// max_rho Tr[rho Tr_B D_op(J^N || J^M)] over rho with Tr[H rho] <= E.
DivergenceResult ec_bs_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget,
                               const SolveOptions& opts = {});

/// Knots t_k = (sqrt(mu) + k (sqrt(lambda) - sqrt(mu)) / r)^2, k = 0..r.
std::vector<double> sqrt_uniform_knots(double mu, double lambda, int r);

DivergenceResult ec_channel_re_lower(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int r,
                                     const SolveOptions& opts = {});
DivergenceResult ec_channel_re_upper(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int r,
                                     const SolveOptions& opts = {});

struct ReBounds {
  DivergenceResult lower;
  DivergenceResult upper;
  DivergenceResult bs;
  bool sandwich_ok = false;  // lower <= upper + tol and upper <= bs + tol
};

/// Both bounds plus the validation of the knot schedule. When the sandwich
/// fails, both bounds are marked schedule_rejected.
ReBounds ec_channel_re_bounds(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int r,
                              const SolveOptions& opts = {}, double tol = 2e-5);

/// Measured relative entropy of channels through the (m, k) rational
/// approximant of the logarithm.
DivergenceResult ec_measured_re_channel(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget,
                                        int m, int k, const SolveOptions& opts = {});

/// Unconstrained GRD of order 1 + 2^-ell through the geometric-mean cascade SDP.
DivergenceResult grd_sdp_unconstrained(const ChoiMatrix& jn, const ChoiMatrix& jm, int ell,
                                       const SolveOptions& opts = {});
/// Energy-constrained GRD from the dual of the inner cascade program.
DivergenceResult grd_sdp_dual_lower(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, int ell,
                                    const SolveOptions& opts = {});

/// Evaluates several methods on one channel pair, in the order given.
/// re_lower and re_upper share one validated solve. grd_sdp is the
/// unconstrained cascade and ignores the budget; dmax reports ln lambda.
/// When wall_ms is given it receives the time spent per method; a shared
/// solve is charged to the first method that needed it.
std::vector<DivergenceResult> evaluate_methods(const std::vector<Method>& methods, const ChoiMatrix& jn,
                                               const ChoiMatrix& jm, const EnergyBudget& budget,
                                               const MethodParameters& params, const SolveOptions& opts = {},
                                               std::vector<double>* wall_ms = nullptr);

/// max c.p over p >= 0, sum p = 1, sum h_n p_n <= E, solved exactly by
/// vertex enumeration (an optimum has at most two nonzero entries).
struct SimplexLpResult {
  double value = 0.0;
  Eigen::VectorXd p;
};
SimplexLpResult maximize_on_energy_simplex(const Eigen::VectorXd& c, const Eigen::VectorXd& h, double e);

}  // namespace ecdiv
