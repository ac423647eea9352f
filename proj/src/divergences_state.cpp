#include <cmath>
#include <limits>

#include "ecdiv/divergences.hpp"
#include "ecdiv/matfunc.hpp"

namespace ecdiv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const HermitianMatrix& rho, const HermitianMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorKind::invalid_dimension, "state pair has mismatched dimensions");
}

bool is_real(const HermitianMatrix& a) { return a.matrix().imag().cwiseAbs().maxCoeff() == 0.0; }

// Hermitian H <-> real parameter vector (diagonal, then real and imaginary
// parts of the strict upper triangle).
struct HermitianCoords {
  Index n;
  bool real_only;
  Index size() const { return real_only ? n * (n + 1) / 2 : n * n; }

  Eigen::MatrixXcd to_matrix(const Eigen::VectorXd& th) const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    Index k = 0;
    for (Index i = 0; i < n; ++i) h(i, i) = th(k++);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i) {
        h(i, j) += th(k);
        h(j, i) += th(k++);
      }
    if (!real_only)
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < j; ++i) {
          h(i, j) += cdouble(0, th(k));
          h(j, i) -= cdouble(0, th(k++));
        }
    return h;
  }

  Eigen::VectorXd gradient(const Eigen::MatrixXcd& g) const {
    Eigen::VectorXd out(size());
    Index k = 0;
    for (Index i = 0; i < n; ++i) out(k++) = g(i, i).real();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i) out(k++) = 2.0 * g(i, j).real();
    if (!real_only)
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < j; ++i) out(k++) = 2.0 * g(i, j).imag();
    return out;
  }
};

struct Objective {
  double value;
  Eigen::VectorXd grad;
};

// f(H) = Tr[rho H] - Tr[sigma e^H] + 1 and its gradient rho - Dexp_H[sigma].
Objective evaluate(const HermitianCoords& hc, const Eigen::VectorXd& th, const Eigen::MatrixXcd& rho,
                   const Eigen::MatrixXcd& sigma) {
  const Eigen::MatrixXcd h = hc.to_matrix(th);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXcd& u = es.eigenvectors();
  const Index n = hc.n;
  Eigen::MatrixXd gamma(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double d = ev(i) - ev(j);
      gamma(i, j) = std::abs(d) < 1e-10 ? std::exp(0.5 * (ev(i) + ev(j))) : (std::exp(ev(i)) - std::exp(ev(j))) / d;
    }
  const Eigen::MatrixXcd s_eig = u.adjoint() * sigma * u;
  const Eigen::MatrixXcd dexp = u * s_eig.cwiseProduct(gamma.cast<cdouble>()) * u.adjoint();
  double tr_sigma_exp = 0.0;
  for (Index i = 0; i < n; ++i) tr_sigma_exp += s_eig(i, i).real() * std::exp(ev(i));
  const double value = (rho * h).trace().real() - tr_sigma_exp + 1.0;
  return {value, hc.gradient(rho - dexp)};
}

}  // namespace

double state_umegaki(const HermitianMatrix& rho, const HermitianMatrix& sigma) {
  check_pair(rho, sigma);
  if (!support_contained(rho, sigma)) return kInf;
  const auto log_sigma = apply_spectral(sigma, [fl = kEigenFloor * sigma.max_eigenvalue()](double v) {
    return v > fl ? std::log(v) : 0.0;
  });
  double ent = 0.0;
  for (double v : rho.eigenvalues())
    if (v > 0.0) ent += v * std::log(v);
  return ent - (rho.matrix() * log_sigma.matrix()).trace().real();
}

double state_grd(const HermitianMatrix& rho, const HermitianMatrix& sigma, double alpha) {
  check_pair(rho, sigma);
  if (!(alpha >= 0.0 && alpha <= 2.0) || alpha == 1.0)
    throw Error(ErrorKind::invalid_parameter, "state_grd: alpha must lie in [0, 1) or (1, 2]");
  if (alpha > 1.0 && !support_contained(rho, sigma)) return kInf;
  const double q = weighted_geometric_mean(rho, sigma, 1.0 - alpha).trace();
  return std::log(q) / (alpha - 1.0);
}

double state_bs(const HermitianMatrix& rho, const HermitianMatrix& sigma) {
  check_pair(rho, sigma);
  const auto d = operator_relative_entropy(rho, sigma);
  return d ? d->trace() : kInf;
}

MeasuredReResult state_measured_re(const HermitianMatrix& rho, const HermitianMatrix& sigma, int max_iterations) {
  check_pair(rho, sigma);
  MeasuredReResult out;
  if (!support_contained(rho, sigma)) {
    out.value = kInf;
    out.converged = true;
    return out;
  }
  const HermitianCoords hc{rho.dim(), is_real(rho) && is_real(sigma)};
  const Index np = hc.size();
  Eigen::VectorXd th = Eigen::VectorXd::Zero(np);
  Objective cur = evaluate(hc, th, rho.matrix(), sigma.matrix());
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(np, np);
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (cur.grad.norm() < 1e-10) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = hinv * cur.grad;
    if (dir.dot(cur.grad) <= 0.0) {
      hinv.setIdentity();
      dir = cur.grad;
    }
    double step = 1.0;
    Objective next{};
    Eigen::VectorXd th_next;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      th_next = th + step * dir;
      next = evaluate(hc, th_next, rho.matrix(), sigma.matrix());
      if (!std::isfinite(next.value)) continue;
      // near the optimum the gain drops below roundoff of the value, so a
      // smaller gradient is accepted as progress too
      const bool flat = std::abs(next.value - cur.value) <= 1e-13 * std::max(1.0, std::abs(cur.value));
      if (next.value >= cur.value + 1e-4 * step * dir.dot(cur.grad) || (flat && next.grad.norm() < cur.grad.norm())) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = cur.grad.norm() < 1e-8;
      break;
    }
    const Eigen::VectorXd s = th_next - th;
    const Eigen::VectorXd yv = cur.grad - next.grad;  // ascent: curvature of -f
    const double sy = s.dot(yv);
    if (sy > 1e-300) {
      const double rr = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(np, np);
      hinv = (id - rr * s * yv.transpose()) * hinv * (id - rr * yv * s.transpose()) + rr * s * s.transpose();
    }
    th = th_next;
    cur = next;
  }
  out.iterations = it;
  out.value = cur.value;
  out.omega = apply_spectral(HermitianMatrix(hc.to_matrix(th)), [](double v) { return std::exp(v); });
  return out;
}

SimplexLpResult maximize_on_energy_simplex(const Eigen::VectorXd& c, const Eigen::VectorXd& h, double e) {
  const Index n = c.size();
  if (h.size() != n || n < 1) throw Error(ErrorKind::invalid_dimension, "maximize_on_energy_simplex: size mismatch");
  SimplexLpResult best;
  best.value = -kInf;
  auto consider = [&](double v, Index i, Index j, double pj) {
    if (v > best.value + 1e-15 * std::max(1.0, std::abs(v))) {
      best.value = v;
      best.p = Eigen::VectorXd::Zero(n);
      best.p(i) = 1.0 - pj;
      if (pj > 0.0) best.p(j) = pj;
    }
  };
  for (Index i = 0; i < n; ++i) {
    if (h(i) <= e) consider(c(i), i, i, 0.0);
    for (Index j = 0; j < n; ++j) {
      if (!(h(i) < e && h(j) > e)) continue;
      const double pj = (e - h(i)) / (h(j) - h(i));
      consider((1.0 - pj) * c(i) + pj * c(j), i, j, pj);
    }
  }
  if (!std::isfinite(best.value)) throw Error(ErrorKind::invalid_parameter, "energy budget below every level");
  return best;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::measured_re: return "measured_re";
    case Method::re_lower: return "re_lower";
    case Method::re_upper: return "re_upper";
    case Method::grd_direct: return "grd";
    case Method::grd_sdp: return "grd_sdp";
    case Method::grd_dual_lower: return "grd_dual";
    case Method::bs_closed_form: return "bs";
    case Method::dmax: return "dmax";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& s) {
  for (Method m : {Method::measured_re, Method::re_lower, Method::re_upper, Method::grd_direct, Method::grd_sdp,
                   Method::grd_dual_lower, Method::bs_closed_form, Method::dmax})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

const char* to_string(ResultStatus s) {
  switch (s) {
    case ResultStatus::optimal: return "optimal";
    case ResultStatus::near_optimal: return "near_optimal";
    case ResultStatus::infinite: return "infinite";
    case ResultStatus::infeasible: return "infeasible";
    case ResultStatus::unbounded: return "unbounded";
    case ResultStatus::numerical_failure: return "numerical_failure";
    case ResultStatus::schedule_rejected: return "schedule_rejected";
  }
  return "unknown";
}

}  // namespace ecdiv
