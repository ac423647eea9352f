#include "ecdiv/channels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ecdiv/quadrature.hpp"

namespace ecdiv {
namespace {

void check_cutoff(Index cutoff) {
  if (cutoff < 0) throw Error(ErrorKind::invalid_dimension, "channel cutoff must be >= 0");
}

void check_gamma(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw Error(ErrorKind::invalid_parameter, "gamma must be finite and >= 0");
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::invalid_parameter, "eta must lie in [0, 1]");
}

double log_binomial(Index n, Index k) {
  return std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) - std::lgamma(double(n - k + 1));
}

// x^p with the convention 0^0 = 1.
double power_or_one(double x, double p) { return p == 0.0 ? 1.0 : std::pow(x, p); }

ChoiMatrix loss_like_choi(double eta, double gamma, Index cutoff) {
  const Index d = cutoff + 1;
  BipartiteIndex idx(d, d);
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(idx.dim(), idx.dim());
  for (Index m = 0; m < d; ++m) {
    for (Index n = 0; n < d; ++n) {
      const double deph = std::exp(-0.5 * gamma * double((m - n) * (m - n)));
      for (Index k = 0; k <= std::min(m, n); ++k) {
        if (k > 0 && eta == 1.0) break;
        const double binom = std::exp(0.5 * (log_binomial(m, k) + log_binomial(n, k)));
        const double amp = binom * power_or_one(eta, 0.5 * double(m + n) - double(k)) * power_or_one(1.0 - eta, double(k));
        j(idx.flat(m, m - k), idx.flat(n, n - k)) = amp * deph;
      }
    }
  }
  return {HermitianMatrix(j), idx};
}

}  // namespace

void ChannelModel::validate() const {
  check_cutoff(cutoff);
  check_gamma(gamma);
  check_eta(eta);
}

std::string ChannelModel::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ChannelKind::identity: os << "identity"; break;
    case ChannelKind::dephasing: os << "dephasing(gamma=" << gamma << ")"; break;
    case ChannelKind::loss: os << "loss(eta=" << eta << ")"; break;
    case ChannelKind::loss_dephasing: os << "loss_dephasing(eta=" << eta << ", gamma=" << gamma << ")"; break;
  }
  os << " N=" << cutoff;
  return os.str();
}

bool ChoiMatrix::is_valid(double tol) const {
  if (matrix.dim() != index.dim()) return false;
  if (matrix.min_eigenvalue() < -tol) return false;
  return partial_trace_b(matrix, index).is_approx(HermitianMatrix::identity(index.dim_r), tol);
}

double log_wrapped_normal_pdf(double gamma, double phi) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::invalid_parameter, "wrapped normal needs gamma > 0");
  const double two_pi = 2.0 * std::numbers::pi;
  // Reduce phi to [-pi, pi) so that k = 0 is the dominant image.
  const double x = phi - two_pi * std::floor((phi + std::numbers::pi) / two_pi);
  const double lead = -x * x / (2.0 * gamma);
  double sum = 1.0;
  for (int k = 1;; ++k) {
    const double a = std::exp(-(x + two_pi * k) * (x + two_pi * k) / (2.0 * gamma) - lead);
    const double b = std::exp(-(x - two_pi * k) * (x - two_pi * k) / (2.0 * gamma) - lead);
    sum += a + b;
    if (a + b < 1e-17 * sum) break;
  }
  return lead + std::log(sum) - 0.5 * std::log(two_pi * gamma);
}

double wrapped_normal_pdf(double gamma, double phi) { return std::exp(log_wrapped_normal_pdf(gamma, phi)); }

ChoiMatrix identity_choi(Index cutoff) { return dephasing_choi(0.0, cutoff); }

ChoiMatrix dephasing_choi(double gamma, Index cutoff) {
  check_cutoff(cutoff);
  check_gamma(gamma);
  const Index d = cutoff + 1;
  BipartiteIndex idx(d, d);
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(idx.dim(), idx.dim());
  for (Index m = 0; m < d; ++m)
    for (Index n = 0; n < d; ++n) j(idx.flat(m, m), idx.flat(n, n)) = std::exp(-0.5 * gamma * double((m - n) * (m - n)));
  return {HermitianMatrix(j), idx};
}

ChoiMatrix loss_choi(double eta, Index cutoff) {
  check_cutoff(cutoff);
  check_eta(eta);
  return loss_like_choi(eta, 0.0, cutoff);
}

ChoiMatrix loss_dephasing_choi(double eta, double gamma, Index cutoff) {
  check_cutoff(cutoff);
  check_eta(eta);
  check_gamma(gamma);
  return loss_like_choi(eta, gamma, cutoff);
}

ChoiMatrix choi(const ChannelModel& model) {
  model.validate();
  switch (model.kind) {
    case ChannelKind::identity: return identity_choi(model.cutoff);
    case ChannelKind::dephasing: return dephasing_choi(model.gamma, model.cutoff);
    case ChannelKind::loss: return loss_choi(model.eta, model.cutoff);
    case ChannelKind::loss_dephasing: return loss_dephasing_choi(model.eta, model.gamma, model.cutoff);
  }
  throw Error(ErrorKind::invalid_parameter, "unknown channel kind");
}

HermitianMatrix apply_dephasing(double gamma, const HermitianMatrix& rho) {
  check_gamma(gamma);
  Eigen::MatrixXcd out = rho.matrix();
  for (Index m = 0; m < out.rows(); ++m)
    for (Index n = 0; n < out.cols(); ++n) out(m, n) *= std::exp(-0.5 * gamma * double((m - n) * (m - n)));
  return HermitianMatrix(out);
}

double classical_kl_wrapped_normal(double g1, double g2) {
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw Error(ErrorKind::invalid_parameter, "classical_kl_wrapped_normal needs gamma > 0");
  auto integrand = [&](double phi) {
    const double lp = log_wrapped_normal_pdf(g1, phi);
    const double p = std::exp(lp);
    if (p == 0.0) return 0.0;
    return p * (lp - log_wrapped_normal_pdf(g2, phi));
  };
  return integrate_adaptive(integrand, -std::numbers::pi, std::numbers::pi, 1e-11).value;
}

}  // namespace ecdiv
