#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ecdiv/hilbert.hpp"

namespace ecdiv {

/// Eigenvalues below kEigenFloor * (largest eigenvalue) are treated as zero.
inline constexpr double kEigenFloor = 1e-12;

template <typename S>
struct SupportInfo {
  using Matrix = typename Hermitian<S>::Matrix;
  Index rank = 0;
  Matrix basis;      // dim x rank isometry onto the support
  Matrix kernel;     // dim x (dim - rank) isometry onto the kernel
  double eigen_floor = 0.0;

  Hermitian<S> projector() const { return Hermitian<S>(Matrix(basis * basis.adjoint())); }
};

struct QuadratureRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule on [0, 1] via the Golub-Welsch eigenproblem.
QuadratureRule gauss_legendre(int m);

namespace detail {

template <typename S>
struct Spectral {
  typename Hermitian<S>::RealVector values;
  typename Hermitian<S>::Matrix vectors;
};

template <typename S>
Spectral<S> spectral(const Hermitian<S>& x) {
  Eigen::SelfAdjointEigenSolver<typename Hermitian<S>::Matrix> es(x.matrix());
  if (es.info() != Eigen::Success) throw Error(ErrorKind::invalid_input, "eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

template <typename S, typename F>
Hermitian<S> rebuild(const Spectral<S>& sp, F&& f) {
  typename Hermitian<S>::RealVector fv = sp.values.unaryExpr(std::forward<F>(f));
  return Hermitian<S>(typename Hermitian<S>::Matrix(sp.vectors * fv.template cast<S>().asDiagonal() *
                                                    sp.vectors.adjoint()));
}

template <typename S>
double floor_for(const Spectral<S>& sp, double rel_floor) {
  return rel_floor * std::max(0.0, double(sp.values.maxCoeff()));
}

template <typename S>
void require_psd(const Spectral<S>& sp, const char* who) {
  const double scale = std::max(1.0, double(sp.values.cwiseAbs().maxCoeff()));
  if (sp.values.minCoeff() < -1e-9 * scale) throw Error(ErrorKind::invalid_input, std::string(who) + ": input is not PSD");
}

template <typename S>
void require_same_dim(const Hermitian<S>& x, const Hermitian<S>& y, const char* who) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::invalid_dimension, std::string(who) + ": dimension mismatch");
}

}  // namespace detail

/// f(x) for a Hermitian x through its eigendecomposition.
template <typename S, typename F>
Hermitian<S> apply_spectral(const Hermitian<S>& x, F&& f) {
  return detail::rebuild(detail::spectral(x), std::forward<F>(f));
}

template <typename S>
SupportInfo<S> support(const Hermitian<S>& x, double rel_floor = kEigenFloor) {
  const auto sp = detail::spectral(x);
  SupportInfo<S> info;
  info.eigen_floor = detail::floor_for(sp, rel_floor);
  const Index n = x.dim();
  std::vector<Index> keep, drop;
  for (Index i = 0; i < n; ++i) (sp.values(i) > info.eigen_floor ? keep : drop).push_back(i);
  info.rank = Index(keep.size());
  info.basis.resize(n, info.rank);
  info.kernel.resize(n, Index(drop.size()));
  for (Index i = 0; i < info.rank; ++i) info.basis.col(i) = sp.vectors.col(keep[i]);
  for (Index i = 0; i < Index(drop.size()); ++i) info.kernel.col(i) = sp.vectors.col(drop[i]);
  return info;
}

/// True when x has no weight (relative to its norm, above tol) on the kernel of y.
template <typename S>
bool support_contained(const Hermitian<S>& x, const Hermitian<S>& y, double tol = 1e-8,
                       double rel_floor = kEigenFloor) {
  detail::require_same_dim(x, y, "support_contained");
  const auto info = support(y, rel_floor);
  if (info.kernel.cols() == 0) return true;
  const double xnorm = x.matrix().cwiseAbs().maxCoeff();
  if (xnorm == 0.0) return true;
  const auto leak = Hermitian<S>(typename Hermitian<S>::Matrix(info.kernel.adjoint() * x.matrix() * info.kernel));
  return leak.eigenvalues().cwiseAbs().maxCoeff() <= tol * xnorm;
}

/// x^p for PSD x. Eigenvalues below the floor count as zero, so negative
/// powers act as pseudo-inverse powers and p = 0 gives the support projector.
template <typename S>
Hermitian<S> matrix_power(const Hermitian<S>& x, double p, double rel_floor = kEigenFloor) {
  const auto sp = detail::spectral(x);
  detail::require_psd(sp, "matrix_power");
  const double fl = detail::floor_for(sp, rel_floor);
  return detail::rebuild(sp, [&](auto v) {
    using R = decltype(v);
    return v > fl ? R(std::pow(double(v), p)) : R(0);
  });
}

/// G_t(x, y) = x^{1/2} (x^{-1/2} y x^{-1/2})^t x^{1/2}, inverses taken on the
/// support of x. For t < 0 the equivalent form x^{1/2} (x^{1/2} y^{-1} x^{1/2})^{-t} x^{1/2}
/// is used, which stays correct when x is singular with supp x inside supp y.
template <typename S>
Hermitian<S> weighted_geometric_mean(const Hermitian<S>& x, const Hermitian<S>& y, double t,
                                     double rel_floor = kEigenFloor) {
  detail::require_same_dim(x, y, "weighted_geometric_mean");
  if (!(t >= -1.0 && t <= 2.0)) throw Error(ErrorKind::invalid_parameter, "weighted_geometric_mean: t outside [-1, 2]");
  using M = typename Hermitian<S>::Matrix;
  const auto sx = detail::spectral(x);
  detail::require_psd(sx, "weighted_geometric_mean");
  detail::require_psd(detail::spectral(y), "weighted_geometric_mean");
  const double fx = detail::floor_for(sx, rel_floor);
  const auto half = detail::rebuild(sx, [&](auto v) { return v > fx ? decltype(v)(std::sqrt(double(v))) : decltype(v)(0); });
  Hermitian<S> inner;
  double power = t;
  if (t >= 0.0) {
    const auto neg_half = detail::rebuild(sx, [&](auto v) { return v > fx ? decltype(v)(1.0 / std::sqrt(double(v))) : decltype(v)(0); });
    inner = Hermitian<S>(M(neg_half.matrix() * y.matrix() * neg_half.matrix()));
  } else {
    const auto y_inv = matrix_power(y, -1.0, rel_floor);
    inner = Hermitian<S>(M(half.matrix() * y_inv.matrix() * half.matrix()));
    power = -t;
  }
  const auto si = detail::spectral(inner);
  const double fi = detail::floor_for(si, rel_floor);
  const auto pw = detail::rebuild(si, [&](auto v) { return v > fi ? decltype(v)(std::pow(double(v), power)) : decltype(v)(0); });
  return Hermitian<S>(M(half.matrix() * pw.matrix() * half.matrix()));
}

/// D_op(x || y) = x^{1/2} ln(x^{1/2} y^{-1} x^{1/2}) x^{1/2}. Returns nullopt when
/// supp x is not contained in supp y (the divergence is then infinite).
template <typename S>
std::optional<Hermitian<S>> operator_relative_entropy(const Hermitian<S>& x, const Hermitian<S>& y,
                                                      double rel_floor = kEigenFloor) {
  detail::require_same_dim(x, y, "operator_relative_entropy");
  using M = typename Hermitian<S>::Matrix;
  const auto sx = detail::spectral(x);
  detail::require_psd(sx, "operator_relative_entropy");
  detail::require_psd(detail::spectral(y), "operator_relative_entropy");
  if (!support_contained(x, y, 1e-8, rel_floor)) return std::nullopt;
  const double fx = detail::floor_for(sx, rel_floor);
  const auto half = detail::rebuild(sx, [&](auto v) { return v > fx ? decltype(v)(std::sqrt(double(v))) : decltype(v)(0); });
  const auto y_inv = matrix_power(y, -1.0, rel_floor);
  const auto si = detail::spectral(Hermitian<S>(M(half.matrix() * y_inv.matrix() * half.matrix())));
  const double fi = detail::floor_for(si, rel_floor);
  const auto lg = detail::rebuild(si, [&](auto v) { return v > fi ? decltype(v)(std::log(double(v))) : decltype(v)(0); });
  return Hermitian<S>(M(half.matrix() * lg.matrix() * half.matrix()));
}

/// Scalar rational approximant r_{m,k}(x) = 2^k sum_j w_j f_{t_j}(x^{2^-k}) of
/// ln x, with f_t(x) = (x - 1) / (t (x - 1) + 1) and Gauss-Legendre nodes t_j.
double rational_log_scalar(double x, const QuadratureRule& rule, int k);

/// r_{m,k} applied to a PD matrix through its eigendecomposition.
template <typename S>
Hermitian<S> rational_log_approx(const Hermitian<S>& z, int m, int k) {
  if (m < 1 || k < 0) throw Error(ErrorKind::invalid_parameter, "rational_log_approx: need m >= 1, k >= 0");
  const auto sp = detail::spectral(z);
  if (!(sp.values.minCoeff() > 0.0)) throw Error(ErrorKind::invalid_input, "rational_log_approx: input must be PD");
  const auto rule = gauss_legendre(m);
  return detail::rebuild(sp, [&](auto v) { return decltype(v)(rational_log_scalar(double(v), rule, k)); });
}

}  // namespace ecdiv
