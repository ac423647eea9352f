#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <type_traits>

#include "ecdiv/error.hpp"

namespace ecdiv {

using Index = Eigen::Index;
using cdouble = std::complex<double>;

/// Dense Hermitian matrix. Whatever is passed in is stored as (M + M^dagger)/2,
/// so the type never holds a non-Hermitian matrix.
template <typename Scalar_>
class Hermitian {
 public:
  using Scalar = Scalar_;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RealVector = Eigen::Matrix<RealScalar, Eigen::Dynamic, 1>;

  Hermitian() = default;

  template <typename Derived>
  explicit Hermitian(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw Error(ErrorKind::invalid_dimension, "Hermitian: matrix must be square with dim >= 1");
    m_ = (m + m.adjoint()) / RealScalar(2);
  }

  static Hermitian identity(Index n) { return Hermitian(Matrix::Identity(n, n)); }
  static Hermitian zero(Index n) { return Hermitian(Matrix::Zero(n, n)); }
  static Hermitian diagonal(const RealVector& d) {
    return Hermitian(Matrix(d.template cast<Scalar>().asDiagonal()));
  }

  Index dim() const { return m_.rows(); }
  bool empty() const { return m_.size() == 0; }
  const Matrix& matrix() const { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }
  RealScalar trace() const { return std::real(m_.trace()); }

  RealVector eigenvalues() const {
    return Eigen::SelfAdjointEigenSolver<Matrix>(m_, Eigen::EigenvaluesOnly).eigenvalues();
  }
  RealScalar min_eigenvalue() const { return eigenvalues().minCoeff(); }
  RealScalar max_eigenvalue() const { return eigenvalues().maxCoeff(); }

  template <typename T>
  Hermitian<T> cast() const {
    if constexpr (std::is_same_v<T, Scalar>) {
      return *this;
    } else if constexpr (Eigen::NumTraits<T>::IsComplex) {
      return Hermitian<T>(m_.template cast<T>());
    } else {
      return Hermitian<T>(Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>(m_.real()));
    }
  }

  Hermitian& operator+=(const Hermitian& o) { check_same(o); m_ += o.m_; return *this; }
  Hermitian& operator-=(const Hermitian& o) { check_same(o); m_ -= o.m_; return *this; }
  Hermitian& operator*=(RealScalar s) { m_ *= s; return *this; }

  friend Hermitian operator+(Hermitian a, const Hermitian& b) { return a += b; }
  friend Hermitian operator-(Hermitian a, const Hermitian& b) { return a -= b; }
  friend Hermitian operator*(Hermitian a, RealScalar s) { return a *= s; }
  friend Hermitian operator*(RealScalar s, Hermitian a) { return a *= s; }

  bool is_approx(const Hermitian& o, RealScalar tol) const {
    return dim() == o.dim() && (m_ - o.m_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  void check_same(const Hermitian& o) const {
    if (o.dim() != dim()) throw Error(ErrorKind::invalid_dimension, "Hermitian: dimension mismatch");
  }
  Matrix m_;
};

using HermitianMatrix = Hermitian<cdouble>;
using SymmetricMatrix = Hermitian<double>;

/// Flat index r * dim_b + b of a reference (R) and output (B) factor.
struct BipartiteIndex {
  Index dim_r = 1;
  Index dim_b = 1;

  BipartiteIndex() = default;
  BipartiteIndex(Index r, Index b) : dim_r(r), dim_b(b) {
    if (r < 1 || b < 1) throw Error(ErrorKind::invalid_dimension, "BipartiteIndex: factor dims must be >= 1");
  }
  Index dim() const { return dim_r * dim_b; }
  Index flat(Index r, Index b) const { return r * dim_b + b; }
};

/// Photon-number Hamiltonian H = diag(0, 1, ..., N) together with a budget E.
struct EnergyBudget {
  HermitianMatrix hamiltonian;
  double budget = 0.0;

  EnergyBudget() = default;
  EnergyBudget(HermitianMatrix h, double e);
  Index dim() const { return hamiltonian.dim(); }
  double level(Index n) const { return hamiltonian(n, n).real(); }
};

HermitianMatrix number_operator(Index dim);
EnergyBudget photon_budget(Index dim, double e);

template <typename S>
Hermitian<S> tensor(const Hermitian<S>& a, const Hermitian<S>& b) {
  using M = typename Hermitian<S>::Matrix;
  const Index na = a.dim(), nb = b.dim();
  M out(na * nb, na * nb);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j) out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
  return Hermitian<S>(out);
}

template <typename S>
Hermitian<S> partial_trace_b(const Hermitian<S>& m, BipartiteIndex idx) {
  if (m.dim() != idx.dim()) throw Error(ErrorKind::invalid_dimension, "partial_trace_b: dimension mismatch");
  typename Hermitian<S>::Matrix out = Hermitian<S>::Matrix::Zero(idx.dim_r, idx.dim_r);
  for (Index r = 0; r < idx.dim_r; ++r)
    for (Index s = 0; s < idx.dim_r; ++s)
      for (Index b = 0; b < idx.dim_b; ++b) out(r, s) += m(idx.flat(r, b), idx.flat(s, b));
  return Hermitian<S>(out);
}

template <typename S>
Hermitian<S> partial_trace_r(const Hermitian<S>& m, BipartiteIndex idx) {
  if (m.dim() != idx.dim()) throw Error(ErrorKind::invalid_dimension, "partial_trace_r: dimension mismatch");
  typename Hermitian<S>::Matrix out = Hermitian<S>::Matrix::Zero(idx.dim_b, idx.dim_b);
  for (Index b = 0; b < idx.dim_b; ++b)
    for (Index c = 0; c < idx.dim_b; ++c)
      for (Index r = 0; r < idx.dim_r; ++r) out(b, c) += m(idx.flat(r, b), idx.flat(r, c));
  return Hermitian<S>(out);
}

/// |psi><psi| with psi = sum_n sqrt(p_n) |n>|n>, the canonical purification
/// of diag(p).
HermitianMatrix purify_diagonal(std::span<const double> spectrum);

/// Validates a probability vector (non-negative, sums to one within tol).
void check_distribution(std::span<const double> p, double tol = 1e-10);

}  // namespace ecdiv
