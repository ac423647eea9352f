#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ecdiv/error.hpp"

namespace ecdiv::conic {

using Index = Eigen::Index;

enum class Status { optimal, near_optimal, infeasible, unbounded, numerical_failure };
const char* to_string(Status s);

struct Coefficient {
  Index row;
  Index col;
  double value;
};

/// Scalar affine function constant + sum_i coeffs[i] * y_i of the decision vector y.
class LinearForm {
 public:
  LinearForm() = default;
  explicit LinearForm(double constant) : constant_(constant) {}
  static LinearForm variable(Index var, double coeff = 1.0);

  double constant() const { return constant_; }
  const std::map<Index, double>& coefficients() const { return coeffs_; }
  double evaluate(const Eigen::VectorXd& y) const;

  LinearForm& operator+=(const LinearForm& o);
  LinearForm& operator-=(const LinearForm& o);
  LinearForm& operator*=(double s);
  LinearForm& operator+=(double c) { constant_ += c; return *this; }
  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(LinearForm a, double s) { return a *= s; }
  friend LinearForm operator*(double s, LinearForm a) { return a *= s; }
  friend LinearForm operator+(LinearForm a, double c) { return a += c; }
  friend LinearForm operator+(double c, LinearForm a) { return a += c; }
  friend LinearForm operator-(LinearForm a, double c) { return a += -c; }
  friend LinearForm operator-(double c, LinearForm a) { return (a *= -1.0) += c; }
  friend LinearForm operator-(LinearForm a) { return a *= -1.0; }

 private:
  double constant_ = 0.0;
  std::map<Index, double> coeffs_;
};

/// Real rows x cols matrix that is affine in the decision vector.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(Index rows, Index cols);
  static AffineExpr constant(const Eigen::MatrixXd& c);
  /// y_var * m, with exact zeros of m skipped.
  static AffineExpr scaled_variable(Index var, const Eigen::MatrixXd& m);
  static AffineExpr from_terms(Index rows, Index cols, Index var, std::vector<Coefficient> coeffs);

  Index rows() const { return constant_.rows(); }
  Index cols() const { return constant_.cols(); }
  const Eigen::MatrixXd& constant_part() const { return constant_; }
  const std::map<Index, std::vector<Coefficient>>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  AffineExpr transpose() const;
  AffineExpr block(Index row, Index col, Index rows, Index cols) const;
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(double s);
  AffineExpr& operator+=(const Eigen::MatrixXd& c);
  AffineExpr& operator-=(const Eigen::MatrixXd& c);
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator+(AffineExpr a, const Eigen::MatrixXd& c) { return a += c; }
  friend AffineExpr operator-(AffineExpr a, const Eigen::MatrixXd& c) { return a -= c; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

  /// Adds scale * y_var * m in place.
  void add_scaled_variable(Index var, const Eigen::MatrixXd& m, double scale = 1.0);

 private:
  friend AffineExpr hstack(const AffineExpr&, const AffineExpr&);
  friend AffineExpr vstack(const AffineExpr&, const AffineExpr&);
  void check_shape(const AffineExpr& o) const;
  Eigen::MatrixXd constant_;
  std::map<Index, std::vector<Coefficient>> terms_;
};

AffineExpr hstack(const AffineExpr& a, const AffineExpr& b);
AffineExpr vstack(const AffineExpr& a, const AffineExpr& b);
/// [[a, b], [b^T, c]].
AffineExpr block2x2(const AffineExpr& a, const AffineExpr& b, const AffineExpr& c);
/// Tr[c^T x] = sum_ij c_ij x_ij.
LinearForm trace_product(const Eigen::MatrixXd& c, const AffineExpr& x);
LinearForm trace(const AffineExpr& x);
LinearForm entry(const AffineExpr& x, Index i, Index j);
/// scalar * identity(n), the scalar being an affine form.
AffineExpr times_identity(const LinearForm& f, Index n);

struct MatrixVar {
  std::string name;
  Index offset = 0;
  Index rows = 0;
  Index cols = 0;
  bool symmetric = false;
  Index size() const { return symmetric ? rows * (rows + 1) / 2 : rows * cols; }
};

struct ScalarVar {
  std::string name;
  Index index = 0;
};

struct Inequality {
  AffineExpr expr;  // expr >= 0 in the PSD order
  std::string label;
};

struct Equality {
  LinearForm form;  // form == 0
  std::string label;
};

enum class Sense { minimize, maximize };

class ConicProgram {
 public:
  MatrixVar add_symmetric(const std::string& name, Index n, bool psd = false);
  MatrixVar add_matrix(const std::string& name, Index rows, Index cols);
  ScalarVar add_scalar(const std::string& name, bool nonneg = false);

  AffineExpr expr(const MatrixVar& v) const;
  LinearForm expr(const ScalarVar& v) const { return LinearForm::variable(v.index); }

  /// Registers expr >= 0 (PSD). expr must be square and symmetric.
  void add_psd(const AffineExpr& expr, std::string label = {});
  /// Registers [[a, b], [b^T, c]] >= 0.
  void add_psd_block_2x2(const AffineExpr& a, const AffineExpr& b, const AffineExpr& c, std::string label = {});
  void add_nonneg(const LinearForm& f, std::string label = {});
  void add_equality(const LinearForm& f, std::string label = {});
  /// Entrywise lhs == rhs; only the upper triangle when both sides are symmetric.
  void add_equality(const AffineExpr& lhs, const AffineExpr& rhs, bool symmetric, std::string label = {});

  void minimize(const LinearForm& f) { sense_ = Sense::minimize; objective_ = f; }
  void maximize(const LinearForm& f) { sense_ = Sense::maximize; objective_ = f; }

  Index num_scalars() const { return num_scalars_; }
  Sense sense() const { return sense_; }
  const LinearForm& objective() const { return objective_; }
  const std::vector<Inequality>& inequalities() const { return inequalities_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const std::vector<MatrixVar>& matrix_variables() const { return matrix_vars_; }
  const std::vector<ScalarVar>& scalar_variables() const { return scalar_vars_; }

 private:
  void check_name(const std::string& name);
  Index num_scalars_ = 0;
  Sense sense_ = Sense::minimize;
  LinearForm objective_;
  std::vector<Inequality> inequalities_;
  std::vector<Equality> equalities_;
  std::vector<MatrixVar> matrix_vars_;
  std::vector<ScalarVar> scalar_vars_;
};

/// min c^T y  s.t.  F_b(y) = C_b + sum_i y_i A_bi >= 0 for every block,  G y = h.
struct StandardForm {
  struct Term {
    Index var;
    std::vector<Coefficient> coeffs;  // both triangles stored
  };
  struct Block {
    Index dim = 0;
    Eigen::MatrixXd constant;
    std::vector<Term> terms;  // sorted by var
    std::string label;
  };
  Index num_vars = 0;
  Eigen::VectorXd c;
  std::vector<Block> blocks;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  bool constant_infeasible = false;
};

/// Lowers a program to the standard form. Constant inequalities are checked
/// here and dropped. Throws a model-construction error if a variable is not
/// tied to any inequality.
StandardForm lower(const ConicProgram& p);

struct SolverSettings {
  double tolerance = 1e-8;
  int max_iterations = 250;
};

struct RawResult {
  Status status = Status::numerical_failure;
  Eigen::VectorXd y;
  double primal_objective = 0.0;  // c^T y
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

/// Anything that can solve a StandardForm.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual RawResult solve(const StandardForm& sf, const SolverSettings& settings) const = 0;
};

/// Primal-dual interior-point method: HKM search direction, Mehrotra
/// predictor-corrector, infeasible starting point.
class InteriorPointBackend final : public Backend {
 public:
  std::string name() const override { return "ipm"; }
  RawResult solve(const StandardForm& sf, const SolverSettings& settings) const override;
};

const Backend& default_backend();
/// Backend registered under name, or nullptr.
const Backend* find_backend(const std::string& name);

struct Solution {
  Status status = Status::numerical_failure;
  double objective_value = 0.0;  // in the program's own sense, constant included
  double solver_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  Eigen::VectorXd y;
  std::map<std::string, Eigen::MatrixXd> variable_values;

  bool usable() const { return status == Status::optimal || status == Status::near_optimal; }
  Eigen::MatrixXd value(const MatrixVar& v) const;
  double value(const ScalarVar& v) const { return y(v.index); }
  double value(const LinearForm& f) const { return f.evaluate(y); }
  Eigen::MatrixXd value(const AffineExpr& e) const { return e.evaluate(y); }
};

Solution solve(const ConicProgram& p, double tolerance = 1e-8, const Backend* backend = nullptr);

struct AuditReport {
  double max_psd_violation = 0.0;       // most negative eigenvalue, sign flipped
  double max_equality_violation = 0.0;
  std::string worst_label;
  bool passed(double tol) const { return max_psd_violation <= tol && max_equality_violation <= tol; }
};

/// Re-evaluates every constraint at the returned point.
AuditReport audit(const ConicProgram& p, const Solution& s);

/// SDPA sparse format. Equalities are written as pairs of rows in a trailing
/// diagonal block; the objective is always written as a minimization.
void write_sdpa(const ConicProgram& p, std::ostream& os);

/// Real symmetric [[Re, -Im], [Im, Re]] embedding of a Hermitian matrix; it is
/// PSD exactly when the input is.
Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd extract_hermitian(const Eigen::MatrixXd& e);

}  // namespace ecdiv::conic
