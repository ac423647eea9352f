#include "ecdiv/conic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace ecdiv::conic {
namespace {

void merge_coefficients(std::vector<Coefficient>& cs) {
  std::sort(cs.begin(), cs.end(), [](const Coefficient& a, const Coefficient& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  std::vector<Coefficient> out;
  for (const auto& c : cs) {
    if (!out.empty() && out.back().row == c.row && out.back().col == c.col)
      out.back().value += c.value;
    else
      out.push_back(c);
  }
  std::erase_if(out, [](const Coefficient& c) { return c.value == 0.0; });
  cs = std::move(out);
}

bool coefficients_symmetric(std::vector<Coefficient> cs) {
  merge_coefficients(cs);
  std::map<std::pair<Index, Index>, double> m;
  double scale = 0.0;
  for (const auto& c : cs) {
    m[{c.row, c.col}] = c.value;
    scale = std::max(scale, std::abs(c.value));
  }
  for (const auto& [rc, v] : m) {
    auto it = m.find({rc.second, rc.first});
    const double w = it == m.end() ? 0.0 : it->second;
    if (std::abs(v - w) > 1e-12 * std::max(1.0, scale)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------- LinearForm

LinearForm LinearForm::variable(Index var, double coeff) {
  LinearForm f;
  f.coeffs_[var] = coeff;
  return f;
}

double LinearForm::evaluate(const Eigen::VectorXd& y) const {
  double v = constant_;
  for (const auto& [i, c] : coeffs_) v += c * y(i);
  return v;
}

LinearForm& LinearForm::operator+=(const LinearForm& o) {
  constant_ += o.constant_;
  for (const auto& [i, c] : o.coeffs_) coeffs_[i] += c;
  return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& o) {
  constant_ -= o.constant_;
  for (const auto& [i, c] : o.coeffs_) coeffs_[i] -= c;
  return *this;
}

LinearForm& LinearForm::operator*=(double s) {
  constant_ *= s;
  for (auto& [i, c] : coeffs_) c *= s;
  return *this;
}

// ---------------------------------------------------------------- AffineExpr

AffineExpr::AffineExpr(Index rows, Index cols) : constant_(Eigen::MatrixXd::Zero(rows, cols)) {}

AffineExpr AffineExpr::constant(const Eigen::MatrixXd& c) {
  AffineExpr e(c.rows(), c.cols());
  e.constant_ = c;
  return e;
}

AffineExpr AffineExpr::scaled_variable(Index var, const Eigen::MatrixXd& m) {
  AffineExpr e(m.rows(), m.cols());
  e.add_scaled_variable(var, m);
  return e;
}

AffineExpr AffineExpr::from_terms(Index rows, Index cols, Index var, std::vector<Coefficient> coeffs) {
  AffineExpr e(rows, cols);
  for (const auto& c : coeffs)
    if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols)
      throw Error(ErrorKind::model_construction, "AffineExpr: coefficient out of range");
  e.terms_[var] = std::move(coeffs);
  return e;
}

void AffineExpr::add_scaled_variable(Index var, const Eigen::MatrixXd& m, double scale) {
  if (m.rows() != rows() || m.cols() != cols()) throw Error(ErrorKind::model_construction, "AffineExpr: shape mismatch");
  auto& cs = terms_[var];
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) cs.push_back({i, j, scale * m(i, j)});
  if (cs.empty()) terms_.erase(var);
}

void AffineExpr::check_shape(const AffineExpr& o) const {
  if (o.rows() != rows() || o.cols() != cols()) throw Error(ErrorKind::model_construction, "AffineExpr: shape mismatch");
}

AffineExpr AffineExpr::transpose() const {
  AffineExpr e(cols(), rows());
  e.constant_ = constant_.transpose();
  for (const auto& [v, cs] : terms_) {
    auto& out = e.terms_[v];
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back({c.col, c.row, c.value});
  }
  return e;
}

AffineExpr AffineExpr::block(Index row, Index col, Index nr, Index nc) const {
  AffineExpr e(nr, nc);
  e.constant_ = constant_.block(row, col, nr, nc);
  for (const auto& [v, cs] : terms_) {
    std::vector<Coefficient> out;
    for (const auto& c : cs)
      if (c.row >= row && c.row < row + nr && c.col >= col && c.col < col + nc)
        out.push_back({c.row - row, c.col - col, c.value});
    if (!out.empty()) e.terms_[v] = std::move(out);
  }
  return e;
}

Eigen::MatrixXd AffineExpr::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd m = constant_;
  for (const auto& [v, cs] : terms_)
    for (const auto& c : cs) m(c.row, c.col) += c.value * y(v);
  return m;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  if (constant_.size() == 0 && terms_.empty()) return *this = o;
  check_shape(o);
  constant_ += o.constant_;
  for (const auto& [v, cs] : o.terms_) {
    auto& dst = terms_[v];
    dst.insert(dst.end(), cs.begin(), cs.end());
  }
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) { return *this += -1.0 * o; }

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& [v, cs] : terms_)
    for (auto& c : cs) c.value *= s;
  return *this;
}

AffineExpr& AffineExpr::operator+=(const Eigen::MatrixXd& c) { return *this += AffineExpr::constant(c); }
AffineExpr& AffineExpr::operator-=(const Eigen::MatrixXd& c) { return *this += AffineExpr::constant(-c); }

AffineExpr hstack(const AffineExpr& a, const AffineExpr& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::model_construction, "hstack: row mismatch");
  AffineExpr e(a.rows(), a.cols() + b.cols());
  e.constant_ << a.constant_, b.constant_;
  e.terms_ = a.terms_;
  for (const auto& [v, cs] : b.terms_) {
    auto& dst = e.terms_[v];
    for (const auto& c : cs) dst.push_back({c.row, c.col + a.cols(), c.value});
  }
  return e;
}

AffineExpr vstack(const AffineExpr& a, const AffineExpr& b) {
  if (a.cols() != b.cols()) throw Error(ErrorKind::model_construction, "vstack: column mismatch");
  AffineExpr e(a.rows() + b.rows(), a.cols());
  e.constant_ << a.constant_, b.constant_;
  e.terms_ = a.terms_;
  for (const auto& [v, cs] : b.terms_) {
    auto& dst = e.terms_[v];
    for (const auto& c : cs) dst.push_back({c.row + a.rows(), c.col, c.value});
  }
  return e;
}

AffineExpr block2x2(const AffineExpr& a, const AffineExpr& b, const AffineExpr& c) {
  if (a.rows() != b.rows() || b.cols() != c.cols())
    throw Error(ErrorKind::model_construction, "block2x2: incompatible block shapes");
  return vstack(hstack(a, b), hstack(b.transpose(), c));
}

LinearForm trace_product(const Eigen::MatrixXd& c, const AffineExpr& x) {
  if (c.rows() != x.rows() || c.cols() != x.cols())
    throw Error(ErrorKind::model_construction, "trace_product: shape mismatch");
  LinearForm f(c.cwiseProduct(x.constant_part()).sum());
  for (const auto& [v, cs] : x.terms()) {
    double s = 0.0;
    for (const auto& k : cs) s += c(k.row, k.col) * k.value;
    if (s != 0.0) f += LinearForm::variable(v, s);
  }
  return f;
}

LinearForm trace(const AffineExpr& x) {
  if (x.rows() != x.cols()) throw Error(ErrorKind::model_construction, "trace: non-square expression");
  return trace_product(Eigen::MatrixXd::Identity(x.rows(), x.cols()), x);
}

LinearForm entry(const AffineExpr& x, Index i, Index j) {
  LinearForm f(x.constant_part()(i, j));
  for (const auto& [v, cs] : x.terms()) {
    double s = 0.0;
    for (const auto& k : cs)
      if (k.row == i && k.col == j) s += k.value;
    if (s != 0.0) f += LinearForm::variable(v, s);
  }
  return f;
}

AffineExpr times_identity(const LinearForm& f, Index n) {
  AffineExpr e = AffineExpr::constant(f.constant() * Eigen::MatrixXd::Identity(n, n));
  for (const auto& [v, c] : f.coefficients()) e.add_scaled_variable(v, Eigen::MatrixXd::Identity(n, n), c);
  return e;
}

// ---------------------------------------------------------------- ConicProgram

void ConicProgram::check_name(const std::string& name) {
  for (const auto& v : matrix_vars_)
    if (v.name == name) throw Error(ErrorKind::model_construction, "duplicate variable name " + name);
  for (const auto& v : scalar_vars_)
    if (v.name == name) throw Error(ErrorKind::model_construction, "duplicate variable name " + name);
}

MatrixVar ConicProgram::add_symmetric(const std::string& name, Index n, bool psd) {
  if (n < 1) throw Error(ErrorKind::model_construction, "add_symmetric: dimension must be >= 1");
  check_name(name);
  MatrixVar v{name, num_scalars_, n, n, true};
  num_scalars_ += v.size();
  matrix_vars_.push_back(v);
  if (psd) add_psd(expr(v), name + " >= 0");
  return v;
}

MatrixVar ConicProgram::add_matrix(const std::string& name, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::model_construction, "add_matrix: dimensions must be >= 1");
  check_name(name);
  MatrixVar v{name, num_scalars_, rows, cols, false};
  num_scalars_ += v.size();
  matrix_vars_.push_back(v);
  return v;
}

ScalarVar ConicProgram::add_scalar(const std::string& name, bool nonneg) {
  check_name(name);
  ScalarVar v{name, num_scalars_++};
  scalar_vars_.push_back(v);
  if (nonneg) add_nonneg(expr(v), name + " >= 0");
  return v;
}

AffineExpr ConicProgram::expr(const MatrixVar& v) const {
  AffineExpr e(v.rows, v.cols);
  Index k = v.offset;
  if (v.symmetric) {
    for (Index j = 0; j < v.cols; ++j)
      for (Index i = 0; i <= j; ++i, ++k) {
        std::vector<Coefficient> cs{{i, j, 1.0}};
        if (i != j) cs.push_back({j, i, 1.0});
        e += AffineExpr::from_terms(v.rows, v.cols, k, std::move(cs));
      }
  } else {
    for (Index j = 0; j < v.cols; ++j)
      for (Index i = 0; i < v.rows; ++i, ++k) e += AffineExpr::from_terms(v.rows, v.cols, k, {{i, j, 1.0}});
  }
  return e;
}

void ConicProgram::add_psd(const AffineExpr& e, std::string label) {
  if (e.rows() != e.cols() || e.rows() < 1) throw Error(ErrorKind::model_construction, "add_psd: LMI must be square");
  const auto& c = e.constant_part();
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::model_construction, "add_psd: constant part is not symmetric (" + label + ")");
  for (const auto& [v, cs] : e.terms())
    if (!coefficients_symmetric(cs))
      throw Error(ErrorKind::model_construction, "add_psd: coefficient is not symmetric (" + label + ")");
  inequalities_.push_back({e, std::move(label)});
}

void ConicProgram::add_psd_block_2x2(const AffineExpr& a, const AffineExpr& b, const AffineExpr& c, std::string label) {
  if (a.rows() != a.cols() || c.rows() != c.cols())
    throw Error(ErrorKind::model_construction, "add_psd_block_2x2: diagonal blocks must be square");
  add_psd(block2x2(a, b, c), std::move(label));
}

void ConicProgram::add_nonneg(const LinearForm& f, std::string label) {
  add_psd(times_identity(f, 1), std::move(label));
}

void ConicProgram::add_equality(const LinearForm& f, std::string label) { equalities_.push_back({f, std::move(label)}); }

void ConicProgram::add_equality(const AffineExpr& lhs, const AffineExpr& rhs, bool symmetric, std::string label) {
  const AffineExpr d = lhs - rhs;
  if (symmetric && d.rows() != d.cols()) throw Error(ErrorKind::model_construction, "add_equality: symmetric needs square");
  std::map<std::pair<Index, Index>, LinearForm> forms;
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < (symmetric ? j + 1 : d.rows()); ++i) forms[{i, j}] = LinearForm(d.constant_part()(i, j));
  for (const auto& [v, cs] : d.terms())
    for (const auto& c : cs) {
      Index i = c.row, j = c.col;
      if (symmetric && i > j) continue;
      forms[{i, j}] += LinearForm::variable(v, c.value);
    }
  for (auto& [rc, f] : forms) equalities_.push_back({f, label});
}

// ---------------------------------------------------------------- lowering

StandardForm lower(const ConicProgram& p) {
  StandardForm sf;
  sf.num_vars = p.num_scalars();
  sf.c = Eigen::VectorXd::Zero(sf.num_vars);
  const double sign = p.sense() == Sense::minimize ? 1.0 : -1.0;
  for (const auto& [i, c] : p.objective().coefficients()) sf.c(i) += sign * c;

  std::vector<bool> used(sf.num_vars, false);
  for (const auto& ineq : p.inequalities()) {
    const auto& e = ineq.expr;
    StandardForm::Block b;
    b.dim = e.rows();
    b.constant = 0.5 * (e.constant_part() + e.constant_part().transpose());
    b.label = ineq.label;
    for (const auto& [v, cs] : e.terms()) {
      StandardForm::Term t{v, cs};
      merge_coefficients(t.coeffs);
      if (t.coeffs.empty()) continue;
      used[v] = true;
      b.terms.push_back(std::move(t));
    }
    if (b.terms.empty()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.constant, Eigen::EigenvaluesOnly);
      const double scale = std::max(1.0, b.constant.cwiseAbs().maxCoeff());
      if (es.eigenvalues().minCoeff() < -1e-10 * scale) sf.constant_infeasible = true;
      continue;
    }
    sf.blocks.push_back(std::move(b));
  }
  for (Index i = 0; i < sf.num_vars; ++i)
    if (!used[i]) throw Error(ErrorKind::model_construction, "variable " + std::to_string(i) + " appears in no inequality");

  std::vector<const Equality*> eqs;
  for (const auto& eq : p.equalities()) {
    bool any = false;
    for (const auto& [i, c] : eq.form.coefficients()) any = any || c != 0.0;
    if (!any) {
      if (std::abs(eq.form.constant()) > 1e-10) sf.constant_infeasible = true;
      continue;
    }
    eqs.push_back(&eq);
  }
  sf.eq_matrix = Eigen::MatrixXd::Zero(Index(eqs.size()), sf.num_vars);
  sf.eq_rhs = Eigen::VectorXd::Zero(Index(eqs.size()));
  for (Index r = 0; r < Index(eqs.size()); ++r) {
    for (const auto& [i, c] : eqs[r]->form.coefficients()) sf.eq_matrix(r, i) += c;
    sf.eq_rhs(r) = -eqs[r]->form.constant();
  }
  return sf;
}

// ---------------------------------------------------------------- solve / audit

const Backend& default_backend() {
  static const InteriorPointBackend ipm;
  return ipm;
}

const Backend* find_backend(const std::string& name) {
  if (name == default_backend().name()) return &default_backend();
  return nullptr;
}

Eigen::MatrixXd Solution::value(const MatrixVar& v) const {
  Eigen::MatrixXd m(v.rows, v.cols);
  Index k = v.offset;
  if (v.symmetric) {
    for (Index j = 0; j < v.cols; ++j)
      for (Index i = 0; i <= j; ++i, ++k) m(i, j) = m(j, i) = y(k);
  } else {
    for (Index j = 0; j < v.cols; ++j)
      for (Index i = 0; i < v.rows; ++i, ++k) m(i, j) = y(k);
  }
  return m;
}

Solution solve(const ConicProgram& p, double tolerance, const Backend* backend) {
  const StandardForm sf = lower(p);
  Solution sol;
  if (sf.constant_infeasible) {
    sol.status = Status::infeasible;
    sol.y = Eigen::VectorXd::Zero(sf.num_vars);
    return sol;
  }
  if (!backend) backend = &default_backend();
  SolverSettings settings;
  settings.tolerance = tolerance;
  const RawResult raw = backend->solve(sf, settings);
  sol.status = raw.status;
  sol.y = raw.y;
  sol.solver_gap = raw.relative_gap;
  sol.primal_infeasibility = raw.primal_infeasibility;
  sol.dual_infeasibility = raw.dual_infeasibility;
  sol.iterations = raw.iterations;
  if (sol.y.size() == sf.num_vars) {
    sol.objective_value = p.objective().evaluate(sol.y);
    for (const auto& v : p.matrix_variables()) sol.variable_values[v.name] = sol.value(v);
    for (const auto& v : p.scalar_variables()) sol.variable_values[v.name] = Eigen::MatrixXd::Constant(1, 1, sol.y(v.index));
  }
  return sol;
}

AuditReport audit(const ConicProgram& p, const Solution& s) {
  AuditReport r;
  for (const auto& ineq : p.inequalities()) {
    const Eigen::MatrixXd m = ineq.expr.evaluate(s.y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    const double v = -es.eigenvalues().minCoeff();
    if (v > r.max_psd_violation) {
      r.max_psd_violation = v;
      r.worst_label = ineq.label;
    }
  }
  for (const auto& eq : p.equalities()) {
    const double v = std::abs(eq.form.evaluate(s.y));
    if (v > r.max_equality_violation) {
      r.max_equality_violation = v;
      if (v > r.max_psd_violation) r.worst_label = eq.label;
    }
  }
  return r;
}

Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h) {
  const Index n = h.rows();
  Eigen::MatrixXd e(2 * n, 2 * n);
  e << h.real(), -h.imag(), h.imag(), h.real();
  return e;
}

Eigen::MatrixXcd extract_hermitian(const Eigen::MatrixXd& e) {
  if (e.rows() != e.cols() || e.rows() % 2 != 0)
    throw Error(ErrorKind::invalid_dimension, "extract_hermitian: need an even square matrix");
  const Index n = e.rows() / 2;
  Eigen::MatrixXcd h(n, n);
  h.real() = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  h.imag() = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  return h;
}

}  // namespace ecdiv::conic
