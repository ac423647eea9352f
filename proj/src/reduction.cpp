#include "ecdiv/reduction.hpp"

#include <cmath>
#include <map>

#include "ecdiv/matfunc.hpp"

namespace ecdiv {
namespace {

using conic::AffineExpr;
using conic::LinearForm;

bool charge_covariant(const ChoiMatrix& j) {
  const auto& m = j.matrix.matrix();
  const double scale = m.cwiseAbs().maxCoeff();
  const Index db = j.dim_b();
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) <= 1e-14 * scale) continue;
      if (r / db - r % db != c / db - c % db) return false;
    }
  return true;
}

std::vector<Index> active_levels(const EnergyBudget& budget, Index dim_r) {
  if (budget.dim() != dim_r) throw Error(ErrorKind::invalid_dimension, "energy budget does not match the reference dimension");
  std::vector<Index> levels;
  const double ground = budget.level(0);
  for (Index n = 0; n < dim_r; ++n)
    if (budget.budget > ground || budget.level(n) <= ground) levels.push_back(n);
  return levels;
}

Reduction build(const ChoiMatrix& jn, const ChoiMatrix& jm, std::vector<Index> levels, ProbeMode mode) {
  if (jn.index.dim_r != jm.index.dim_r || jn.index.dim_b != jm.index.dim_b || jn.matrix.dim() != jn.index.dim() ||
      jm.matrix.dim() != jm.index.dim())
    throw Error(ErrorKind::invalid_dimension, "Choi matrices have mismatched dimensions");
  Reduction red;
  red.mode = mode;
  red.dim_r = jn.dim_r();
  red.dim_b = jn.dim_b();
  red.levels = std::move(levels);
  const Index nl = Index(red.levels.size());
  std::vector<Index> pos(red.dim_r, -1);
  for (Index i = 0; i < nl; ++i) pos[red.levels[i]] = i;
  if (mode == ProbeMode::fock_diagonal) {
    for (Index i = 0; i < nl; ++i) red.coords.push_back({i, i});
  } else {
    for (Index b = 0; b < nl; ++b)
      for (Index a = 0; a <= b; ++a) red.coords.push_back({a, b});
  }

  const auto& mn = jn.matrix.matrix();
  const auto& mm = jm.matrix.matrix();
  const double scale = std::max(mn.cwiseAbs().maxCoeff(), mm.cwiseAbs().maxCoeff());
  red.complex_data = std::max(mn.imag().cwiseAbs().maxCoeff(), mm.imag().cwiseAbs().maxCoeff()) > 1e-14 * scale;
  red.trace_scale = red.complex_data ? 0.5 : 1.0;
  red.sector_split = mode == ProbeMode::fock_diagonal && charge_covariant(jn) && charge_covariant(jm);

  std::map<Index, std::vector<Index>> groups;
  for (Index r = 0; r < red.dim_r; ++r) {
    if (pos[r] < 0) continue;
    for (Index b = 0; b < red.dim_b; ++b) groups[red.sector_split ? r - b : 0].push_back(jn.index.flat(r, b));
  }

  const double floor = kEigenFloor * std::max(0.0, jm.matrix.max_eigenvalue());
  const double jn_scale = mn.cwiseAbs().maxCoeff();
  for (const auto& [charge, idx] : groups) {
    const Index s = Index(idx.size());
    Eigen::MatrixXcd gn(s, s), gm(s, s);
    for (Index i = 0; i < s; ++i)
      for (Index j = 0; j < s; ++j) {
        gn(i, j) = mn(idx[i], idx[j]);
        gm(i, j) = mm(idx[i], idx[j]);
      }
    const Eigen::MatrixXd rn = red.complex_data ? conic::embed_hermitian(gn) : Eigen::MatrixXd(gn.real());
    const Eigen::MatrixXd rm = red.complex_data ? conic::embed_hermitian(gm) : Eigen::MatrixXd(gm.real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rm);
    std::vector<Index> keep, drop;
    for (Index i = 0; i < rm.rows(); ++i) (es.eigenvalues()(i) > floor ? keep : drop).push_back(i);
    if (!drop.empty()) {
      Eigen::MatrixXd k(rm.rows(), Index(drop.size()));
      for (Index i = 0; i < Index(drop.size()); ++i) k.col(i) = es.eigenvectors().col(drop[i]);
      const Eigen::MatrixXd leak = k.transpose() * rn * k;
      if (leak.cwiseAbs().maxCoeff() > 1e-8 * jn_scale) red.infinite = true;
    }
    if (keep.empty()) continue;
    Eigen::MatrixXd v(rm.rows(), Index(keep.size()));
    for (Index i = 0; i < Index(keep.size()); ++i) v.col(i) = es.eigenvectors().col(keep[i]);

    ReducedBlock blk;
    blk.charge = charge;
    blk.jn = v.transpose() * rn * v;
    blk.jn = 0.5 * (blk.jn + blk.jn.transpose()).eval();
    blk.jm = v.transpose() * rm * v;
    blk.jm = 0.5 * (blk.jm + blk.jm.transpose()).eval();
    for (const auto& [a, b] : red.coords) {
      Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(s, s);
      for (Index i = 0; i < s; ++i)
        for (Index j = 0; j < s; ++j) {
          const Index ri = pos[idx[i] / red.dim_b], rj = pos[idx[j] / red.dim_b];
          if (idx[i] % red.dim_b != idx[j] % red.dim_b) continue;
          if ((ri == a && rj == b) || (ri == b && rj == a)) lift(i, j) = 1.0;
        }
      Eigen::MatrixXd full = lift;
      if (red.complex_data) {
        full = Eigen::MatrixXd::Zero(2 * s, 2 * s);
        full.topLeftCorner(s, s) = lift;
        full.bottomRightCorner(s, s) = lift;
      }
      blk.probe_maps.push_back(v.transpose() * full * v);
    }
    red.blocks.push_back(std::move(blk));
  }
  return red;
}

AffineExpr place(const LinearForm& f, Index n, Index i, Index j, double w) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  c(i, j) += w * f.constant();
  if (i != j) c(j, i) += w * f.constant();
  AffineExpr e = AffineExpr::constant(c);
  for (const auto& [v, coeff] : f.coefficients()) {
    std::vector<conic::Coefficient> cs{{i, j, w * coeff}};
    if (i != j) cs.push_back({j, i, w * coeff});
    e += AffineExpr::from_terms(n, n, v, std::move(cs));
  }
  return e;
}

}  // namespace

Index Reduction::support_dim() const {
  Index s = 0;
  for (const auto& b : blocks) s += b.dim();
  return complex_data ? s / 2 : s;
}

Eigen::MatrixXd Reduction::probe_matrix(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim_r, dim_r);
  for (Index k = 0; k < num_coords(); ++k) {
    const Index a = levels[coords[k].first], b = levels[coords[k].second];
    rho(a, b) = y(k);
    rho(b, a) = y(k);
  }
  return rho;
}

std::vector<double> Reduction::probe_populations(const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd rho = probe_matrix(y);
  std::vector<double> p(dim_r);
  for (Index n = 0; n < dim_r; ++n) p[n] = std::max(0.0, rho(n, n));
  return p;
}

Reduction reduce(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, ProbeMode mode) {
  return build(jn, jm, active_levels(budget, jn.dim_r()), mode);
}

Reduction reduce_unconstrained(const ChoiMatrix& jn, const ChoiMatrix& jm) {
  std::vector<Index> all(jn.dim_r());
  for (Index i = 0; i < jn.dim_r(); ++i) all[i] = i;
  Reduction red = build(jn, jm, all, ProbeMode::fock_diagonal);
  // Without the sector structure Tr_B of a block need not be diagonal.
  if (!red.sector_split) red = build(jn, jm, std::move(all), ProbeMode::full);
  return red;
}

ProbeVariables add_probe(conic::ConicProgram& p, const Reduction& red, const EnergyBudget& budget) {
  ProbeVariables pv;
  const Index nl = Index(red.levels.size());
  LinearForm total, energy;
  bool any_energy = false;
  if (red.mode == ProbeMode::fock_diagonal) {
    for (Index i = 0; i < nl; ++i) {
      const auto v = p.add_scalar("p" + std::to_string(red.levels[i]), true);
      pv.coord_vars.push_back(v.index);
      total += p.expr(v);
      const double h = budget.level(red.levels[i]);
      energy += h * p.expr(v);
      any_energy = any_energy || h != 0.0;
    }
  } else {
    pv.rho = p.add_symmetric("rho", nl, true);
    const AffineExpr rho = p.expr(pv.rho);
    for (Index k = 0; k < red.num_coords(); ++k) pv.coord_vars.push_back(pv.rho.offset + k);
    total = conic::trace(rho);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nl, nl);
    for (Index i = 0; i < nl; ++i) h(i, i) = budget.level(red.levels[i]);
    energy = conic::trace_product(h, rho);
    any_energy = h.cwiseAbs().maxCoeff() > 0.0;
  }
  p.add_equality(total - 1.0, "Tr rho = 1");
  if (any_energy) p.add_nonneg(budget.budget - energy, "Tr[H rho] <= E");
  for (const auto& blk : red.blocks) {
    AffineExpr x(blk.dim(), blk.dim());
    for (Index k = 0; k < red.num_coords(); ++k) x.add_scaled_variable(pv.coord_vars[k], blk.probe_maps[k]);
    pv.block_exprs.push_back(std::move(x));
  }
  return pv;
}

std::vector<LinearForm> probe_adjoint(const Reduction& red, const std::vector<AffineExpr>& n) {
  std::vector<LinearForm> out(red.num_coords());
  for (std::size_t g = 0; g < red.blocks.size(); ++g)
    for (Index k = 0; k < red.num_coords(); ++k)
      out[k] += red.trace_scale * conic::trace_product(red.blocks[g].probe_maps[k], n[g]);
  return out;
}

void add_reference_bound(conic::ConicProgram& p, const Reduction& red, const EnergyBudget& budget, const LinearForm& a,
                         const LinearForm& b, const std::vector<LinearForm>& adj, const std::string& label) {
  const Index nl = Index(red.levels.size());
  if (red.mode == ProbeMode::fock_diagonal) {
    for (Index i = 0; i < nl; ++i)
      p.add_nonneg(a + budget.level(red.levels[i]) * b - adj[i], label + " level " + std::to_string(red.levels[i]));
    return;
  }
  AffineExpr lmi(nl, nl);
  for (Index i = 0; i < nl; ++i) lmi += place(a + budget.level(red.levels[i]) * b, nl, i, i, 1.0);
  for (Index k = 0; k < red.num_coords(); ++k) {
    const auto [i, j] = red.coords[k];
    lmi += place(adj[k], nl, i, j, i == j ? -1.0 : -0.5);
  }
  p.add_psd(lmi, label);
}

Eigen::VectorXd probe_functional(const Reduction& red, const std::vector<Eigen::MatrixXd>& f) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(red.num_coords());
  for (std::size_t g = 0; g < red.blocks.size(); ++g)
    for (Index k = 0; k < red.num_coords(); ++k)
      c(k) += red.trace_scale * red.blocks[g].probe_maps[k].cwiseProduct(f[g]).sum();
  return c;
}

}  // namespace ecdiv
