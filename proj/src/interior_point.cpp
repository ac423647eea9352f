#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <limits>

#include "ecdiv/conic.hpp"

namespace ecdiv::conic {
namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Blocks = std::vector<Mat>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

double norm(const Blocks& a) { return std::sqrt(inner(a, a)); }

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with P + alpha D still PSD (P must be PD).
double max_step(const Mat& p, const Mat& d) {
  Eigen::LLT<Mat> llt(p);
  if (llt.info() != Eigen::Success) return 0.0;
  const Mat w = llt.matrixL().solve(d);
  const Mat t = llt.matrixL().solve(w.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

class Ipm {
 public:
  Ipm(const StandardForm& sf, const SolverSettings& st) : sf_(sf), st_(st) {
    m_ = sf.num_vars;
    for (const auto& b : sf.blocks) {
      std::vector<Mat> dense;
      for (const auto& t : b.terms) {
        if (Index(t.coeffs.size()) > b.dim) {
          Mat a = Mat::Zero(b.dim, b.dim);
          for (const auto& c : t.coeffs) a(c.row, c.col) += c.value;
          dense.push_back(std::move(a));
        } else {
          dense.emplace_back();
        }
      }
      dense_.push_back(std::move(dense));
      ntot_ += double(b.dim);
      constants_.push_back(b.constant);
    }
  }

  RawResult run();

 private:
  Blocks apply(const Vec& y) const {
    Blocks out;
    for (const auto& b : sf_.blocks) {
      Mat m = Mat::Zero(b.dim, b.dim);
      for (const auto& t : b.terms) {
        const double v = y(t.var);
        if (v == 0.0) continue;
        for (const auto& c : t.coeffs) m(c.row, c.col) += c.value * v;
      }
      out.push_back(std::move(m));
    }
    return out;
  }

  Vec adjoint(const Blocks& k) const {
    Vec out = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < sf_.blocks.size(); ++bi)
      for (const auto& t : sf_.blocks[bi].terms) {
        double s = 0.0;
        for (const auto& c : t.coeffs) s += c.value * k[bi](c.row, c.col);
        out(t.var) += s;
      }
    return out;
  }

  // Schur complement M_ij = Tr(A_i X A_j Z^{-1}).
  Mat schur(const Blocks& x, const Blocks& zinv) const {
    Mat m = Mat::Zero(m_, m_);
    for (std::size_t bi = 0; bi < sf_.blocks.size(); ++bi) {
      const auto& b = sf_.blocks[bi];
      const Index n = b.dim;
      const auto& terms = b.terms;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        Mat prod;
        if (dense_[bi][i].size() > 0) {
          prod = zinv[bi] * (dense_[bi][i] * x[bi]);
        } else {
          prod = Mat::Zero(n, n);
          for (const auto& c : terms[i].coeffs) prod.noalias() += c.value * zinv[bi].col(c.row) * x[bi].row(c.col);
        }
        for (std::size_t j = i; j < terms.size(); ++j) {
          double s = 0.0;
          for (const auto& c : terms[j].coeffs) s += c.value * prod(c.col, c.row);
          m(terms[i].var, terms[j].var) += s;
          if (j != i) m(terms[j].var, terms[i].var) += s;
        }
      }
    }
    return m;
  }

  struct Direction {
    Vec dy, dw;
    Blocks dx, dz;
  };

  bool factor(const Mat& m) {
    const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mat mr = m;
      if (reg > 0.0) mr.diagonal().array() += reg;
      m_llt_.compute(mr);
      if (m_llt_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
      if (attempt == 7) return false;
    }
    if (sf_.eq_rhs.size() > 0) {
      minv_gt_ = m_llt_.solve(sf_.eq_matrix.transpose());
      s_ldlt_.compute(sf_.eq_matrix * minv_gt_);
      if (s_ldlt_.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Solves for the direction given the right-hand-side matrices k.
  Direction direction(const Blocks& k, const Blocks& x, const Blocks& zinv, const Blocks& r, const Vec& rd,
                      const Vec& rg) const {
    Direction d;
    const Vec g = adjoint(k) - rd;
    const Vec minv_g = m_llt_.solve(g);
    if (sf_.eq_rhs.size() > 0) {
      d.dw = s_ldlt_.solve(rg - sf_.eq_matrix * minv_g);
      d.dy = minv_g + minv_gt_ * d.dw;
    } else {
      d.dw = Vec::Zero(0);
      d.dy = minv_g;
    }
    d.dz = apply(d.dy);
    for (std::size_t b = 0; b < d.dz.size(); ++b) d.dz[b] += r[b];
    d.dx.resize(k.size());
    for (std::size_t b = 0; b < k.size(); ++b) d.dx[b] = sym(k[b] - x[b] * (d.dz[b] - r[b]) * zinv[b]);
    return d;
  }

  const StandardForm& sf_;
  const SolverSettings& st_;
  Index m_ = 0;
  double ntot_ = 0.0;
  std::vector<std::vector<Mat>> dense_;
  Blocks constants_;
  Eigen::LLT<Mat> m_llt_;
  Mat minv_gt_;
  Eigen::LDLT<Mat> s_ldlt_;
};

RawResult Ipm::run() {
  RawResult res;
  const std::size_t nb = sf_.blocks.size();
  const Mat& gm = sf_.eq_matrix;
  const Vec& h = sf_.eq_rhs;
  const double norm_c = sf_.c.norm(), norm_h = h.norm(), norm_C = norm(constants_);

  Vec y = Vec::Zero(m_), w = Vec::Zero(h.size());
  Blocks x(nb), z(nb);
  for (std::size_t bi = 0; bi < nb; ++bi) {
    const auto& b = sf_.blocks[bi];
    const double n = double(b.dim);
    double xi = std::max(10.0, std::sqrt(n)), eta = std::max(10.0, std::sqrt(n));
    double amax = b.constant.norm();
    for (const auto& t : b.terms) {
      double an = 0.0;
      for (const auto& c : t.coeffs) an += c.value * c.value;
      an = std::sqrt(an);
      xi = std::max(xi, n * (1.0 + std::abs(sf_.c(t.var))) / (1.0 + an));
      amax = std::max(amax, an);
    }
    eta = std::max(eta, (1.0 + amax) / std::sqrt(n));
    x[bi] = xi * Mat::Identity(b.dim, b.dim);
    z[bi] = eta * Mat::Identity(b.dim, b.dim);
  }

  const double tol = st_.tolerance;
  int stalls = 0;
  double best_merit = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 0; it <= st_.max_iterations; ++it) {
    Blocks f = apply(y), r(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      f[b] += constants_[b];
      r[b] = f[b] - z[b];
    }
    const Vec atx = adjoint(x);
    const Vec rd = sf_.c - atx - (h.size() ? Vec(gm.transpose() * w) : Vec::Zero(m_));
    const Vec rg = h.size() ? Vec(h - gm * y) : Vec::Zero(0);
    const double pobj = sf_.c.dot(y);
    const double dobj = -inner(constants_, x) + (h.size() ? h.dot(w) : 0.0);
    const double xz = inner(x, z);
    const double mu = xz / ntot_;
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    const double relgap = std::max(xz, std::abs(pobj - dobj)) / denom;
    const double pinf = std::max(norm(r) / (1.0 + norm_C), h.size() ? rg.norm() / (1.0 + norm_h) : 0.0);
    const double dinf = rd.norm() / (1.0 + norm_c);

    res.y = y;
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.relative_gap = relgap;
    res.primal_infeasibility = pinf;
    res.dual_infeasibility = dinf;
    res.iterations = it;

    // set ECDIV_IPM_TRACE=1 to print per-iteration residuals
    if (std::getenv("ECDIV_IPM_TRACE"))
      std::fprintf(stderr, "it %3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e\n", it, pobj, dobj, relgap, pinf, dinf);
    if (relgap < tol && pinf < tol && dinf < tol) {
      res.status = Status::optimal;
      return res;
    }
    if (dobj > 0.0 && (sf_.c - rd).norm() < tol * dobj && pinf > tol) {
      res.status = Status::infeasible;
      return res;
    }
    if (pobj < 0.0 && dinf > tol) {
      Blocks ay(nb);
      for (std::size_t b = 0; b < nb; ++b) ay[b] = r[b] - constants_[b];
      const double lin = std::max(norm(ay), h.size() ? (h - rg).norm() : 0.0);
      if (lin < tol * -pobj) {
        res.status = Status::unbounded;
        return res;
      }
    }
    if (it == st_.max_iterations) break;
    const double merit = std::max({relgap, pinf, dinf});
    if (merit < 0.5 * best_merit) {
      best_merit = merit;
      since_best = 0;
    } else if (++since_best >= 20) {
      break;
    }

    Blocks zinv(nb);
    bool ok = true;
    for (std::size_t b = 0; b < nb && ok; ++b) {
      Eigen::LLT<Mat> llt(z[b]);
      ok = llt.info() == Eigen::Success;
      if (ok) zinv[b] = llt.solve(Mat::Identity(z[b].rows(), z[b].cols()));
    }
    if (!ok || !factor(schur(x, zinv))) break;

    // Predictor.
    Blocks k(nb);
    for (std::size_t b = 0; b < nb; ++b) k[b] = -x[b] - x[b] * r[b] * zinv[b];
    const Direction pred = direction(k, x, zinv, r, rd, rg);
    double ap = 1.0, ad = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(z[b], pred.dz[b]));
      ad = std::min(ad, max_step(x[b], pred.dx[b]));
    }
    double xz_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b)
      xz_aff += (x[b] + ad * pred.dx[b]).cwiseProduct(z[b] + ap * pred.dz[b]).sum();
    const double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::min(1.0, std::pow(std::max(0.0, xz_aff) / xz, expo));

    // Corrector.
    for (std::size_t b = 0; b < nb; ++b)
      k[b] = sigma * mu * zinv[b] - x[b] - x[b] * r[b] * zinv[b] - pred.dx[b] * pred.dz[b] * zinv[b];
    const Direction dir = direction(k, x, zinv, r, rd, rg);
    double ap_max = std::numeric_limits<double>::infinity(), ad_max = ap_max;
    for (std::size_t b = 0; b < nb; ++b) {
      ap_max = std::min(ap_max, max_step(z[b], dir.dz[b]));
      ad_max = std::min(ad_max, max_step(x[b], dir.dx[b]));
    }
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);
    const double step_p = std::min(1.0, gamma * ap_max), step_d = std::min(1.0, gamma * ad_max);
    if (!std::isfinite(step_p) || !std::isfinite(step_d)) break;

    y += step_p * dir.dy;
    if (h.size()) w += step_d * dir.dw;
    for (std::size_t b = 0; b < nb; ++b) {
      z[b] = sym(z[b] + step_p * dir.dz[b]);
      x[b] = sym(x[b] + step_d * dir.dx[b]);
    }
    stalls = (step_p < 1e-9 && step_d < 1e-9) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }

  const double loose = std::max(1e-6, 100.0 * tol);
  if (res.relative_gap < loose && res.primal_infeasibility < loose && res.dual_infeasibility < loose)
    res.status = Status::near_optimal;
  else
    res.status = Status::numerical_failure;
  return res;
}

}  // namespace

RawResult InteriorPointBackend::solve(const StandardForm& sf, const SolverSettings& settings) const {
  Ipm ipm(sf, settings);
  return ipm.run();
}

}  // namespace ecdiv::conic
