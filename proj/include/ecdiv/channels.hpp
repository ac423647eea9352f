#pragma once

#include <string>

#include "ecdiv/hilbert.hpp"

namespace ecdiv {

enum class ChannelKind { identity, dephasing, loss, loss_dephasing };

/// A truncated bosonic channel. cutoff is the largest Fock index N, so the
/// input and output spaces have dimension N + 1.
struct ChannelModel {
  ChannelKind kind = ChannelKind::identity;
  double gamma = 0.0;
  double eta = 1.0;
  Index cutoff = 0;

  static ChannelModel dephasing(double gamma, Index cutoff) { return {ChannelKind::dephasing, gamma, 1.0, cutoff}; }
  static ChannelModel loss(double eta, Index cutoff) { return {ChannelKind::loss, 0.0, eta, cutoff}; }
  static ChannelModel loss_dephasing(double eta, double gamma, Index cutoff) {
    return {ChannelKind::loss_dephasing, gamma, eta, cutoff};
  }

  Index dim() const { return cutoff + 1; }
  void validate() const;
  /// Dephasing, loss and loss-dephasing all commute with the phase rotation.
  bool phase_covariant() const { return true; }
  std::string describe() const;
};

/// Unnormalized Choi matrix sum_{mn} |m><n|_R (x) N(|m><n|)_B.
struct ChoiMatrix {
  HermitianMatrix matrix;
  BipartiteIndex index;

  Index dim_r() const { return index.dim_r; }
  Index dim_b() const { return index.dim_b; }
  /// PSD and Tr_B = identity, both within tol.
  bool is_valid(double tol = 1e-10) const;
};

double wrapped_normal_pdf(double gamma, double phi);
double log_wrapped_normal_pdf(double gamma, double phi);

ChoiMatrix identity_choi(Index cutoff);
ChoiMatrix dephasing_choi(double gamma, Index cutoff);
ChoiMatrix loss_choi(double eta, Index cutoff);
ChoiMatrix loss_dephasing_choi(double eta, double gamma, Index cutoff);
ChoiMatrix choi(const ChannelModel& model);

/// Dephasing channel action on a Fock-basis density matrix.
HermitianMatrix apply_dephasing(double gamma, const HermitianMatrix& rho);

/// KL divergence between wrapped normals of variances g1 and g2 on [-pi, pi).
double classical_kl_wrapped_normal(double g1, double g2);

}  // namespace ecdiv
