#pragma once

#include <vector>

#include "ecdiv/channels.hpp"
#include "ecdiv/conic.hpp"

namespace ecdiv {

enum class ProbeMode { fock_diagonal, full };

/// One diagonal block of a pair of Choi matrices after compression to the
/// support of the second one. Complex data is carried in the real
/// [[Re, -Im], [Im, Re]] embedding.
struct ReducedBlock {
  Index charge = 0;            // r - b for phase-covariant sectors, 0 otherwise
  Eigen::MatrixXd jn;          // V^dagger J^N V
  Eigen::MatrixXd jm;          // V^dagger J^M V
  std::vector<Eigen::MatrixXd> probe_maps;  // V^dagger (S_k (x) I) V, one per probe coordinate
  Index dim() const { return jn.rows(); }
};

/// Pair of Choi matrices reduced for probing with rho (x) I. The probe is
/// rho = sum_k y_k S_k where S_k runs over the Fock diagonal (fock_diagonal)
/// or the symmetric basis E_ab + E_ba, a <= b (full), on the active levels.
struct Reduction {
  ProbeMode mode = ProbeMode::fock_diagonal;
  Index dim_r = 0;
  Index dim_b = 0;
  std::vector<Index> levels;                    // active reference Fock levels
  std::vector<std::pair<Index, Index>> coords;  // (a, b) indices into levels, a <= b
  std::vector<ReducedBlock> blocks;
  double trace_scale = 1.0;  // 1/2 when blocks are complex embeddings
  bool complex_data = false;
  bool sector_split = false;
  bool infinite = false;     // supp J^N is not inside supp J^M

  Index num_coords() const { return Index(coords.size()); }
  Index support_dim() const;
  /// Full-size reference operator from probe coordinates.
  Eigen::MatrixXd probe_matrix(const Eigen::VectorXd& coord_values) const;
  /// Fock populations of the probe, padded to dim_r.
  std::vector<double> probe_populations(const Eigen::VectorXd& coord_values) const;
};

/// Only the ground level is active when E does not exceed the ground energy;
/// otherwise every level is.
Reduction reduce(const ChoiMatrix& jn, const ChoiMatrix& jm, const EnergyBudget& budget, ProbeMode mode);
/// Reduction with every level active, for programs without a probe.
Reduction reduce_unconstrained(const ChoiMatrix& jn, const ChoiMatrix& jm);

/// Probe variables of a program: coordinates with Tr rho = 1, Tr[H rho] <= E
/// and rho >= 0.
struct ProbeVariables {
  std::vector<Index> coord_vars;
  conic::MatrixVar rho;  // full mode only
  std::vector<conic::AffineExpr> block_exprs;  // V^dagger (rho (x) I) V per block
};

ProbeVariables add_probe(conic::ConicProgram& p, const Reduction& red, const EnergyBudget& budget);

/// Probe-coordinate components of Tr_B[sum_g V_g N_g V_g^dagger]:
/// L_k(N) = sum_g scale * Tr[M_gk N_g] for block expressions N_g.
std::vector<conic::LinearForm> probe_adjoint(const Reduction& red, const std::vector<conic::AffineExpr>& n);

/// Registers a I + b H >= T on the active levels, where T is the reference
/// operator with coordinate components adj (from probe_adjoint). In
/// fock_diagonal mode only the diagonal is constrained.
void add_reference_bound(conic::ConicProgram& p, const Reduction& red, const EnergyBudget& budget,
                         const conic::LinearForm& a, const conic::LinearForm& b,
                         const std::vector<conic::LinearForm>& adj, const std::string& label);

/// Linear functional on probe coordinates, c_k = sum_g scale * Tr[M_gk F_g].
Eigen::VectorXd probe_functional(const Reduction& red, const std::vector<Eigen::MatrixXd>& f);

}  // namespace ecdiv
