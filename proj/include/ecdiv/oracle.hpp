#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "ecdiv/channels.hpp"
#include "ecdiv/hilbert.hpp"

// Brute-force reference implementations. They are slow and coarse on
// purpose and share no code path with the reductions and solvers they check.
namespace ecdiv::oracle {

/// Seeded sampler. Equal seeds reproduce equal draws for a given standard
/// library build.
class RandomInstance {
 public:
  explicit RandomInstance(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double uniform(double a, double b);
  int uniform_int(int a, int b);  // inclusive
  Eigen::MatrixXcd ginibre(Index rows, Index cols);
  /// Haar unitary from the QR decomposition of a Ginibre matrix with the
  /// phases of R's diagonal absorbed.
  Eigen::MatrixXcd unitary(Index dim);
  /// W W^dagger / Tr for W of shape dim x rank.
  HermitianMatrix state(Index dim, Index rank);
  HermitianMatrix state(Index dim) { return state(dim, dim); }
  /// Positive definite with eigenvalues in [lo, hi] and a Haar eigenbasis.
  HermitianMatrix positive_definite(Index dim, double lo = 0.1, double hi = 2.0);
  /// Probability vector of length dim with mean sum n p_n at most e.
  Eigen::VectorXd spectrum_with_energy(Index dim, double e);

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

struct GridOptimum {
  double value = 0.0;
  Eigen::VectorXd spectrum;
};

/// Exhaustive search over the spectra with entries in (1/resolution) Z that
/// satisfy sum n p_n <= e, for a Fock space of dimension dim.
GridOptimum grid_probe_maximize(const std::function<double(const Eigen::VectorXd&)>& objective, double e, Index dim,
                                int resolution);

/// Largest KL divergence of the outcome distributions over basis_samples
/// random rank-one projective measurements.
double measurement_bruteforce_mre(const HermitianMatrix& rho, const HermitianMatrix& sigma, int basis_samples,
                                  std::uint64_t seed);

/// Channel output from a Choi matrix, summing the contraction entry by entry:
/// out[(r,b),(r',b')] = sum_{a,a'} rho[(r,a),(r',a')] J[(a,b),(a',b')].
HermitianMatrix choi_contraction_apply(const ChoiMatrix& choi, const HermitianMatrix& rho_ra, Index dim_r);

}  // namespace ecdiv::oracle
