#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qinv/statevector.hpp"

namespace qinv {

/// Hermitian, unit-trace, positive semidefinite matrix (row-major).
struct DensityMatrix {
  std::size_t dim = 0;
  std::vector<Amplitude> matrix;

  static DensityMatrix pure(std::span<const Amplitude> psi);
  static DensityMatrix diagonal(std::span<const double> probs);
  static DensityMatrix maximally_mixed(std::size_t dim);

  Amplitude operator()(std::size_t r, std::size_t c) const { return matrix[r * dim + c]; }
  bool is_diagonal(double tol = 0.0) const;
  /// Throws std::invalid_argument unless Hermitian, unit trace and PSD within 1e-10.
  void validate() const;
};

/// Trace out one factor of a bipartite dim_a x dim_b matrix (index a * dim_b + b).
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b, bool keep_a);

double binary_entropy(double p);
/// Shannon entropy in bits; zero entries contribute nothing.
double shannon_entropy(std::span<const double> probs);
/// Eigenvalues below 1e-12 are dropped before p log p.
double von_neumann_entropy(const DensityMatrix& rho);
/// S(AB) - S(B) for a bipartite quantum state.
double conditional_entropy(const DensityMatrix& joint, std::size_t dim_a, std::size_t dim_b);

/// One branch of sum_b p_b |label_b><label_b| (x) rho_b.
struct CqBranch {
  double probability = 0.0;
  std::vector<std::uint32_t> label;
  DensityMatrix quantum;
};

struct ClassicalQuantumState {
  std::vector<CqBranch> branches;

  /// Throws std::invalid_argument on bad probabilities, ragged labels or mismatched dims.
  void validate() const;
  std::size_t label_arity() const { return branches.empty() ? 0 : branches.front().label.size(); }
  std::size_t quantum_dim() const { return branches.empty() ? 1 : branches.front().quantum.dim; }
};

/// A subsystem of a CQ state: some classical coordinates, optionally the quantum part.
struct Subsystem {
  std::vector<std::size_t> classical;
  bool quantum = false;

  Subsystem joined(const Subsystem& other) const;
};

double entropy(const ClassicalQuantumState& state, const Subsystem& sub);
/// S(A|B) = S(AB) - S(B). Throws if A and B overlap.
double conditional_entropy(const ClassicalQuantumState& state, const Subsystem& a, const Subsystem& b);
/// I(A;B|C) = S(A|C) - S(A|BC).
double mutual_information(const ClassicalQuantumState& state, const Subsystem& a, const Subsystem& b,
                          const Subsystem& given = {});

/// sum_i S(X_i | Q) - S(X | Q) where X is the union of `parts`. Parts must be
/// disjoint classical coordinate sets.
double check_subadditivity(const ClassicalQuantumState& state, std::span<const std::vector<std::size_t>> parts,
                           const Subsystem& q);

/// Random CQ state with `parts` classical coordinates of alphabet `alphabet`
/// and a quantum part of dimension `qdim` (mixed, random rank).
ClassicalQuantumState random_cq_state(std::size_t parts, std::size_t alphabet, std::size_t qdim, std::uint64_t seed);

struct BoundInput {
  double s_x = 0.0;
  double s_xj = 0.0;
  std::size_t n = 1;
  double delta = 1.0;
};

/// max(0, s_x - n * (H(delta) + (1 - delta) * s_xj)).
double qracvl_bound(const BoundInput& b);
/// qracvl_bound(log2 n!, log2 n, n, delta).
double permutation_bound(std::size_t n, double delta);
/// Explicit floor for delta = 1 - k/n: log2 n! - k (2 log2 n + log2 e - log2 k).
/// permutation_bound(n, 1 - k/n) is never below it.
double permutation_bound_floor(std::size_t n, double k);
/// m * H(1/n): entropy of one preimage-indicator row of a uniform f: [m] -> [n].
double partition_element_entropy(std::size_t m, std::size_t n);
/// (m/n)(log2 n + log2 e).
double partition_element_entropy_ceiling(std::size_t m, std::size_t n);
double log2_factorial(std::size_t n);

}  // namespace qinv
