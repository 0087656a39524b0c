#include "qinv/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qinv/rng.hpp"

namespace qinv {

namespace {

constexpr double kEigenCutoff = 1e-12;
constexpr double kDensityTolerance = 1e-10;

double plogp_sum(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) {
    if (v > kEigenCutoff) acc -= v * std::log2(v);
  }
  return acc;
}

Eigen::MatrixXcd to_eigen(std::size_t dim, std::span<const Amplitude> m) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r * dim + c];
  }
  return out;
}

std::vector<double> eigenvalues(std::size_t dim, std::span<const Amplitude> m) {
  std::vector<double> out(dim);
  bool diagonal = true;
  for (std::size_t r = 0; r < dim && diagonal; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (r != c && m[r * dim + c] != Amplitude{0.0, 0.0}) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = m[i * dim + i].real();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(dim, m), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  for (std::size_t i = 0; i < dim; ++i) out[i] = ev(static_cast<Eigen::Index>(i));
  return out;
}

// -sum lambda log lambda of an unnormalized PSD block.
double block_entropy(std::size_t dim, std::span<const Amplitude> m) {
  const auto ev = eigenvalues(dim, m);
  return plogp_sum(ev);
}

}  // namespace

DensityMatrix DensityMatrix::pure(std::span<const Amplitude> psi) {
  DensityMatrix rho{psi.size(), std::vector<Amplitude>(psi.size() * psi.size())};
  for (std::size_t r = 0; r < psi.size(); ++r) {
    for (std::size_t c = 0; c < psi.size(); ++c) rho.matrix[r * psi.size() + c] = psi[r] * std::conj(psi[c]);
  }
  return rho;
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probs) {
  DensityMatrix rho{probs.size(), std::vector<Amplitude>(probs.size() * probs.size())};
  for (std::size_t i = 0; i < probs.size(); ++i) rho.matrix[i * probs.size() + i] = probs[i];
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  std::vector<double> p(dim, 1.0 / static_cast<double>(dim));
  return diagonal(p);
}

bool DensityMatrix::is_diagonal(double tol) const {
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (r != c && std::abs(matrix[r * dim + c]) > tol) return false;
    }
  }
  return true;
}

void DensityMatrix::validate() const {
  if (dim == 0 || matrix.size() != dim * dim) throw std::invalid_argument("DensityMatrix: matrix is not dim x dim");
  Amplitude trace{0.0, 0.0};
  for (std::size_t r = 0; r < dim; ++r) {
    trace += matrix[r * dim + r];
    for (std::size_t c = r; c < dim; ++c) {
      if (std::abs(matrix[r * dim + c] - std::conj(matrix[c * dim + r])) > kDensityTolerance) {
        throw std::invalid_argument("DensityMatrix: not Hermitian");
      }
    }
  }
  if (std::abs(trace - 1.0) > kDensityTolerance) {
    throw std::invalid_argument(fmt::format("DensityMatrix: trace {} is not 1", trace.real()));
  }
  for (double ev : eigenvalues(dim, matrix)) {
    if (ev < -kDensityTolerance) throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b, bool keep_a) {
  if (dim_a * dim_b != rho.dim) throw std::invalid_argument("partial_trace: factor dimensions do not match");
  const std::size_t keep = keep_a ? dim_a : dim_b;
  DensityMatrix out{keep, std::vector<Amplitude>(keep * keep)};
  for (std::size_t i = 0; i < keep; ++i) {
    for (std::size_t j = 0; j < keep; ++j) {
      Amplitude acc{0.0, 0.0};
      if (keep_a) {
        for (std::size_t b = 0; b < dim_b; ++b) acc += rho(i * dim_b + b, j * dim_b + b);
      } else {
        for (std::size_t a = 0; a < dim_a; ++a) acc += rho(a * dim_b + i, a * dim_b + j);
      }
      out.matrix[i * keep + j] = acc;
    }
  }
  return out;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("binary_entropy: p = {} outside [0, 1]", p));
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double shannon_entropy(std::span<const double> probs) {
  double acc = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("shannon_entropy: negative probability");
    if (p > 0.0) acc -= p * std::log2(p);
  }
  return acc;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  rho.validate();
  return block_entropy(rho.dim, rho.matrix);
}

double conditional_entropy(const DensityMatrix& joint, std::size_t dim_a, std::size_t dim_b) {
  return von_neumann_entropy(joint) - von_neumann_entropy(partial_trace(joint, dim_a, dim_b, false));
}

void ClassicalQuantumState::validate() const {
  if (branches.empty()) throw std::invalid_argument("ClassicalQuantumState: no branches");
  double total = 0.0;
  const auto arity = label_arity();
  const auto qdim = quantum_dim();
  for (const auto& b : branches) {
    if (b.probability < 0.0) throw std::invalid_argument("ClassicalQuantumState: negative probability");
    if (b.label.size() != arity) throw std::invalid_argument("ClassicalQuantumState: labels have different arity");
    if (b.quantum.dim != qdim) throw std::invalid_argument("ClassicalQuantumState: quantum parts differ in dimension");
    b.quantum.validate();
    total += b.probability;
  }
  if (std::abs(total - 1.0) > kDensityTolerance) throw std::invalid_argument("ClassicalQuantumState: probabilities do not sum to 1");
}

Subsystem Subsystem::joined(const Subsystem& other) const {
  Subsystem out = *this;
  for (auto c : other.classical) {
    if (std::find(out.classical.begin(), out.classical.end(), c) != out.classical.end()) {
      throw std::invalid_argument("Subsystem: selectors overlap");
    }
    out.classical.push_back(c);
  }
  if (quantum && other.quantum) throw std::invalid_argument("Subsystem: selectors overlap on the quantum part");
  out.quantum = quantum || other.quantum;
  return out;
}

double entropy(const ClassicalQuantumState& state, const Subsystem& sub) {
  for (auto c : sub.classical) {
    if (c >= state.label_arity()) throw std::invalid_argument("entropy: classical selector out of range");
  }
  std::map<std::vector<std::uint32_t>, std::size_t> group_of;
  std::vector<double> mass;
  std::vector<std::vector<Amplitude>> blocks;
  std::vector<std::vector<double>> diagonals;
  const std::size_t qdim = state.quantum_dim();
  const bool diagonal = sub.quantum && std::all_of(state.branches.begin(), state.branches.end(),
                                                   [](const CqBranch& b) { return b.quantum.is_diagonal(); });
  for (const auto& b : state.branches) {
    if (b.probability == 0.0) continue;
    std::vector<std::uint32_t> key;
    key.reserve(sub.classical.size());
    for (auto c : sub.classical) key.push_back(b.label[c]);
    auto [it, inserted] = group_of.emplace(std::move(key), mass.size());
    if (inserted) {
      mass.push_back(0.0);
      if (diagonal) {
        diagonals.emplace_back(qdim, 0.0);
      } else if (sub.quantum) {
        blocks.emplace_back(qdim * qdim, Amplitude{0.0, 0.0});
      }
    }
    mass[it->second] += b.probability;
    if (diagonal) {
      auto& d = diagonals[it->second];
      for (std::size_t i = 0; i < qdim; ++i) d[i] += b.probability * b.quantum.matrix[i * qdim + i].real();
    } else if (sub.quantum) {
      auto& blk = blocks[it->second];
      for (std::size_t i = 0; i < blk.size(); ++i) blk[i] += b.probability * b.quantum.matrix[i];
    }
  }
  if (!sub.quantum) return shannon_entropy(mass);
  // Block-diagonal in the classical label: the spectrum is the union of the block spectra.
  double s = 0.0;
  for (const auto& d : diagonals) s += plogp_sum(d);
  for (const auto& blk : blocks) s += block_entropy(qdim, blk);
  return s;
}

double conditional_entropy(const ClassicalQuantumState& state, const Subsystem& a, const Subsystem& b) {
  return entropy(state, a.joined(b)) - entropy(state, b);
}

double mutual_information(const ClassicalQuantumState& state, const Subsystem& a, const Subsystem& b,
                          const Subsystem& given) {
  return conditional_entropy(state, a, given) - conditional_entropy(state, a, b.joined(given));
}

double check_subadditivity(const ClassicalQuantumState& state, std::span<const std::vector<std::size_t>> parts,
                           const Subsystem& q) {
  Subsystem all;
  double sum = 0.0;
  for (const auto& p : parts) {
    Subsystem part{p, false};
    all = all.joined(part);
    sum += conditional_entropy(state, part, q);
  }
  (void)all.joined(q);
  return sum - conditional_entropy(state, all, q);
}

ClassicalQuantumState random_cq_state(std::size_t parts, std::size_t alphabet, std::size_t qdim, std::uint64_t seed) {
  if (parts == 0 || alphabet == 0 || qdim == 0) throw std::invalid_argument("random_cq_state: sizes must be >= 1");
  CounterRng rng(seed);
  std::size_t labels = 1;
  for (std::size_t i = 0; i < parts; ++i) labels *= alphabet;
  ClassicalQuantumState st;
  double total = 0.0;
  for (std::size_t l = 0; l < labels; ++l) {
    CqBranch b;
    // Sparse weights create correlations between the classical parts.
    b.probability = rng.bernoulli(0.3) ? 0.0 : -std::log(1.0 - rng.uniform());
    b.label.resize(parts);
    std::size_t rest = l;
    for (std::size_t i = parts; i-- > 0;) {
      b.label[i] = static_cast<std::uint32_t>(rest % alphabet);
      rest /= alphabet;
    }
    const std::size_t rank = 1 + rng.below(qdim);
    b.quantum = DensityMatrix{qdim, std::vector<Amplitude>(qdim * qdim)};
    double weight_total = 0.0;
    std::vector<double> weights(rank);
    for (auto& w : weights) weight_total += (w = -std::log(1.0 - rng.uniform()) + 1e-6);
    for (std::size_t k = 0; k < rank; ++k) {
      const RegisterLayout layout{qdim, 1, 1};
      const auto psi = random_state(layout, rng());
      const double w = weights[k] / weight_total;
      const auto amps = psi.amplitudes();
      for (std::size_t r = 0; r < qdim; ++r) {
        for (std::size_t c = 0; c < qdim; ++c) b.quantum.matrix[r * qdim + c] += w * amps[r] * std::conj(amps[c]);
      }
    }
    total += b.probability;
    st.branches.push_back(std::move(b));
  }
  if (total == 0.0) {
    st.branches.front().probability = 1.0;
    total = 1.0;
  }
  for (auto& b : st.branches) b.probability /= total;
  return st;
}

double qracvl_bound(const BoundInput& b) {
  if (!(b.delta >= 0.0 && b.delta <= 1.0)) throw std::invalid_argument("qracvl_bound: delta outside [0, 1]");
  if (b.s_x < 0.0 || b.s_xj < 0.0 || b.n == 0) throw std::invalid_argument("qracvl_bound: invalid input");
  const double per_element = binary_entropy(b.delta) + (1.0 - b.delta) * b.s_xj;
  return std::max(0.0, b.s_x - static_cast<double>(b.n) * per_element);
}

double log2_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0) / std::numbers::ln2; }

double permutation_bound(std::size_t n, double delta) {
  if (n == 0) throw std::invalid_argument("permutation_bound: n must be >= 1");
  return qracvl_bound({log2_factorial(n), std::log2(static_cast<double>(n)), n, delta});
}

double permutation_bound_floor(std::size_t n, double k) {
  const double base = log2_factorial(n);
  if (k <= 0.0) return base;
  const double log_n = std::log2(static_cast<double>(n));
  return base - k * (2.0 * log_n + std::numbers::log2e - std::log2(k));
}

double partition_element_entropy(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw std::invalid_argument("partition_element_entropy: m and n must be >= 1");
  return static_cast<double>(m) * binary_entropy(1.0 / static_cast<double>(n));
}

double partition_element_entropy_ceiling(std::size_t m, std::size_t n) {
  return static_cast<double>(m) / static_cast<double>(n) * (std::log2(static_cast<double>(n)) + std::numbers::log2e);
}

}  // namespace qinv
