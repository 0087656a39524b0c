#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qinv/combinatorics.hpp"
#include "qinv/oracle.hpp"

namespace qinv {

using Amplitude = std::complex<double>;

/// Largest statevector the simulator will allocate.
inline constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 24;
inline constexpr double kNormTolerance = 1e-10;

enum class Register { Query, Response, Work, All };

/// Amplitude index of |x>|y>|w> is (x * response_dim + y) * work_dim + w.
struct RegisterLayout {
  std::size_t query_dim = 1;
  std::size_t response_dim = 1;
  std::size_t work_dim = 1;

  std::size_t size() const { return query_dim * response_dim * work_dim; }
  std::size_t dim(Register reg) const;
  void validate() const;

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

class StateVector {
 public:
  /// The all-zero basis state |0>|0>|0>.
  explicit StateVector(RegisterLayout layout);
  StateVector(RegisterLayout layout, std::vector<Amplitude> amplitudes);

  static StateVector basis(RegisterLayout layout, std::size_t x, std::size_t y = 0, std::size_t w = 0);

  const RegisterLayout& layout() const { return layout_; }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  /// Raw access for step kernels; callers are responsible for keeping the norm.
  std::span<Amplitude> mutable_amplitudes() { return amplitudes_; }

  std::size_t index(std::size_t x, std::size_t y = 0, std::size_t w = 0) const {
    return (x * layout_.response_dim + y) * layout_.work_dim + w;
  }
  Amplitude at(std::size_t x, std::size_t y = 0, std::size_t w = 0) const { return amplitudes_[index(x, y, w)]; }

  double norm() const;
  /// Probability of each query-register value.
  std::vector<double> query_distribution() const;
  /// Euclidean distance between two states on the same layout.
  double distance(const StateVector& other) const;

 private:
  RegisterLayout layout_;
  std::vector<Amplitude> amplitudes_;
};

/// A register of qubits: either a computational basis state (bits, most
/// significant first) or dense amplitudes over 2^qubits values.
struct QubitRegister {
  std::size_t qubits = 0;
  std::variant<BitString, std::vector<Amplitude>> state;

  static QubitRegister basis(BitString bits);
  static QubitRegister dense(std::vector<Amplitude> amplitudes);

  bool is_basis() const { return std::holds_alternative<BitString>(state); }
  const BitString& bits() const { return std::get<BitString>(state); }
  /// Dense expansion; only for registers of at most 24 qubits.
  std::vector<Amplitude> amplitudes() const;
};

struct QueryTranscript {
  std::vector<double> per_position;
  std::size_t queries_made = 0;

  double total() const;
};

// Algorithm steps. Everything acting on the query register alone uses the
// register dimension; `support` = 0 means the whole register.

/// Householder reflection exchanging |0> and the uniform state over [0, support).
struct PrepareUniform {
  std::size_t support = 0;
};
/// Grover diffusion 2|u><u| - I, u uniform over [0, support).
struct Diffuse {
  std::size_t support = 0;
};
/// Standard oracle |x>|y>|w> -> |x>|(y + f(x)) mod n>|w>. One query.
struct OracleCall {};
/// Search oracle |x> -> (-1)^[f(x) == target] |x>. One query.
struct PhaseOracle {
  std::uint32_t target = 0;
};
/// Oracle-free phase flip on one basis value of a register.
struct PhaseFlip {
  Register reg = Register::Query;
  std::uint32_t value = 0;
};
/// |v> -> |mapping[v]> on a register; mapping must be a bijection.
struct BasisPermutation {
  Register reg = Register::Query;
  std::vector<std::uint32_t> mapping;
};
/// Explicit unitary (row-major, dim x dim) on a register.
struct MatrixGate {
  Register reg = Register::Query;
  std::size_t dim = 0;
  std::vector<Amplitude> matrix;
};
/// Householder reflection exchanging |0> and `target` (up to a global phase).
struct PrepareState {
  Register reg = Register::Query;
  std::vector<Amplitude> target;
};
/// Diagonal unitary e^{i phases[k]} on the full space.
struct DiagonalPhase {
  std::vector<double> phases;
};

using Step = std::variant<PrepareUniform, Diffuse, OracleCall, PhaseOracle, PhaseFlip, BasisPermutation, MatrixGate,
                          PrepareState, DiagonalPhase>;

bool is_query(const Step& step);

class OracleAlgorithm {
 public:
  explicit OracleAlgorithm(std::size_t t_max = 0) : t_max_(t_max) {}

  /// Appends a step. Throws std::length_error when an oracle call would exceed
  /// the budget and std::invalid_argument for malformed built-ins.
  OracleAlgorithm& add(Step step);

  std::size_t t_max() const { return t_max_; }
  std::size_t oracle_calls() const { return oracle_calls_; }
  std::span<const Step> steps() const { return steps_; }
  bool uses_response_register() const;

 private:
  std::size_t t_max_;
  std::size_t oracle_calls_ = 0;
  std::vector<Step> steps_;
};

/// Standard Grover search for `target`: uniform preparation, then `iterations`
/// rounds of (search oracle, diffusion), restricted to [0, support) if non-zero.
OracleAlgorithm grover_algorithm(std::uint32_t target, std::size_t iterations, std::size_t support = 0);

/// Text form, one step per line:
///   PREP_UNIFORM [support] | ORACLE | DIFFUSE [support]
///   PHASEFLIP preimage:<y> | query:<v> | response:<v> | work:<v>
///   MATRIX <file> [query|response|work|all]
///   BUDGET <t>            (overrides t_max)
/// `#` starts a comment. MATRIX files hold the dimension followed by
/// 2*dim^2 reals (re im pairs, row-major); relative paths resolve against base_dir.
/// PHASEFLIP preimage:<y> is the search oracle and counts as a query.
OracleAlgorithm parse_algorithm(std::string_view text, std::size_t t_max, const std::filesystem::path& base_dir = {});

StateVector apply_oracle(const StateVector& state, const FunctionTable& f);

struct RunResult {
  StateVector state;
  QueryTranscript transcript;
};

/// Executes every step. Query magnitudes are accumulated immediately before
/// each oracle call. Throws std::length_error if more than t_max oracle calls
/// run and std::invalid_argument on layout mismatch.
RunResult run_with_transcript(const OracleAlgorithm& alg, const FunctionTable& f, const StateVector& initial);

/// Exact success mass on preimages of y after k Grover iterations over the full domain.
double grover_invert(const FunctionTable& f, std::uint32_t y, std::size_t k);

struct SwappingGap {
  double distance = 0.0;
  /// sqrt(T * sum_{j : f(j) != f2(j)} q_j(f)) with T = alg.t_max().
  double bound = 0.0;
  /// 2 * bound: the hybrid-argument bound, which holds for any oracle difference.
  double hybrid_bound = 0.0;
};

SwappingGap swapping_gap(const OracleAlgorithm& alg, const FunctionTable& f, const FunctionTable& f2,
                         const StateVector& initial);

/// Exact probability that measuring the query register after the run yields an
/// accepted x. Advice, when present, is loaded into the work register.
double success_probability(const OracleAlgorithm& alg, const std::optional<QubitRegister>& advice,
                           const FunctionTable& f, std::uint32_t y,
                           const std::function<bool(std::size_t)>& accept = {});

/// Counters over every transcript produced in this process.
struct TranscriptAudit {
  std::uint64_t transcripts = 0;
  std::uint64_t violations = 0;
  double max_excess = -1.0;  // max over transcripts of (sum_j q_j - queries_made)
};
TranscriptAudit transcript_audit();

// Random instances for swapping-lemma sweeps.
std::vector<Amplitude> haar_unitary(std::size_t dim, std::uint64_t seed);
StateVector random_state(const RegisterLayout& layout, std::uint64_t seed);
/// Layers of (Haar unitary on each register, random full-space diagonal phase)
/// interleaved with `queries` standard oracle calls; t_max = queries.
OracleAlgorithm random_oracle_algorithm(const RegisterLayout& layout, std::size_t queries, std::uint64_t seed);

}  // namespace qinv
