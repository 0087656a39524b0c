#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qinv/combinatorics.hpp"
#include "qinv/oracle.hpp"
#include "qinv/statevector.hpp"

namespace qinv {

/// Uniform distribution over S_n or over all functions [m] -> [n].
struct FunctionFamily {
  bool permutations = false;
  std::size_t m = 1;
  std::size_t n = 1;

  static FunctionFamily permutations_of(std::size_t n) { return {true, n, n}; }
  static FunctionFamily functions(std::size_t m, std::size_t n) { return {false, m, n}; }

  BigUint size() const;
  /// Member in lexicographic rank order.
  FunctionTable member(const BigUint& index) const;
  FunctionTable sample(std::uint64_t seed) const;
  /// log2 |family|, the entropy of a uniform member.
  double entropy() const;
  void check(const FunctionTable& f) const;
  std::string describe() const;
};

/// Which coordinate the decoder is asked for.
///  Table:     index x in [m], element f(x).
///  Inverse:   index y in [n], element pi^{-1}(y) (permutations only).
///  Partition: index y in [n], element f^{-1}(y) as a sorted bag.
enum class ElementView { Table, Inverse, Partition };

using ElementValue = std::vector<std::uint32_t>;

std::size_t element_count(const FunctionFamily& family, ElementView view);
ElementValue element(const FunctionTable& f, ElementView view, std::size_t index);
/// Entropy of one element under the uniform family (uniform marginal).
double element_entropy(const FunctionFamily& family, ElementView view);

struct EncodingComponent {
  std::string name;
  std::size_t bits = 0;   // realized
  double ideal_bits = 0;  // log2 of the count the component indexes
};

struct Encoding {
  BitString classical;
  std::vector<QubitRegister> quantum;
  std::vector<EncodingComponent> components;
  /// Scheme-specific branch label ("A", "B", ...); empty if the scheme has one shape.
  std::string branch;

  std::size_t quantum_qubits() const;
  std::size_t length_bits() const { return classical.size() + quantum_qubits(); }
  std::size_t component_sum() const;
};

/// Outcome distribution of one decode; probabilities sum to 1.
using DecodeDistribution = std::vector<std::pair<ElementValue, double>>;

double probability_of(const DecodeDistribution& dist, const ElementValue& value);

class CodeScheme {
 public:
  virtual ~CodeScheme() = default;

  virtual std::string name() const = 0;
  virtual ElementView view() const = 0;
  /// Number of distinct shared-randomness values, or 0 for a 64-bit seed space.
  virtual std::uint64_t randomness_space() const { return 1; }

  virtual Encoding encode(const FunctionFamily& family, const FunctionTable& f, std::uint64_t r) const = 0;
  virtual DecodeDistribution decode(const FunctionFamily& family, const Encoding& enc, std::size_t index,
                                    std::uint64_t r) const = 0;
};

/// Stores f on the first ceil(theta * m) points verbatim; other points decode to 0.
std::unique_ptr<CodeScheme> baseline_fraction_code(double theta);
/// One flag bit plus the lexicographic rank of f in its family.
std::unique_ptr<CodeScheme> full_table_code();
/// Zero-length encoding; always decodes to 0.
std::unique_ptr<CodeScheme> empty_code();

enum class EvalMode { Exact, MonteCarlo };

struct CodeReport {
  std::string scheme;
  std::string family;
  double l_avg = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  EvalMode mode = EvalMode::Exact;
  std::uint64_t trials = 0;
  double std_err = 0.0;
  std::uint64_t case_b = 0;  // encodings whose branch label is "B"

  static std::string csv_header();
  std::string csv_row() const;
  std::string json() const;
};

/// Exact evaluation enumerates (f, r, index) and needs at most this many triples.
inline constexpr double kExactTripleCap = 1e7;

/// Measures L = E[len] and delta = Pr[decode correct] under uniform f, uniform
/// index and uniform r, and compares to the lower bound. Monte Carlo trials
/// sample (f, r) and average delta exactly over all indices.
CodeReport evaluate_code(const CodeScheme& scheme, const FunctionFamily& family, EvalMode mode, std::uint64_t trials,
                         std::uint64_t seed);

struct AuditStep {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // >= 0 when the step holds
};

/// Builds the explicit joint states of (X, R, Q) and (X_J, J, R, Q, Dec) and
/// evaluates every step of the entropy chain behind the length lower bound.
std::vector<AuditStep> audit_bound_chain(const CodeScheme& scheme, const FunctionFamily& family);

}  // namespace qinv
