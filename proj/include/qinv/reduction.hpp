#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qinv/hash.hpp"
#include "qinv/oracle.hpp"
#include "qinv/qracvl.hpp"
#include "qinv/statevector.hpp"

namespace qinv {

struct InverterRun {
  StateVector final_state;
  QueryTranscript transcript;
  /// Distribution of the measured query register.
  std::vector<double> outcome;
};

/// An inverter (alpha, A): advice prepared from f, then an oracle algorithm
/// that receives a challenge y. Basis-state advice is read classically when
/// the algorithm is built; dense advice is loaded into the work register.
class Inverter {
 public:
  virtual ~Inverter() = default;

  virtual std::string name() const = 0;
  virtual std::size_t advice_qubits(const FunctionTable& f) const = 0;
  virtual std::size_t query_budget() const = 0;
  virtual QubitRegister prepare_advice(const FunctionTable& f) const = 0;
  virtual OracleAlgorithm algorithm(std::uint32_t y, const QubitRegister& advice, std::size_t domain,
                                    std::size_t codomain) const = 0;

  InverterRun run(const FunctionTable& oracle, std::uint32_t y, const QubitRegister& advice) const;
};

/// max(1, T): zero-query inverters are treated as T = 1 wherever 1/T appears.
std::size_t effective_queries(const Inverter& inv);

/// Basis advice holding the smallest preimage of every y < ceil(theta * n).
/// Zero queries; the algorithm swaps |0> with the stored preimage.
std::shared_ptr<const Inverter> table_advice_inverter(double theta);
/// No advice; `iterations` rounds of Grover search over the whole domain.
std::shared_ptr<const Inverter> grover_inverter(std::size_t iterations);
/// Basis advice holding the full preimage table. Zero queries; outputs the
/// stored preimage with probability p and a uniform other point otherwise.
std::shared_ptr<const Inverter> noisy_inverter(double p);

enum class InverterKind { TableAdvice, Grover, Noisy };
/// `param` is theta, the iteration count, or p.
std::shared_ptr<const Inverter> make_example_inverter(InverterKind kind, double param);

struct SchemeParams {
  double gamma = 0.01;
  double c_const = 0.04;
  std::optional<std::size_t> rho;
  double big_c = 4.0;
  double success_threshold = 2.0 / 3.0;
  double epsilon = 0.5;

  void validate() const;
};

struct SuccessSet {
  /// One point per inverted challenge, sorted.
  std::vector<std::uint32_t> members;
  /// Fraction of the domain whose image is inverted.
  double invertible_fraction = 0.0;
};

/// Challenge y is inverted when the output lands in f^{-1}(y) with probability
/// >= threshold; the most likely preimage (ties to the lowest) joins I.
SuccessSet compute_success_set_I(const Inverter& inv, const FunctionTable& f, const QubitRegister& advice,
                                 double threshold);

/// Independent inclusion of each point with probability gamma / t^2.
std::vector<std::uint32_t> sample_R(std::size_t domain, std::size_t t, double gamma, std::uint64_t seed);

struct GoodSets {
  std::vector<std::uint32_t> set_i;
  std::vector<std::uint32_t> set_r;
  std::vector<std::uint32_t> set_h;
  std::vector<std::uint32_t> set_j;
  std::vector<std::uint32_t> set_g;
};

/// G = { x in I and R : query mass of the run on f(x) over R \ {x} <= c / T }.
GoodSets compute_good_set_G(const Inverter& inv, const FunctionTable& f, const QubitRegister& advice,
                            std::vector<std::uint32_t> set_i, std::vector<std::uint32_t> set_r,
                            const SchemeParams& params);

/// Distribution of the plurality winner of `rho` independent draws from
/// `probs` (ties go to the smallest outcome). Exact when feasible, else
/// Monte Carlo with `mc_samples` seeded draws.
std::vector<double> majority_vote(const std::vector<double>& probs, std::size_t rho, std::uint64_t seed,
                                  std::size_t mc_samples = 20000);

/// Everything the encoder decided for one (f, r).
struct SchemeAnalysis {
  SuccessSet success;
  GoodSets sets;
  double g_threshold = 0.0;
  bool case_b = false;
  std::string reason;  // why case A was chosen
};

/// Case-B fields recovered from an encoding.
struct ParsedEncoding {
  bool case_b = false;
  std::vector<std::uint32_t> set_g;
  /// Image of f on the complement of G (kUnassigned on G).
  std::vector<std::uint32_t> partial;
  /// Sorted f(G) (functions) or the complement of the stored values (permutations).
  std::vector<std::uint32_t> g_images;
  std::vector<std::uint64_t> tags;
  /// Full table in case A.
  std::optional<FunctionTable> table;
};

inline constexpr std::uint32_t kUnassigned = 0xffffffffu;

/// Oracle used by the decoder: f off G, every point of G sent to y.
FunctionTable decoder_oracle(const ParsedEncoding& parsed, std::size_t codomain, std::uint32_t y);

/// Compressed encoding of permutations via an inverter. Decodes pi^{-1}(y).
class PermutationScheme final : public CodeScheme {
 public:
  PermutationScheme(std::shared_ptr<const Inverter> inv, SchemeParams params);

  std::string name() const override;
  ElementView view() const override { return ElementView::Inverse; }
  std::uint64_t randomness_space() const override { return 0; }

  Encoding encode(const FunctionFamily& family, const FunctionTable& pi, std::uint64_t r) const override;
  DecodeDistribution decode(const FunctionFamily& family, const Encoding& enc, std::size_t y,
                            std::uint64_t r) const override;

  SchemeAnalysis analyze(const FunctionTable& pi, std::uint64_t r) const;
  ParsedEncoding parse(const FunctionFamily& family, const Encoding& enc, std::uint64_t r) const;
  std::size_t rho(std::size_t n) const;
  double g_threshold(std::size_t n) const;
  const Inverter& inverter() const { return *inv_; }
  const SchemeParams& params() const { return params_; }

 private:
  std::shared_ptr<const Inverter> inv_;
  SchemeParams params_;
};

/// Compressed encoding of functions [m] -> [n] via an inverter and hash tags.
/// Decodes the preimage bag f^{-1}(y).
class FunctionScheme final : public CodeScheme {
 public:
  FunctionScheme(std::shared_ptr<const Inverter> inv, SchemeParams params);

  std::string name() const override;
  ElementView view() const override { return ElementView::Partition; }
  std::uint64_t randomness_space() const override { return 0; }

  Encoding encode(const FunctionFamily& family, const FunctionTable& f, std::uint64_t r) const override;
  DecodeDistribution decode(const FunctionFamily& family, const Encoding& enc, std::size_t y,
                            std::uint64_t r) const override;

  SchemeAnalysis analyze(const FunctionTable& f, std::uint64_t r) const;
  ParsedEncoding parse(const FunctionFamily& family, const Encoding& enc, std::uint64_t r) const;

  /// K = (2m/n + 1) * C * log2(m / epsilon).
  double k_threshold(std::size_t m, std::size_t n) const;
  std::size_t tag_bits(std::size_t m, std::size_t n) const;
  std::size_t rho(std::size_t m, std::size_t n) const;
  double g_threshold(std::size_t m, std::size_t n) const;
  AffineHash tag_hash(std::size_t m, std::size_t n, std::uint64_t r) const;

  /// What one case-B decode sees for y in f(G).
  struct Detail {
    std::vector<std::uint32_t> base;  // preimages of y stored off G
    std::vector<double> outcome;      // one inverter run under the decoder oracle
    std::vector<bool> keeper;         // hash tag matches
    std::uint64_t tag = 0;
  };
  Detail detail(const FunctionFamily& family, const ParsedEncoding& parsed, const Encoding& enc, std::uint32_t y,
                std::uint64_t r) const;

  const Inverter& inverter() const { return *inv_; }
  const SchemeParams& params() const { return params_; }

 private:
  std::shared_ptr<const Inverter> inv_;
  SchemeParams params_;
};

/// Distance between the inverter's final states under f and f2 on challenge y.
double oracle_swap_gap(const Inverter& inv, const FunctionTable& f, const FunctionTable& f2, std::uint32_t y,
                       const QubitRegister& advice);

}  // namespace qinv
