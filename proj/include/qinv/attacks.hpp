#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qinv/oracle.hpp"

namespace qinv {

/// Counts every evaluation of the underlying table.
class CountingOracle {
 public:
  explicit CountingOracle(const FunctionTable& f) : f_(f) {}
  std::uint32_t operator()(std::uint32_t x) {
    ++queries_;
    return f_(x);
  }
  std::size_t queries() const { return queries_; }

 private:
  const FunctionTable& f_;
  std::size_t queries_ = 0;
};

struct InversionResult {
  std::optional<std::uint32_t> x;  // always verified: f(*x) == y
  std::size_t queries = 0;
};

/// g(y) = (a y + b) mod m with gcd(a, m) = 1.
struct AffineReducer {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  std::uint64_t m = 1;
  std::uint32_t operator()(std::uint32_t y) const { return static_cast<std::uint32_t>((a * y + b) % m); }
};

struct HellmanTableSet {
  std::size_t domain = 0;
  std::size_t r = 0;
  std::size_t m_chains = 0;
  std::size_t t_len = 0;
  /// Per table: (endpoint, start) pairs sorted by endpoint, one start per endpoint.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> endpoints;
  std::vector<AffineReducer> reducers;

  std::size_t stored_pairs() const;
  /// 2 ceil(log2 m) bits per stored pair plus 128 bits of reducer parameters per table.
  std::size_t s_bits() const;
  /// r (t(t+1)/2 + t - 1).
  std::size_t worst_case_queries() const;
};

/// Work cap: r * m_chains * t_len <= 64 * n.
HellmanTableSet hellman_build(const FunctionTable& f, std::size_t m_chains, std::size_t t_len, std::size_t r,
                              std::uint64_t seed);
InversionResult hellman_invert(const HellmanTableSet& tables, const FunctionTable& f, std::uint32_t y);

struct CheckpointIndex {
  std::size_t n = 0;
  std::size_t t_len = 0;
  /// (checkpoint, previous checkpoint on its cycle), sorted by key.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> checkpoints;
  std::size_t cycles = 0;
  /// Lookup accelerator over [n]; not counted in s_bits.
  std::vector<std::uint64_t> key_mask;

  /// 2 ceil(log2 n) bits per stored checkpoint.
  std::size_t s_bits() const;
  const std::uint32_t* previous(std::uint32_t key) const;
};

CheckpointIndex checkpoint_build(const PermutationTable& pi, std::size_t t_len);
InversionResult checkpoint_invert(const CheckpointIndex& index, const FunctionTable& pi, std::uint32_t y);

struct TradeoffRecord {
  std::string method;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t s_bits = 0;
  std::size_t t_worst = 0;
  double t_mean = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

struct AttackMeasurement {
  double epsilon_image = 0.0;    // y = f(x), x uniform
  double epsilon_uniform = 0.0;  // y uniform over [n]
  std::size_t t_worst = 0;
  double t_mean = 0.0;
  std::size_t challenges = 0;
};

/// Success fraction under both challenge distributions over `challenges`
/// seeded draws each. Query counts cover every challenge.
AttackMeasurement measure_hellman(const HellmanTableSet& tables, const FunctionTable& f, std::size_t challenges,
                                  std::uint64_t seed);
/// Inverts every y in [n] when challenges is 0 or >= n, otherwise `challenges`
/// seeded uniform draws.
AttackMeasurement measure_checkpoint(const CheckpointIndex& index, const FunctionTable& pi, std::size_t challenges = 0,
                                     std::uint64_t seed = 0);

enum class GroverMode { Analytic, Exact };

/// Grover restricted to [r], r = clamp(ceil(epsilon n), 1, n), with
/// T = max(1, floor((pi/4) sqrt(r))) iterations. Exact mode simulates every
/// challenge against a seeded random permutation.
TradeoffRecord grover_point(std::size_t n, double epsilon, GroverMode mode, std::uint64_t seed);
/// (r/n) sin^2((2T+1) asin(1/sqrt(r))) for the parameters above.
double grover_point_success(std::size_t n, double epsilon);

struct SweepConfig {
  std::string method;  // hellman | checkpoint | grover
  std::size_t n = 0;
  std::size_t m = 0;  // hellman only; 0 means n
  std::size_t t_len = 0;
  std::size_t chains = 0;
  std::size_t tables = 0;
  double epsilon = 1.0;  // grover only
  std::size_t challenges = 1000;
};

/// One record per config (two for hellman: image and uniform-y challenges).
std::vector<TradeoffRecord> sweep(const std::vector<SweepConfig>& configs, std::uint64_t seed);

/// gnuplot script drawing the (S, T) cloud from `csv_file` with the ST = n and ST^2 = n guides.
std::string gnuplot_script(const std::string& csv_file, std::size_t n);

}  // namespace qinv
