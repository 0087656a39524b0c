#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qinv/attacks.hpp"

namespace qinv {

struct SwappingTrial {
  std::uint64_t trial = 0;
  std::size_t m = 0;  // domain
  std::size_t n = 0;  // codomain
  std::size_t t = 0;
  std::size_t changed = 0;  // points where the oracles differ
  double distance = 0.0;
  double bound = 0.0;          // q_j measured under the first oracle
  double bound_swapped = 0.0;  // q_j measured under the second oracle
  double hybrid_bound = 0.0;   // 2 * min(bound, bound_swapped)

  bool violates() const;
  bool violates_hybrid() const;
};

/// Random (algorithm, oracle pair) instances with domain <= max_m, codomain
/// <= 8, T in [1, max_t] queries and a one-qubit work register.
std::vector<SwappingTrial> verify_swapping(std::size_t trials, std::size_t max_m, std::size_t max_t, std::uint64_t seed);

struct SubadditivityTrial {
  std::uint64_t trial = 0;
  std::size_t parts = 0;
  std::size_t alphabet = 0;
  std::size_t qdim = 0;
  double slack = 0.0;
};

/// Random CQ states with <= 3 classical parts, alphabets and quantum dims <= 4.
std::vector<SubadditivityTrial> verify_subadditivity(std::size_t trials, std::uint64_t seed);

/// Flat "key = value" text; '#' starts a comment. Throws on malformed lines.
std::map<std::string, std::string> parse_flat_config(std::string_view text);

/// Expands list-valued keys (t_len, chains, tables, epsilon, n) into the
/// cartesian grid of sweep configs. Throws std::invalid_argument when the
/// config names no grid values at all.
std::vector<SweepConfig> sweep_grid(const std::map<std::string, std::string>& config, const std::string& method,
                                    std::size_t n);

}  // namespace qinv
