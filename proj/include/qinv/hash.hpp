#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qinv/combinatorics.hpp"

namespace qinv {

/// h(x) = A x + b over GF(2). Rows of A are packed into 64-bit words, so
/// in_bits <= 64 and out_bits <= 64.
struct AffineHash {
  std::size_t in_bits = 0;
  std::size_t out_bits = 0;
  std::vector<std::uint64_t> rows;  // out_bits rows, bit i of a row multiplies x_i
  std::uint64_t offset = 0;

  /// x given as an integer whose low in_bits bits are the input.
  std::uint64_t eval(std::uint64_t x) const;
  BitString eval(const BitString& x) const;

  friend bool operator==(const AffineHash&, const AffineHash&) = default;
};

AffineHash sample_hash(std::size_t in_bits, std::size_t out_bits, std::uint64_t seed);

/// Family member number `index` in [0, 2^{in*out + out}): rows first, then the offset.
AffineHash hash_member(std::size_t in_bits, std::size_t out_bits, std::uint64_t index);

/// Pairwise collision probability over the whole family, exactly, for every
/// x != x'. Returns the worst pair. Needs in_bits * out_bits + out_bits <= 24.
double exhaustive_collision_probability(std::size_t in_bits, std::size_t out_bits);

/// Fraction of sampled (h, x != x') that collide.
double collision_rate(std::size_t in_bits, std::size_t out_bits, std::uint64_t pairs, std::uint64_t seed);

/// Hex rows (one per line, most significant first) followed by the offset.
std::string serialize(const AffineHash& h);
AffineHash parse_hash(std::string_view text);

}  // namespace qinv
