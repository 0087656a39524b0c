#include <gtest/gtest.h>

#include <cmath>

#include "qinv/hash.hpp"

using namespace qinv;

TEST(Hash, ExhaustiveFamilyIsTwoUniform) {
  EXPECT_NEAR(exhaustive_collision_probability(3, 1), 0.5, 1e-15);
  EXPECT_NEAR(exhaustive_collision_probability(3, 2), 0.25, 1e-15);
  EXPECT_THROW(exhaustive_collision_probability(8, 4), std::invalid_argument);
}

TEST(Hash, BruteForcePairCount) {
  // Count collisions of x = 1, x' = 6 directly over all 2^(3*2+2) members.
  std::size_t hits = 0;
  const std::size_t members = std::size_t{1} << 8;
  for (std::uint64_t i = 0; i < members; ++i) {
    const auto h = hash_member(3, 2, i);
    hits += h.eval(std::uint64_t{1}) == h.eval(std::uint64_t{6});
  }
  EXPECT_EQ(hits, members / 4);
}

TEST(Hash, MonteCarloRate) {
  const double p = std::ldexp(1.0, -8);
  const double n = 1e6;
  const double rate = collision_rate(16, 8, static_cast<std::uint64_t>(n), 3);
  EXPECT_LE(rate, p + 3 * std::sqrt(p * (1 - p) / n));
}

TEST(Hash, IsAffineOverGf2) {
  const auto h = sample_hash(10, 6, 5);
  const auto zero = h.eval(std::uint64_t{0});
  for (std::uint64_t a : {3u, 17u, 600u}) {
    for (std::uint64_t b : {1u, 99u, 1023u}) {
      EXPECT_EQ(h.eval(a ^ b) ^ zero, (h.eval(a) ^ zero) ^ (h.eval(b) ^ zero));
    }
  }
}

TEST(Hash, BitStringEvalAgreesWithInteger) {
  const auto h = sample_hash(5, 4, 9);
  for (std::uint64_t x = 0; x < 32; ++x) {
    BitString in(5);
    for (std::size_t i = 0; i < 5; ++i) in[i] = (x >> (4 - i)) & 1;
    const auto out = h.eval(in);
    const auto v = h.eval(x);
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(out[r], bool((v >> (3 - r)) & 1));
  }
}

TEST(Hash, TextRoundTrip) {
  const auto h = sample_hash(12, 7, 1);
  EXPECT_EQ(parse_hash(serialize(h)), h);
  EXPECT_THROW(parse_hash("HASH 3\n"), std::invalid_argument);
}
