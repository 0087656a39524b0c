#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qinv {

using BigUint = boost::multiprecision::cpp_int;
using BitString = std::vector<bool>;

BigUint factorial(std::size_t n);
/// n! / (n-k)!, the number of injections of a k-set into an n-set.
BigUint falling_factorial(std::size_t n, std::size_t k);
BigUint binomial(std::size_t n, std::size_t k);
BigUint power(std::size_t base, std::size_t exponent);

/// ceil(log2(count)): bits needed to index `count` distinct values. count >= 1.
std::size_t index_bits(const BigUint& count);
std::size_t index_bits(std::uint64_t count);
/// log2(count) as a real number, valid far beyond double's exponent range.
double log2_big(const BigUint& count);

// Lexicographic ranks. Subsets are given as strictly increasing positions in
// [0, universe); sequences are ordered tuples of distinct values in [0, n).

BigUint rank_subset(std::span<const std::uint32_t> sorted_subset, std::size_t universe);
std::vector<std::uint32_t> unrank_subset(BigUint rank, std::size_t universe, std::size_t k);

/// Rank of an ordered k-tuple of distinct values from [0, n) among all n!/(n-k)! such tuples.
/// A full permutation is the k = n case (Lehmer code).
BigUint rank_injection(std::span<const std::uint32_t> values, std::size_t n);
std::vector<std::uint32_t> unrank_injection(BigUint rank, std::size_t n, std::size_t k);

/// Base-n number formed by the digits (most significant first).
BigUint rank_tuple(std::span<const std::uint32_t> digits, std::size_t n);
std::vector<std::uint32_t> unrank_tuple(BigUint rank, std::size_t n, std::size_t length);

/// Appends fixed-width big-endian fields to a bit string.
class BitWriter {
 public:
  explicit BitWriter(BitString& out) : out_(out) {}
  void write(std::uint64_t value, std::size_t width);
  void write(const BigUint& value, std::size_t width);
  void write_bits(const BitString& bits);

 private:
  BitString& out_;
};

class BitReader {
 public:
  explicit BitReader(const BitString& in, std::size_t offset = 0) : in_(in), pos_(offset) {}
  std::uint64_t read(std::size_t width);
  BigUint read_big(std::size_t width);
  BitString read_bits(std::size_t width);
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  const BitString& in_;
  std::size_t pos_;
};

}  // namespace qinv
