#include "qinv/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qinv {

namespace mp = boost::multiprecision;

BigUint factorial(std::size_t n) { return falling_factorial(n, n); }

BigUint falling_factorial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  BigUint out = 1;
  for (std::size_t i = 0; i < k; ++i) out *= (n - i);
  return out;
}

BigUint binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigUint out = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    out *= (n - k + i);
    out /= i;
  }
  return out;
}

BigUint power(std::size_t base, std::size_t exponent) {
  return mp::pow(BigUint(base), static_cast<unsigned>(exponent));
}

std::size_t index_bits(const BigUint& count) {
  if (count < 1) throw std::invalid_argument("index_bits: count must be >= 1");
  if (count == 1) return 0;
  const BigUint top = count - 1;
  return static_cast<std::size_t>(mp::msb(top)) + 1;
}

std::size_t index_bits(std::uint64_t count) { return index_bits(BigUint(count)); }

double log2_big(const BigUint& count) {
  if (count < 1) throw std::invalid_argument("log2_big: count must be >= 1");
  const auto msb = static_cast<std::size_t>(mp::msb(count));
  if (msb < 60) return std::log2(static_cast<double>(count.convert_to<std::uint64_t>()));
  const std::size_t shift = msb - 60;
  const BigUint head = count >> shift;
  return std::log2(static_cast<double>(head.convert_to<std::uint64_t>())) + static_cast<double>(shift);
}

BigUint rank_subset(std::span<const std::uint32_t> sorted_subset, std::size_t universe) {
  const std::size_t k = sorted_subset.size();
  BigUint rank = 0;
  std::int64_t prev = -1;
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = static_cast<std::int64_t>(sorted_subset[i]);
    if (c <= prev || c >= static_cast<std::int64_t>(universe)) {
      throw std::invalid_argument("rank_subset: subset must be strictly increasing within the universe");
    }
    // Subsets that agree before position i and put a smaller value v in
    // (prev, c) at position i: sum_v C(u-1-v, r) = C(u-prev-1, r+1) - C(u-c, r+1).
    const std::size_t r = k - 1 - i;
    rank += binomial(universe - static_cast<std::size_t>(prev + 1), r + 1) -
            binomial(universe - static_cast<std::size_t>(c), r + 1);
    prev = c;
  }
  return rank;
}

std::vector<std::uint32_t> unrank_subset(BigUint rank, std::size_t universe, std::size_t k) {
  if (k > universe || rank >= binomial(universe, k)) throw std::out_of_range("unrank_subset: rank out of range");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  std::size_t v = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = k - 1 - i;
    for (;; ++v) {
      BigUint count = binomial(universe - 1 - v, r);
      if (rank < count) break;
      rank -= count;
    }
    out.push_back(static_cast<std::uint32_t>(v));
    ++v;
  }
  return out;
}

BigUint rank_injection(std::span<const std::uint32_t> values, std::size_t n) {
  if (values.size() > n) throw std::invalid_argument("rank_injection: more values than the alphabet");
  std::vector<std::uint32_t> unused(n);
  for (std::size_t i = 0; i < n; ++i) unused[i] = static_cast<std::uint32_t>(i);
  BigUint rank = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto it = std::lower_bound(unused.begin(), unused.end(), values[i]);
    if (it == unused.end() || *it != values[i]) throw std::invalid_argument("rank_injection: values must be distinct and < n");
    const auto digit = static_cast<std::size_t>(it - unused.begin());
    rank = rank * (n - i) + digit;
    unused.erase(it);
  }
  return rank;
}

std::vector<std::uint32_t> unrank_injection(BigUint rank, std::size_t n, std::size_t k) {
  if (k > n || rank >= falling_factorial(n, k)) throw std::out_of_range("unrank_injection: rank out of range");
  std::vector<std::size_t> digits(k);
  for (std::size_t i = k; i-- > 0;) {
    const std::size_t radix = n - i;
    digits[i] = static_cast<std::size_t>((rank % radix).convert_to<std::uint64_t>());
    rank /= radix;
  }
  std::vector<std::uint32_t> unused(n);
  for (std::size_t i = 0; i < n; ++i) unused[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = unused[digits[i]];
    unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(digits[i]));
  }
  return out;
}

BigUint rank_tuple(std::span<const std::uint32_t> digits, std::size_t n) {
  BigUint rank = 0;
  for (auto d : digits) {
    if (d >= n) throw std::invalid_argument("rank_tuple: digit out of range");
    rank = rank * n + d;
  }
  return rank;
}

std::vector<std::uint32_t> unrank_tuple(BigUint rank, std::size_t n, std::size_t length) {
  if (rank >= power(n, length)) throw std::out_of_range("unrank_tuple: rank out of range");
  std::vector<std::uint32_t> out(length);
  for (std::size_t i = length; i-- > 0;) {
    out[i] = static_cast<std::uint32_t>((rank % n).convert_to<std::uint64_t>());
    rank /= n;
  }
  return out;
}

void BitWriter::write(std::uint64_t value, std::size_t width) {
  if (width < 64 && (value >> width) != 0) throw std::invalid_argument("BitWriter: value does not fit in width");
  for (std::size_t i = width; i-- > 0;) out_.push_back(i < 64 && ((value >> i) & 1u));
}

void BitWriter::write(const BigUint& value, std::size_t width) {
  if (value < 0 || (value != 0 && static_cast<std::size_t>(mp::msb(value)) >= width)) {
    throw std::invalid_argument("BitWriter: value does not fit in width");
  }
  for (std::size_t i = width; i-- > 0;) out_.push_back(mp::bit_test(value, static_cast<unsigned>(i)));
}

void BitWriter::write_bits(const BitString& bits) { out_.insert(out_.end(), bits.begin(), bits.end()); }

std::uint64_t BitReader::read(std::size_t width) {
  if (width > 64 || width > remaining()) throw std::out_of_range("BitReader: read past end");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(in_[pos_++]);
  return v;
}

BigUint BitReader::read_big(std::size_t width) {
  if (width > remaining()) throw std::out_of_range("BitReader: read past end");
  BigUint v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v <<= 1;
    if (in_[pos_++]) v |= 1;
  }
  return v;
}

BitString BitReader::read_bits(std::size_t width) {
  if (width > remaining()) throw std::out_of_range("BitReader: read past end");
  BitString out(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + width));
  pos_ += width;
  return out;
}

}  // namespace qinv
