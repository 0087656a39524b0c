#include "qinv/hash.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qinv/rng.hpp"

namespace qinv {

namespace {

std::uint64_t low_mask(std::size_t bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

void check_sizes(std::size_t in_bits, std::size_t out_bits) {
  if (in_bits == 0 || out_bits == 0) throw std::invalid_argument("hash: in_bits and out_bits must be >= 1");
  if (in_bits > 64 || out_bits > 64) throw std::invalid_argument("hash: at most 64 input and output bits");
}

}  // namespace

std::uint64_t AffineHash::eval(std::uint64_t x) const {
  if (in_bits < 64 && (x >> in_bits) != 0) throw std::invalid_argument("AffineHash::eval: input wider than in_bits");
  std::uint64_t tag = 0;
  for (std::size_t r = 0; r < out_bits; ++r) {
    const auto bit = static_cast<std::uint64_t>(std::popcount(rows[r] & x) & 1);
    tag |= bit << r;
  }
  return tag ^ offset;
}

BitString AffineHash::eval(const BitString& x) const {
  if (x.size() != in_bits) throw std::invalid_argument("AffineHash::eval: input length mismatch");
  std::uint64_t v = 0;
  for (bool b : x) v = (v << 1) | static_cast<std::uint64_t>(b);
  const auto tag = eval(v);
  BitString out(out_bits);
  for (std::size_t i = 0; i < out_bits; ++i) out[i] = ((tag >> (out_bits - 1 - i)) & 1u) != 0;
  return out;
}

AffineHash sample_hash(std::size_t in_bits, std::size_t out_bits, std::uint64_t seed) {
  check_sizes(in_bits, out_bits);
  CounterRng rng(seed);
  AffineHash h{in_bits, out_bits, std::vector<std::uint64_t>(out_bits), 0};
  for (auto& row : h.rows) row = rng() & low_mask(in_bits);
  h.offset = rng() & low_mask(out_bits);
  return h;
}

AffineHash hash_member(std::size_t in_bits, std::size_t out_bits, std::uint64_t index) {
  check_sizes(in_bits, out_bits);
  if (in_bits * out_bits + out_bits >= 64) throw std::invalid_argument("hash_member: family too large to index");
  AffineHash h{in_bits, out_bits, std::vector<std::uint64_t>(out_bits), 0};
  for (auto& row : h.rows) {
    row = index & low_mask(in_bits);
    index >>= in_bits;
  }
  h.offset = index & low_mask(out_bits);
  return h;
}

double exhaustive_collision_probability(std::size_t in_bits, std::size_t out_bits) {
  check_sizes(in_bits, out_bits);
  const std::size_t family_bits = in_bits * out_bits + out_bits;
  if (family_bits > 24 || in_bits > 8) throw std::invalid_argument("exhaustive_collision_probability: family too large");
  const std::uint64_t members = std::uint64_t{1} << family_bits;
  const std::uint64_t inputs = std::uint64_t{1} << in_bits;
  double worst = 0.0;
  for (std::uint64_t x = 0; x < inputs; ++x) {
    for (std::uint64_t x2 = x + 1; x2 < inputs; ++x2) {
      std::uint64_t hits = 0;
      for (std::uint64_t k = 0; k < members; ++k) {
        const auto h = hash_member(in_bits, out_bits, k);
        if (h.eval(x) == h.eval(x2)) ++hits;
      }
      worst = std::max(worst, static_cast<double>(hits) / static_cast<double>(members));
    }
  }
  return worst;
}

double collision_rate(std::size_t in_bits, std::size_t out_bits, std::uint64_t pairs, std::uint64_t seed) {
  check_sizes(in_bits, out_bits);
  if (pairs == 0) throw std::invalid_argument("collision_rate: pairs must be >= 1");
  if (in_bits == 0 || (in_bits < 64 && (std::uint64_t{1} << in_bits) < 2)) {
    throw std::invalid_argument("collision_rate: need at least two distinct inputs");
  }
  CounterRng rng(seed);
  const std::uint64_t mask = low_mask(in_bits);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < pairs; ++i) {
    const auto h = sample_hash(in_bits, out_bits, derive_seed(seed, i));
    const std::uint64_t x = rng() & mask;
    std::uint64_t x2 = x;
    while (x2 == x) x2 = rng() & mask;
    if (h.eval(x) == h.eval(x2)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs);
}

std::string serialize(const AffineHash& h) {
  std::string out = fmt::format("HASH {} {}\n", h.in_bits, h.out_bits);
  for (auto row : h.rows) out += fmt::format("{:016x}\n", row);
  out += fmt::format("{:016x}\n", h.offset);
  return out;
}

AffineHash parse_hash(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  AffineHash h;
  if (!(in >> tag >> h.in_bits >> h.out_bits) || tag != "HASH") throw std::invalid_argument("parse_hash: bad header");
  check_sizes(h.in_bits, h.out_bits);
  std::string word;
  auto read_word = [&](std::size_t width) {
    if (!(in >> word)) throw std::invalid_argument("parse_hash: truncated input");
    const auto v = std::stoull(word, nullptr, 16);
    if ((v & ~low_mask(width)) != 0) throw std::invalid_argument("parse_hash: word wider than declared size");
    return static_cast<std::uint64_t>(v);
  };
  h.rows.resize(h.out_bits);
  for (auto& row : h.rows) row = read_word(h.in_bits);
  h.offset = read_word(h.out_bits);
  return h;
}

}  // namespace qinv
