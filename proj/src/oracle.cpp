#include "qinv/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qinv/rng.hpp"

namespace qinv {

FunctionTable::FunctionTable(std::size_t codomain, std::vector<std::uint32_t> entries)
    : codomain_(codomain), entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("FunctionTable: domain must be non-empty");
  if (codomain_ == 0) throw std::invalid_argument("FunctionTable: codomain must be non-empty");
  for (auto v : entries_) {
    if (v >= codomain_) {
      throw std::invalid_argument(fmt::format("FunctionTable: entry {} outside [0, {})", v, codomain_));
    }
  }
}

bool FunctionTable::is_permutation() const {
  if (entries_.size() != codomain_) return false;
  std::vector<bool> seen(codomain_, false);
  for (auto v : entries_) {
    if (seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

FunctionTable FunctionTable::reassigned(std::span<const std::uint32_t> points, std::uint32_t value) const {
  if (value >= codomain_) throw std::invalid_argument("reassigned: value outside codomain");
  auto copy = entries_;
  for (auto x : points) {
    if (x >= copy.size()) throw std::invalid_argument("reassigned: point outside domain");
    copy[x] = value;
  }
  return FunctionTable(codomain_, std::move(copy));
}

PermutationTable::PermutationTable(std::vector<std::uint32_t> entries) {
  const auto n = entries.size();
  table_ = FunctionTable(n, std::move(entries));
  if (!table_.is_permutation()) throw std::invalid_argument("PermutationTable: entries are not a bijection");
}

PermutationTable PermutationTable::identity(std::size_t n) {
  std::vector<std::uint32_t> e(n);
  std::iota(e.begin(), e.end(), 0u);
  return PermutationTable(std::move(e));
}

PermutationTable PermutationTable::inverse() const {
  std::vector<std::uint32_t> inv(size());
  for (std::size_t x = 0; x < size(); ++x) inv[table_(x)] = static_cast<std::uint32_t>(x);
  return PermutationTable(std::move(inv));
}

std::size_t InversePartition::max_bag() const {
  std::size_t best = 0;
  for (const auto& b : bags) best = std::max(best, b.size());
  return best;
}

FunctionTable sample_function(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("sample_function: m and n must be >= 1");
  CounterRng rng(seed);
  std::vector<std::uint32_t> e(m);
  for (auto& v : e) v = static_cast<std::uint32_t>(rng.below(n));
  return FunctionTable(n, std::move(e));
}

PermutationTable sample_permutation(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_permutation: n must be >= 1");
  CounterRng rng(seed);
  std::vector<std::uint32_t> e(n);
  std::iota(e.begin(), e.end(), 0u);
  shuffle(std::span<std::uint32_t>(e), rng);
  return PermutationTable(std::move(e));
}

InversePartition invert_partition(const FunctionTable& f) {
  InversePartition p;
  p.domain = f.domain_size();
  p.bags.resize(f.codomain_size());
  for (std::size_t x = 0; x < f.domain_size(); ++x) p.bags[f(x)].push_back(static_cast<std::uint32_t>(x));
  return p;
}

FunctionTable rebuild(const InversePartition& partition) {
  if (partition.bags.empty()) throw std::invalid_argument("rebuild: no bags");
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> e(partition.domain, kUnset);
  for (std::size_t y = 0; y < partition.bags.size(); ++y) {
    for (auto x : partition.bags[y]) {
      if (x >= e.size() || e[x] != kUnset) throw std::invalid_argument("rebuild: bags are not disjoint or out of range");
      e[x] = static_cast<std::uint32_t>(y);
    }
  }
  if (std::find(e.begin(), e.end(), kUnset) != e.end()) {
    throw std::invalid_argument("rebuild: bags do not cover the domain");
  }
  return FunctionTable(partition.bags.size(), std::move(e));
}

namespace {

std::string join_entries(std::span<const std::uint32_t> entries) {
  std::string out;
  out.reserve(entries.size() * 4);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(entries[i]);
  }
  return out;
}

std::uint64_t parse_count(const std::string& token) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("parse_table: bad integer '" + token + "'");
  }
  return v;
}

}  // namespace

std::string serialize(const FunctionTable& f) {
  return fmt::format("FUNC {} {}\n{}\n", f.domain_size(), f.codomain_size(), join_entries(f.entries()));
}

std::string serialize(const PermutationTable& p) {
  return fmt::format("PERM {}\n{}\n", p.size(), join_entries(p.entries()));
}

ParsedTable parse_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  if (!(in >> tag)) throw std::invalid_argument("parse_table: empty input");
  ParsedTable out;
  std::string tok;
  std::size_t m = 0, n = 0;
  if (tag == "FUNC") {
    if (!(in >> tok)) throw std::invalid_argument("parse_table: missing m");
    m = parse_count(tok);
    if (!(in >> tok)) throw std::invalid_argument("parse_table: missing n");
    n = parse_count(tok);
  } else if (tag == "PERM") {
    if (!(in >> tok)) throw std::invalid_argument("parse_table: missing n");
    m = n = parse_count(tok);
    out.permutation = true;
  } else {
    throw std::invalid_argument("parse_table: unknown header '" + tag + "'");
  }
  std::vector<std::uint32_t> e;
  e.reserve(m);
  while (in >> tok) e.push_back(static_cast<std::uint32_t>(parse_count(tok)));
  if (e.size() != m) {
    throw std::invalid_argument(fmt::format("parse_table: expected {} entries, found {}", m, e.size()));
  }
  out.table = FunctionTable(n, std::move(e));
  if (out.permutation && !out.table.is_permutation()) throw std::invalid_argument("parse_table: PERM entries are not a bijection");
  return out;
}

PermutationTable parse_permutation(std::string_view text) {
  auto parsed = parse_table(text);
  if (!parsed.permutation) throw std::invalid_argument("parse_permutation: header is not PERM");
  auto e = parsed.table.entries();
  return PermutationTable(std::vector<std::uint32_t>(e.begin(), e.end()));
}

}  // namespace qinv
