#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qinv {

/// Explicit truth table of f: [m] -> [n]. Indices are 0-based.
class FunctionTable {
 public:
  FunctionTable() = default;
  FunctionTable(std::size_t codomain, std::vector<std::uint32_t> entries);

  std::size_t domain_size() const { return entries_.size(); }
  std::size_t codomain_size() const { return codomain_; }
  std::uint32_t operator()(std::size_t x) const { return entries_[x]; }
  std::span<const std::uint32_t> entries() const { return entries_; }

  bool is_permutation() const;

  /// Copy of this table with every point in `points` remapped to `value`.
  FunctionTable reassigned(std::span<const std::uint32_t> points, std::uint32_t value) const;

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;

 private:
  std::size_t codomain_ = 0;
  std::vector<std::uint32_t> entries_;
};

/// A bijection of [n]. Always a valid FunctionTable with m = n.
class PermutationTable {
 public:
  PermutationTable() = default;
  explicit PermutationTable(std::vector<std::uint32_t> entries);

  static PermutationTable identity(std::size_t n);

  std::size_t size() const { return table_.domain_size(); }
  std::uint32_t operator()(std::size_t x) const { return table_(x); }
  std::span<const std::uint32_t> entries() const { return table_.entries(); }
  const FunctionTable& table() const { return table_; }
  operator const FunctionTable&() const { return table_; }  // NOLINT(google-explicit-constructor)

  PermutationTable inverse() const;

  friend bool operator==(const PermutationTable&, const PermutationTable&) = default;

 private:
  FunctionTable table_;
};

/// f^{-1} viewed as a partition of the domain into n (possibly empty) bags.
struct InversePartition {
  std::size_t domain = 0;
  std::vector<std::vector<std::uint32_t>> bags;

  std::size_t max_bag() const;
  friend bool operator==(const InversePartition&, const InversePartition&) = default;
};

FunctionTable sample_function(std::size_t m, std::size_t n, std::uint64_t seed);
PermutationTable sample_permutation(std::size_t n, std::uint64_t seed);

InversePartition invert_partition(const FunctionTable& f);

/// Inverse of invert_partition. Throws if the bags are not a partition of the domain.
FunctionTable rebuild(const InversePartition& partition);

// Line-oriented text format: "FUNC m n" or "PERM n" header, then the 0-based
// entries separated by single spaces on one line.
std::string serialize(const FunctionTable& f);
std::string serialize(const PermutationTable& p);

struct ParsedTable {
  bool permutation = false;
  FunctionTable table;
};

ParsedTable parse_table(std::string_view text);
PermutationTable parse_permutation(std::string_view text);

}  // namespace qinv
