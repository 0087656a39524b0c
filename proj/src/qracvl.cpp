#include "qinv/qracvl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "qinv/entropy.hpp"
#include "qinv/parallel.hpp"
#include "qinv/rng.hpp"

namespace qinv {

BigUint FunctionFamily::size() const { return permutations ? factorial(n) : power(n, m); }

FunctionTable FunctionFamily::member(const BigUint& index) const {
  if (permutations) return PermutationTable(unrank_injection(index, n, n)).table();
  return FunctionTable(n, unrank_tuple(index, n, m));
}

FunctionTable FunctionFamily::sample(std::uint64_t seed) const {
  if (permutations) return sample_permutation(n, seed).table();
  return sample_function(m, n, seed);
}

double FunctionFamily::entropy() const {
  if (permutations) return log2_factorial(n);
  return static_cast<double>(m) * std::log2(static_cast<double>(n));
}

void FunctionFamily::check(const FunctionTable& f) const {
  if (f.domain_size() != m || f.codomain_size() != n) {
    throw std::invalid_argument(fmt::format("{}: got a table [{}] -> [{}]", describe(), f.domain_size(), f.codomain_size()));
  }
  if (permutations && !f.is_permutation()) throw std::invalid_argument(describe() + ": table is not a permutation");
}

std::string FunctionFamily::describe() const {
  return permutations ? fmt::format("perm{}", n) : fmt::format("func{}x{}", m, n);
}

std::size_t element_count(const FunctionFamily& family, ElementView view) {
  switch (view) {
    case ElementView::Table: return family.m;
    case ElementView::Inverse:
      if (!family.permutations) throw std::invalid_argument("inverse view needs a permutation family");
      return family.n;
    case ElementView::Partition: return family.n;
  }
  return 0;
}

ElementValue element(const FunctionTable& f, ElementView view, std::size_t index) {
  switch (view) {
    case ElementView::Table: return {f(index)};
    case ElementView::Inverse:
    case ElementView::Partition: {
      ElementValue bag;
      for (std::size_t x = 0; x < f.domain_size(); ++x) {
        if (f(x) == index) bag.push_back(static_cast<std::uint32_t>(x));
      }
      if (view == ElementView::Inverse && bag.size() != 1) throw std::invalid_argument("inverse view: not a permutation");
      return bag;
    }
  }
  return {};
}

double element_entropy(const FunctionFamily& family, ElementView view) {
  const double log_n = std::log2(static_cast<double>(family.n));
  if (view == ElementView::Partition && !family.permutations) return partition_element_entropy(family.m, family.n);
  return log_n;
}

std::size_t Encoding::quantum_qubits() const {
  std::size_t q = 0;
  for (const auto& r : quantum) q += r.qubits;
  return q;
}

std::size_t Encoding::component_sum() const {
  std::size_t s = 0;
  for (const auto& c : components) s += c.bits;
  return s;
}

double probability_of(const DecodeDistribution& dist, const ElementValue& value) {
  double p = 0.0;
  for (const auto& [v, q] : dist) {
    if (v == value) p += q;
  }
  return p;
}

namespace {

class BaselineFractionCode final : public CodeScheme {
 public:
  explicit BaselineFractionCode(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("baseline_fraction_code: theta outside [0, 1]");
  }
  std::string name() const override { return fmt::format("baseline({})", theta_); }
  ElementView view() const override { return ElementView::Table; }

  std::size_t stored(const FunctionFamily& family) const {
    return static_cast<std::size_t>(std::ceil(theta_ * static_cast<double>(family.m) - 1e-12));
  }

  Encoding encode(const FunctionFamily& family, const FunctionTable& f, std::uint64_t) const override {
    family.check(f);
    const std::size_t k = stored(family), width = index_bits(static_cast<std::uint64_t>(family.n));
    Encoding enc;
    BitWriter w(enc.classical);
    for (std::size_t x = 0; x < k; ++x) w.write(static_cast<std::uint64_t>(f(x)), width);
    enc.components.push_back({"values", k * width, static_cast<double>(k) * std::log2(static_cast<double>(family.n))});
    return enc;
  }

  DecodeDistribution decode(const FunctionFamily& family, const Encoding& enc, std::size_t index,
                            std::uint64_t) const override {
    const std::size_t k = stored(family), width = index_bits(static_cast<std::uint64_t>(family.n));
    if (index >= k) return {{ElementValue{0}, 1.0}};
    BitReader r(enc.classical, index * width);
    return {{ElementValue{static_cast<std::uint32_t>(r.read(width))}, 1.0}};
  }

 private:
  double theta_;
};

class FullTableCode final : public CodeScheme {
 public:
  std::string name() const override { return "full-table"; }
  ElementView view() const override { return ElementView::Table; }

  Encoding encode(const FunctionFamily& family, const FunctionTable& f, std::uint64_t) const override {
    family.check(f);
    const auto count = family.size();
    const BigUint rank = family.permutations ? rank_injection(f.entries(), family.n) : rank_tuple(f.entries(), family.n);
    Encoding enc;
    BitWriter w(enc.classical);
    w.write(std::uint64_t{1}, 1);
    w.write(rank, index_bits(count));
    enc.components.push_back({"flag", 1, 1.0});
    enc.components.push_back({"rank", index_bits(count), log2_big(count)});
    return enc;
  }

  DecodeDistribution decode(const FunctionFamily& family, const Encoding& enc, std::size_t index,
                            std::uint64_t) const override {
    BitReader r(enc.classical);
    if (r.read(1) != 1) throw std::invalid_argument("full-table: bad flag");
    const auto f = family.member(r.read_big(index_bits(family.size())));
    return {{ElementValue{f(index)}, 1.0}};
  }
};

class EmptyCode final : public CodeScheme {
 public:
  std::string name() const override { return "empty"; }
  ElementView view() const override { return ElementView::Table; }
  Encoding encode(const FunctionFamily& family, const FunctionTable& f, std::uint64_t) const override {
    family.check(f);
    return {};
  }
  DecodeDistribution decode(const FunctionFamily&, const Encoding&, std::size_t, std::uint64_t) const override {
    return {{ElementValue{0}, 1.0}};
  }
};

struct TrialStat {
  double length = 0.0;
  double delta = 0.0;
  std::uint64_t case_b = 0;
};

TrialStat measure(const CodeScheme& scheme, const FunctionFamily& family, const FunctionTable& f, std::uint64_t r) {
  const auto enc = scheme.encode(family, f, r);
  const auto view = scheme.view();
  const std::size_t count = element_count(family, view);
  double success = 0.0;
  for (std::size_t i = 0; i < count; ++i) success += probability_of(scheme.decode(family, enc, i, r), element(f, view, i));
  return {static_cast<double>(enc.length_bits()), success / static_cast<double>(count), enc.branch == "B" ? 1u : 0u};
}

std::string mode_name(EvalMode m) { return m == EvalMode::Exact ? "exact" : "mc"; }

std::string num(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

std::unique_ptr<CodeScheme> baseline_fraction_code(double theta) { return std::make_unique<BaselineFractionCode>(theta); }
std::unique_ptr<CodeScheme> full_table_code() { return std::make_unique<FullTableCode>(); }
std::unique_ptr<CodeScheme> empty_code() { return std::make_unique<EmptyCode>(); }

std::string CodeReport::csv_header() { return "l_avg,delta,bound,slack,mode,trials,std_err,scheme,family,case_b"; }

std::string CodeReport::csv_row() const {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", num(l_avg), num(delta), num(bound), num(slack), mode_name(mode),
                     trials, num(std_err), scheme, family, case_b);
}

std::string CodeReport::json() const {
  nlohmann::ordered_json j;
  j["l_avg"] = l_avg;
  j["delta"] = delta;
  j["bound"] = bound;
  j["slack"] = slack;
  j["mode"] = mode_name(mode);
  j["trials"] = trials;
  j["std_err"] = std_err;
  j["scheme"] = scheme;
  j["family"] = family;
  j["case_b"] = case_b;
  return j.dump();
}

CodeReport evaluate_code(const CodeScheme& scheme, const FunctionFamily& family, EvalMode mode, std::uint64_t trials,
                         std::uint64_t seed) {
  const auto view = scheme.view();
  const std::size_t count = element_count(family, view);
  const std::uint64_t rs = scheme.randomness_space();
  CodeReport rep;
  rep.scheme = scheme.name();
  rep.family = family.describe();
  rep.mode = mode;
  const BoundInput shape{family.entropy(), element_entropy(family, view), count, 1.0};
  auto bound_at = [&](double delta) {
    BoundInput b = shape;
    b.delta = std::clamp(delta, 0.0, 1.0);
    return qracvl_bound(b);
  };

  if (mode == EvalMode::Exact) {
    if (rs == 0) throw std::invalid_argument("evaluate_code: exact mode needs a finite randomness space");
    const double triples = log2_big(family.size()) + std::log2(static_cast<double>(count)) + std::log2(static_cast<double>(rs));
    if (triples > std::log2(kExactTripleCap)) {
      throw std::length_error(fmt::format("evaluate_code: exact mode over {} needs 2^{:.1f} triples (cap 1e7)",
                                          family.describe(), triples));
    }
    const auto members = family.size().convert_to<std::uint64_t>();
    const auto stats = parallel_map(static_cast<std::size_t>(members), [&](std::size_t i) {
      const auto f = family.member(BigUint(i));
      TrialStat acc;
      for (std::uint64_t r = 0; r < rs; ++r) {
        const auto s = measure(scheme, family, f, r);
        acc.length += s.length;
        acc.delta += s.delta;
        acc.case_b += s.case_b;
      }
      return acc;
    });
    const double total = static_cast<double>(members) * static_cast<double>(rs);
    for (const auto& s : stats) {
      rep.l_avg += s.length;
      rep.delta += s.delta;
      rep.case_b += s.case_b;
    }
    rep.l_avg /= total;
    rep.delta /= total;
    rep.trials = members * rs;
    rep.bound = bound_at(rep.delta);
    rep.slack = rep.l_avg - rep.bound;
    return rep;
  }

  if (trials == 0) throw std::invalid_argument("evaluate_code: trials must be >= 1");
  const auto stats = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, t);
    const auto f = family.sample(derive_seed(s, 0));
    const std::uint64_t r = rs == 0 ? derive_seed(s, 1) : CounterRng(derive_seed(s, 1)).below(rs);
    return measure(scheme, family, f, r);
  });
  for (const auto& s : stats) {
    rep.l_avg += s.length;
    rep.delta += s.delta;
    rep.case_b += s.case_b;
  }
  const double tn = static_cast<double>(trials);
  rep.l_avg /= tn;
  rep.delta /= tn;
  rep.trials = trials;
  rep.bound = bound_at(rep.delta);
  rep.slack = rep.l_avg - rep.bound;
  // Delta method on slack = L - bound(delta).
  constexpr double h = 1e-6;
  const double d0 = std::clamp(rep.delta, h, 1.0 - h);
  const double grad = (bound_at(d0 + h) - bound_at(d0 - h)) / (2.0 * h);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double v = stats[i].length - grad * stats[i].delta;
    const double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  rep.std_err = trials > 1 ? std::sqrt(m2 / (tn - 1.0) / tn) : 0.0;
  return rep;
}

namespace {

constexpr std::size_t kAuditMaxBranches = 4096;
constexpr std::size_t kAuditMaxContentQubits = 8;

// Pure state of an encoding, padded with zero qubits to `content` qubits and
// prefixed by a length register when lengths vary.
std::vector<Amplitude> padded_state(const Encoding& enc, std::size_t content, std::size_t length_slot,
                                    std::size_t length_slots) {
  std::vector<Amplitude> psi{Amplitude{1.0, 0.0}};
  std::size_t classical = 0;
  for (bool b : enc.classical) classical = (classical << 1) | static_cast<std::size_t>(b);
  for (const auto& reg : enc.quantum) {
    const auto amps = reg.amplitudes();
    std::vector<Amplitude> next(psi.size() * amps.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      for (std::size_t j = 0; j < amps.size(); ++j) next[i * amps.size() + j] = psi[i] * amps[j];
    }
    psi = std::move(next);
  }
  const std::size_t len = enc.length_bits();
  const std::size_t block = std::size_t{1} << content;
  std::vector<Amplitude> out(length_slots * block, Amplitude{0.0, 0.0});
  const std::size_t quantum_bits = enc.quantum_qubits();
  for (std::size_t q = 0; q < psi.size(); ++q) {
    const std::size_t value = ((classical << quantum_bits) | q) << (content - len);
    out[length_slot * block + value] = psi[q];
  }
  return out;
}

}  // namespace

std::vector<AuditStep> audit_bound_chain(const CodeScheme& scheme, const FunctionFamily& family) {
  const std::uint64_t rs = scheme.randomness_space();
  if (rs == 0) throw std::invalid_argument("audit_bound_chain: needs a finite randomness space");
  const BigUint branches = family.size() * rs;
  if (branches > kAuditMaxBranches) throw std::length_error("audit_bound_chain: family too large for explicit states");
  const auto members = family.size().convert_to<std::size_t>();
  const auto view = scheme.view();
  const std::size_t count = element_count(family, view);

  struct Entry {
    FunctionTable f;
    std::uint64_t r;
    Encoding enc;
  };
  std::vector<Entry> entries;
  std::set<std::size_t> lengths;
  std::size_t content = 0;
  for (std::size_t i = 0; i < members; ++i) {
    const auto f = family.member(BigUint(i));
    for (std::uint64_t r = 0; r < rs; ++r) {
      auto enc = scheme.encode(family, f, r);
      lengths.insert(enc.length_bits());
      content = std::max(content, enc.length_bits());
      entries.push_back({f, r, std::move(enc)});
    }
  }
  if (content > kAuditMaxContentQubits) throw std::length_error("audit_bound_chain: encodings longer than 8 qubits");
  const std::vector<std::size_t> length_list(lengths.begin(), lengths.end());
  const double qdim = static_cast<double>(length_list.size()) * std::ldexp(1.0, static_cast<int>(content));
  if (static_cast<double>(entries.size()) * static_cast<double>(count + 1) * qdim * qdim > std::ldexp(1.0, 26)) {
    throw std::length_error("audit_bound_chain: explicit states would exceed the memory cap");
  }

  std::map<ElementValue, std::uint32_t> ids;
  auto id_of = [&](const ElementValue& v) {
    return ids.emplace(v, static_cast<std::uint32_t>(ids.size())).first->second;
  };

  const double p_branch = 1.0 / static_cast<double>(entries.size());
  ClassicalQuantumState whole, single;
  double l_avg = 0.0;
  for (const auto& e : entries) {
    const auto slot = static_cast<std::size_t>(
        std::lower_bound(length_list.begin(), length_list.end(), e.enc.length_bits()) - length_list.begin());
    const auto rho = DensityMatrix::pure(padded_state(e.enc, content, slot, length_list.size()));
    l_avg += p_branch * static_cast<double>(e.enc.length_bits());

    CqBranch b{p_branch, {}, rho};
    for (std::size_t i = 0; i < count; ++i) b.label.push_back(id_of(element(e.f, view, i)));
    b.label.push_back(static_cast<std::uint32_t>(e.r));
    whole.branches.push_back(std::move(b));

    for (std::size_t j = 0; j < count; ++j) {
      const auto truth = id_of(element(e.f, view, j));
      for (const auto& [value, p] : scheme.decode(family, e.enc, j, e.r)) {
        if (p <= 0.0) continue;
        single.branches.push_back(CqBranch{p_branch * p / static_cast<double>(count),
                                           {truth, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(e.r), id_of(value)},
                                           rho});
      }
    }
  }

  std::vector<std::size_t> x_coords(count);
  std::iota(x_coords.begin(), x_coords.end(), 0);
  const Subsystem X{x_coords, false}, R{{count}, false}, Q{{}, true};
  const Subsystem QR = Q.joined(R);

  const double i_qr_x = mutual_information(whole, X, QR);
  const double i_q_x_r = mutual_information(whole, X, Q, R);
  const double s_q_r = conditional_entropy(whole, Q, R);
  const double s_q = entropy(whole, Q);
  double sum_xi = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum_xi += conditional_entropy(whole, Subsystem{{i}, false}, QR);
  const double s_x_qr = conditional_entropy(whole, X, QR);

  const Subsystem XJ{{0}, false}, JR{{1, 2}, false}, D{{3}, false};
  const double s_xj_qrj = conditional_entropy(single, XJ, JR.joined(Q));
  const double s_xj_dec = conditional_entropy(single, XJ, D);
  const double s_xj = entropy(single, XJ);
  double delta = 0.0;
  for (const auto& b : single.branches) {
    if (b.label[0] == b.label[3]) delta += b.probability;
  }
  delta = std::min(delta, 1.0);
  const double fano = binary_entropy(delta) + (1.0 - delta) * s_xj;
  const double nd = static_cast<double>(count);

  return {
      {"vc1_equality", i_qr_x, i_q_x_r, -std::abs(i_qr_x - i_q_x_r)},
      {"vc1", i_q_x_r, s_q_r, s_q_r - i_q_x_r},
      {"vc2a", s_q_r, s_q, s_q - s_q_r},
      {"vc2b", s_q, l_avg, l_avg - s_q},
      {"vc3", s_x_qr, sum_xi, sum_xi - s_x_qr},
      {"vc3_average", nd * s_xj_qrj, sum_xi, -std::abs(nd * s_xj_qrj - sum_xi)},
      {"vc4", s_xj_qrj, s_xj_dec, s_xj_dec - s_xj_qrj},
      {"vc5", s_xj_dec, fano, fano - s_xj_dec},
  };
}

}  // namespace qinv
