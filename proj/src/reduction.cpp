#include "qinv/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "qinv/parallel.hpp"
#include "qinv/rng.hpp"

namespace qinv {

// ---------------------------------------------------------------------------
// Inverters

InverterRun Inverter::run(const FunctionTable& oracle, std::uint32_t y, const QubitRegister& advice) const {
  const auto alg = algorithm(y, advice, oracle.domain_size(), oracle.codomain_size());
  RegisterLayout layout{oracle.domain_size(), alg.uses_response_register() ? oracle.codomain_size() : 1, 1};
  std::optional<StateVector> initial;
  if (advice.is_basis()) {
    initial.emplace(layout);
  } else {
    auto work = advice.amplitudes();
    layout.work_dim = work.size();
    layout.validate();
    std::vector<Amplitude> amps(layout.size(), Amplitude{0.0, 0.0});
    std::copy(work.begin(), work.end(), amps.begin());
    initial.emplace(layout, std::move(amps));
  }
  auto result = run_with_transcript(alg, oracle, *initial);
  auto outcome = result.state.query_distribution();
  return {std::move(result.state), std::move(result.transcript), std::move(outcome)};
}

std::size_t effective_queries(const Inverter& inv) { return std::max<std::size_t>(1, inv.query_budget()); }

namespace {

// Basis advice: for each y < entries, an optional presence bit (functions only)
// followed by the smallest preimage in index_bits(m) bits.
struct PreimageTable {
  static bool needs_presence(const FunctionTable& f) { return !f.is_permutation(); }

  static std::size_t width(std::size_t m) { return index_bits(static_cast<std::uint64_t>(m)); }

  static std::size_t qubits(const FunctionTable& f, std::size_t entries) {
    return entries * (width(f.domain_size()) + (needs_presence(f) ? 1 : 0));
  }

  static BitString build(const FunctionTable& f, std::size_t entries) {
    std::vector<std::uint32_t> smallest(f.codomain_size(), kUnassigned);
    for (std::size_t x = f.domain_size(); x-- > 0;) smallest[f(x)] = static_cast<std::uint32_t>(x);
    BitString bits;
    BitWriter w(bits);
    const bool presence = needs_presence(f);
    const std::size_t wd = width(f.domain_size());
    for (std::size_t y = 0; y < entries; ++y) {
      const bool found = smallest[y] != kUnassigned;
      if (presence) w.write(std::uint64_t{found}, 1);
      w.write(std::uint64_t{found ? smallest[y] : 0u}, wd);
    }
    return bits;
  }

  /// Stored preimage of y, or kUnassigned.
  static std::uint32_t lookup(const QubitRegister& advice, std::size_t entries, std::size_t domain, std::uint32_t y) {
    if (y >= entries) return kUnassigned;
    if (!advice.is_basis()) throw std::invalid_argument("preimage table advice must be a basis state");
    const std::size_t wd = width(domain);
    const bool presence = entries > 0 && advice.qubits == entries * (wd + 1);
    if (!presence && advice.qubits != entries * wd) throw std::invalid_argument("preimage table advice has the wrong size");
    const std::size_t stride = wd + (presence ? 1 : 0);
    BitReader r(advice.bits(), y * stride);
    if (presence && r.read(1) == 0) return kUnassigned;
    const auto x = static_cast<std::uint32_t>(r.read(wd));
    if (x >= domain) throw std::invalid_argument("preimage table advice entry out of range");
    return x;
  }
};

std::size_t stored_entries(double theta, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(theta * static_cast<double>(n) - 1e-12));
}

class TableAdviceInverter final : public Inverter {
 public:
  explicit TableAdviceInverter(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("table-advice inverter: theta outside [0, 1]");
  }
  std::string name() const override { return fmt::format("table({})", theta_); }
  std::size_t advice_qubits(const FunctionTable& f) const override {
    return PreimageTable::qubits(f, stored_entries(theta_, f.codomain_size()));
  }
  std::size_t query_budget() const override { return 0; }
  QubitRegister prepare_advice(const FunctionTable& f) const override {
    return QubitRegister::basis(PreimageTable::build(f, stored_entries(theta_, f.codomain_size())));
  }
  OracleAlgorithm algorithm(std::uint32_t y, const QubitRegister& advice, std::size_t domain,
                            std::size_t codomain) const override {
    OracleAlgorithm alg(0);
    const auto x = PreimageTable::lookup(advice, stored_entries(theta_, codomain), domain, y);
    if (x != kUnassigned && x != 0) {
      std::vector<std::uint32_t> mapping(domain);
      for (std::size_t i = 0; i < domain; ++i) mapping[i] = static_cast<std::uint32_t>(i);
      std::swap(mapping[0], mapping[x]);
      alg.add(BasisPermutation{Register::Query, std::move(mapping)});
    }
    return alg;
  }

 private:
  double theta_;
};

class GroverInverter final : public Inverter {
 public:
  explicit GroverInverter(std::size_t iterations) : iterations_(iterations) {}
  std::string name() const override { return fmt::format("grover({})", iterations_); }
  std::size_t advice_qubits(const FunctionTable&) const override { return 0; }
  std::size_t query_budget() const override { return iterations_; }
  QubitRegister prepare_advice(const FunctionTable&) const override { return QubitRegister::basis({}); }
  OracleAlgorithm algorithm(std::uint32_t y, const QubitRegister&, std::size_t, std::size_t) const override {
    return grover_algorithm(y, iterations_);
  }

 private:
  std::size_t iterations_;
};

class NoisyInverter final : public Inverter {
 public:
  explicit NoisyInverter(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noisy inverter: p outside [0, 1]");
  }
  std::string name() const override { return fmt::format("noisy({})", p_); }
  std::size_t advice_qubits(const FunctionTable& f) const override {
    return PreimageTable::qubits(f, f.codomain_size());
  }
  std::size_t query_budget() const override { return 0; }
  QubitRegister prepare_advice(const FunctionTable& f) const override {
    return QubitRegister::basis(PreimageTable::build(f, f.codomain_size()));
  }
  OracleAlgorithm algorithm(std::uint32_t y, const QubitRegister& advice, std::size_t domain,
                            std::size_t codomain) const override {
    const auto x = PreimageTable::lookup(advice, codomain, domain, y);
    const double d = static_cast<double>(domain);
    std::vector<Amplitude> target(domain);
    for (std::size_t i = 0; i < domain; ++i) {
      double prob = 1.0 / d;
      if (x != kUnassigned) prob = i == x ? (domain == 1 ? 1.0 : p_) : (1.0 - p_) / (d - 1.0);
      target[i] = std::sqrt(prob);
    }
    OracleAlgorithm alg(0);
    alg.add(PrepareState{Register::Query, std::move(target)});
    return alg;
  }

 private:
  double p_;
};

}  // namespace

std::shared_ptr<const Inverter> table_advice_inverter(double theta) {
  return std::make_shared<TableAdviceInverter>(theta);
}
std::shared_ptr<const Inverter> grover_inverter(std::size_t iterations) {
  return std::make_shared<GroverInverter>(iterations);
}
std::shared_ptr<const Inverter> noisy_inverter(double p) { return std::make_shared<NoisyInverter>(p); }

std::shared_ptr<const Inverter> make_example_inverter(InverterKind kind, double param) {
  switch (kind) {
    case InverterKind::TableAdvice: return table_advice_inverter(param);
    case InverterKind::Grover:
      if (param < 0.0 || param != std::floor(param)) throw std::invalid_argument("grover inverter: T must be a whole number");
      return grover_inverter(static_cast<std::size_t>(param));
    case InverterKind::Noisy: return noisy_inverter(param);
  }
  throw std::invalid_argument("make_example_inverter: unknown kind");
}

// ---------------------------------------------------------------------------
// Sets I, R, G

void SchemeParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("SchemeParams: gamma must lie in (0, 1)");
  if (!(c_const > 0.0 && c_const < 1.0)) throw std::invalid_argument("SchemeParams: c must lie in (0, 1)");
  if (!(5.0 * gamma * gamma / c_const < 1.0)) throw std::invalid_argument("SchemeParams: need 5 gamma^2 / c < 1");
  if (rho && *rho == 0) throw std::invalid_argument("SchemeParams: rho must be >= 1");
  if (!(big_c > 0.0)) throw std::invalid_argument("SchemeParams: C must be positive");
  if (!(success_threshold > 0.0 && success_threshold <= 1.0)) {
    throw std::invalid_argument("SchemeParams: success threshold must lie in (0, 1]");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("SchemeParams: epsilon must lie in (0, 1]");
}

SuccessSet compute_success_set_I(const Inverter& inv, const FunctionTable& f, const QubitRegister& advice,
                                 double threshold) {
  const auto part = invert_partition(f);
  struct Verdict {
    bool inverted = false;
    std::uint32_t best = 0;
  };
  const auto verdicts = parallel_map(part.bags.size(), [&](std::size_t y) {
    Verdict v;
    const auto& bag = part.bags[y];
    if (bag.empty()) return v;
    const auto run = inv.run(f, static_cast<std::uint32_t>(y), advice);
    double mass = 0.0, best_p = -1.0;
    for (auto x : bag) {
      mass += run.outcome[x];
      if (run.outcome[x] > best_p) {
        best_p = run.outcome[x];
        v.best = x;
      }
    }
    v.inverted = mass >= threshold - 1e-12;
    return v;
  });
  SuccessSet out;
  std::size_t covered = 0;
  for (std::size_t y = 0; y < verdicts.size(); ++y) {
    if (!verdicts[y].inverted) continue;
    out.members.push_back(verdicts[y].best);
    covered += part.bags[y].size();
  }
  std::sort(out.members.begin(), out.members.end());
  out.invertible_fraction = static_cast<double>(covered) / static_cast<double>(f.domain_size());
  return out;
}

std::vector<std::uint32_t> sample_R(std::size_t domain, std::size_t t, double gamma, std::uint64_t seed) {
  if (t == 0) throw std::invalid_argument("sample_R: t must be >= 1");
  const double p = gamma / static_cast<double>(t * t);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_R: inclusion probability outside [0, 1]");
  CounterRng rng(seed);
  std::vector<std::uint32_t> out;
  for (std::size_t x = 0; x < domain; ++x) {
    if (rng.uniform() < p) out.push_back(static_cast<std::uint32_t>(x));
  }
  return out;
}

GoodSets compute_good_set_G(const Inverter& inv, const FunctionTable& f, const QubitRegister& advice,
                            std::vector<std::uint32_t> set_i, std::vector<std::uint32_t> set_r,
                            const SchemeParams& params) {
  GoodSets s;
  std::sort(set_i.begin(), set_i.end());
  std::sort(set_r.begin(), set_r.end());
  s.set_i = std::move(set_i);
  s.set_r = std::move(set_r);
  std::set_intersection(s.set_i.begin(), s.set_i.end(), s.set_r.begin(), s.set_r.end(), std::back_inserter(s.set_h));
  const double limit = params.c_const / static_cast<double>(effective_queries(inv));
  for (auto x : s.set_h) {
    const auto run = inv.run(f, f(x), advice);
    double mass = 0.0;
    for (auto z : s.set_r) {
      if (z != x) mass += run.transcript.per_position[z];
    }
    (mass <= limit + 1e-12 ? s.set_g : s.set_j).push_back(x);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Majority vote

std::vector<double> majority_vote(const std::vector<double>& probs, std::size_t rho, std::uint64_t seed,
                                  std::size_t mc_samples) {
  if (rho == 0) throw std::invalid_argument("majority_vote: rho must be >= 1");
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) support.push_back(i);
  }
  std::vector<double> out(probs.size(), 0.0);
  if (support.empty()) throw std::invalid_argument("majority_vote: empty distribution");
  if (support.size() == 1) {
    out[support[0]] = 1.0;
    return out;
  }
  const double s = static_cast<double>(support.size());
  const double r = static_cast<double>(rho);
  if (rho <= 64 && s * s * r * r * r <= 2e8) {
    // P(c wins) = sum_k rho!/k! p_c^k * [sum over other counts of prod p_j^{k_j}/k_j!],
    // others before c need k_j < k, others after c need k_j <= k.
    std::vector<double> inv_fact(rho + 1, 1.0);
    for (std::size_t i = 1; i <= rho; ++i) inv_fact[i] = inv_fact[i - 1] / static_cast<double>(i);
    double rho_fact = 1.0;
    for (std::size_t i = 2; i <= rho; ++i) rho_fact *= static_cast<double>(i);
    for (std::size_t ci = 0; ci < support.size(); ++ci) {
      const double pc = probs[support[ci]];
      double win = 0.0;
      for (std::size_t k = 1; k <= rho; ++k) {
        const std::size_t rest = rho - k;
        std::vector<double> dp(rest + 1, 0.0);
        dp[0] = 1.0;
        for (std::size_t ji = 0; ji < support.size(); ++ji) {
          if (ji == ci) continue;
          const std::size_t cap = ji < ci ? k - 1 : k;
          const double pj = probs[support[ji]];
          std::vector<double> next(rest + 1, 0.0);
          for (std::size_t t = 0; t <= rest; ++t) {
            if (dp[t] == 0.0) continue;
            double term = 1.0;  // pj^a / a!
            for (std::size_t a = 0; a <= cap && t + a <= rest; ++a) {
              next[t + a] += dp[t] * term;
              term *= pj / static_cast<double>(a + 1);
            }
          }
          dp = std::move(next);
        }
        win += std::pow(pc, static_cast<double>(k)) * inv_fact[k] * dp[rest];
      }
      out[support[ci]] = rho_fact * win;
    }
    return out;
  }
  CounterRng rng(seed);
  std::vector<double> cdf(support.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) cdf[i] = (acc += probs[support[i]]);
  std::vector<std::size_t> counts(support.size());
  for (std::size_t sample = 0; sample < mc_samples; ++sample) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t d = 0; d < rho; ++d) {
      const double u = rng.uniform() * acc;
      auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      ++counts[std::min(idx, support.size() - 1)];
    }
    const auto winner = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    out[support[winner]] += 1.0 / static_cast<double>(mc_samples);
  }
  return out;
}

FunctionTable decoder_oracle(const ParsedEncoding& parsed, std::size_t codomain, std::uint32_t y) {
  auto entries = parsed.partial;
  for (auto x : parsed.set_g) entries[x] = y;
  return FunctionTable(codomain, std::move(entries));
}

double oracle_swap_gap(const Inverter& inv, const FunctionTable& f, const FunctionTable& f2, std::uint32_t y,
                       const QubitRegister& advice) {
  const auto a = inv.run(f, y, advice);
  const auto b = inv.run(f2, y, advice);
  return a.final_state.distance(b.final_state);
}

namespace {

std::vector<std::uint32_t> positions_in(const std::vector<std::uint32_t>& sorted_subset,
                                        const std::vector<std::uint32_t>& sorted_universe) {
  std::vector<std::uint32_t> pos;
  pos.reserve(sorted_subset.size());
  for (auto v : sorted_subset) {
    auto it = std::lower_bound(sorted_universe.begin(), sorted_universe.end(), v);
    if (it == sorted_universe.end() || *it != v) throw std::logic_error("subset element missing from universe");
    pos.push_back(static_cast<std::uint32_t>(it - sorted_universe.begin()));
  }
  return pos;
}

void add_advice_copies(Encoding& enc, const QubitRegister& advice, std::size_t rho) {
  for (std::size_t i = 0; i < rho; ++i) enc.quantum.push_back(advice);
  enc.components.push_back({"advice", rho * advice.qubits, static_cast<double>(rho * advice.qubits)});
}

void write_component(Encoding& enc, const std::string& name, const BigUint& value, const BigUint& count) {
  BitWriter w(enc.classical);
  const std::size_t bits = index_bits(count);
  w.write(value, bits);
  enc.components.push_back({name, bits, log2_big(count)});
}

void write_component(Encoding& enc, const std::string& name, std::uint64_t value, std::size_t bits, double ideal) {
  BitWriter w(enc.classical);
  w.write(value, bits);
  enc.components.push_back({name, bits, ideal});
}

std::vector<std::uint32_t> complement(const std::vector<std::uint32_t>& sorted_set, std::size_t universe) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  for (std::uint32_t v = 0; v < universe; ++v) {
    if (i < sorted_set.size() && sorted_set[i] == v) {
      ++i;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

const QubitRegister& first_advice(const Encoding& enc) {
  if (enc.quantum.empty()) throw std::invalid_argument("case-B encoding carries no advice copies");
  return enc.quantum.front();
}

}  // namespace

// ---------------------------------------------------------------------------
// Permutations

PermutationScheme::PermutationScheme(std::shared_ptr<const Inverter> inv, SchemeParams params)
    : inv_(std::move(inv)), params_(params) {
  if (!inv_) throw std::invalid_argument("PermutationScheme: no inverter");
  params_.validate();
}

std::string PermutationScheme::name() const { return "perm-scheme/" + inv_->name(); }

std::size_t PermutationScheme::rho(std::size_t n) const {
  if (params_.rho) return *params_.rho;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(10.0 * std::log(static_cast<double>(n) / params_.epsilon))));
}

double PermutationScheme::g_threshold(std::size_t n) const {
  const double t = static_cast<double>(effective_queries(*inv_));
  return std::max(1.0, (params_.epsilon / 2.0) * params_.gamma * static_cast<double>(n) / (4.0 * t * t));
}

SchemeAnalysis PermutationScheme::analyze(const FunctionTable& pi, std::uint64_t r) const {
  if (!pi.is_permutation()) throw std::invalid_argument("PermutationScheme: input is not a permutation");
  SchemeAnalysis a;
  const std::size_t n = pi.domain_size();
  const auto advice = inv_->prepare_advice(pi);
  a.success = compute_success_set_I(*inv_, pi, advice, params_.success_threshold);
  auto r_set = sample_R(n, effective_queries(*inv_), params_.gamma, derive_seed(r, 0));
  a.sets = compute_good_set_G(*inv_, pi, advice, a.success.members, std::move(r_set), params_);
  a.g_threshold = g_threshold(n);
  if (a.success.invertible_fraction < params_.epsilon / 2.0) {
    a.reason = "invertible fraction below epsilon/2";
  } else if (static_cast<double>(a.sets.set_g.size()) < a.g_threshold) {
    a.reason = "G below threshold";
  } else {
    a.case_b = true;
  }
  return a;
}

Encoding PermutationScheme::encode(const FunctionFamily& family, const FunctionTable& pi, std::uint64_t r) const {
  family.check(pi);
  if (!family.permutations) throw std::invalid_argument("PermutationScheme: family must be permutations");
  const std::size_t n = family.n;
  const auto a = analyze(pi, r);
  Encoding enc;
  if (!a.case_b) {
    enc.branch = "A";
    write_component(enc, "flag", 1, 1, 1.0);
    write_component(enc, "table", rank_injection(pi.entries(), n), factorial(n));
    return enc;
  }
  enc.branch = "B";
  const auto& g = a.sets.set_g;
  const auto& r_set = a.sets.set_r;
  write_component(enc, "flag", 0, 1, 1.0);
  write_component(enc, "g_size", g.size() - 1, index_bits(static_cast<std::uint64_t>(n)),
                  std::log2(static_cast<double>(n)));
  write_component(enc, "g_subset", rank_subset(positions_in(g, r_set), r_set.size()), binomial(r_set.size(), g.size()));
  std::vector<std::uint32_t> off;
  off.reserve(n - g.size());
  for (std::size_t x = 0, gi = 0; x < n; ++x) {
    if (gi < g.size() && g[gi] == x) {
      ++gi;
    } else {
      off.push_back(pi(x));
    }
  }
  write_component(enc, "off_g", rank_injection(off, n), falling_factorial(n, off.size()));
  add_advice_copies(enc, inv_->prepare_advice(pi), rho(n));
  return enc;
}

ParsedEncoding PermutationScheme::parse(const FunctionFamily& family, const Encoding& enc, std::uint64_t r) const {
  const std::size_t n = family.n;
  BitReader in(enc.classical);
  ParsedEncoding p;
  if (in.read(1) == 1) {
    p.table = FunctionTable(n, unrank_injection(in.read_big(index_bits(factorial(n))), n, n));
    return p;
  }
  p.case_b = true;
  const std::size_t g_size = static_cast<std::size_t>(in.read(index_bits(static_cast<std::uint64_t>(n)))) + 1;
  const auto r_set = sample_R(n, effective_queries(*inv_), params_.gamma, derive_seed(r, 0));
  if (g_size > r_set.size()) throw std::invalid_argument("PermutationScheme: G larger than R");
  for (auto pos : unrank_subset(in.read_big(index_bits(binomial(r_set.size(), g_size))), r_set.size(), g_size)) {
    p.set_g.push_back(r_set[pos]);
  }
  const std::size_t off_count = n - g_size;
  const auto off = unrank_injection(in.read_big(index_bits(falling_factorial(n, off_count))), n, off_count);
  p.partial.assign(n, kUnassigned);
  for (std::size_t x = 0, gi = 0, oi = 0; x < n; ++x) {
    if (gi < p.set_g.size() && p.set_g[gi] == x) {
      ++gi;
    } else {
      p.partial[x] = off[oi++];
    }
  }
  auto sorted_off = off;
  std::sort(sorted_off.begin(), sorted_off.end());
  p.g_images = complement(sorted_off, n);
  return p;
}

DecodeDistribution PermutationScheme::decode(const FunctionFamily& family, const Encoding& enc, std::size_t y,
                                             std::uint64_t r) const {
  const auto p = parse(family, enc, r);
  const auto yy = static_cast<std::uint32_t>(y);
  if (!p.case_b) {
    for (std::size_t x = 0; x < family.n; ++x) {
      if ((*p.table)(x) == yy) return {{ElementValue{static_cast<std::uint32_t>(x)}, 1.0}};
    }
    throw std::logic_error("PermutationScheme: case-A table is not a permutation");
  }
  if (!std::binary_search(p.g_images.begin(), p.g_images.end(), yy)) {
    for (std::size_t x = 0; x < family.n; ++x) {
      if (p.partial[x] == yy) return {{ElementValue{static_cast<std::uint32_t>(x)}, 1.0}};
    }
    throw std::logic_error("PermutationScheme: stored values do not cover y");
  }
  const auto run = inv_->run(decoder_oracle(p, family.n, yy), yy, first_advice(enc));
  const auto votes = majority_vote(run.outcome, rho(family.n), derive_seed(r, 2 + y));
  DecodeDistribution dist;
  for (std::size_t x = 0; x < votes.size(); ++x) {
    if (votes[x] > 0.0) dist.emplace_back(ElementValue{static_cast<std::uint32_t>(x)}, votes[x]);
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Functions

FunctionScheme::FunctionScheme(std::shared_ptr<const Inverter> inv, SchemeParams params)
    : inv_(std::move(inv)), params_(params) {
  if (!inv_) throw std::invalid_argument("FunctionScheme: no inverter");
  params_.validate();
}

std::string FunctionScheme::name() const { return "func-scheme/" + inv_->name(); }

double FunctionScheme::k_threshold(std::size_t m, std::size_t n) const {
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return (2.0 * md / nd + 1.0) * params_.big_c * std::log2(md / params_.epsilon);
}

std::size_t FunctionScheme::tag_bits(std::size_t m, std::size_t n) const {
  const double k = k_threshold(m, n);
  double v = k > 1.0 ? std::log2(k) : 0.0;
  if (n > 2) v += std::log2(std::log2(static_cast<double>(n)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v - 1e-12)));
}

std::size_t FunctionScheme::rho(std::size_t m, std::size_t n) const {
  if (params_.rho) return *params_.rho;
  if (n <= 2) return 1;
  const double v = k_threshold(m, n) * 10.0 * std::log(std::log2(static_cast<double>(n)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v)));
}

double FunctionScheme::g_threshold(std::size_t m, std::size_t n) const {
  const double t = static_cast<double>(effective_queries(*inv_));
  return std::max(1.0, params_.epsilon * params_.gamma * static_cast<double>(m) / (8.0 * k_threshold(m, n) * t * t));
}

AffineHash FunctionScheme::tag_hash(std::size_t m, std::size_t n, std::uint64_t r) const {
  const std::size_t in_bits = std::max<std::size_t>(1, index_bits(static_cast<std::uint64_t>(m)));
  return sample_hash(in_bits, tag_bits(m, n), derive_seed(r, 1));
}

SchemeAnalysis FunctionScheme::analyze(const FunctionTable& f, std::uint64_t r) const {
  const std::size_t m = f.domain_size(), n = f.codomain_size();
  if (m > 8 * n) throw std::invalid_argument(fmt::format("FunctionScheme: m = {} exceeds 8n = {}", m, 8 * n));
  SchemeAnalysis a;
  a.g_threshold = g_threshold(m, n);
  if (static_cast<double>(invert_partition(f).max_bag()) > k_threshold(m, n)) {
    a.reason = "some image has more than K preimages";
    return a;
  }
  const auto advice = inv_->prepare_advice(f);
  a.success = compute_success_set_I(*inv_, f, advice, params_.success_threshold);
  auto r_set = sample_R(m, effective_queries(*inv_), params_.gamma, derive_seed(r, 0));
  a.sets = compute_good_set_G(*inv_, f, advice, a.success.members, std::move(r_set), params_);
  if (a.success.invertible_fraction < params_.epsilon / 2.0) {
    a.reason = "invertible fraction below epsilon/2";
  } else if (static_cast<double>(a.sets.set_g.size()) < a.g_threshold) {
    a.reason = "G below threshold";
  } else {
    a.case_b = true;
  }
  return a;
}

Encoding FunctionScheme::encode(const FunctionFamily& family, const FunctionTable& f, std::uint64_t r) const {
  family.check(f);
  const std::size_t m = family.m, n = family.n;
  const auto a = analyze(f, r);
  Encoding enc;
  if (!a.case_b) {
    enc.branch = "A";
    write_component(enc, "flag", 1, 1, 1.0);
    write_component(enc, "table", rank_tuple(f.entries(), n), power(n, m));
    return enc;
  }
  enc.branch = "B";
  const auto& g = a.sets.set_g;
  const auto& r_set = a.sets.set_r;
  std::map<std::uint32_t, std::uint32_t> preimage_in_g;
  for (auto x : g) preimage_in_g.emplace(f(x), x);
  if (preimage_in_g.size() != g.size()) throw std::logic_error("FunctionScheme: f is not injective on G");
  std::vector<std::uint32_t> images;
  for (const auto& [y, x] : preimage_in_g) images.push_back(y);

  write_component(enc, "flag", 0, 1, 1.0);
  write_component(enc, "g_size", g.size(), index_bits(static_cast<std::uint64_t>(m + n)),
                  std::log2(static_cast<double>(m + n)));
  write_component(enc, "g_subset", rank_subset(positions_in(g, r_set), r_set.size()), binomial(r_set.size(), g.size()));
  write_component(enc, "g_images", rank_subset(images, n), binomial(n, g.size()));
  const std::size_t width = index_bits(static_cast<std::uint64_t>(n));
  {
    BitWriter w(enc.classical);
    for (std::size_t x = 0, gi = 0; x < m; ++x) {
      if (gi < g.size() && g[gi] == x) {
        ++gi;
        continue;
      }
      w.write(std::uint64_t{f(x)}, width);
    }
    enc.components.push_back({"off_g", (m - g.size()) * width,
                              static_cast<double>(m - g.size()) * std::log2(static_cast<double>(n))});
  }
  {
    const auto h = tag_hash(m, n, r);
    BitWriter w(enc.classical);
    for (const auto& [y, x] : preimage_in_g) w.write(h.eval(x), h.out_bits);
    enc.components.push_back({"tags", g.size() * h.out_bits, static_cast<double>(g.size() * h.out_bits)});
  }
  add_advice_copies(enc, inv_->prepare_advice(f), rho(m, n));
  return enc;
}

ParsedEncoding FunctionScheme::parse(const FunctionFamily& family, const Encoding& enc, std::uint64_t r) const {
  const std::size_t m = family.m, n = family.n;
  BitReader in(enc.classical);
  ParsedEncoding p;
  if (in.read(1) == 1) {
    p.table = FunctionTable(n, unrank_tuple(in.read_big(index_bits(power(n, m))), n, m));
    return p;
  }
  p.case_b = true;
  const auto g_size = static_cast<std::size_t>(in.read(index_bits(static_cast<std::uint64_t>(m + n))));
  const auto r_set = sample_R(m, effective_queries(*inv_), params_.gamma, derive_seed(r, 0));
  if (g_size > r_set.size() || g_size > n) throw std::invalid_argument("FunctionScheme: G larger than R");
  for (auto pos : unrank_subset(in.read_big(index_bits(binomial(r_set.size(), g_size))), r_set.size(), g_size)) {
    p.set_g.push_back(r_set[pos]);
  }
  p.g_images = unrank_subset(in.read_big(index_bits(binomial(n, g_size))), n, g_size);
  const std::size_t width = index_bits(static_cast<std::uint64_t>(n));
  p.partial.assign(m, kUnassigned);
  for (std::size_t x = 0, gi = 0; x < m; ++x) {
    if (gi < p.set_g.size() && p.set_g[gi] == x) {
      ++gi;
      continue;
    }
    const auto v = in.read(width);
    if (v >= n) throw std::invalid_argument("FunctionScheme: stored value out of range");
    p.partial[x] = static_cast<std::uint32_t>(v);
  }
  const std::size_t tb = tag_bits(m, n);
  for (std::size_t i = 0; i < g_size; ++i) p.tags.push_back(in.read(tb));
  return p;
}

FunctionScheme::Detail FunctionScheme::detail(const FunctionFamily& family, const ParsedEncoding& parsed,
                                              const Encoding& enc, std::uint32_t y, std::uint64_t r) const {
  const auto it = std::lower_bound(parsed.g_images.begin(), parsed.g_images.end(), y);
  if (it == parsed.g_images.end() || *it != y) throw std::invalid_argument("FunctionScheme::detail: y is not in f(G)");
  Detail d;
  d.tag = parsed.tags[static_cast<std::size_t>(it - parsed.g_images.begin())];
  for (std::size_t x = 0; x < family.m; ++x) {
    if (parsed.partial[x] == y) d.base.push_back(static_cast<std::uint32_t>(x));
  }
  d.outcome = inv_->run(decoder_oracle(parsed, family.n, y), y, first_advice(enc)).outcome;
  const auto h = tag_hash(family.m, family.n, r);
  d.keeper.resize(family.m);
  for (std::size_t x = 0; x < family.m; ++x) d.keeper[x] = h.eval(static_cast<std::uint64_t>(x)) == d.tag;
  return d;
}

DecodeDistribution FunctionScheme::decode(const FunctionFamily& family, const Encoding& enc, std::size_t y,
                                          std::uint64_t r) const {
  const auto p = parse(family, enc, r);
  const auto yy = static_cast<std::uint32_t>(y);
  if (!p.case_b) return {{element(*p.table, ElementView::Partition, y), 1.0}};
  if (!std::binary_search(p.g_images.begin(), p.g_images.end(), yy)) {
    ElementValue bag;
    for (std::size_t x = 0; x < family.m; ++x) {
      if (p.partial[x] == yy) bag.push_back(static_cast<std::uint32_t>(x));
    }
    return {{bag, 1.0}};
  }
  const auto d = detail(family, p, enc, yy, r);
  double kept = 0.0;
  for (std::size_t x = 0; x < family.m; ++x) {
    if (d.keeper[x]) kept += d.outcome[x];
  }
  const double none = std::pow(1.0 - std::min(kept, 1.0), static_cast<double>(rho(family.m, family.n)));
  std::map<ElementValue, double> merged;
  if (none > 0.0) merged[d.base] += none;
  if (kept > 0.0) {
    for (std::size_t x = 0; x < family.m; ++x) {
      if (!d.keeper[x] || d.outcome[x] <= 0.0) continue;
      auto set = d.base;
      if (!std::binary_search(set.begin(), set.end(), static_cast<std::uint32_t>(x))) {
        set.insert(std::upper_bound(set.begin(), set.end(), static_cast<std::uint32_t>(x)), static_cast<std::uint32_t>(x));
      }
      merged[set] += d.outcome[x] / kept * (1.0 - none);
    }
  }
  return DecodeDistribution(merged.begin(), merged.end());
}

}  // namespace qinv
