#include "qinv/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "qinv/combinatorics.hpp"
#include "qinv/parallel.hpp"
#include "qinv/rng.hpp"
#include "qinv/statevector.hpp"

namespace qinv {

namespace {

std::size_t word_bits(std::size_t universe) { return index_bits(static_cast<std::uint64_t>(std::max<std::size_t>(universe, 1))); }

template <class Pairs>
auto find_key(const Pairs& pairs, std::uint32_t key) {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), key, [](const auto& p, std::uint32_t k) { return p.first < k; });
  return (it != pairs.end() && it->first == key) ? &it->second : nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hellman

std::size_t HellmanTableSet::stored_pairs() const {
  std::size_t s = 0;
  for (const auto& t : endpoints) s += t.size();
  return s;
}

std::size_t HellmanTableSet::s_bits() const { return stored_pairs() * 2 * word_bits(domain) + reducers.size() * 128; }

std::size_t HellmanTableSet::worst_case_queries() const {
  if (t_len == 0) return 0;
  return r * (t_len * (t_len + 1) / 2 + t_len - 1);
}

HellmanTableSet hellman_build(const FunctionTable& f, std::size_t m_chains, std::size_t t_len, std::size_t r,
                              std::uint64_t seed) {
  if (m_chains == 0 || t_len == 0 || r == 0) throw std::invalid_argument("hellman_build: sizes must be >= 1");
  const double work = static_cast<double>(r) * static_cast<double>(m_chains) * static_cast<double>(t_len);
  if (work > 64.0 * static_cast<double>(f.codomain_size())) {
    throw std::length_error(fmt::format("hellman_build: r * m * t = {} exceeds 64n", work));
  }
  HellmanTableSet set;
  set.domain = f.domain_size();
  set.r = r;
  set.m_chains = m_chains;
  set.t_len = t_len;
  const std::uint64_t m = f.domain_size();
  for (std::size_t i = 0; i < r; ++i) {
    CounterRng rng(derive_seed(seed, i));
    AffineReducer g{1, 0, m};
    if (m > 1) {
      do {
        g.a = 1 + rng.below(m - 1);
      } while (std::gcd(g.a, m) != 1);
      g.b = rng.below(m);
    }
    set.reducers.push_back(g);
  }
  set.endpoints = parallel_map(r, [&](std::size_t i) {
    const auto& g = set.reducers[i];
    CounterRng rng(derive_seed(derive_seed(seed, i), 1));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> table;
    table.reserve(m_chains);
    for (std::size_t c = 0; c < m_chains; ++c) {
      const auto start = static_cast<std::uint32_t>(rng.below(m));
      std::uint32_t x = start;
      for (std::size_t s = 0; s < t_len; ++s) x = g(f(x));
      table.emplace_back(x, start);
    }
    // Keep the first chain for each endpoint.
    std::stable_sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    table.erase(std::unique(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                table.end());
    return table;
  });
  return set;
}

InversionResult hellman_invert(const HellmanTableSet& tables, const FunctionTable& f, std::uint32_t y) {
  CountingOracle oracle(f);
  const std::size_t t = tables.t_len;
  for (std::size_t i = 0; i < tables.r; ++i) {
    const auto& g = tables.reducers[i];
    std::uint32_t z = g(y);
    for (std::size_t j = 1; j <= t; ++j) {
      if (const auto* start = find_key(tables.endpoints[i], z)) {
        std::uint32_t x = *start;
        for (std::size_t s = 0; s < t - j; ++s) x = g(oracle(x));
        if (oracle(x) == y) return {x, oracle.queries()};
      }
      if (j < t) z = g(oracle(z));
    }
  }
  return {std::nullopt, oracle.queries()};
}

// ---------------------------------------------------------------------------
// Checkpoints

std::size_t CheckpointIndex::s_bits() const { return checkpoints.size() * 2 * word_bits(n); }

const std::uint32_t* CheckpointIndex::previous(std::uint32_t key) const {
  if (!key_mask.empty() && !((key_mask[key >> 6] >> (key & 63)) & 1u)) return nullptr;
  return find_key(checkpoints, key);
}

CheckpointIndex checkpoint_build(const PermutationTable& pi, std::size_t t_len) {
  if (t_len == 0) throw std::invalid_argument("checkpoint_build: t_len must be >= 1");
  CheckpointIndex idx;
  idx.n = pi.size();
  idx.t_len = t_len;
  std::vector<bool> seen(idx.n, false);
  std::vector<std::uint32_t> marks;
  for (std::size_t s = 0; s < idx.n; ++s) {
    if (seen[s]) continue;
    ++idx.cycles;
    marks.clear();
    std::uint32_t x = static_cast<std::uint32_t>(s);
    for (std::size_t pos = 0; !seen[x]; ++pos) {
      seen[x] = true;
      if (pos % t_len == 0) marks.push_back(x);
      x = pi(x);
    }
    for (std::size_t k = 0; k < marks.size(); ++k) {
      idx.checkpoints.emplace_back(marks[k], marks[(k + marks.size() - 1) % marks.size()]);
    }
  }
  std::sort(idx.checkpoints.begin(), idx.checkpoints.end());
  idx.key_mask.assign((idx.n + 63) / 64, 0);
  for (const auto& [k, _] : idx.checkpoints) idx.key_mask[k >> 6] |= std::uint64_t{1} << (k & 63);
  return idx;
}

InversionResult checkpoint_invert(const CheckpointIndex& index, const FunctionTable& pi, std::uint32_t y) {
  CountingOracle oracle(pi);
  std::uint32_t z = y;
  for (std::size_t s = 0; s <= index.t_len; ++s) {
    if (const auto* prev = index.previous(z)) {
      std::uint32_t w = *prev;
      for (std::size_t guard = 0; guard <= 2 * index.t_len; ++guard) {
        const auto next = oracle(w);
        if (next == y) return {w, oracle.queries()};
        w = next;
      }
      break;
    }
    if (s < index.t_len) z = oracle(z);
  }
  return {std::nullopt, oracle.queries()};
}

// ---------------------------------------------------------------------------
// Measurement

std::string TradeoffRecord::csv_header() { return "method,n,m,s_bits,t_worst,t_mean,epsilon,seed"; }

std::string TradeoffRecord::csv_row() const {
  return fmt::format("{},{},{},{},{},{:.6f},{:.6f},{}", method, n, m, s_bits, t_worst, t_mean, epsilon, seed);
}

namespace {

struct Tally {
  bool ok = false;
  std::size_t queries = 0;
};

void accumulate(const std::vector<Tally>& tallies, double& eps, std::size_t& worst, double& total_queries) {
  std::size_t ok = 0;
  for (const auto& t : tallies) {
    ok += t.ok ? 1 : 0;
    worst = std::max(worst, t.queries);
    total_queries += static_cast<double>(t.queries);
  }
  eps = tallies.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(tallies.size());
}

}  // namespace

AttackMeasurement measure_hellman(const HellmanTableSet& tables, const FunctionTable& f, std::size_t challenges,
                                  std::uint64_t seed) {
  if (challenges == 0) throw std::invalid_argument("measure_hellman: need at least one challenge");
  auto attempt = [&](std::uint32_t y) {
    const auto res = hellman_invert(tables, f, y);
    if (res.x && f(*res.x) != y) throw std::logic_error("hellman_invert returned an unverified preimage");
    return Tally{res.x.has_value(), res.queries};
  };
  const auto image = parallel_map(challenges, [&](std::size_t i) {
    CounterRng rng(derive_seed(seed, 2 * i));
    return attempt(f(static_cast<std::size_t>(rng.below(f.domain_size()))));
  });
  const auto uniform = parallel_map(challenges, [&](std::size_t i) {
    CounterRng rng(derive_seed(seed, 2 * i + 1));
    return attempt(static_cast<std::uint32_t>(rng.below(f.codomain_size())));
  });
  AttackMeasurement out;
  double total = 0.0;
  accumulate(image, out.epsilon_image, out.t_worst, total);
  accumulate(uniform, out.epsilon_uniform, out.t_worst, total);
  out.challenges = challenges;
  out.t_mean = total / static_cast<double>(2 * challenges);
  return out;
}

AttackMeasurement measure_checkpoint(const CheckpointIndex& index, const FunctionTable& pi, std::size_t challenges,
                                     std::uint64_t seed) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t domain = pi.domain_size();
  const bool exhaustive = challenges == 0 || challenges >= domain;
  const std::size_t n = exhaustive ? domain : challenges;
  auto challenge = [&](std::size_t i) {
    if (exhaustive) return static_cast<std::uint32_t>(i);
    CounterRng rng(derive_seed(seed, i));
    return static_cast<std::uint32_t>(rng.below(domain));
  };
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  struct Part {
    std::size_t ok = 0;
    std::size_t worst = 0;
    double total = 0.0;
  };
  const auto parts = parallel_map(chunks, [&](std::size_t c) {
    Part p;
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      const std::uint32_t y = challenge(i);
      const auto res = checkpoint_invert(index, pi, y);
      if (res.x) {
        if (pi(*res.x) != y) throw std::logic_error("checkpoint_invert returned an unverified preimage");
        ++p.ok;
      }
      p.worst = std::max(p.worst, res.queries);
      p.total += static_cast<double>(res.queries);
    }
    return p;
  });
  AttackMeasurement out;
  std::size_t ok = 0;
  double total = 0.0;
  for (const auto& p : parts) {
    ok += p.ok;
    out.t_worst = std::max(out.t_worst, p.worst);
    total += p.total;
  }
  out.challenges = n;
  out.epsilon_image = out.epsilon_uniform = static_cast<double>(ok) / static_cast<double>(n);
  out.t_mean = total / static_cast<double>(n);
  return out;
}

namespace {

struct GroverShape {
  std::size_t r = 1;
  std::size_t t = 1;
};

GroverShape grover_shape(std::size_t n, double epsilon) {
  if (n == 0) throw std::invalid_argument("grover_point: n must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("grover_point: epsilon must lie in (0, 1]");
  GroverShape s;
  const double want = std::ceil(epsilon * static_cast<double>(n) - 1e-9);
  s.r = static_cast<std::size_t>(std::clamp(want, 1.0, static_cast<double>(n)));
  s.t = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(s.r)))));
  return s;
}

}  // namespace

double grover_point_success(std::size_t n, double epsilon) {
  const auto s = grover_shape(n, epsilon);
  const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(s.r)));
  const double hit = std::pow(std::sin((2.0 * static_cast<double>(s.t) + 1.0) * theta), 2);
  return static_cast<double>(s.r) / static_cast<double>(n) * hit;
}

TradeoffRecord grover_point(std::size_t n, double epsilon, GroverMode mode, std::uint64_t seed) {
  const auto s = grover_shape(n, epsilon);
  TradeoffRecord rec{mode == GroverMode::Exact ? "grover-exact" : "grover", n, n, 0, s.t, static_cast<double>(s.t), 0.0,
                     seed};
  if (mode == GroverMode::Analytic) {
    rec.epsilon = grover_point_success(n, epsilon);
    return rec;
  }
  if (n > 1024) throw std::length_error("grover_point: exact mode is limited to n <= 1024");
  const auto pi = sample_permutation(n, seed);
  const auto inv = pi.inverse();
  const auto probs = parallel_map(n, [&](std::size_t y) {
    const auto x = inv(y);
    if (x >= s.r) return 0.0;
    const auto alg = grover_algorithm(static_cast<std::uint32_t>(y), s.t, s.r);
    const auto run = run_with_transcript(alg, pi, StateVector(RegisterLayout{n, 1, 1}));
    return run.state.query_distribution()[x];
  });
  rec.epsilon = std::accumulate(probs.begin(), probs.end(), 0.0) / static_cast<double>(n);
  return rec;
}

std::vector<TradeoffRecord> sweep(const std::vector<SweepConfig>& configs, std::uint64_t seed) {
  std::vector<TradeoffRecord> out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    const std::uint64_t s = derive_seed(seed, i);
    if (c.method == "hellman") {
      const std::size_t m = c.m ? c.m : c.n;
      const auto f = sample_function(m, c.n, derive_seed(s, 0));
      const auto tables = hellman_build(f, c.chains, c.t_len, c.tables, derive_seed(s, 1));
      const auto meas = measure_hellman(tables, f, c.challenges, derive_seed(s, 2));
      out.push_back({"hellman", c.n, m, tables.s_bits(), meas.t_worst, meas.t_mean, meas.epsilon_image, s});
      out.push_back({"hellman-uniform-y", c.n, m, tables.s_bits(), meas.t_worst, meas.t_mean, meas.epsilon_uniform, s});
    } else if (c.method == "checkpoint") {
      const auto pi = sample_permutation(c.n, derive_seed(s, 0));
      const auto idx = checkpoint_build(pi, c.t_len);
      const auto meas = measure_checkpoint(idx, pi, c.challenges, derive_seed(s, 1));
      out.push_back({"checkpoint", c.n, c.n, idx.s_bits(), meas.t_worst, meas.t_mean, meas.epsilon_image, s});
    } else if (c.method == "grover") {
      out.push_back(grover_point(c.n, c.epsilon, GroverMode::Analytic, s));
    } else {
      throw std::invalid_argument("sweep: unknown method '" + c.method + "'");
    }
  }
  return out;
}

std::string gnuplot_script(const std::string& csv_file, std::size_t n) {
  return fmt::format(
      "set datafile separator ','\n"
      "set logscale xy\n"
      "set xlabel 'S (bits)'\n"
      "set ylabel 'T (queries)'\n"
      "set key left bottom\n"
      "N = {}\n"
      "set terminal pngcairo size 900,640\n"
      "set output '{}.png'\n"
      "plot '{}' using ($4>0?$4:1):5 skip 1 with points pt 7 title 'measured (S, T_worst)', \\\n"
      "     N/x with lines dt 2 title 'ST = N', \\\n"
      "     sqrt(N/x) with lines dt 3 title 'ST^2 = N'\n",
      n, csv_file, csv_file);
}

}  // namespace qinv
