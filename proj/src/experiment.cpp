#include "qinv/experiment.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qinv/entropy.hpp"
#include "qinv/parallel.hpp"
#include "qinv/rng.hpp"
#include "qinv/statevector.hpp"

namespace qinv {

bool SwappingTrial::violates() const { return distance > bound + 1e-9 || distance > bound_swapped + 1e-9; }

bool SwappingTrial::violates_hybrid() const { return distance > hybrid_bound + 1e-9; }

std::vector<SwappingTrial> verify_swapping(std::size_t trials, std::size_t max_m, std::size_t max_t, std::uint64_t seed) {
  if (max_m < 2 || max_t < 1) throw std::invalid_argument("verify_swapping: need max_m >= 2 and max_t >= 1");
  return parallel_map(trials, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    CounterRng rng(s);
    SwappingTrial tr;
    tr.trial = i;
    tr.m = 2 + rng.below(max_m - 1);
    tr.n = 2 + rng.below(std::min<std::size_t>(max_m, 8) - 1);
    tr.t = 1 + rng.below(max_t);
    const auto f = sample_function(tr.m, tr.n, derive_seed(s, 1));
    auto e = std::vector<std::uint32_t>(f.entries().begin(), f.entries().end());
    std::vector<std::uint32_t> points(tr.m);
    for (std::size_t x = 0; x < tr.m; ++x) points[x] = static_cast<std::uint32_t>(x);
    shuffle(std::span<std::uint32_t>(points), rng);
    tr.changed = 1 + rng.below(std::max<std::size_t>(1, tr.m / 2));
    for (std::size_t k = 0; k < tr.changed; ++k) {
      auto& v = e[points[k]];
      v = static_cast<std::uint32_t>((v + 1 + rng.below(tr.n - 1)) % tr.n);
    }
    const FunctionTable f2(tr.n, std::move(e));
    const RegisterLayout layout{tr.m, tr.n, 2};
    const auto alg = random_oracle_algorithm(layout, tr.t, derive_seed(s, 2));
    const StateVector initial(layout);
    const auto forward = swapping_gap(alg, f, f2, initial);
    const auto backward = swapping_gap(alg, f2, f, initial);
    tr.distance = forward.distance;
    tr.bound = forward.bound;
    tr.bound_swapped = backward.bound;
    tr.hybrid_bound = 2.0 * std::min(forward.bound, backward.bound);
    return tr;
  });
}

std::vector<SubadditivityTrial> verify_subadditivity(std::size_t trials, std::uint64_t seed) {
  return parallel_map(trials, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    CounterRng rng(s);
    SubadditivityTrial tr;
    tr.trial = i;
    tr.parts = 1 + rng.below(3);
    tr.alphabet = 2 + rng.below(3);
    tr.qdim = 1 + rng.below(4);
    const auto st = random_cq_state(tr.parts, tr.alphabet, tr.qdim, derive_seed(s, 1));
    std::vector<std::vector<std::size_t>> parts;
    for (std::size_t p = 0; p < tr.parts; ++p) parts.push_back({p});
    tr.slack = check_subadditivity(st, parts, Subsystem{{}, true});
    return tr;
  });
}

std::map<std::string, std::string> parse_flat_config(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(fmt::format("config line {}: expected key = value", line_no));
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(fmt::format("config line {}: empty key", line_no));
    out[key] = value;
  }
  return out;
}

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream conv(item);
    T v{};
    if (!(conv >> v)) throw std::invalid_argument("config: bad list value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<SweepConfig> sweep_grid(const std::map<std::string, std::string>& config, const std::string& method,
                                    std::size_t n) {
  static const char* kGridKeys[] = {"n", "t_len", "chains", "tables", "epsilon"};
  bool any = false;
  for (const char* k : kGridKeys) {
    if (auto it = config.find(k); it != config.end() && !parse_list<double>(it->second).empty()) any = true;
  }
  if (!any) throw std::invalid_argument("sweep: the config file defines no grid values");
  auto list = [&](const char* key, std::size_t fallback) {
    auto it = config.find(key);
    auto v = it == config.end() ? std::vector<std::size_t>{} : parse_list<std::size_t>(it->second);
    if (v.empty()) v.push_back(fallback);
    return v;
  };
  const std::string m = config.count("method") ? config.at("method") : method;
  std::vector<double> eps = config.count("epsilon") ? parse_list<double>(config.at("epsilon")) : std::vector<double>{};
  if (eps.empty()) eps.push_back(1.0);
  const std::size_t challenges = list("challenges", 1000).front();
  const std::size_t domain = list("m", 0).front();
  std::vector<SweepConfig> out;
  for (auto nn : list("n", n)) {
    for (auto t : list("t_len", 1)) {
      for (auto c : list("chains", 1)) {
        for (auto r : list("tables", 1)) {
          for (auto e : eps) out.push_back({m, nn, domain, t, c, r, e, challenges});
        }
      }
    }
  }
  return out;
}

}  // namespace qinv
