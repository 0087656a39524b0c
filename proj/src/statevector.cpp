#include "qinv/statevector.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qinv/rng.hpp"

namespace qinv {

// ---------------------------------------------------------------------------
// Layout and state

std::size_t RegisterLayout::dim(Register reg) const {
  switch (reg) {
    case Register::Query: return query_dim;
    case Register::Response: return response_dim;
    case Register::Work: return work_dim;
    case Register::All: return size();
  }
  return 0;
}

void RegisterLayout::validate() const {
  if (query_dim == 0 || response_dim == 0 || work_dim == 0) {
    throw std::invalid_argument("RegisterLayout: all register dimensions must be >= 1");
  }
  if ((work_dim & (work_dim - 1)) != 0) throw std::invalid_argument("RegisterLayout: work_dim must be a power of 2");
  const double total = static_cast<double>(query_dim) * static_cast<double>(response_dim) * static_cast<double>(work_dim);
  if (total > static_cast<double>(kMaxAmplitudes)) {
    throw std::length_error(fmt::format("RegisterLayout: {} x {} x {} amplitudes exceeds the 2^24 cap", query_dim,
                                        response_dim, work_dim));
  }
}

StateVector::StateVector(RegisterLayout layout) : layout_(layout) {
  layout_.validate();
  amplitudes_.assign(layout_.size(), Amplitude{0.0, 0.0});
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(RegisterLayout layout, std::vector<Amplitude> amplitudes)
    : layout_(layout), amplitudes_(std::move(amplitudes)) {
  layout_.validate();
  if (amplitudes_.size() != layout_.size()) throw std::invalid_argument("StateVector: amplitude count does not match layout");
  if (std::abs(norm() - 1.0) > kNormTolerance) throw std::invalid_argument("StateVector: state is not normalized");
}

StateVector StateVector::basis(RegisterLayout layout, std::size_t x, std::size_t y, std::size_t w) {
  layout.validate();
  if (x >= layout.query_dim || y >= layout.response_dim || w >= layout.work_dim) {
    throw std::invalid_argument("StateVector::basis: index outside layout");
  }
  StateVector s(layout);
  s.amplitudes_[0] = 0.0;
  s.amplitudes_[s.index(x, y, w)] = 1.0;
  return s;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amplitudes_) acc += std::norm(a);
  return std::sqrt(acc);
}

std::vector<double> StateVector::query_distribution() const {
  const std::size_t block = layout_.response_dim * layout_.work_dim;
  std::vector<double> out(layout_.query_dim, 0.0);
  for (std::size_t x = 0; x < layout_.query_dim; ++x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < block; ++k) acc += std::norm(amplitudes_[x * block + k]);
    out[x] = acc;
  }
  return out;
}

double StateVector::distance(const StateVector& other) const {
  if (!(layout_ == other.layout_)) throw std::invalid_argument("StateVector::distance: layout mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) acc += std::norm(amplitudes_[i] - other.amplitudes_[i]);
  return std::sqrt(acc);
}

QubitRegister QubitRegister::basis(BitString bits) {
  QubitRegister r;
  r.qubits = bits.size();
  r.state = std::move(bits);
  return r;
}

QubitRegister QubitRegister::dense(std::vector<Amplitude> amplitudes) {
  const std::size_t d = amplitudes.size();
  if (d == 0 || (d & (d - 1)) != 0) throw std::invalid_argument("QubitRegister: dimension must be a power of 2");
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  if (std::abs(std::sqrt(acc) - 1.0) > kNormTolerance) throw std::invalid_argument("QubitRegister: state is not normalized");
  QubitRegister r;
  r.qubits = static_cast<std::size_t>(std::countr_zero(d));
  r.state = std::move(amplitudes);
  return r;
}

std::vector<Amplitude> QubitRegister::amplitudes() const {
  if (!is_basis()) return std::get<std::vector<Amplitude>>(state);
  if (qubits > 24) throw std::length_error("QubitRegister: too many qubits to expand densely");
  std::vector<Amplitude> out(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
  std::size_t index = 0;
  for (bool b : bits()) index = (index << 1) | static_cast<std::size_t>(b);
  out[index] = 1.0;
  return out;
}

double QueryTranscript::total() const {
  double acc = 0.0;
  for (double q : per_position) acc += q;
  return acc;
}

// ---------------------------------------------------------------------------
// Steps

bool is_query(const Step& step) {
  return std::holds_alternative<OracleCall>(step) || std::holds_alternative<PhaseOracle>(step);
}

namespace {

bool is_unitary(std::size_t dim, std::span<const Amplitude> m, double tol) {
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Amplitude acc{0.0, 0.0};
      for (std::size_t k = 0; k < dim; ++k) acc += std::conj(m[k * dim + i]) * m[k * dim + j];
      if (std::abs(acc - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

void check_step(const Step& step) {
  if (const auto* g = std::get_if<MatrixGate>(&step)) {
    if (g->dim == 0 || g->matrix.size() != g->dim * g->dim) throw std::invalid_argument("MatrixGate: matrix is not dim x dim");
    if (!is_unitary(g->dim, g->matrix, kNormTolerance)) throw std::invalid_argument("MatrixGate: matrix is not unitary");
  } else if (const auto* p = std::get_if<BasisPermutation>(&step)) {
    std::vector<bool> seen(p->mapping.size(), false);
    for (auto v : p->mapping) {
      if (v >= seen.size() || seen[v]) throw std::invalid_argument("BasisPermutation: mapping is not a bijection");
      seen[v] = true;
    }
  } else if (const auto* s = std::get_if<PrepareState>(&step)) {
    double acc = 0.0;
    for (const auto& a : s->target) acc += std::norm(a);
    if (s->target.empty() || std::abs(std::sqrt(acc) - 1.0) > kNormTolerance) {
      throw std::invalid_argument("PrepareState: target is not normalized");
    }
  }
}

struct FiberShape {
  std::size_t dim;
  std::size_t stride;
  std::size_t outer;
};

FiberShape fiber_shape(const RegisterLayout& l, Register reg) {
  switch (reg) {
    case Register::Query: return {l.query_dim, l.response_dim * l.work_dim, 1};
    case Register::Response: return {l.response_dim, l.work_dim, l.query_dim};
    case Register::Work: return {l.work_dim, 1, l.query_dim * l.response_dim};
    case Register::All: return {l.size(), 1, 1};
  }
  return {0, 0, 0};
}

template <class Fn>
void for_each_fiber(const FiberShape& s, Fn&& fn) {
  const std::size_t block = s.dim * s.stride;
  for (std::size_t a = 0; a < s.outer; ++a) {
    for (std::size_t b = 0; b < s.stride; ++b) fn(a * block + b);
  }
}

void require_dim(const RegisterLayout& l, Register reg, std::size_t dim, const char* what) {
  if (l.dim(reg) != dim) {
    throw std::invalid_argument(fmt::format("{}: operand dimension {} does not match register dimension {}", what, dim,
                                            l.dim(reg)));
  }
}

std::size_t resolve_support(std::size_t support, std::size_t dim, const char* what) {
  if (support == 0) return dim;
  if (support > dim) throw std::invalid_argument(fmt::format("{}: support {} exceeds register dimension {}", what, support, dim));
  return support;
}

// a <- a - 2 v (v^dagger a) / |v|^2 on every fiber of `reg`.
void householder(std::span<Amplitude> amps, const RegisterLayout& l, Register reg, const std::vector<Amplitude>& v) {
  double vv = 0.0;
  for (const auto& c : v) vv += std::norm(c);
  if (vv < 1e-30) return;
  const auto shape = fiber_shape(l, reg);
  for_each_fiber(shape, [&](std::size_t base) {
    Amplitude dot{0.0, 0.0};
    for (std::size_t i = 0; i < shape.dim; ++i) dot += std::conj(v[i]) * amps[base + i * shape.stride];
    const Amplitude coef = 2.0 * dot / vv;
    if (coef == Amplitude{0.0, 0.0}) return;
    for (std::size_t i = 0; i < shape.dim; ++i) amps[base + i * shape.stride] -= coef * v[i];
  });
}

void apply_step(StateVector& state, const Step& step, const FunctionTable& f) {
  const auto& l = state.layout();
  auto amps = state.mutable_amplitudes();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PrepareUniform>) {
          const std::size_t support = resolve_support(s.support, l.query_dim, "PREP_UNIFORM");
          std::vector<Amplitude> v(l.query_dim, Amplitude{0.0, 0.0});
          const double u = 1.0 / std::sqrt(static_cast<double>(support));
          for (std::size_t i = 0; i < support; ++i) v[i] = -u;
          v[0] += 1.0;
          householder(amps, l, Register::Query, v);
        } else if constexpr (std::is_same_v<T, Diffuse>) {
          const std::size_t support = resolve_support(s.support, l.query_dim, "DIFFUSE");
          const auto shape = fiber_shape(l, Register::Query);
          for_each_fiber(shape, [&](std::size_t base) {
            Amplitude sum{0.0, 0.0};
            for (std::size_t i = 0; i < support; ++i) sum += amps[base + i * shape.stride];
            const Amplitude twice_mean = 2.0 * sum / static_cast<double>(support);
            for (std::size_t i = 0; i < shape.dim; ++i) {
              auto& a = amps[base + i * shape.stride];
              a = (i < support) ? twice_mean - a : -a;
            }
          });
        } else if constexpr (std::is_same_v<T, OracleCall>) {
          state = apply_oracle(state, f);
        } else if constexpr (std::is_same_v<T, PhaseOracle>) {
          const std::size_t block = l.response_dim * l.work_dim;
          for (std::size_t x = 0; x < l.query_dim; ++x) {
            if (f(x) != s.target) continue;
            for (std::size_t k = 0; k < block; ++k) amps[x * block + k] = -amps[x * block + k];
          }
        } else if constexpr (std::is_same_v<T, PhaseFlip>) {
          const auto shape = fiber_shape(l, s.reg);
          if (s.value >= shape.dim) throw std::invalid_argument("PHASEFLIP: value outside register");
          for_each_fiber(shape, [&](std::size_t base) {
            auto& a = amps[base + s.value * shape.stride];
            a = -a;
          });
        } else if constexpr (std::is_same_v<T, BasisPermutation>) {
          require_dim(l, s.reg, s.mapping.size(), "BasisPermutation");
          const auto shape = fiber_shape(l, s.reg);
          std::vector<Amplitude> tmp(shape.dim);
          for_each_fiber(shape, [&](std::size_t base) {
            for (std::size_t i = 0; i < shape.dim; ++i) tmp[s.mapping[i]] = amps[base + i * shape.stride];
            for (std::size_t i = 0; i < shape.dim; ++i) amps[base + i * shape.stride] = tmp[i];
          });
        } else if constexpr (std::is_same_v<T, MatrixGate>) {
          require_dim(l, s.reg, s.dim, "MatrixGate");
          const auto shape = fiber_shape(l, s.reg);
          std::vector<Amplitude> in(shape.dim);
          for_each_fiber(shape, [&](std::size_t base) {
            for (std::size_t i = 0; i < shape.dim; ++i) in[i] = amps[base + i * shape.stride];
            for (std::size_t r = 0; r < shape.dim; ++r) {
              Amplitude acc{0.0, 0.0};
              const Amplitude* row = &s.matrix[r * shape.dim];
              for (std::size_t c = 0; c < shape.dim; ++c) acc += row[c] * in[c];
              amps[base + r * shape.stride] = acc;
            }
          });
        } else if constexpr (std::is_same_v<T, PrepareState>) {
          require_dim(l, s.reg, s.target.size(), "PrepareState");
          std::vector<Amplitude> v = s.target;
          if (std::abs(v[0]) > 0.0) {
            const Amplitude phase = std::conj(v[0]) / std::abs(v[0]);
            for (auto& c : v) c *= phase;
          }
          for (auto& c : v) c = -c;
          v[0] += 1.0;
          householder(amps, l, s.reg, v);
        } else if constexpr (std::is_same_v<T, DiagonalPhase>) {
          if (s.phases.size() != l.size()) throw std::invalid_argument("DiagonalPhase: phase count does not match layout");
          for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= std::polar(1.0, s.phases[i]);
        }
      },
      step);
}

std::atomic<std::uint64_t> g_transcripts{0};
std::atomic<std::uint64_t> g_violations{0};
std::atomic<double> g_max_excess{-1.0};

void record_transcript(const QueryTranscript& t) {
  const double excess = t.total() - static_cast<double>(t.queries_made);
  g_transcripts.fetch_add(1, std::memory_order_relaxed);
  double prev = g_max_excess.load(std::memory_order_relaxed);
  while (excess > prev && !g_max_excess.compare_exchange_weak(prev, excess, std::memory_order_relaxed)) {
  }
  if (excess > 1e-9) {
    g_violations.fetch_add(1, std::memory_order_relaxed);
    throw std::logic_error(fmt::format("query transcript exceeds its budget by {}", excess));
  }
}

Register parse_register(std::string_view name) {
  if (name == "query") return Register::Query;
  if (name == "response") return Register::Response;
  if (name == "work") return Register::Work;
  if (name == "all") return Register::All;
  throw std::invalid_argument("unknown register '" + std::string(name) + "'");
}

std::complex<double> complex_gaussian(CounterRng& rng) {
  // Box-Muller with the portable counter generator.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(-std::log(u1));
  return std::polar(r, 2.0 * std::numbers::pi * u2);
}

}  // namespace

OracleAlgorithm& OracleAlgorithm::add(Step step) {
  check_step(step);
  if (is_query(step)) {
    if (oracle_calls_ + 1 > t_max_) {
      throw std::length_error(fmt::format("OracleAlgorithm: oracle call {} exceeds budget {}", oracle_calls_ + 1, t_max_));
    }
    ++oracle_calls_;
  }
  steps_.push_back(std::move(step));
  return *this;
}

bool OracleAlgorithm::uses_response_register() const {
  for (const auto& s : steps_) {
    if (std::holds_alternative<OracleCall>(s)) return true;
  }
  return false;
}

OracleAlgorithm grover_algorithm(std::uint32_t target, std::size_t iterations, std::size_t support) {
  OracleAlgorithm alg(iterations);
  alg.add(PrepareUniform{support});
  for (std::size_t i = 0; i < iterations; ++i) {
    alg.add(PhaseOracle{target});
    alg.add(Diffuse{support});
  }
  return alg;
}

OracleAlgorithm parse_algorithm(std::string_view text, std::size_t t_max, const std::filesystem::path& base_dir) {
  std::vector<Step> steps;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument(fmt::format("parse_algorithm: line {}: {}", line_no, why));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    std::string arg;
    if (op == "BUDGET") {
      if (!(ls >> t_max)) fail("BUDGET needs a count");
    } else if (op == "PREP_UNIFORM" || op == "DIFFUSE") {
      std::size_t support = 0;
      if (ls >> arg) support = std::stoull(arg);
      if (op == "PREP_UNIFORM") {
        steps.emplace_back(PrepareUniform{support});
      } else {
        steps.emplace_back(Diffuse{support});
      }
    } else if (op == "ORACLE") {
      steps.emplace_back(OracleCall{});
    } else if (op == "PHASEFLIP") {
      if (!(ls >> arg)) fail("PHASEFLIP needs a predicate id");
      const auto colon = arg.find(':');
      if (colon == std::string::npos) fail("predicate id must look like name:value");
      const auto name = arg.substr(0, colon);
      const auto value = static_cast<std::uint32_t>(std::stoul(arg.substr(colon + 1)));
      if (name == "preimage") {
        steps.emplace_back(PhaseOracle{value});
      } else {
        steps.emplace_back(PhaseFlip{parse_register(name), value});
      }
    } else if (op == "MATRIX") {
      if (!(ls >> arg)) fail("MATRIX needs a file");
      std::string reg_name = "query";
      ls >> reg_name;
      std::filesystem::path p(arg);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      std::ifstream mf(p);
      if (!mf) fail("cannot open matrix file " + p.string());
      std::size_t dim = 0;
      if (!(mf >> dim) || dim == 0) fail("matrix file must start with its dimension");
      MatrixGate g{parse_register(reg_name), dim, std::vector<Amplitude>(dim * dim)};
      for (auto& c : g.matrix) {
        double re = 0.0, im = 0.0;
        if (!(mf >> re >> im)) fail("matrix file is truncated");
        c = {re, im};
      }
      steps.emplace_back(std::move(g));
    } else {
      fail("unknown step '" + op + "'");
    }
  }
  OracleAlgorithm alg(t_max);
  for (auto& s : steps) alg.add(std::move(s));
  return alg;
}

StateVector apply_oracle(const StateVector& state, const FunctionTable& f) {
  const auto& l = state.layout();
  if (l.query_dim != f.domain_size() || l.response_dim != f.codomain_size()) {
    throw std::invalid_argument(fmt::format("apply_oracle: layout {}x{} does not match f: [{}] -> [{}]", l.query_dim,
                                            l.response_dim, f.domain_size(), f.codomain_size()));
  }
  const auto in = state.amplitudes();
  std::vector<Amplitude> out(in.size());
  const std::size_t n = l.response_dim, w_dim = l.work_dim;
  for (std::size_t x = 0; x < l.query_dim; ++x) {
    const std::size_t fx = f(x);
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t src = (x * n + y) * w_dim;
      const std::size_t dst = (x * n + (y + fx) % n) * w_dim;
      for (std::size_t w = 0; w < w_dim; ++w) out[dst + w] = in[src + w];
    }
  }
  return StateVector(l, std::move(out));
}

RunResult run_with_transcript(const OracleAlgorithm& alg, const FunctionTable& f, const StateVector& initial) {
  const auto& l = initial.layout();
  if (l.query_dim != f.domain_size()) {
    throw std::invalid_argument(
        fmt::format("run_with_transcript: query register {} does not match domain {}", l.query_dim, f.domain_size()));
  }
  if (alg.uses_response_register() && l.response_dim != f.codomain_size()) {
    throw std::invalid_argument("run_with_transcript: response register does not match codomain");
  }
  RunResult result{initial, QueryTranscript{std::vector<double>(l.query_dim, 0.0), 0}};
  for (const auto& step : alg.steps()) {
    if (is_query(step)) {
      if (result.transcript.queries_made + 1 > alg.t_max()) {
        throw std::length_error("run_with_transcript: query budget exceeded");
      }
      const auto q = result.state.query_distribution();
      for (std::size_t j = 0; j < q.size(); ++j) result.transcript.per_position[j] += q[j];
      ++result.transcript.queries_made;
    }
    apply_step(result.state, step, f);
    if (std::abs(result.state.norm() - 1.0) > kNormTolerance) {
      throw std::logic_error("run_with_transcript: norm drifted beyond tolerance");
    }
  }
  record_transcript(result.transcript);
  return result;
}

double grover_invert(const FunctionTable& f, std::uint32_t y, std::size_t k) {
  if (y >= f.codomain_size()) throw std::invalid_argument("grover_invert: challenge outside codomain");
  const auto alg = grover_algorithm(y, k);
  const RegisterLayout layout{f.domain_size(), 1, 1};
  const auto run = run_with_transcript(alg, f, StateVector(layout));
  const auto probs = run.state.query_distribution();
  double mass = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (f(x) == y) mass += probs[x];
  }
  return mass;
}

SwappingGap swapping_gap(const OracleAlgorithm& alg, const FunctionTable& f, const FunctionTable& f2,
                         const StateVector& initial) {
  if (f.domain_size() != f2.domain_size() || f.codomain_size() != f2.codomain_size()) {
    throw std::invalid_argument("swapping_gap: oracles have different dimensions");
  }
  const auto run_f = run_with_transcript(alg, f, initial);
  const auto run_f2 = run_with_transcript(alg, f2, initial);
  double differing_mass = 0.0;
  for (std::size_t j = 0; j < f.domain_size(); ++j) {
    if (f(j) != f2(j)) differing_mass += run_f.transcript.per_position[j];
  }
  SwappingGap gap;
  gap.distance = run_f.state.distance(run_f2.state);
  gap.bound = std::sqrt(static_cast<double>(alg.t_max()) * differing_mass);
  gap.hybrid_bound = 2.0 * gap.bound;
  return gap;
}

double success_probability(const OracleAlgorithm& alg, const std::optional<QubitRegister>& advice,
                           const FunctionTable& f, std::uint32_t y, const std::function<bool(std::size_t)>& accept) {
  RegisterLayout layout{f.domain_size(), alg.uses_response_register() ? f.codomain_size() : 1, 1};
  std::vector<Amplitude> work{Amplitude{1.0, 0.0}};
  if (advice) {
    work = advice->amplitudes();
    layout.work_dim = work.size();
  }
  layout.validate();
  std::vector<Amplitude> amps(layout.size(), Amplitude{0.0, 0.0});
  for (std::size_t w = 0; w < work.size(); ++w) amps[w] = work[w];
  const auto run = run_with_transcript(alg, f, StateVector(layout, std::move(amps)));
  const auto probs = run.state.query_distribution();
  double p = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    const bool ok = accept ? accept(x) : f(x) == y;
    if (ok) p += probs[x];
  }
  return p;
}

TranscriptAudit transcript_audit() {
  return {g_transcripts.load(), g_violations.load(), g_max_excess.load()};
}

std::vector<Amplitude> haar_unitary(std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXcd z(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) = complex_gaussian(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const auto d = rmat(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  std::vector<Amplitude> out(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) out[r * dim + c] = q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

StateVector random_state(const RegisterLayout& layout, std::uint64_t seed) {
  layout.validate();
  CounterRng rng(seed);
  std::vector<Amplitude> amps(layout.size());
  double acc = 0.0;
  for (auto& a : amps) {
    a = complex_gaussian(rng);
    acc += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(acc);
  for (auto& a : amps) a *= inv;
  return StateVector(layout, std::move(amps));
}

OracleAlgorithm random_oracle_algorithm(const RegisterLayout& layout, std::size_t queries, std::uint64_t seed) {
  layout.validate();
  OracleAlgorithm alg(queries);
  std::uint64_t stream = 0;
  CounterRng phases_rng(derive_seed(seed, 0xfeed));
  for (std::size_t layer = 0; layer <= queries; ++layer) {
    for (Register reg : {Register::Query, Register::Response, Register::Work}) {
      const std::size_t d = layout.dim(reg);
      if (d > 1) alg.add(MatrixGate{reg, d, haar_unitary(d, derive_seed(seed, ++stream))});
    }
    DiagonalPhase diag{std::vector<double>(layout.size())};
    for (auto& p : diag.phases) p = 2.0 * std::numbers::pi * phases_rng.uniform();
    alg.add(std::move(diag));
    if (layer < queries) alg.add(OracleCall{});
  }
  return alg;
}

}  // namespace qinv
