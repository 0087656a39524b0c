// qinv: verification suites, encoders and tradeoff sweeps.
//
// Every command writes <out>/<command>.csv and <out>/<command>_summary.txt.
// On an invariant violation it also writes <out>/<command>_failures.csv and
// exits 1. Usage errors exit 2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qinv/attacks.hpp"
#include "qinv/entropy.hpp"
#include "qinv/experiment.hpp"
#include "qinv/hash.hpp"
#include "qinv/qracvl.hpp"
#include "qinv/reduction.hpp"
#include "qinv/rng.hpp"
#include "qinv/statevector.hpp"

namespace fs = std::filesystem;
using namespace qinv;

namespace {

constexpr double kTol = 1e-9;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  double gamma = 0.01;
  double c_const = 0.04;
  std::size_t rho = 0;  // 0: derived from n
  double big_c = 4.0;
  std::string out = ".";
  std::string mode = "exact";

  std::string deltas = "1.0";
  double theta = 0.5;
  std::string inverter = "table";
  std::size_t t = 0;
  double p = 0.6;
  double threshold = 2.0 / 3.0;
  double epsilon = 0.5;
  std::size_t chains = 0;
  std::size_t t_len = 0;
  std::size_t tables = 0;
  std::string method;
  std::string config;
  std::string scheme = "baseline";
  std::string family = "perm";
  std::string bound = "lemma";
};

// One command's artifacts: CSV body, summary lines and failure records.
class Report {
 public:
  Report(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {}

  void header(const std::string& h) { csv_ << h << '\n'; }
  void row(const std::string& r) { csv_ << r << '\n'; }
  void note(const std::string& line) { summary_ << line << '\n'; }
  void fail(const std::string& record, const std::string& detail) { failures_.push_back(record + "," + detail); }
  bool ok() const { return failures_.empty(); }

  int finish(double seconds) {
    const fs::path dir(opt_.out);
    fs::create_directories(dir);
    write(dir / (command_ + ".csv"), csv_.str());
    std::ostringstream s;
    s << "qinv " << command_ << "\n";
    s << fmt::format("seed {}\n\n", opt_.seed);
    s << summary_.str() << "\n";
    s << fmt::format("failures {}\n", failures_.size());
    s << fmt::format("status {}\n", ok() ? "OK" : "VIOLATION");
    s << fmt::format("elapsed_s {:.2f}\n", seconds);
    write(dir / (command_ + "_summary.txt"), s.str());
    if (!ok()) {
      std::string body = "command,record,detail\n";
      for (const auto& f : failures_) body += command_ + "," + f + "\n";
      write(dir / (command_ + "_failures.csv"), body);
    }
    std::cout << s.str();
    return ok() ? 0 : 1;
  }

 private:
  static void write(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
  }

  std::string command_;
  const Options& opt_;
  std::ostringstream csv_;
  std::ostringstream summary_;
  std::vector<std::string> failures_;
};

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "'");
    }
  }
  return out;
}

std::size_t need(std::size_t v, std::size_t fallback) { return v ? v : fallback; }

SchemeParams scheme_params(const Options& opt) {
  SchemeParams sp;
  sp.gamma = opt.gamma;
  sp.c_const = opt.c_const;
  if (opt.rho) sp.rho = opt.rho;
  sp.big_c = opt.big_c;
  sp.success_threshold = opt.threshold;
  sp.epsilon = opt.epsilon;
  sp.validate();
  return sp;
}

std::shared_ptr<const Inverter> make_inverter(const Options& opt) {
  if (opt.inverter == "table") return make_example_inverter(InverterKind::TableAdvice, opt.theta);
  if (opt.inverter == "grover") return make_example_inverter(InverterKind::Grover, static_cast<double>(need(opt.t, 1)));
  if (opt.inverter == "noisy") return make_example_inverter(InverterKind::Noisy, opt.p);
  throw UsageError("--inverter must be table, grover or noisy");
}

std::string fmt_g(double v) { return fmt::format("{:.10g}", v == 0.0 ? 0.0 : v); }

// ---------------------------------------------------------------------------

int cmd_verify_swapping(const Options& opt, Report& rep) {
  if (opt.bound != "lemma" && opt.bound != "hybrid") throw UsageError("--bound must be lemma or hybrid");
  const auto trials = verify_swapping(need(opt.trials, 1000), need(opt.n, 32), need(opt.t, 4), opt.seed);
  rep.header("trial,m,n,t,changed,distance,bound,bound_swapped,hybrid_bound,violates,violates_hybrid");
  std::size_t lemma = 0, hybrid = 0;
  double worst_ratio = 0.0;
  for (const auto& t : trials) {
    rep.row(fmt::format("{},{},{},{},{},{},{},{},{},{},{}", t.trial, t.m, t.n, t.t, t.changed, fmt_g(t.distance),
                        fmt_g(t.bound), fmt_g(t.bound_swapped), fmt_g(t.hybrid_bound), int(t.violates()),
                        int(t.violates_hybrid())));
    lemma += t.violates();
    hybrid += t.violates_hybrid();
    const double b = std::min(t.bound, t.bound_swapped);
    if (b > 0) worst_ratio = std::max(worst_ratio, t.distance / b);
    const bool bad = opt.bound == "lemma" ? t.violates() : t.violates_hybrid();
    if (bad) {
      rep.fail(fmt::format("trial {}", t.trial), fmt::format("distance {} > bound {} (swapped {})", fmt_g(t.distance),
                                                             fmt_g(t.bound), fmt_g(t.bound_swapped)));
    }
  }
  const auto audit = transcript_audit();
  if (audit.violations) rep.fail("transcripts", fmt::format("{} budget violations", audit.violations));
  rep.note(fmt::format("trials {}  max_m {}  max_t {}  asserted bound {}", trials.size(), need(opt.n, 32),
                       need(opt.t, 4), opt.bound));
  rep.note(fmt::format("violations of sqrt(T sum q_j), either direction: {}", lemma));
  rep.note(fmt::format("violations of the hybrid bound 2 sqrt(T sum q_j): {}", hybrid));
  rep.note(fmt::format("worst distance / bound: {:.6f}", worst_ratio));
  rep.note(fmt::format("transcripts {}  budget violations {}  max excess {:.3g}", audit.transcripts, audit.violations,
                       audit.max_excess));
  return 0;
}

int cmd_verify_entropy(const Options& opt, Report& rep) {
  const auto trials = verify_subadditivity(need(opt.trials, 500), opt.seed);
  rep.header("trial,parts,alphabet,qdim,slack");
  double min_slack = INFINITY;
  for (const auto& t : trials) {
    rep.row(fmt::format("{},{},{},{},{}", t.trial, t.parts, t.alphabet, t.qdim, fmt_g(t.slack)));
    min_slack = std::min(min_slack, t.slack);
    if (t.slack < -kTol) rep.fail(fmt::format("trial {}", t.trial), fmt::format("slack {}", fmt_g(t.slack)));
  }
  std::size_t grid_bad = 0;
  const std::size_t top = need(opt.n, 64);
  for (std::size_t m = 1; m <= top; ++m) {
    for (std::size_t n = 2; n <= top; ++n) {
      const double s = partition_element_entropy(m, n);
      const double c = partition_element_entropy_ceiling(m, n);
      if (s > c + kTol) {
        ++grid_bad;
        rep.fail(fmt::format("grid m={} n={}", m, n), fmt::format("{} > {}", fmt_g(s), fmt_g(c)));
      }
    }
  }
  rep.note(fmt::format("subadditivity trials {}  min slack {:.3g}", trials.size(), min_slack));
  rep.note(fmt::format("log2 8! = {:.6f}", log2_factorial(8)));
  rep.note(fmt::format("H(0.25) = {:.6f}", binary_entropy(0.25)));
  rep.note(fmt::format("partition_element_entropy(4,4) = {:.6f}", partition_element_entropy(4, 4)));
  rep.note(fmt::format("S(X_J) <= (m/n)(log2 n + log2 e) on m, n <= {}: {} violations", top, grid_bad));
  return 0;
}

std::unique_ptr<CodeScheme> make_scheme(const Options& opt, FunctionFamily& family) {
  const std::size_t n = need(opt.n, 8);
  if (opt.family != "perm" && opt.family != "func") throw UsageError("--family must be perm or func");
  family = opt.family == "perm" ? FunctionFamily::permutations_of(n) : FunctionFamily::functions(need(opt.m, n), n);
  if (opt.scheme == "baseline") return baseline_fraction_code(opt.theta);
  if (opt.scheme == "full") return full_table_code();
  if (opt.scheme == "empty") return empty_code();
  if (opt.scheme == "perm") {
    family = FunctionFamily::permutations_of(n);
    return std::make_unique<PermutationScheme>(make_inverter(opt), scheme_params(opt));
  }
  if (opt.scheme == "func") {
    family = FunctionFamily::functions(need(opt.m, n), n);
    return std::make_unique<FunctionScheme>(make_inverter(opt), scheme_params(opt));
  }
  throw UsageError("--scheme must be baseline, full, empty, perm or func");
}

EvalMode eval_mode(const Options& opt) {
  if (opt.mode == "exact") return EvalMode::Exact;
  if (opt.mode == "mc") return EvalMode::MonteCarlo;
  throw UsageError("--mode must be exact or mc");
}

int cmd_verify_qrac_bound(const Options& opt, Report& rep) {
  FunctionFamily family;
  const auto scheme = make_scheme(opt, family);
  const auto r = evaluate_code(*scheme, family, eval_mode(opt), need(opt.trials, 1000), opt.seed);
  rep.header(CodeReport::csv_header());
  rep.row(r.csv_row());
  const double margin = r.l_avg - (r.bound - 3.0 * r.std_err);
  if (margin < -kTol) rep.fail(r.scheme, fmt::format("L {} below bound {} - 3 std_err", fmt_g(r.l_avg), fmt_g(r.bound)));
  rep.note(fmt::format("scheme {}  family {}", r.scheme, r.family));
  rep.note(fmt::format("L {:.6f}  delta {:.6f}  bound {:.6f}  slack {:.6f}", r.l_avg, r.delta, r.bound, r.slack));
  rep.note(fmt::format("mode {}  trials {}  std_err {:.3g}  case B {}", opt.mode, r.trials, r.std_err, r.case_b));
  rep.note(r.json());
  return 0;
}

int cmd_audit_chain(const Options& opt, Report& rep) {
  FunctionFamily family;
  Options o = opt;
  o.n = need(opt.n, 2);
  const auto scheme = make_scheme(o, family);
  const auto steps = audit_bound_chain(*scheme, family);
  rep.header("step,lhs,rhs,slack");
  double worst = INFINITY;
  for (const auto& s : steps) {
    rep.row(fmt::format("{},{},{},{}", s.id, fmt_g(s.lhs), fmt_g(s.rhs), fmt_g(s.slack)));
    worst = std::min(worst, s.slack);
    if (s.slack < -kTol) rep.fail(s.id, fmt::format("slack {}", fmt_g(s.slack)));
  }
  rep.note(fmt::format("scheme {}  family {}  steps {}", scheme->name(), family.describe(), steps.size()));
  rep.note(fmt::format("min slack {:.3g}", worst));
  return 0;
}

int cmd_encode_perm(const Options& opt, Report& rep) {
  const std::size_t n = need(opt.n, 32);
  const auto family = FunctionFamily::permutations_of(n);
  const PermutationScheme scheme(make_inverter(opt), scheme_params(opt));
  const double gap_bound = std::sqrt(opt.c_const) + kTol;
  rep.header("trial,branch,length_bits,component_sum,set_i,set_r,set_h,set_g,delta,max_gap");
  const std::size_t trials = need(opt.trials, 200);
  double delta_sum = 0.0;
  std::size_t case_b = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t r = derive_seed(opt.seed, i);
    const auto pi = family.sample(derive_seed(r, 100));
    const auto a = scheme.analyze(pi, r);
    const auto enc = scheme.encode(family, pi, r);
    double delta = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      delta += probability_of(scheme.decode(family, enc, y, r), element(pi, ElementView::Inverse, y));
    }
    delta /= static_cast<double>(n);
    delta_sum += delta;
    double max_gap = 0.0;
    if (enc.branch == "B") {
      ++case_b;
      if (enc.length_bits() != enc.component_sum()) {
        rep.fail(fmt::format("trial {}", i),
                 fmt::format("length {} != component sum {}", enc.length_bits(), enc.component_sum()));
      }
      const auto parsed = scheme.parse(family, enc, r);
      const auto advice = scheme.inverter().prepare_advice(pi);
      for (const auto x : parsed.set_g) {
        const auto y = pi(x);
        const double gap = oracle_swap_gap(scheme.inverter(), pi, decoder_oracle(parsed, n, y), y, advice);
        max_gap = std::max(max_gap, gap);
        if (gap > gap_bound) rep.fail(fmt::format("trial {} x {}", i, x), fmt::format("gap {}", fmt_g(gap)));
      }
    }
    worst_gap = std::max(worst_gap, max_gap);
    rep.row(fmt::format("{},{},{},{},{},{},{},{},{},{}", i, enc.branch, enc.length_bits(), enc.component_sum(),
                        a.sets.set_i.size(), a.sets.set_r.size(), a.sets.set_h.size(), a.sets.set_g.size(),
                        fmt_g(delta), fmt_g(max_gap)));
  }
  rep.note(fmt::format("scheme {}  n {}  trials {}  rho {}", scheme.name(), n, trials, scheme.rho(n)));
  rep.note(fmt::format("mean delta {:.6f}  case B {}  G threshold {:.4g}", delta_sum / double(trials), case_b,
                       scheme.g_threshold(n)));
  rep.note(fmt::format("max gap on G-decodes {:.3g} (bound sqrt(c) = {:.4f})", worst_gap, std::sqrt(opt.c_const)));
  return 0;
}

int cmd_encode_func(const Options& opt, Report& rep) {
  const std::size_t n = need(opt.n, 32);
  const std::size_t m = need(opt.m, n);
  const auto family = FunctionFamily::functions(m, n);
  Options o = opt;
  if (opt.inverter == "table") o.inverter = "noisy";
  const FunctionScheme scheme(make_inverter(o), scheme_params(opt));
  rep.header("trial,branch,length_bits,component_sum,set_i,set_g,delta,wrong_candidates,wrong_accepted");
  const std::size_t trials = need(opt.trials, 100);
  double delta_sum = 0.0;
  std::size_t case_b = 0, wrong = 0, accepted = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t r = derive_seed(opt.seed, i);
    const auto f = family.sample(derive_seed(r, 100));
    const auto a = scheme.analyze(f, r);
    const auto enc = scheme.encode(family, f, r);
    double delta = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      delta += probability_of(scheme.decode(family, enc, y, r), element(f, ElementView::Partition, y));
    }
    delta /= static_cast<double>(n);
    delta_sum += delta;
    std::size_t w = 0, acc = 0;
    if (enc.branch == "B") {
      ++case_b;
      if (enc.length_bits() != enc.component_sum()) {
        rep.fail(fmt::format("trial {}", i),
                 fmt::format("length {} != component sum {}", enc.length_bits(), enc.component_sum()));
      }
      const auto parsed = scheme.parse(family, enc, r);
      for (const auto y : parsed.g_images) {
        const auto d = scheme.detail(family, parsed, enc, y, r);
        for (std::size_t x = 0; x < m; ++x) {
          if (f(x) == y) continue;
          ++w;
          acc += d.keeper[x] ? 1 : 0;
        }
      }
    }
    wrong += w;
    accepted += acc;
    rep.row(fmt::format("{},{},{},{},{},{},{},{},{}", i, enc.branch, enc.length_bits(), enc.component_sum(),
                        a.sets.set_i.size(), a.sets.set_g.size(), fmt_g(delta), w, acc));
  }
  const std::size_t tag = scheme.tag_bits(m, n);
  const double rate = wrong ? double(accepted) / double(wrong) : 0.0;
  rep.note(fmt::format("scheme {}  m {}  n {}  trials {}", scheme.name(), m, n, trials));
  rep.note(fmt::format("K {:.4g}  tag bits {}  rho {}  G threshold {:.4g}", scheme.k_threshold(m, n), tag,
                       scheme.rho(m, n), scheme.g_threshold(m, n)));
  rep.note(fmt::format("mean delta {:.6f}  case B {}", delta_sum / double(trials), case_b));
  rep.note(fmt::format("wrong-candidate acceptance {} / {} = {:.6f} (2^-tag = {:.6f})", accepted, wrong, rate,
                       std::ldexp(1.0, -static_cast<int>(tag))));
  return 0;
}

int cmd_grover(const Options& opt, Report& rep) {
  const std::size_t n = need(opt.n, 16);
  const std::size_t kmax = opt.t ? opt.t : 10;
  const auto pi = sample_permutation(n, opt.seed);
  const auto y = static_cast<std::uint32_t>(CounterRng(opt.seed).below(n));
  rep.header("n,k,simulated,closed_form,abs_err");
  double worst = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double sim = grover_invert(pi, y, k);
    const double closed = std::pow(std::sin((2.0 * double(k) + 1.0) * std::asin(std::sqrt(1.0 / double(n)))), 2);
    const double err = std::abs(sim - closed);
    worst = std::max(worst, err);
    rep.row(fmt::format("{},{},{:.12f},{:.12f},{:.3e}", n, k, sim, closed, err));
    if (err > kTol) rep.fail(fmt::format("k {}", k), fmt::format("abs_err {:.3e}", err));
  }
  const auto point = grover_point(n, opt.epsilon > 0 ? opt.epsilon : 1.0, GroverMode::Analytic, opt.seed);
  rep.note(fmt::format("n {}  k 0..{}  max abs err {:.3e}", n, kmax, worst));
  rep.note(fmt::format("tradeoff point at eps {}: T {}  success {:.6f}", opt.epsilon, point.t_worst, point.epsilon));
  return 0;
}

int cmd_hellman(const Options& opt, Report& rep) {
  const std::size_t n = need(opt.n, 65536);
  const std::size_t m = need(opt.m, n);
  const std::size_t t = need(opt.t_len, 41);
  const std::size_t chains = need(opt.chains, t);
  const std::size_t r = need(opt.tables, t);
  const auto f = sample_function(m, n, derive_seed(opt.seed, 0));
  const auto tables = hellman_build(f, chains, t, r, derive_seed(opt.seed, 1));
  const auto meas = measure_hellman(tables, f, need(opt.trials, 1000), derive_seed(opt.seed, 2));
  rep.header(TradeoffRecord::csv_header());
  rep.row(TradeoffRecord{"hellman", n, m, tables.s_bits(), meas.t_worst, meas.t_mean, meas.epsilon_image, opt.seed}
              .csv_row());
  rep.row(TradeoffRecord{"hellman-uniform-y", n, m, tables.s_bits(), meas.t_worst, meas.t_mean, meas.epsilon_uniform,
                         opt.seed}
              .csv_row());
  if (meas.t_worst > tables.worst_case_queries()) {
    rep.fail("t_worst", fmt::format("{} > {}", meas.t_worst, tables.worst_case_queries()));
  }
  rep.note(fmt::format("n {}  m {}  chains {}  t_len {}  tables {}  challenges {}", n, m, chains, t, r,
                       meas.challenges));
  rep.note(fmt::format("eps (y = f(x)) {:.6f}  eps (uniform y) {:.6f}", meas.epsilon_image, meas.epsilon_uniform));
  rep.note(fmt::format("S {} bits  T worst {} (cap {})  T mean {:.2f}", tables.s_bits(), meas.t_worst,
                       tables.worst_case_queries(), meas.t_mean));
  return 0;
}

int cmd_checkpoint(const Options& opt, Report& rep) {
  const std::size_t n = need(opt.n, std::size_t{1} << 20);
  const std::size_t t = need(opt.t_len, 1024);
  const auto pi = sample_permutation(n, derive_seed(opt.seed, 0));
  const auto idx = checkpoint_build(pi, t);
  const auto meas = measure_checkpoint(idx, pi, opt.trials, derive_seed(opt.seed, 1));
  rep.header(TradeoffRecord::csv_header());
  rep.row(TradeoffRecord{"checkpoint", n, n, idx.s_bits(), meas.t_worst, meas.t_mean, meas.epsilon_image, opt.seed}
              .csv_row());
  if (meas.epsilon_image < 1.0) rep.fail("epsilon", fmt::format("{:.6f} < 1", meas.epsilon_image));
  if (meas.t_worst > 2 * t) rep.fail("t_worst", fmt::format("{} > 2 t_len = {}", meas.t_worst, 2 * t));
  const double st = double(idx.s_bits()) * double(meas.t_worst);
  const double ref = 4.0 * double(n) * std::log2(double(n));
  rep.note(fmt::format("n {}  t_len {}  cycles {}  checkpoints {}  challenges {}", n, t, idx.cycles,
                       idx.checkpoints.size(), meas.challenges));
  rep.note(fmt::format("eps {:.6f}  S {} bits  T worst {}  T mean {:.2f}", meas.epsilon_image, idx.s_bits(),
                       meas.t_worst, meas.t_mean));
  rep.note(fmt::format("S*T / (4 n log2 n) = {:.4f}", st / ref));
  return 0;
}

int cmd_sweep(const Options& opt, Report& rep) {
  if (opt.config.empty()) throw UsageError("sweep needs --config <file>");
  std::ifstream in(opt.config);
  if (!in) throw UsageError("cannot read config file " + opt.config);
  std::stringstream text;
  text << in.rdbuf();
  std::vector<SweepConfig> grid;
  try {
    auto cfg = parse_flat_config(text.str());
    if (opt.trials && !cfg.count("challenges")) cfg["challenges"] = std::to_string(opt.trials);
    if (opt.m && !cfg.count("m")) cfg["m"] = std::to_string(opt.m);
    grid = sweep_grid(cfg, opt.method.empty() ? "hellman" : opt.method, need(opt.n, 65536));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto records = sweep(grid, opt.seed);
  rep.header(TradeoffRecord::csv_header());
  for (const auto& r : records) rep.row(r.csv_row());
  const fs::path plot = fs::path(opt.out) / "sweep.gp";
  fs::create_directories(opt.out);
  std::ofstream(plot) << gnuplot_script("sweep.csv", grid.front().n);
  rep.note(fmt::format("configs {}  records {}", grid.size(), records.size()));
  rep.note("plot script sweep.gp");
  return 0;
}

int cmd_bound_table(const Options& opt, Report& rep) {
  const std::size_t n = need(opt.n, 8);
  const auto deltas = parse_doubles(opt.deltas);
  if (deltas.empty()) throw UsageError("--deltas needs at least one value");
  rep.header("family,m,n,delta,bound");
  for (const double d : deltas) {
    if (!(d >= 0.0 && d <= 1.0)) throw UsageError("deltas must lie in [0, 1]");
    double bound = 0.0;
    std::string fam;
    std::size_t m = n;
    if (opt.m) {
      m = opt.m;
      fam = fmt::format("func{}x{}", m, n);
      bound = qracvl_bound({double(m) * std::log2(double(n)), partition_element_entropy(m, n), n, d});
    } else {
      fam = fmt::format("perm{}", n);
      bound = permutation_bound(n, d);
    }
    rep.row(fmt::format("{},{},{},{:.6f},{:.6f}", fam, m, n, d, bound));
    rep.note(fmt::format("{}  delta {:.6f}  bound {:.6f}", fam, d, bound));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qinv: quantum inversion lower-bound experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--n", opt.n, "Codomain size (n)");
  app.add_option("--m", opt.m, "Domain size (m)");
  app.add_option("--seed", opt.seed, "Base seed")->required();
  app.add_option("--trials", opt.trials, "Trial / challenge count");
  app.add_option("--gamma", opt.gamma, "R sampling constant");
  app.add_option("--c-const", opt.c_const, "G query-mass constant c");
  app.add_option("--rho", opt.rho, "Advice copies (default from n)");
  app.add_option("--big-c", opt.big_c, "K constant C for functions");
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--mode", opt.mode, "exact | mc")->check(CLI::IsMember({"exact", "mc"}));
  app.add_option("--deltas", opt.deltas, "Comma-separated deltas");
  app.add_option("--theta", opt.theta, "Stored fraction for baseline / table advice");
  app.add_option("--inverter", opt.inverter, "table | grover | noisy");
  app.add_option("--t", opt.t, "Query count (Grover iterations, swapping T)");
  app.add_option("--p", opt.p, "Noisy inverter success probability");
  app.add_option("--threshold", opt.threshold, "Success threshold for the set I");
  app.add_option("--epsilon,--eps", opt.epsilon, "Target inversion fraction");
  app.add_option("--chains", opt.chains, "Hellman chains per table");
  app.add_option("--t-len", opt.t_len, "Chain length / checkpoint spacing");
  app.add_option("--tables", opt.tables, "Hellman table count");
  app.add_option("--method", opt.method, "Sweep method");
  app.add_option("--config", opt.config, "Flat key=value sweep config");
  app.add_option("--scheme", opt.scheme, "baseline | full | empty | perm | func");
  app.add_option("--family", opt.family, "perm | func");
  app.add_option("--bound", opt.bound, "Swapping bound asserted: lemma | hybrid");

  using Handler = std::function<int(const Options&, Report&)>;
  const std::vector<std::pair<std::string, Handler>> commands = {
      {"verify-swapping", cmd_verify_swapping}, {"verify-entropy", cmd_verify_entropy},
      {"verify-qrac-bound", cmd_verify_qrac_bound}, {"audit-chain", cmd_audit_chain},
      {"encode-perm", cmd_encode_perm}, {"encode-func", cmd_encode_func},
      {"grover", cmd_grover}, {"hellman", cmd_hellman},
      {"checkpoint", cmd_checkpoint}, {"sweep", cmd_sweep},
      {"bound-table", cmd_bound_table},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, _] : commands) subs[name] = app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [name, handler] : commands) {
    if (!subs[name]->parsed()) continue;
    Report rep(name, opt);
    const auto start = std::chrono::steady_clock::now();
    try {
      handler(opt, rep);
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep.finish(secs);
  }
  return 2;
}
