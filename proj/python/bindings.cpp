#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qinv/attacks.hpp"
#include "qinv/entropy.hpp"
#include "qinv/experiment.hpp"
#include "qinv/hash.hpp"
#include "qinv/qracvl.hpp"
#include "qinv/reduction.hpp"
#include "qinv/rng.hpp"
#include "qinv/statevector.hpp"

namespace py = pybind11;
using namespace qinv;

namespace {

std::vector<std::uint32_t> entries_of(const FunctionTable& f) { return {f.entries().begin(), f.entries().end()}; }

FunctionTable table_from(std::size_t codomain, std::vector<std::uint32_t> entries) {
  return FunctionTable(codomain, std::move(entries));
}

py::dict report_dict(const CodeReport& r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["family"] = r.family;
  d["l_avg"] = r.l_avg;
  d["delta"] = r.delta;
  d["bound"] = r.bound;
  d["slack"] = r.slack;
  d["trials"] = r.trials;
  d["std_err"] = r.std_err;
  d["case_b"] = r.case_b;
  return d;
}

py::dict measurement_dict(const AttackMeasurement& m, std::size_t s_bits) {
  py::dict d;
  d["epsilon_image"] = m.epsilon_image;
  d["epsilon_uniform"] = m.epsilon_uniform;
  d["t_worst"] = m.t_worst;
  d["t_mean"] = m.t_mean;
  d["challenges"] = m.challenges;
  d["s_bits"] = s_bits;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qinv, m) {
  m.doc() = "Quantum function-inversion experiments: simulator, entropy tools, codes and attacks";

  // tables
  m.def("sample_permutation", [](std::size_t n, std::uint64_t seed) { return entries_of(sample_permutation(n, seed)); },
        py::arg("n"), py::arg("seed"));
  m.def("sample_function", [](std::size_t m_, std::size_t n, std::uint64_t seed) {
    return entries_of(sample_function(m_, n, seed));
  }, py::arg("m"), py::arg("n"), py::arg("seed"));

  // simulator
  m.def("grover_invert", [](std::size_t codomain, std::vector<std::uint32_t> entries, std::uint32_t y, std::size_t k) {
    return grover_invert(table_from(codomain, std::move(entries)), y, k);
  }, py::arg("codomain"), py::arg("entries"), py::arg("y"), py::arg("k"));
  m.def("verify_swapping", [](std::size_t trials, std::size_t max_m, std::size_t max_t, std::uint64_t seed) {
    py::list out;
    for (const auto& t : verify_swapping(trials, max_m, max_t, seed)) {
      out.append(py::make_tuple(t.distance, t.bound, t.bound_swapped, t.hybrid_bound));
    }
    return out;
  }, py::arg("trials"), py::arg("max_m"), py::arg("max_t"), py::arg("seed"),
        "(distance, bound, bound_swapped, hybrid_bound) per trial");
  m.def("transcript_audit", [] {
    const auto a = transcript_audit();
    return py::make_tuple(a.transcripts, a.violations, a.max_excess);
  });

  // entropy
  m.def("binary_entropy", &binary_entropy);
  m.def("log2_factorial", &log2_factorial);
  m.def("partition_element_entropy", &partition_element_entropy);
  m.def("partition_element_entropy_ceiling", &partition_element_entropy_ceiling);
  m.def("permutation_bound", &permutation_bound, py::arg("n"), py::arg("delta"));
  m.def("qracvl_bound", [](double s_x, double s_xj, std::size_t n, double delta) {
    return qracvl_bound({s_x, s_xj, n, delta});
  }, py::arg("s_x"), py::arg("s_xj"), py::arg("n"), py::arg("delta"));
  m.def("min_subadditivity_slack", [](std::size_t trials, std::uint64_t seed) {
    double worst = 1e300;
    for (const auto& t : verify_subadditivity(trials, seed)) worst = std::min(worst, t.slack);
    return worst;
  });

  // hashing
  m.def("exhaustive_collision_probability", &exhaustive_collision_probability);
  m.def("collision_rate", &collision_rate, py::arg("in_bits"), py::arg("out_bits"), py::arg("pairs"), py::arg("seed"));

  // codes
  m.def("evaluate_baseline", [](std::size_t n, double theta) {
    return report_dict(evaluate_code(*baseline_fraction_code(theta), FunctionFamily::permutations_of(n),
                                     EvalMode::Exact, 0, 1));
  }, py::arg("n"), py::arg("theta"));
  m.def("evaluate_full_table", [](std::size_t n) {
    return report_dict(evaluate_code(*full_table_code(), FunctionFamily::permutations_of(n), EvalMode::Exact, 0, 1));
  }, py::arg("n"));
  m.def("evaluate_permutation_scheme", [](std::size_t n, double theta, std::uint64_t trials, std::uint64_t seed) {
    const PermutationScheme s(table_advice_inverter(theta), SchemeParams{});
    return report_dict(evaluate_code(s, FunctionFamily::permutations_of(n), EvalMode::MonteCarlo, trials, seed));
  }, py::arg("n"), py::arg("theta"), py::arg("trials"), py::arg("seed"));
  m.def("audit_chain", [](std::size_t n, double theta, bool permutations) {
    const auto fam = permutations ? FunctionFamily::permutations_of(n) : FunctionFamily::functions(n, n);
    py::list out;
    for (const auto& s : audit_bound_chain(*baseline_fraction_code(theta), fam)) {
      out.append(py::make_tuple(s.id, s.lhs, s.rhs, s.slack));
    }
    return out;
  }, py::arg("n"), py::arg("theta"), py::arg("permutations") = true);

  // attacks
  m.def("checkpoint_attack", [](std::size_t n, std::size_t t_len, std::uint64_t seed) {
    const auto pi = sample_permutation(n, seed);
    const auto idx = checkpoint_build(pi, t_len);
    return measurement_dict(measure_checkpoint(idx, pi), idx.s_bits());
  }, py::arg("n"), py::arg("t_len"), py::arg("seed"));
  m.def("hellman_attack", [](std::size_t n, std::size_t chains, std::size_t t_len, std::size_t tables,
                             std::size_t challenges, std::uint64_t seed) {
    const auto f = sample_function(n, n, derive_seed(seed, 0));
    const auto ts = hellman_build(f, chains, t_len, tables, derive_seed(seed, 1));
    return measurement_dict(measure_hellman(ts, f, challenges, derive_seed(seed, 2)), ts.s_bits());
  }, py::arg("n"), py::arg("chains"), py::arg("t_len"), py::arg("tables"), py::arg("challenges"), py::arg("seed"));
  m.def("grover_point_success", &grover_point_success, py::arg("n"), py::arg("epsilon"));
  m.def("tradeoff_csv_header", &TradeoffRecord::csv_header);
}
