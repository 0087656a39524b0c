#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qinv/statevector.hpp"

using namespace qinv;

namespace {

double grover_closed_form(std::size_t n, std::size_t k) {
  const double theta = std::asin(std::sqrt(1.0 / static_cast<double>(n)));
  return std::pow(std::sin((2.0 * static_cast<double>(k) + 1.0) * theta), 2);
}

}  // namespace

TEST(StateVector, GroverMatchesClosedForm) {
  for (std::size_t n : {4u, 8u, 16u, 64u}) {
    const auto pi = PermutationTable::identity(n);
    for (std::size_t k = 0; k <= 10; ++k) {
      EXPECT_NEAR(grover_invert(pi, static_cast<std::uint32_t>(n - 1), k), grover_closed_form(n, k), 1e-9)
          << "n=" << n << " k=" << k;
    }
  }
}

TEST(StateVector, GroverCountsPreimageMass) {
  // Two preimages among 8 points: success sin^2((2k+1) asin(sqrt(2/8))).
  const FunctionTable f(4, {1, 0, 2, 3, 1, 2, 3, 3});
  const double theta = std::asin(std::sqrt(2.0 / 8.0));
  EXPECT_NEAR(grover_invert(f, 1, 1), std::pow(std::sin(3 * theta), 2), 1e-12);
}

TEST(StateVector, StandardOracleAddsModN) {
  const RegisterLayout layout{3, 4, 2};
  const FunctionTable f(4, {3, 1, 2});
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 4; ++y) {
      const auto out = apply_oracle(StateVector::basis(layout, x, y, 1), f);
      EXPECT_NEAR(std::abs(out.at(x, (y + f(x)) % 4, 1)), 1.0, 1e-15);
    }
  }
}

TEST(StateVector, BudgetIsEnforced) {
  OracleAlgorithm alg(1);
  alg.add(OracleCall{});
  EXPECT_THROW(alg.add(OracleCall{}), std::length_error);
  EXPECT_THROW(alg.add(PhaseOracle{0}), std::length_error);
}

TEST(StateVector, RejectsNonUnitaryGate) {
  OracleAlgorithm alg(0);
  MatrixGate g{Register::Query, 2, {Amplitude(1), Amplitude(1), Amplitude(0), Amplitude(1)}};
  EXPECT_THROW(alg.add(g), std::invalid_argument);
  EXPECT_THROW(alg.add(BasisPermutation{Register::Query, {0, 0}}), std::invalid_argument);
}

TEST(StateVector, TranscriptMassEqualsQueriesForUnitNormQueries) {
  const auto pi = sample_permutation(16, 3);
  const auto alg = grover_algorithm(5, 3);
  const auto run = run_with_transcript(alg, pi, StateVector(RegisterLayout{16, 1, 1}));
  EXPECT_EQ(run.transcript.queries_made, 3u);
  EXPECT_NEAR(run.transcript.total(), 3.0, 1e-12);
  EXPECT_NEAR(run.state.norm(), 1.0, 1e-12);
}

TEST(StateVector, ParsedAlgorithmMatchesBuiltin) {
  const auto pi = sample_permutation(8, 1);
  const auto text = "# two Grover rounds\nPREP_UNIFORM\nPHASEFLIP preimage:2\nDIFFUSE\nPHASEFLIP preimage:2\nDIFFUSE\n";
  const auto parsed = parse_algorithm(text, 2);
  const StateVector init(RegisterLayout{8, 1, 1});
  const auto a = run_with_transcript(parsed, pi, init).state;
  const auto b = run_with_transcript(grover_algorithm(2, 2), pi, init).state;
  EXPECT_LT(a.distance(b), 1e-12);
  EXPECT_THROW(parse_algorithm("ORACLE\nORACLE\n", 1), std::length_error);
  EXPECT_THROW(parse_algorithm("FROB\n", 1), std::invalid_argument);
}

TEST(StateVector, HaarUnitaryIsUnitary) {
  const std::size_t d = 5;
  const auto u = haar_unitary(d, 11);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Amplitude dot = 0;
      for (std::size_t k = 0; k < d; ++k) dot += u[i * d + k] * std::conj(u[j * d + k]);
      EXPECT_NEAR(std::abs(dot - Amplitude(i == j ? 1.0 : 0.0)), 0.0, 1e-12);
    }
  }
}

TEST(StateVector, SwappingGapCounterexampleForAdditiveOracle) {
  // |0>|->: the additive oracle with f(0) = 1 applies a global -1 phase, so the
  // final states sit at distance 2 while sqrt(T sum q_j) = 1.
  const RegisterLayout layout{1, 2, 1};
  const double s = 1.0 / std::numbers::sqrt2;
  const StateVector minus(layout, {Amplitude(s), Amplitude(-s)});
  OracleAlgorithm alg(1);
  alg.add(OracleCall{});
  const FunctionTable f(2, {0});
  const FunctionTable f2(2, {1});
  const auto gap = swapping_gap(alg, f, f2, minus);
  EXPECT_NEAR(gap.distance, 2.0, 1e-12);
  EXPECT_NEAR(gap.bound, 1.0, 1e-12);
  EXPECT_LE(gap.distance, gap.hybrid_bound + 1e-9);
}

TEST(StateVector, SwappingGapZeroWhenOraclesAgree) {
  const RegisterLayout layout{6, 3, 2};
  const auto alg = random_oracle_algorithm(layout, 3, 4);
  const auto f = sample_function(6, 3, 1);
  const auto gap = swapping_gap(alg, f, f, StateVector(layout));
  EXPECT_NEAR(gap.distance, 0.0, 1e-12);
  EXPECT_NEAR(gap.bound, 0.0, 1e-12);
}

TEST(StateVector, SuccessProbabilityAgreesWithGrover) {
  const auto pi = sample_permutation(32, 8);
  const auto alg = grover_algorithm(7, 4);
  EXPECT_NEAR(success_probability(alg, std::nullopt, pi, 7), grover_closed_form(32, 4), 1e-9);
}

TEST(StateVector, AuditCountsEveryTranscript) {
  const auto before = transcript_audit();
  const auto pi = sample_permutation(8, 2);
  run_with_transcript(grover_algorithm(1, 1), pi, StateVector(RegisterLayout{8, 1, 1}));
  const auto after = transcript_audit();
  EXPECT_EQ(after.transcripts, before.transcripts + 1);
  EXPECT_EQ(after.violations, 0u);
}
