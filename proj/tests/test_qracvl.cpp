#include <gtest/gtest.h>

#include <cmath>

#include "qinv/entropy.hpp"
#include "qinv/qracvl.hpp"

using namespace qinv;

TEST(Family, SizesAndRanks) {
  const auto perms = FunctionFamily::permutations_of(5);
  EXPECT_EQ(perms.size(), 120);
  EXPECT_NEAR(perms.entropy(), std::log2(120.0), 1e-12);
  const auto funcs = FunctionFamily::functions(3, 4);
  EXPECT_EQ(funcs.size(), 64);
  // Lexicographic order: member 6 of [3] -> [4] is (0, 1, 2).
  EXPECT_EQ(funcs.member(BigUint(6)), FunctionTable(4, {0, 1, 2}));
  EXPECT_EQ(perms.member(BigUint(0)), FunctionTable(5, {0, 1, 2, 3, 4}));
  EXPECT_THROW(perms.check(FunctionTable(5, {0, 0, 1, 2, 3})), std::invalid_argument);
  EXPECT_EQ(perms.describe(), "perm5");
  EXPECT_EQ(funcs.describe(), "func3x4");
}

TEST(Family, ElementViews) {
  const FunctionTable f(3, {2, 0, 2, 1});
  EXPECT_EQ(element(f, ElementView::Table, 2), ElementValue{2});
  EXPECT_EQ(element(f, ElementView::Partition, 2), (ElementValue{0, 2}));
  EXPECT_EQ(element(f, ElementView::Partition, 1), ElementValue{3});
  const FunctionTable pi(4, {2, 0, 3, 1});
  EXPECT_EQ(element(pi, ElementView::Inverse, 3), ElementValue{2});
  EXPECT_EQ(element_count(FunctionFamily::functions(4, 3), ElementView::Partition), 3u);
  EXPECT_NEAR(element_entropy(FunctionFamily::functions(4, 4), ElementView::Partition), 3.245112, 1e-5);
}

TEST(Codes, FullTableAtEight) {
  const auto code = full_table_code();
  const auto rep = evaluate_code(*code, FunctionFamily::permutations_of(8), EvalMode::Exact, 0, 1);
  // One flag bit plus ceil(log2 8!) = 16 bits.
  EXPECT_DOUBLE_EQ(rep.l_avg, 17.0);
  EXPECT_DOUBLE_EQ(rep.delta, 1.0);
  EXPECT_NEAR(rep.bound, 15.299208, 1e-6);
  EXPECT_LE(rep.slack, 2.0);
  EXPECT_GE(rep.slack, 0.0);
}

TEST(Codes, BaselineFractionExact) {
  const std::size_t n = 8;
  for (double theta : {0.0, 0.25, 0.5, 1.0}) {
    const auto code = baseline_fraction_code(theta);
    const auto rep = evaluate_code(*code, FunctionFamily::permutations_of(n), EvalMode::Exact, 0, 1);
    const double k = std::ceil(theta * n);
    // Stored points decode exactly; the rest decode to 0, right with probability 1/n.
    const double delta = k / n + (n - k) / n / n;
    EXPECT_NEAR(rep.delta, delta, 1e-12) << theta;
    EXPECT_DOUBLE_EQ(rep.l_avg, k * 3);
    EXPECT_GE(rep.l_avg, rep.bound - 1e-9);
  }
}

TEST(Codes, EmptyCode) {
  const auto rep = evaluate_code(*empty_code(), FunctionFamily::functions(3, 3), EvalMode::Exact, 0, 1);
  EXPECT_DOUBLE_EQ(rep.l_avg, 0.0);
  EXPECT_NEAR(rep.delta, 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(rep.bound, 0.0);
}

TEST(Codes, MonteCarloAgreesWithExact) {
  const auto code = baseline_fraction_code(0.5);
  const auto fam = FunctionFamily::permutations_of(6);
  const auto exact = evaluate_code(*code, fam, EvalMode::Exact, 0, 1);
  const auto mc = evaluate_code(*code, fam, EvalMode::MonteCarlo, 4000, 2);
  EXPECT_EQ(mc.mode, EvalMode::MonteCarlo);
  EXPECT_EQ(mc.trials, 4000u);
  // Per-trial delta lies in [0, 1], so its standard deviation is at most 1/2.
  EXPECT_NEAR(mc.delta, exact.delta, 3 * 0.5 / std::sqrt(4000.0));
}

TEST(Codes, ReportFormats) {
  EXPECT_EQ(CodeReport::csv_header(), "l_avg,delta,bound,slack,mode,trials,std_err,scheme,family,case_b");
  const auto rep = evaluate_code(*full_table_code(), FunctionFamily::permutations_of(4), EvalMode::Exact, 0, 1);
  EXPECT_EQ(rep.csv_row().substr(0, 4), "6,1,");
  EXPECT_NE(rep.json().find("\"l_avg\""), std::string::npos);
}

TEST(Codes, LengthBoundHoldsForEveryBaseline) {
  for (std::size_t n : {4u, 5u, 6u}) {
    for (double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto rep =
          evaluate_code(*baseline_fraction_code(theta), FunctionFamily::permutations_of(n), EvalMode::Exact, 0, 1);
      EXPECT_GE(rep.slack, -1e-9) << n << " " << theta;
    }
  }
}

TEST(Audit, ChainHoldsOnSmallFamilies) {
  for (std::size_t n : {2u, 3u}) {
    for (bool perm : {true, false}) {
      const auto fam = perm ? FunctionFamily::permutations_of(n) : FunctionFamily::functions(n, n);
      for (double theta : {0.0, 0.5, 1.0}) {
        const auto steps = audit_bound_chain(*baseline_fraction_code(theta), fam);
        ASSERT_EQ(steps.size(), 8u);
        for (const auto& s : steps) EXPECT_GE(s.slack, -1e-9) << fam.describe() << " " << theta << " " << s.id;
      }
    }
  }
}

TEST(Audit, PerfectCodeValues) {
  const auto fam = FunctionFamily::permutations_of(3);
  const auto steps = audit_bound_chain(*full_table_code(), fam);
  // The encoding determines X, so I(Q : X | R) = log2 3!; length is 1 + 3 bits;
  // delta = 1 leaves nothing for the Fano term.
  EXPECT_EQ(steps[1].id, "vc1");
  EXPECT_NEAR(steps[1].lhs, std::log2(6.0), 1e-9);
  EXPECT_EQ(steps[3].id, "vc2b");
  EXPECT_NEAR(steps[3].rhs, 4.0, 1e-12);
  EXPECT_EQ(steps.back().id, "vc5");
  EXPECT_NEAR(steps.back().rhs, 0.0, 1e-12);
}
