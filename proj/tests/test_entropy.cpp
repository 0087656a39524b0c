#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qinv/entropy.hpp"

using namespace qinv;

namespace {

double log2_fact_by_product(std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 2; k <= n; ++k) s += std::log2(static_cast<double>(k));
  return s;
}

}  // namespace

TEST(Entropy, SpotValues) {
  EXPECT_NEAR(log2_factorial(8), 15.2990, 1e-3);
  EXPECT_NEAR(log2_factorial(8), log2_fact_by_product(8), 1e-9);
  EXPECT_NEAR(binary_entropy(0.25), 0.811278, 1e-6);
  EXPECT_NEAR(partition_element_entropy(4, 4), 3.245112, 1e-5);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
}

TEST(Entropy, PartitionEntropyBelowCeiling) {
  for (std::size_t m = 1; m <= 64; ++m) {
    for (std::size_t n = 2; n <= 64; ++n) {
      EXPECT_LE(partition_element_entropy(m, n), partition_element_entropy_ceiling(m, n) + 1e-12);
    }
  }
}

TEST(Entropy, BellStateMarginalIsMaximallyMixed) {
  const double s = 1.0 / std::numbers::sqrt2;
  const std::vector<Amplitude> bell{s, 0, 0, s};
  const auto rho = DensityMatrix::pure(bell);
  EXPECT_NEAR(von_neumann_entropy(rho), 0.0, 1e-12);
  const auto half = partial_trace(rho, 2, 2, true);
  EXPECT_NEAR(von_neumann_entropy(half), 1.0, 1e-12);
  EXPECT_NEAR(conditional_entropy(rho, 2, 2), -1.0, 1e-12);
}

TEST(Entropy, NonDiagonalSpectrum) {
  // |+><+| mixed with I/2: eigenvalues (1 + p)/2 and (1 - p)/2.
  const double p = 0.4;
  DensityMatrix rho{2, {Amplitude(0.5), Amplitude(p / 2), Amplitude(p / 2), Amplitude(0.5)}};
  rho.validate();
  EXPECT_NEAR(von_neumann_entropy(rho), binary_entropy((1 + p) / 2), 1e-12);
}

TEST(Entropy, ValidateRejectsBadMatrices) {
  DensityMatrix bad{2, {Amplitude(0.7), Amplitude(0), Amplitude(0), Amplitude(0.7)}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  DensityMatrix neg{2, {Amplitude(1.2), Amplitude(0), Amplitude(0), Amplitude(-0.2)}};
  EXPECT_THROW(neg.validate(), std::invalid_argument);
}

TEST(Entropy, ClassicalStateReducesToShannon) {
  ClassicalQuantumState st;
  const std::vector<double> probs{0.5, 0.25, 0.125, 0.125};
  for (std::uint32_t i = 0; i < 4; ++i) {
    st.branches.push_back({probs[i], {i / 2, i % 2}, DensityMatrix::maximally_mixed(1)});
  }
  EXPECT_NEAR(entropy(st, {{0, 1}, false}), 1.75, 1e-12);
  // X0 = 0 w.p. 0.75, X1 | X0 = 0 is (2/3, 1/3).
  EXPECT_NEAR(entropy(st, {{0}, false}), binary_entropy(0.75), 1e-12);
  EXPECT_NEAR(conditional_entropy(st, {{1}, false}, {{0}, false}), 1.75 - binary_entropy(0.75), 1e-12);
  EXPECT_NEAR(mutual_information(st, {{0}, false}, {{1}, false}),
              binary_entropy(0.75) + entropy(st, {{1}, false}) - 1.75, 1e-12);
}

TEST(Entropy, SubadditivityOnRandomStates) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto st = random_cq_state(3, 3, 2, s);
    const std::vector<std::vector<std::size_t>> parts{{0}, {1}, {2}};
    EXPECT_GE(check_subadditivity(st, parts, {{}, true}), -1e-9);
  }
}

TEST(Entropy, QuantumSideInformationReducesEntropy) {
  // X uniform bit stored perfectly in Q: S(X|Q) = 0.
  ClassicalQuantumState st;
  st.branches.push_back({0.5, {0}, DensityMatrix::diagonal(std::vector<double>{1, 0})});
  st.branches.push_back({0.5, {1}, DensityMatrix::diagonal(std::vector<double>{0, 1})});
  EXPECT_NEAR(conditional_entropy(st, {{0}, false}, {{}, true}), 0.0, 1e-12);
  EXPECT_THROW(conditional_entropy(st, {{0}, false}, {{0}, true}), std::invalid_argument);
}

TEST(Entropy, PermutationBoundValues) {
  EXPECT_NEAR(permutation_bound(8, 1.0), 15.299208, 1e-6);
  EXPECT_NEAR(permutation_bound(8, 0.9), 9.147, 1e-3);
  // Direct evaluation of s_x - n (H(delta) + (1 - delta) s_xj).
  const double direct = log2_fact_by_product(8) - 8 * (binary_entropy(0.9) + 0.1 * 3.0);
  EXPECT_NEAR(permutation_bound(8, 0.9), direct, 1e-9);
  for (double k : {1.0, 2.0, 5.0}) {
    EXPECT_GE(permutation_bound(64, 1.0 - k / 64), permutation_bound_floor(64, k) - 1e-9);
  }
  EXPECT_DOUBLE_EQ(qracvl_bound({1.0, 1.0, 4, 0.5}), 0.0);
}
