#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qinv/reduction.hpp"

using namespace qinv;

namespace {

// Plurality winner distribution by enumerating every draw sequence.
std::vector<double> brute_majority(const std::vector<double>& probs, std::size_t rho) {
  const std::size_t s = probs.size();
  std::vector<double> out(s, 0.0);
  std::vector<std::size_t> seq(rho, 0);
  for (;;) {
    double p = 1.0;
    std::vector<std::size_t> count(s, 0);
    for (auto v : seq) {
      p *= probs[v];
      ++count[v];
    }
    const auto win = std::max_element(count.begin(), count.end()) - count.begin();
    out[static_cast<std::size_t>(win)] += p;
    std::size_t i = 0;
    while (i < rho && ++seq[i] == s) seq[i++] = 0;
    if (i == rho) break;
  }
  return out;
}

}  // namespace

TEST(Majority, ExactMatchesEnumeration) {
  const std::vector<double> probs{0.2, 0.5, 0.3};
  for (std::size_t rho : {1u, 2u, 3u, 5u}) {
    const auto got = majority_vote(probs, rho, 1);
    const auto want = brute_majority(probs, rho);
    for (std::size_t i = 0; i < probs.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << rho << " " << i;
  }
}

TEST(Majority, MonteCarloPathIsClose) {
  std::vector<double> probs(40, 0.01);
  probs[7] = 0.61;
  const auto got = majority_vote(probs, 200, 3);
  EXPECT_GT(got[7], 0.99);
  EXPECT_NEAR(std::accumulate(got.begin(), got.end(), 0.0), 1.0, 1e-9);
}

TEST(Inverters, TableAdviceSuccessSet) {
  const auto pi = sample_permutation(8, 4);
  const auto inv = table_advice_inverter(0.5);
  EXPECT_EQ(inv->query_budget(), 0u);
  EXPECT_EQ(effective_queries(*inv), 1u);
  const auto advice = inv->prepare_advice(pi);
  const auto set = compute_success_set_I(*inv, pi, advice, 2.0 / 3.0);
  const auto back = pi.inverse();
  // Stored challenges are answered; an unstored y is answered by the untouched
  // |0> exactly when pi(0) = y.
  std::vector<std::uint32_t> want;
  for (std::uint32_t y = 0; y < 8; ++y) {
    if (y < 4 || pi(0) == y) want.push_back(back(y));
  }
  std::sort(want.begin(), want.end());
  EXPECT_EQ(set.members, want);
  EXPECT_DOUBLE_EQ(set.invertible_fraction, static_cast<double>(want.size()) / 8);
}

TEST(Inverters, NoisyOutcomeDistribution) {
  const auto f = sample_function(10, 10, 2);
  const auto inv = noisy_inverter(0.6);
  const auto advice = inv->prepare_advice(f);
  const auto y = f(3);
  const auto run = inv->run(f, y, advice);
  std::uint32_t smallest = 0;
  while (f(smallest) != y) ++smallest;
  EXPECT_NEAR(run.outcome[smallest], 0.6, 1e-9);
  for (std::size_t x = 0; x < 10; ++x) {
    if (x != smallest) EXPECT_NEAR(run.outcome[x], 0.4 / 9, 1e-9);
  }
  EXPECT_EQ(compute_success_set_I(*inv, f, advice, 2.0 / 3.0).members.size(), 0u);
  EXPECT_GT(compute_success_set_I(*inv, f, advice, 0.5).members.size(), 0u);
}

TEST(Inverters, GroverInvertsEverything) {
  const auto pi = sample_permutation(16, 5);
  const auto inv = grover_inverter(3);
  const auto set = compute_success_set_I(*inv, pi, inv->prepare_advice(pi), 2.0 / 3.0);
  EXPECT_EQ(set.members.size(), 16u);
  EXPECT_DOUBLE_EQ(set.invertible_fraction, 1.0);
}

TEST(Sets, SampleRRate) {
  const auto r = sample_R(200000, 2, 0.4, 7);
  // p = 0.1; 3 sigma is about 400.
  EXPECT_NEAR(static_cast<double>(r.size()), 20000.0, 450.0);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));
  EXPECT_THROW(sample_R(10, 0, 0.1, 1), std::invalid_argument);
}

TEST(Sets, GoodSetIsInsideIAndR) {
  const auto pi = sample_permutation(64, 3);
  const auto inv = grover_inverter(1);
  const auto advice = inv->prepare_advice(pi);
  SchemeParams params;
  const auto set_i = compute_success_set_I(*inv, pi, advice, 0.1).members;
  const auto set_r = sample_R(64, 1, 0.5, 9);
  const auto sets = compute_good_set_G(*inv, pi, advice, set_i, set_r, params);
  for (auto x : sets.set_g) {
    EXPECT_TRUE(std::binary_search(set_i.begin(), set_i.end(), x));
    EXPECT_TRUE(std::binary_search(set_r.begin(), set_r.end(), x));
  }
}

TEST(PermutationSchemeTest, RoundTripAndComponentSum) {
  const std::size_t n = 32;
  const auto family = FunctionFamily::permutations_of(n);
  const PermutationScheme scheme(table_advice_inverter(0.5), SchemeParams{});
  EXPECT_EQ(scheme.rho(n), static_cast<std::size_t>(std::ceil(10 * std::log(n / 0.5))));
  std::size_t case_b = 0;
  for (std::uint64_t r = 0; r < 60; ++r) {
    const auto pi = family.sample(r + 1000);
    const auto enc = scheme.encode(family, pi, r);
    EXPECT_EQ(enc.length_bits(), enc.component_sum());
    const auto parsed = scheme.parse(family, enc, r);
    EXPECT_EQ(parsed.case_b, enc.branch == "B");
    if (parsed.case_b) {
      ++case_b;
      EXPECT_EQ(parsed.set_g, scheme.analyze(pi, r).sets.set_g);
    }
    for (std::uint32_t y = 0; y < n; y += 5) {
      const auto dist = scheme.decode(family, enc, y, r);
      EXPECT_GT(probability_of(dist, element(pi, ElementView::Inverse, y)), 0.98);
    }
  }
  EXPECT_GT(case_b, 0u);
}

TEST(PermutationSchemeTest, CaseAStoresLehmerRank) {
  const auto family = FunctionFamily::permutations_of(6);
  SchemeParams params;
  params.epsilon = 1.0;  // table(0.25) inverts a quarter of [6], below epsilon / 2
  const PermutationScheme scheme(table_advice_inverter(0.25), params);
  const auto pi = family.sample(3);
  const auto enc = scheme.encode(family, pi, 1);
  EXPECT_EQ(enc.branch, "A");
  EXPECT_EQ(enc.length_bits(), 1 + 10u);  // ceil(log2 720) = 10
}

TEST(FunctionSchemeTest, Parameters) {
  SchemeParams params;
  const FunctionScheme scheme(noisy_inverter(0.6), params);
  const double k = 3.0 * 4.0 * std::log2(64.0);
  EXPECT_NEAR(scheme.k_threshold(32, 32), k, 1e-12);
  EXPECT_EQ(scheme.tag_bits(32, 32), static_cast<std::size_t>(std::ceil(std::log2(k) + std::log2(5.0))));
  EXPECT_EQ(scheme.rho(32, 32), static_cast<std::size_t>(std::ceil(k * 10 * std::log(5.0))));
}

TEST(FunctionSchemeTest, RoundTripAndTags) {
  const std::size_t n = 32;
  const auto family = FunctionFamily::functions(n, n);
  SchemeParams params;
  params.success_threshold = 0.5;
  const FunctionScheme scheme(noisy_inverter(0.6), params);
  std::size_t case_b = 0;
  for (std::uint64_t r = 0; r < 80; ++r) {
    const auto f = family.sample(r + 77);
    const auto enc = scheme.encode(family, f, r);
    EXPECT_EQ(enc.length_bits(), enc.component_sum());
    double delta = 0.0;
    for (std::uint32_t y = 0; y < n; ++y) {
      delta += probability_of(scheme.decode(family, enc, y, r), element(f, ElementView::Partition, y));
    }
    EXPECT_GT(delta / n, 0.95);
    if (enc.branch != "B") continue;
    ++case_b;
    const auto parsed = scheme.parse(family, enc, r);
    const auto h = scheme.tag_hash(n, n, r);
    for (std::size_t i = 0; i < parsed.g_images.size(); ++i) {
      const auto y = parsed.g_images[i];
      const auto it = std::find_if(parsed.set_g.begin(), parsed.set_g.end(), [&](auto x) { return f(x) == y; });
      ASSERT_NE(it, parsed.set_g.end());
      EXPECT_EQ(parsed.tags[i], h.eval(static_cast<std::uint64_t>(*it)));
      const auto oracle = decoder_oracle(parsed, n, y);
      for (auto x : parsed.set_g) EXPECT_EQ(oracle(x), y);
    }
  }
  EXPECT_GT(case_b, 0u);
}

TEST(Params, Validation) {
  SchemeParams p;
  p.gamma = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SchemeParams{};
  p.success_threshold = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
