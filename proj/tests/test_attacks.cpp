#include <gtest/gtest.h>

#include <cmath>

#include "qinv/attacks.hpp"
#include "qinv/experiment.hpp"

using namespace qinv;

TEST(Checkpoint, InvertsEveryPointOnSmallPermutations) {
  for (std::size_t n : {1u, 7u, 100u, 1024u}) {
    for (std::size_t t : {1u, 3u, 32u}) {
      const auto pi = sample_permutation(n, n + t);
      const auto idx = checkpoint_build(pi, t);
      for (std::uint32_t y = 0; y < n; ++y) {
        const auto res = checkpoint_invert(idx, pi, y);
        ASSERT_TRUE(res.x.has_value());
        EXPECT_EQ(pi(*res.x), y);
        EXPECT_LE(res.queries, 2 * t);
      }
    }
  }
}

TEST(Checkpoint, UnitSpacingStoresFullInverse) {
  const auto pi = sample_permutation(64, 1);
  const auto idx = checkpoint_build(pi, 1);
  EXPECT_EQ(idx.checkpoints.size(), 64u);
  EXPECT_EQ(idx.s_bits(), 64u * 2 * 6);
  const auto m = measure_checkpoint(idx, pi);
  EXPECT_DOUBLE_EQ(m.epsilon_image, 1.0);
  EXPECT_LE(m.t_worst, 2u);
}

TEST(Checkpoint, StorageCountsCycles) {
  // Two cycles of length 3 and one fixed point, spacing 2: 2 + 2 + 1 checkpoints.
  const PermutationTable pi({1, 2, 0, 4, 5, 3, 6});
  const auto idx = checkpoint_build(pi, 2);
  EXPECT_EQ(idx.cycles, 3u);
  EXPECT_EQ(idx.checkpoints.size(), 5u);
}

TEST(Checkpoint, SampledMeasurement) {
  const auto pi = sample_permutation(4096, 2);
  const auto idx = checkpoint_build(pi, 64);
  const auto m = measure_checkpoint(idx, pi, 500, 9);
  EXPECT_EQ(m.challenges, 500u);
  EXPECT_DOUBLE_EQ(m.epsilon_image, 1.0);
}

TEST(Hellman, PreimagesAreVerifiedAndBounded) {
  const auto f = sample_function(4096, 4096, 3);
  const auto tables = hellman_build(f, 16, 16, 16, 5);
  EXPECT_EQ(tables.worst_case_queries(), 16u * (16 * 17 / 2 + 15));
  EXPECT_EQ(tables.s_bits(), tables.stored_pairs() * 2 * 12 + 16 * 128);
  std::size_t hits = 0;
  for (std::uint32_t x = 0; x < 300; ++x) {
    const auto res = hellman_invert(tables, f, f(x));
    EXPECT_LE(res.queries, tables.worst_case_queries());
    if (res.x) {
      EXPECT_EQ(f(*res.x), f(x));
      ++hits;
    }
  }
  EXPECT_GT(hits, 0u);
  EXPECT_THROW(hellman_build(f, 1000, 1000, 1000, 1), std::length_error);
}

TEST(Hellman, ReducersAreBijections) {
  const auto f = sample_function(97, 97, 1);
  const auto tables = hellman_build(f, 4, 4, 5, 2);
  for (const auto& g : tables.reducers) {
    std::vector<bool> seen(97, false);
    for (std::uint32_t y = 0; y < 97; ++y) seen[g(y)] = true;
    EXPECT_EQ(std::count(seen.begin(), seen.end(), true), 97);
  }
}

TEST(Grover, PointMatchesSimulation) {
  for (double eps : {1.0, 0.5, 0.1}) {
    const auto a = grover_point(64, eps, GroverMode::Analytic, 3);
    const auto e = grover_point(64, eps, GroverMode::Exact, 3);
    EXPECT_NEAR(a.epsilon, e.epsilon, 1e-9) << eps;
    EXPECT_EQ(a.t_worst, e.t_worst);
  }
  // r = 16, T = floor(pi) = 3.
  EXPECT_EQ(grover_point(16, 1.0, GroverMode::Analytic, 1).t_worst, 3u);
  EXPECT_NEAR(grover_point_success(16, 1.0), std::pow(std::sin(7 * std::asin(0.25)), 2), 1e-12);
}

TEST(Records, CsvSchema) {
  EXPECT_EQ(TradeoffRecord::csv_header(), "method,n,m,s_bits,t_worst,t_mean,epsilon,seed");
  TradeoffRecord r{"checkpoint", 16, 16, 40, 4, 2.5, 1.0, 9};
  EXPECT_EQ(r.csv_row(), "checkpoint,16,16,40,4,2.500000,1.000000,9");
  const auto script = gnuplot_script("sweep.csv", 1024);
  EXPECT_NE(script.find("sweep.csv"), std::string::npos);
  EXPECT_NE(script.find("N = 1024"), std::string::npos);
}

TEST(Sweep, GridAndDeterminism) {
  const auto cfg = parse_flat_config("# grid\nmethod = checkpoint\nn = 256, 512\nt_len = 4,16\n");
  const auto grid = sweep_grid(cfg, "hellman", 0);
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[0].method, "checkpoint");
  const auto a = sweep(grid, 5);
  const auto b = sweep(grid, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].csv_row(), b[i].csv_row());
  EXPECT_THROW(sweep_grid(parse_flat_config("# empty\n"), "hellman", 65536), std::invalid_argument);
  EXPECT_THROW(parse_flat_config("novalue\n"), std::invalid_argument);
}

TEST(Sweep, HellmanEmitsBothConventions) {
  const auto cfg = parse_flat_config("n = 1024\nt_len = 8\nchains = 8\ntables = 8\nchallenges = 50\n");
  const auto recs = sweep(sweep_grid(cfg, "hellman", 0), 1);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].method, "hellman");
  EXPECT_EQ(recs[1].method, "hellman-uniform-y");
}

TEST(Experiment, SwappingTrialsReproducible) {
  const auto a = verify_swapping(20, 8, 3, 11);
  const auto b = verify_swapping(20, 8, 3, 11);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].distance, b[i].distance);
    EXPECT_LE(a[i].distance, a[i].hybrid_bound + 1e-9);
  }
}
