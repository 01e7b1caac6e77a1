#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "pocrf/mask.hpp"
#include "pocrf/oracle.hpp"
#include "test_support.hpp"

using namespace pocrf;
using pocrf::testing::random_chart;
using pocrf::testing::random_partial_tree;
using pocrf::testing::schema_with;

TEST_CASE("catalan numbers") {
  const std::uint64_t expected[] = {1, 1, 2, 5, 14, 42, 132, 429};
  for (int k = 0; k < 8; ++k) CHECK(oracle::catalan(k) == expected[k]);
  for (int n = 1; n <= 8; ++n) CHECK(oracle::enumerate_bracketings(n).size() == oracle::catalan(n - 1));
}

TEST_CASE("enumeration counts") {
  auto count = [](int n, const LabelSchema& schema) {
    auto e = oracle::enumerate_full_trees(n, schema);
    std::uint64_t c = 0;
    FullTree t;
    std::set<std::vector<Span>> seen;
    while (e.next(t)) {
      CHECK(is_valid_full_tree(t));
      seen.insert(t.nodes);
      ++c;
    }
    CHECK(seen.size() == c);
    CHECK(e.size() == c);
    return c;
  };
  CHECK(count(2, schema_with(1, 1)) == 8);
  CHECK(count(3, schema_with(1, 1)) == 64);
  CHECK(count(4, schema_with(2, 1)) == 10935);
  CHECK(count(1, schema_with(2, 1)) == 3);
}

TEST_CASE("enumeration order is canonical") {
  auto e = oracle::enumerate_full_trees(2, schema_with(1, 1));
  FullTree t;
  REQUIRE(e.next(t));
  CHECK(t.nodes == std::vector<Span>{{0, 1, 0}, {0, 0, 0}, {1, 1, 0}});
  REQUIRE(e.next(t));
  CHECK(t.nodes == std::vector<Span>{{0, 1, 0}, {0, 0, 0}, {1, 1, 1}});
}

TEST_CASE("guard") {
  CHECK_THROWS_AS(oracle::enumerate_full_trees(9, schema_with(1, 1)), Error);
  CHECK_THROWS_AS(oracle::enumerate_full_trees(0, schema_with(1, 1)), Error);
  try {
    oracle::enumerate_full_trees(7, schema_with(2, 1));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::too_large);
  }
  CHECK(oracle::enumerate_full_trees(6, schema_with(2, 1)).size() == 42ull * 177147);
}

TEST_CASE("zero-score log partition") {
  ScoreChart zero(3, 2, 0.0);
  CHECK(oracle::brute_force_log_z(zero) == doctest::Approx(std::log(64.0)).epsilon(1e-14));
  CHECK(oracle::exhaustive_log_z(zero, schema_with(1, 1)) ==
        doctest::Approx(std::log(64.0)).epsilon(1e-14));
}

TEST_CASE("compatibility filter") {
  const auto schema = schema_with(1, 1);
  const auto sym = classify_nodes(make_partial_tree(2, {{0, 1, 0}}, schema));
  CHECK(oracle::count_compatible(sym, schema) == 1);

  for (int n = 1; n <= 5; ++n) {
    for (int latent = 1; latent <= 2; ++latent) {
      const auto s = schema_with(1, latent);
      const auto empty = classify_nodes(make_partial_tree(n, {}, s));
      std::uint64_t expected = oracle::catalan(n - 1);
      for (int i = 0; i < 2 * n - 1; ++i) expected *= latent;
      CHECK(oracle::count_compatible(empty, s) == expected);
    }
  }
}

TEST_CASE("factorized oracle equals the fully labeled enumeration") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 5;
    const auto schema = schema_with(1 + trial % 2, 1 + (trial / 2) % 2);
    const auto chart = random_chart(rng, n, schema.size());
    CHECK(oracle::brute_force_log_z(chart) ==
          doctest::Approx(oracle::exhaustive_log_z(chart, schema)).epsilon(1e-12));
    const auto sym = classify_nodes(random_partial_tree(rng, n, schema, 0.5));
    CHECK(oracle::brute_force_partial_score(chart, sym, schema) ==
          doctest::Approx(oracle::exhaustive_partial_score(chart, sym, schema)).epsilon(1e-12));
  }
}

TEST_CASE("best tree matches exhaustive maximization") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 5;
    const auto schema = schema_with(1, 1 + trial % 2);
    const auto chart = random_chart(rng, n, schema.size());
    auto e = oracle::enumerate_full_trees(n, schema);
    FullTree t;
    double best = -1e300;
    while (e.next(t)) best = std::max(best, tree_score(chart, t));
    CHECK(tree_score(chart, oracle::brute_force_best_tree(chart)) == best);
  }
}
