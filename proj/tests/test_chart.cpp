#include "doctest.h"

#include <random>

#include "pocrf/annotation.hpp"
#include "pocrf/mask.hpp"
#include "test_support.hpp"

using namespace pocrf;
using pocrf::testing::schema_with;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io;
}

// Independent crossing rule: the spans share a token yet neither contains
// the other.
bool crossing_oracle(int a, int b, int c, int d) {
  const bool overlap = std::max(a, c) <= std::min(b, d);
  const bool nested = (a <= c && d <= b) || (c <= a && b <= d);
  return overlap && !nested;
}

}  // namespace

TEST_CASE("label schema") {
  LabelSchema s({"PER", "ORG"}, 2);
  CHECK(s.size() == 4);
  CHECK(s.is_observed(1));
  CHECK(s.is_latent(2));
  CHECK(s.find("ORG") == 1);
  CHECK_FALSE(s.find("LOC"));
  CHECK(code_of([] { LabelSchema({"A", "A"}, 1); }) == ErrorCode::bad_config);
  CHECK(code_of([] { LabelSchema({"A"}, 0); }) == ErrorCode::bad_config);
  CHECK(code_of([] { LabelSchema({""}, 1); }) == ErrorCode::bad_config);
}

TEST_CASE("validate_annotation converts end-exclusive offsets") {
  const LabelSchema schema({"PER", "ORG"}, 1);
  const auto tree = validate_annotation({"A", "B", "C"}, {{0, 2, "PER"}}, schema);
  CHECK(tree.n == 3);
  REQUIRE(tree.entities.size() == 1);
  CHECK(tree.entities[0] == Span{0, 1, 0});

  const auto empty = validate_annotation({"A", "B"}, {}, schema);
  CHECK(empty.n == 2);
  CHECK(empty.entities.empty());
}

TEST_CASE("validate_annotation errors") {
  const LabelSchema schema({"PER", "ORG"}, 1);
  const std::vector<std::string> toks{"A", "B", "C"};
  CHECK(code_of([&] { validate_annotation(toks, {{0, 2, "PER"}, {1, 3, "ORG"}}, schema); }) ==
        ErrorCode::crossing_spans);
  CHECK(code_of([&] { validate_annotation(toks, {{0, 2, "LOC"}}, schema); }) ==
        ErrorCode::unknown_label);
  CHECK(code_of([&] { validate_annotation(toks, {{0, 4, "PER"}}, schema); }) ==
        ErrorCode::out_of_bounds);
  CHECK(code_of([&] { validate_annotation(toks, {{-1, 2, "PER"}}, schema); }) ==
        ErrorCode::out_of_bounds);
  CHECK(code_of([&] { validate_annotation(toks, {{2, 2, "PER"}}, schema); }) ==
        ErrorCode::empty_span);
  CHECK(code_of([&] { validate_annotation({}, {}, schema); }) == ErrorCode::empty_sentence);
}

TEST_CASE("validate_annotation reports the first crossing pair") {
  const LabelSchema schema({"X"}, 1);
  try {
    validate_annotation({"a", "b", "c", "d"}, {{0, 1, "X"}, {1, 3, "X"}, {2, 4, "X"}}, schema);
    FAIL("expected CrossingSpans");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("[1,2] and [2,3]") != std::string::npos);
  }
}

TEST_CASE("duplicates are dropped and multi-label spans kept") {
  const LabelSchema schema({"A", "B"}, 1);
  const auto tree =
      validate_annotation({"x", "y"}, {{0, 2, "A"}, {0, 2, "A"}, {0, 2, "B"}}, schema);
  CHECK(tree.entities == std::vector<Span>{{0, 1, 0}, {0, 1, 1}});
  const auto mask = build_mask(classify_nodes(tree), schema);
  CHECK(mask(0, 1, 0) == 1.0);
  CHECK(mask(0, 1, 1) == 1.0);
  CHECK(mask(0, 1, 2) == 0.0);
}

TEST_CASE("classify_nodes examples") {
  const LabelSchema schema({"o"}, 1);
  const auto sym = classify_nodes(make_partial_tree(3, {{0, 1, 0}}, schema));
  CHECK(sym.kind(0, 0) == NodeKind::latent);
  CHECK(sym.kind(1, 1) == NodeKind::latent);
  CHECK(sym.kind(2, 2) == NodeKind::latent);
  CHECK(sym.kind(0, 1) == NodeKind::observed);
  CHECK(sym.kind(1, 2) == NodeKind::rejected);
  CHECK(sym.kind(0, 2) == NodeKind::latent);

  const auto single = classify_nodes(make_partial_tree(1, {}, schema));
  CHECK(single.kind(0, 0) == NodeKind::latent);

  const auto nested = classify_nodes(make_partial_tree(3, {{0, 2, 0}, {0, 1, 0}}, schema));
  CHECK(nested.kind(0, 2) == NodeKind::observed);
  CHECK(nested.kind(0, 1) == NodeKind::observed);
  CHECK(nested.kind(1, 2) == NodeKind::rejected);
  for (int i = 0; i < 3; ++i) CHECK(nested.kind(i, i) == NodeKind::latent);
}

TEST_CASE("build_mask examples") {
  const LabelSchema schema({"o"}, 1);
  const auto mask = build_mask(classify_nodes(make_partial_tree(2, {{0, 1, 0}}, schema)), schema);
  CHECK(mask(0, 1, 0) == 1.0);
  CHECK(mask(0, 1, 1) == 0.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(mask(i, i, 0) == 0.0);
    CHECK(mask(i, i, 1) == 1.0);
  }
  CHECK(mask(1, 0, 0) == 0.0);

  const auto latent_only = build_mask(classify_nodes(make_partial_tree(2, {}, schema)), schema);
  for_each_cell(2, [&](int i, int j) {
    CHECK(latent_only(i, j, 0) == 0.0);
    CHECK(latent_only(i, j, 1) == 1.0);
  });

  const auto rejected = build_mask(classify_nodes(make_partial_tree(3, {{0, 1, 0}}, schema)), schema);
  CHECK(rejected(1, 2, 0) == 0.0);
  CHECK(rejected(1, 2, 1) == 0.0);
}

TEST_CASE("smooth_mask examples") {
  const LabelSchema schema({"o"}, 1);
  const auto sym = classify_nodes(make_partial_tree(3, {{0, 1, 0}}, schema));
  const auto mask = build_mask(sym, schema);

  const auto smoothed = smooth_mask(mask, sym, 0.01);
  CHECK(smoothed(1, 2, 0) == 0.01);
  CHECK(smoothed(1, 2, 1) == 0.01);

  CHECK(smooth_mask(mask, sym, 0.0).weights.data().isApprox(mask.weights.data()));
  CHECK((smooth_mask(mask, sym, 0.0).weights.data() == mask.weights.data()).all());

  const auto observed = smooth_mask(mask, sym, 0.02);
  CHECK(observed(0, 1, 0) == 1.0);
  CHECK(observed(0, 1, 1) == 0.0);

  CHECK(code_of([&] { smooth_mask(mask, sym, 1.0); }) == ErrorCode::bad_config);
  CHECK(code_of([&] { smooth_mask(mask, sym, -0.1); }) == ErrorCode::bad_config);
}

TEST_CASE("mask properties on random annotations") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 8;
    const int observed = 1 + trial % 3;
    const auto schema = schema_with(observed, 1 + trial % 2);
    const auto tree = pocrf::testing::random_partial_tree(rng, n, schema, 0.5);
    const auto sym = classify_nodes(tree);

    for_each_cell(n, [&](int i, int j) {
      bool crossing = false;
      for (const auto& e : tree.entities) crossing |= crossing_oracle(i, j, e.start, e.end);
      CHECK((sym.kind(i, j) == NodeKind::rejected) == crossing);
      bool annotated = false;
      for (const auto& e : tree.entities) annotated |= (e.start == i && e.end == j);
      CHECK((sym.kind(i, j) == NodeKind::observed) == annotated);
    });

    const auto mask = build_mask(sym, schema);
    CHECK((build_mask(classify_nodes(tree), schema).weights.data() == mask.weights.data()).all());
    for (int i = 0; i < n; ++i) CHECK(mask.weights.cell(i, i).maxCoeff() > 0.0);
    CHECK(mask.weights.cell(0, n - 1).maxCoeff() > 0.0);
    CHECK(((mask.weights.data() == 0.0) || (mask.weights.data() == 1.0)).all());

    const double eps = 0.05;
    const auto smoothed = smooth_mask(mask, sym, eps);
    for_each_cell(n, [&](int i, int j) {
      for (int k = 0; k < schema.size(); ++k) {
        if (sym.kind(i, j) == NodeKind::rejected)
          CHECK(smoothed(i, j, k) == eps);
        else
          CHECK(smoothed(i, j, k) == mask(i, j, k));
      }
    });
  }
}

TEST_CASE("empty annotation masks are latent-only") {
  const auto schema = schema_with(3, 2);
  for (int n = 1; n <= 6; ++n) {
    const auto mask = build_mask(classify_nodes(make_partial_tree(n, {}, schema)), schema);
    for_each_cell(n, [&](int i, int j) {
      CHECK((mask.weights.cell(i, j).head(3) == 0.0).all());
      CHECK((mask.weights.cell(i, j).tail(2) == 1.0).all());
    });
  }
}
