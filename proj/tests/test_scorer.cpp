#include "doctest.h"

#include <random>
#include <sstream>

#include "gradcheck.hpp"
#include "pocrf/decode.hpp"
#include "pocrf/mask.hpp"
#include "pocrf/model_io.hpp"
#include "pocrf/scorer.hpp"
#include "test_support.hpp"

using namespace pocrf;
using pocrf::testing::random_chart;
using pocrf::testing::schema_with;

namespace {

Vocab vocab_of(int size) {
  std::vector<std::string> toks;
  for (int i = 1; i < size; ++i) toks.push_back("w" + std::to_string(i));
  return Vocab(toks);
}

ScorerParams tiny_model(std::uint64_t seed, int labels_observed = 2, int latent = 1) {
  return init_params(vocab_of(12), schema_with(labels_observed, latent), ScorerConfig{4, 8}, seed);
}

// Raises biases so that ReLU units are active and gradients flow everywhere.
void jitter(ScorerParams& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  p.weights.for_each_array([&](const char*, double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) data[i] += u(rng);
  });
}

}  // namespace

TEST_CASE("vocab reserves the unknown index") {
  Vocab v({"a", "b", "a"});
  CHECK(v.size() == 3);
  CHECK(v.index("a") == 1);
  CHECK(v.index("zzz") == Vocab::kUnknown);
  CHECK(v.encode({"b", "q"}) == std::vector<int>{2, 0});
}

TEST_CASE("init_params") {
  const auto a = tiny_model(7);
  const auto b = tiny_model(7);
  CHECK(a.weights == b.weights);
  CHECK_FALSE(a.weights == tiny_model(8).weights);
  CHECK((a.weights.bias.array() == 0.0).all());
  CHECK((a.weights.mix_b.array() == 0.0).all());

  const auto golden = init_params(vocab_of(100), schema_with(3, 1), ScorerConfig{16, 32}, 0);
  // 1600 + (768 + 16) + (512 + 32) + (512 + 16) + 4 * (256 + 16 + 1)
  CHECK(golden.weights.parameter_count() == 4548);
  CHECK(parameter_count(100, ScorerConfig{16, 32}, 4) == 4548);

  CHECK_THROWS_AS(init_params(vocab_of(5), schema_with(1, 1), ScorerConfig{4, 7}, 0), Error);
  CHECK_THROWS_AS(init_params(Vocab(), schema_with(1, 1), ScorerConfig{4, 8}, 0), Error);
  CHECK_THROWS_AS(init_params(vocab_of(5), schema_with(1, 1), ScorerConfig{1, 8}, 0), Error);
}

TEST_CASE("zero U matrices and zero bias score every span 0") {
  auto p = tiny_model(3);
  for (auto& u : p.weights.bilinear) u.setZero();
  p.weights.linear.setZero();
  const auto chart = biaffine_scores(encode({1, 2, 3}, p), p);
  for_each_cell(3, [&](int i, int j) { CHECK((chart.cell(i, j) == 0.0).all()); });
}

TEST_CASE("encode") {
  auto p = tiny_model(5);
  auto zero = p;
  zero.weights.set_zero();
  CHECK((encode({1, 2, 3}, zero).array() == 0.0).all());
  CHECK_THROWS_AS(encode({}, p), Error);

  // A single token sees zero padding on both sides.
  EncodeCache cache;
  encode({4}, p, &cache);
  CHECK((cache.context.block(0, 0, 1, 4).array() == 0.0).all());
  CHECK((cache.context.block(0, 8, 1, 4).array() == 0.0).all());
  CHECK(cache.context.block(0, 4, 1, 4) == p.weights.embed.row(4));

  // Swapping tokens 1 and 6 only moves embeddings within distance 1.
  const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto swapped = ids;
  std::swap(swapped[1], swapped[6]);
  const auto e0 = encode(ids, p);
  const auto e1 = encode(swapped, p);
  for (int i = 0; i < 9; ++i) {
    const bool near = std::abs(i - 1) <= 1 || std::abs(i - 6) <= 1;
    if (!near) CHECK(e0.row(i) == e1.row(i));
  }
  CHECK_FALSE(e0.row(1) == e1.row(1));
}

TEST_CASE("biaffine scores follow the bilinear form") {
  auto p = init_params(vocab_of(4), schema_with(1, 1), ScorerConfig{2, 2}, 0);
  for (auto& u : p.weights.bilinear) u.setZero();
  p.weights.linear.setZero();
  p.weights.bias << 0.75, 0.75;
  Eigen::MatrixXd e(3, 1);
  e << 0.3, -1.0, 2.0;
  const auto constant = biaffine_scores(e, p);
  for_each_cell(3, [&](int i, int j) { CHECK((constant.cell(i, j) == 0.75).all()); });

  p.weights.bilinear[0](0, 0) = 1.0;
  p.weights.bias.setZero();
  Eigen::MatrixXd two(2, 1);
  two << 1.0, 2.0;
  const auto s = biaffine_scores(two, p);
  CHECK(s(0, 1, 0) == 2.0);
  CHECK(s(0, 0, 0) == 1.0);
  CHECK(s(1, 1, 0) == 4.0);

  // Symmetric U1 and no linear term give s_ij = s_ji off the triangle.
  auto q = tiny_model(9);
  for (auto& u : q.weights.bilinear) u = (u + u.transpose()).eval();
  q.weights.linear.setZero();
  const auto x = encode({1, 2, 3, 4}, q);
  for (int k = 0; k < 3; ++k) {
    const Eigen::MatrixXd full = x * q.weights.bilinear[k] * x.transpose();
    CHECK(full.isApprox(full.transpose(), 1e-12));
  }
}

TEST_CASE("potential normalization") {
  ScoreChart two(1, 2);
  two(0, 0, 0) = 0.0;
  two(0, 0, 1) = 2.0;
  const auto z = potential_normalize(two);
  CHECK(z(0, 0, 0) == -1.0);
  CHECK(z(0, 0, 1) == 1.0);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 7;
    const auto chart = random_chart(rng, n, 3, -5.0, 9.0);
    const auto norm = potential_normalize(chart);
    double sum = 0, sq = 0;
    const double count = n * (n + 1) / 2.0 * 3;
    for_each_cell(n, [&](int i, int j) {
      sum += norm.cell(i, j).sum();
      sq += norm.cell(i, j).square().sum();
    });
    CHECK(std::abs(sum / count) <= 1e-9);
    CHECK(std::abs(sq / count - 1.0) <= 1e-9);
    const auto twice = potential_normalize(norm);
    for_each_cell(n, [&](int i, int j) {
      CHECK((twice.cell(i, j) - norm.cell(i, j)).abs().maxCoeff() <= 1e-9);
    });
    CHECK(cky_decode(norm) == cky_decode(chart));
  }

  ScoreChart flat(3, 2, 4.0);
  NormalizationStats stats;
  const auto centered = potential_normalize(flat, &stats);
  CHECK_FALSE(stats.scaled);
  for_each_cell(3, [&](int i, int j) { CHECK((centered.cell(i, j) == 0.0).all()); });
}

TEST_CASE("backward") {
  auto p = tiny_model(11);
  const std::vector<int> ids{1, 5, 2, 7};
  const auto pass = forward(ids, p);
  const ScoreChart zero(4, p.schema.size(), 0.0);
  const auto g = backward(pass, p, zero);
  g.for_each_array([](const char*, const double* data, Eigen::Index size) {
    CHECK((Eigen::Map<const Eigen::VectorXd>(data, size).array() == 0.0).all());
  });
  CHECK_THROWS_AS(backward(pass, p, ScoreChart(3, p.schema.size(), 0.0)), Error);
}

TEST_CASE("bias gradient is the normalization-adjusted score gradient sum") {
  std::mt19937_64 rng(2);
  auto p = tiny_model(13);
  jitter(p, rng);
  const std::vector<int> ids{3, 1, 4, 1, 5};
  const auto pass = forward(ids, p);
  const auto g_scores = random_chart(rng, 5, p.schema.size());
  ScoreChart clean(5, p.schema.size(), 0.0);
  for_each_cell(5, [&](int i, int j) { clean.cell(i, j) = g_scores.cell(i, j); });
  const auto g = backward(pass, p, clean);
  const auto raw = potential_normalize_backward(pass.normalized, pass.stats, clean);
  for (int k = 0; k < p.schema.size(); ++k) {
    double total = 0;
    for_each_cell(5, [&](int i, int j) { total += raw(i, j, k); });
    CHECK(g.bias(k) == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("end-to-end gradients match finite differences") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    auto p = tiny_model(100 + trial, 1 + trial % 2, 1 + trial % 2);
    jitter(p, rng);
    const int n = 1 + trial % 5;
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) ids.push_back(1 + int(rng() % 11));
    const auto tree = pocrf::testing::random_partial_tree(rng, n, p.schema, 0.5);
    const auto sym = classify_nodes(tree);
    const auto mask = smooth_mask(build_mask(sym, p.schema), sym, trial % 2 ? 0.01 : 0.0);
    const auto bad = pocrf::testing::check_scorer_gradients(ids, p, mask);
    for (const auto& b : bad)
      MESSAGE(b.array << "[" << b.index << "] analytic " << b.analytic << " numeric " << b.numeric);
    CHECK(bad.empty());
  }
}

TEST_CASE("model file round trip") {
  const auto p = tiny_model(21);
  std::stringstream buf;
  save_model(p, buf);
  const auto q = load_model(buf);
  CHECK(q.weights == p.weights);
  CHECK(q.vocab == p.vocab);
  CHECK(q.schema == p.schema);
  CHECK(q.config == p.config);

  std::string bytes;
  {
    std::stringstream s;
    save_model(p, s);
    bytes = s.str();
  }
  auto corrupt = bytes;
  corrupt[corrupt.size() / 2] ^= 0x1;
  std::stringstream c(corrupt);
  CHECK_THROWS_AS(load_model(c), Error);

  auto versioned = bytes;
  versioned[8] = 9;
  std::stringstream v(versioned);
  try {
    load_model(v);
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::format_version);
    CHECK(std::string(e.what()).find("version 9") != std::string::npos);
    CHECK(std::string(e.what()).find("version 1") != std::string::npos);
  }

  std::stringstream junk("not a model");
  CHECK_THROWS_AS(load_model(junk), Error);
}
