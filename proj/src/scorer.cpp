#include "pocrf/scorer.hpp"

#include <cmath>
#include <random>

#include "pocrf/error.hpp"

namespace pocrf {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd relu(const MatrixXd& x) { return x.cwiseMax(0.0); }

MatrixXd relu_backward(const MatrixXd& grad_out, const MatrixXd& pre) {
  return (pre.array() > 0.0).select(grad_out, 0.0);
}

void glorot(MatrixXd& m, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / double(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-a, a);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
}

}  // namespace

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(const std::vector<std::string>& tokens) {
  tokens_.push_back(kUnknownToken);
  index_.emplace(kUnknownToken, kUnknown);
  for (const auto& t : tokens) {
    if (index_.emplace(t, size()).second) tokens_.push_back(t);
  }
}

int Vocab::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(index(t));
  return ids;
}

Eigen::Index ScorerWeights::parameter_count() const {
  Eigen::Index total = 0;
  for_each_array([&](const char*, const double*, Eigen::Index size) { total += size; });
  return total;
}

ScorerWeights ScorerWeights::zeros_like() const {
  ScorerWeights z = *this;
  z.set_zero();
  return z;
}

void ScorerWeights::set_zero() {
  for_each_array([](const char*, double* data, Eigen::Index size) {
    Eigen::Map<VectorXd>(data, size).setZero();
  });
}

ScorerWeights& ScorerWeights::operator+=(const ScorerWeights& other) {
  std::vector<const double*> sources;
  other.for_each_array([&](const char*, const double* data, Eigen::Index) { sources.push_back(data); });
  std::size_t a = 0;
  for_each_array([&](const char*, double* data, Eigen::Index size) {
    Eigen::Map<VectorXd>(data, size) += Eigen::Map<const VectorXd>(sources[a++], size);
  });
  return *this;
}

bool ScorerWeights::all_finite() const {
  bool ok = true;
  for_each_array([&](const char*, const double* data, Eigen::Index size) {
    ok = ok && Eigen::Map<const VectorXd>(data, size).allFinite();
  });
  return ok;
}

bool ScorerWeights::operator==(const ScorerWeights& other) const {
  std::vector<std::pair<const double*, Eigen::Index>> mine, theirs;
  for_each_array([&](const char*, const double* d, Eigen::Index s) { mine.emplace_back(d, s); });
  other.for_each_array([&](const char*, const double* d, Eigen::Index s) { theirs.emplace_back(d, s); });
  if (mine.size() != theirs.size()) return false;
  for (std::size_t a = 0; a < mine.size(); ++a) {
    if (mine[a].second != theirs[a].second) return false;
    if (!(Eigen::Map<const VectorXd>(mine[a].first, mine[a].second).array() ==
          Eigen::Map<const VectorXd>(theirs[a].first, theirs[a].second).array())
             .all())
      return false;
  }
  return true;
}

Eigen::Index parameter_count(int vocab_size, const ScorerConfig& config, int label_count) {
  const Eigen::Index d = config.dim, h = config.hidden, p = config.hidden / 2;
  return vocab_size * d + (3 * d * d + d) + (d * h + h) + (p * h + p) +
         label_count * (p * p + p + 1);
}

ScorerParams init_params(Vocab vocab, LabelSchema schema, ScorerConfig config, std::uint64_t seed) {
  if (config.dim < 2 || config.hidden < 2)
    throw Error(ErrorCode::bad_config, "dim and hidden must be at least 2");
  if (config.hidden % 2 != 0) throw Error(ErrorCode::bad_config, "hidden size must be even");
  if (vocab.size() <= 1) throw Error(ErrorCode::bad_config, "vocabulary is empty");

  const int d = config.dim, h = config.hidden, p = h / 2, labels = schema.size();
  ScorerParams params{std::move(vocab), std::move(schema), config, {}};
  ScorerWeights& w = params.weights;
  std::mt19937_64 rng(seed);

  w.embed.resize(params.vocab.size(), d);
  glorot(w.embed, params.vocab.size(), d, rng);
  w.mix_w.resize(d, 3 * d);
  glorot(w.mix_w, 3 * d, d, rng);
  w.mix_b = VectorXd::Zero(d);
  w.ff1_w.resize(h, d);
  glorot(w.ff1_w, d, h, rng);
  w.ff1_b = VectorXd::Zero(h);
  w.ff2_w.resize(p, h);
  glorot(w.ff2_w, h, p, rng);
  w.ff2_b = VectorXd::Zero(p);
  w.bilinear.assign(labels, MatrixXd(p, p));
  for (auto& u : w.bilinear) glorot(u, p, p, rng);
  w.linear.resize(labels, p);
  for (int k = 0; k < labels; ++k) {
    MatrixXd row(1, p);
    glorot(row, p, 1, rng);
    w.linear.row(k) = row;
  }
  w.bias = VectorXd::Zero(labels);
  return params;
}

MatrixXd encode(const std::vector<int>& ids, const ScorerParams& params, EncodeCache* cache) {
  const int n = static_cast<int>(ids.size());
  if (n == 0) throw Error(ErrorCode::empty_sentence, "cannot encode an empty sentence");
  const ScorerWeights& w = params.weights;
  const int d = params.config.dim;
  for (int id : ids)
    if (id < 0 || id >= w.embed.rows())
      throw Error(ErrorCode::dimension_mismatch, "token id outside the embedding table");

  MatrixXd context = MatrixXd::Zero(n, 3 * d);
  for (int i = 0; i < n; ++i) {
    if (i > 0) context.block(i, 0, 1, d) = w.embed.row(ids[i - 1]);
    context.block(i, d, 1, d) = w.embed.row(ids[i]);
    if (i + 1 < n) context.block(i, 2 * d, 1, d) = w.embed.row(ids[i + 1]);
  }
  MatrixXd mix_pre = (context * w.mix_w.transpose()).rowwise() + w.mix_b.transpose();
  MatrixXd mix_out = relu(mix_pre);
  MatrixXd ff1_pre = (mix_out * w.ff1_w.transpose()).rowwise() + w.ff1_b.transpose();
  MatrixXd ff1_out = relu(ff1_pre);
  MatrixXd e = (ff1_out * w.ff2_w.transpose()).rowwise() + w.ff2_b.transpose();

  if (cache != nullptr) {
    cache->ids = ids;
    cache->context = std::move(context);
    cache->mix_pre = std::move(mix_pre);
    cache->mix_out = std::move(mix_out);
    cache->ff1_pre = std::move(ff1_pre);
    cache->ff1_out = std::move(ff1_out);
    cache->embeddings = e;
  }
  return e;
}

ScoreChart biaffine_scores(const MatrixXd& embeddings, const ScorerParams& params) {
  const ScorerWeights& w = params.weights;
  const int n = static_cast<int>(embeddings.rows());
  const int labels = static_cast<int>(w.bias.size());
  if (embeddings.cols() != w.linear.cols())
    throw Error(ErrorCode::dimension_mismatch, "embedding width does not match biaffine size");

  ScoreChart chart(n, labels, 0.0);
  for (int k = 0; k < labels; ++k) {
    const MatrixXd bilinear = embeddings * w.bilinear[k] * embeddings.transpose();
    const VectorXd linear = embeddings * w.linear.row(k).transpose();
    for_each_cell(n, [&](int i, int j) {
      chart(i, j, k) = bilinear(i, j) + (linear(i) + linear(j)) + w.bias(k);
    });
  }
  return chart;
}

ScoreChart potential_normalize(const ScoreChart& chart, NormalizationStats* stats) {
  const int n = chart.length();
  const int labels = chart.labels();
  const double count = double(n) * (n + 1) / 2 * labels;
  double sum = 0.0;
  for_each_cell(n, [&](int i, int j) { sum += chart.cell(i, j).sum(); });
  const double mean = sum / count;
  double sq = 0.0;
  for_each_cell(n, [&](int i, int j) { sq += (chart.cell(i, j) - mean).square().sum(); });
  const double stddev = std::sqrt(sq / count);
  const bool scaled = stddev >= kStdFloor;

  ScoreChart out(n, labels, 0.0);
  for_each_cell(n, [&](int i, int j) {
    out.cell(i, j) = scaled ? ((chart.cell(i, j) - mean) / stddev).eval()
                            : (chart.cell(i, j) - mean).eval();
  });
  if (stats != nullptr) *stats = NormalizationStats{mean, stddev, scaled};
  return out;
}

ScoreChart potential_normalize_backward(const ScoreChart& normalized,
                                        const NormalizationStats& stats,
                                        const ScoreChart& grad_normalized) {
  const int n = normalized.length();
  const int labels = normalized.labels();
  const double count = double(n) * (n + 1) / 2 * labels;
  double g_sum = 0.0;
  double gz_sum = 0.0;
  for_each_cell(n, [&](int i, int j) {
    g_sum += grad_normalized.cell(i, j).sum();
    gz_sum += (grad_normalized.cell(i, j) * normalized.cell(i, j)).sum();
  });
  const double g_mean = g_sum / count;
  const double gz_mean = gz_sum / count;

  ScoreChart out(n, labels, 0.0);
  for_each_cell(n, [&](int i, int j) {
    if (stats.scaled)
      out.cell(i, j) =
          (grad_normalized.cell(i, j) - g_mean - normalized.cell(i, j) * gz_mean) / stats.stddev;
    else
      out.cell(i, j) = grad_normalized.cell(i, j) - g_mean;
  });
  return out;
}

ForwardPass forward(const std::vector<int>& ids, const ScorerParams& params) {
  ForwardPass pass;
  const MatrixXd e = encode(ids, params, &pass.encoded);
  pass.raw = biaffine_scores(e, params);
  pass.normalized = potential_normalize(pass.raw, &pass.stats);
  return pass;
}

ScorerWeights backward(const ForwardPass& pass, const ScorerParams& params,
                       const ScoreChart& score_gradient) {
  const ScorerWeights& w = params.weights;
  const EncodeCache& c = pass.encoded;
  const int n = pass.raw.length();
  const int labels = pass.raw.labels();
  const int d = params.config.dim;
  if (score_gradient.length() != n || score_gradient.labels() != labels)
    throw Error(ErrorCode::dimension_mismatch, "score gradient shape does not match the chart");

  ScorerWeights g = w.zeros_like();
  const ScoreChart raw_grad =
      potential_normalize_backward(pass.normalized, pass.stats, score_gradient);
  const MatrixXd& x = c.embeddings;

  MatrixXd dx = MatrixXd::Zero(n, x.cols());
  MatrixXd gk(n, n);
  for (int k = 0; k < labels; ++k) {
    gk.setZero();
    for_each_cell(n, [&](int i, int j) { gk(i, j) = raw_grad(i, j, k); });
    const VectorXd v = gk.rowwise().sum() + gk.colwise().sum().transpose();
    g.bilinear[k] = x.transpose() * gk * x;
    g.linear.row(k) = (x.transpose() * v).transpose();
    g.bias(k) = gk.sum();
    dx += gk * x * w.bilinear[k].transpose() + gk.transpose() * x * w.bilinear[k] +
          v * w.linear.row(k);
  }

  g.ff2_w = dx.transpose() * c.ff1_out;
  g.ff2_b = dx.colwise().sum().transpose();
  const MatrixXd d_ff1 = relu_backward(dx * w.ff2_w, c.ff1_pre);
  g.ff1_w = d_ff1.transpose() * c.mix_out;
  g.ff1_b = d_ff1.colwise().sum().transpose();
  const MatrixXd d_mix = relu_backward(d_ff1 * w.ff1_w, c.mix_pre);
  g.mix_w = d_mix.transpose() * c.context;
  g.mix_b = d_mix.colwise().sum().transpose();
  const MatrixXd d_context = d_mix * w.mix_w;
  for (int i = 0; i < n; ++i) {
    if (i > 0) g.embed.row(c.ids[i - 1]) += d_context.block(i, 0, 1, d);
    g.embed.row(c.ids[i]) += d_context.block(i, d, 1, d);
    if (i + 1 < n) g.embed.row(c.ids[i + 1]) += d_context.block(i, 2 * d, 1, d);
  }
  return g;
}

ScorerWeights backward(const std::vector<int>& ids, const ScorerParams& params,
                       const ScoreChart& score_gradient) {
  return backward(forward(ids, params), params, score_gradient);
}

}  // namespace pocrf
