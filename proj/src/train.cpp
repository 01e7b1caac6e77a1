#include "pocrf/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "pocrf/decode.hpp"
#include "pocrf/error.hpp"
#include "pocrf/marginals.hpp"
#include "pocrf/optimizer.hpp"
#include "pocrf/parallel.hpp"

namespace pocrf {
namespace {

struct ExampleGrad {
  double loss = 0.0;
  double max_abs_score = 0.0;
  ScorerWeights grad;
};

ExampleGrad example_gradient(const Example& ex, const ScorerParams& params) {
  const ForwardPass pass = forward(ex.ids, params);
  const auto lg = loss_and_score_gradient(pass.normalized, ex.mask);
  ExampleGrad out;
  out.loss = lg.loss;
  for_each_cell(pass.raw.length(), [&](int i, int j) {
    out.max_abs_score = std::max(out.max_abs_score, pass.raw.cell(i, j).abs().maxCoeff());
  });
  if (std::isfinite(out.loss)) out.grad = backward(pass, params, lg.grad);
  return out;
}

std::vector<Eigen::Map<Eigen::VectorXd>> flat_views(ScorerWeights& w) {
  std::vector<Eigen::Map<Eigen::VectorXd>> out;
  w.for_each_array([&](const char*, double* d, Eigen::Index s) { out.emplace_back(d, s); });
  return out;
}

std::vector<Eigen::Map<const Eigen::VectorXd>> flat_views(const ScorerWeights& w) {
  std::vector<Eigen::Map<const Eigen::VectorXd>> out;
  w.for_each_array([&](const char*, const double* d, Eigen::Index s) { out.emplace_back(d, s); });
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::bad_config, "learning rate must be positive");
  if (!(epsilon_smoothing >= 0.0 && epsilon_smoothing < 1.0))
    throw Error(ErrorCode::bad_config, "smoothing epsilon must lie in [0, 1)");
  if (epochs < 1) throw Error(ErrorCode::bad_config, "epochs must be at least 1");
  if (batch_size < 1) throw Error(ErrorCode::bad_config, "batch size must be at least 1");
  if (latent_label_count < 1) throw Error(ErrorCode::bad_config, "need at least one latent label");
  if (threads < 1) throw Error(ErrorCode::bad_config, "threads must be at least 1");
}

TrainResult train(const std::vector<CorpusRecord>& train_records,
                  const std::vector<CorpusRecord>& dev, const TrainConfig& config) {
  config.validate();
  if (train_records.empty()) throw Error(ErrorCode::empty_corpus, "training corpus is empty");

  const LabelSchema schema = schema_from_corpus(train_records, config.latent_label_count);
  Vocab vocab = vocab_from_corpus(train_records);
  const std::vector<Example> examples =
      preprocess(train_records, schema, vocab, config.epsilon_smoothing);

  TrainResult result;
  ScorerParams params = init_params(std::move(vocab), schema, config.scorer, config.seed);
  Adam adam(AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay});
  result.params = params;
  double best_f1 = -1.0;

  std::vector<int> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<ExampleGrad> batch_grads;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::mt19937_64 shuffle_rng(config.seed * 1000003ull + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    long seen = 0;
    bool stopped = false;

    for (std::size_t b0 = 0; b0 < order.size(); b0 += config.batch_size) {
      const int count = static_cast<int>(std::min<std::size_t>(config.batch_size, order.size() - b0));
      batch_grads.assign(count, ExampleGrad{});
      parallel_chunks(count, config.threads, [&](int lo, int hi) {
        for (int e = lo; e < hi; ++e) batch_grads[e] = example_gradient(examples[order[b0 + e]], params);
      });

      ScorerWeights total = params.weights.zeros_like();
      for (int e = 0; e < count; ++e) {
        const auto& g = batch_grads[e];
        if (!std::isfinite(g.loss) || !g.grad.all_finite()) {
          throw Error(ErrorCode::non_finite_loss,
                      "sentence " + std::to_string(order[b0 + e]) + " loss " + std::to_string(g.loss) +
                          " max |score| " + std::to_string(g.max_abs_score));
        }
        loss_sum += g.loss;
        total += g.grad;
      }
      seen += count;
      for (auto view : flat_views(total)) view /= double(count);
      const ScorerWeights& averaged = total;
      adam.step(flat_views(params.weights), flat_views(averaged));
      if (config.max_steps > 0 && adam.steps() >= config.max_steps) {
        stopped = true;
        break;
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = seen > 0 ? loss_sum / double(seen) : 0.0;
    EvalReport report;
    if (!dev.empty()) {
      report = evaluate(params, dev, config.threads);
      rec.dev_precision = report.precision();
      rec.dev_recall = report.recall();
      rec.dev_f1 = report.f1();
    }
    result.log.push_back(rec);
    if (dev.empty() || rec.dev_f1 > best_f1) {
      best_f1 = rec.dev_f1;
      result.params = params;
      result.best_epoch = epoch;
      result.best_dev = report;
    }
    if (stopped) break;
  }
  return result;
}

void write_train_log(const std::vector<EpochRecord>& log, std::ostream& out) {
  out << "epoch,mean_loss,dev_P,dev_R,dev_F1\n";
  char buf[160];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%.8f,%.6f,%.6f,%.6f\n", r.epoch, r.mean_loss,
                  r.dev_precision, r.dev_recall, r.dev_f1);
    out << buf;
  }
}

std::vector<Span> predict(const ScorerParams& params, const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error(ErrorCode::empty_sentence, "cannot predict on an empty sentence");
  const ForwardPass pass = forward(params.vocab.encode(tokens), params);
  return extract_entities(cky_decode(pass.normalized), params.schema);
}

EvalReport evaluate(const ScorerParams& params, const std::vector<CorpusRecord>& records,
                    int threads) {
  if (records.empty()) throw Error(ErrorCode::empty_corpus, "evaluation corpus is empty");
  std::vector<std::vector<Span>> gold(records.size()), pred(records.size());
  parallel_chunks(static_cast<int>(records.size()), threads, [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      gold[r] = validate_annotation(records[r].tokens, records[r].entities, params.schema).entities;
      pred[r] = predict(params, records[r].tokens);
    }
  });
  std::vector<std::string> names;
  for (int k = 0; k < params.schema.size(); ++k) names.push_back(params.schema.name(k));
  EvalReport report;
  for (std::size_t r = 0; r < records.size(); ++r) report.add(gold[r], pred[r], names);
  return report;
}

std::vector<SweepRow> sweep_latent_labels(const std::vector<CorpusRecord>& train_records,
                                          const std::vector<CorpusRecord>& dev,
                                          const TrainConfig& config, const std::vector<int>& counts) {
  std::vector<SweepRow> rows;
  for (int count : counts) {
    if (count < 1) throw Error(ErrorCode::bad_config, "latent label counts must be at least 1");
    TrainConfig c = config;
    c.latent_label_count = count;
    const TrainResult r = train(train_records, dev, c);
    rows.push_back(SweepRow{count, r.best_epoch, r.best_dev});
  }
  return rows;
}

}  // namespace pocrf
