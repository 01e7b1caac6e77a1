#ifndef POCRF_TRAIN_HPP
#define POCRF_TRAIN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pocrf/corpus.hpp"
#include "pocrf/metrics.hpp"
#include "pocrf/scorer.hpp"

namespace pocrf {

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 20;
  int batch_size = 8;
  double epsilon_smoothing = 0.01;
  std::uint64_t seed = 0;
  int latent_label_count = 1;
  double weight_decay = 0.0;
  ScorerConfig scorer;
  int threads = 1;
  // Stop after this many optimizer steps (0 = no limit).
  long max_steps = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double dev_precision = 0.0;
  double dev_recall = 0.0;
  double dev_f1 = 0.0;
};

struct TrainResult {
  ScorerParams params;  // best dev-F1 checkpoint (earliest on ties)
  int best_epoch = 0;
  EvalReport best_dev;
  std::vector<EpochRecord> log;
};

// Trains on `train`, selecting the checkpoint by F1 on `dev` (the last
// epoch when dev is empty). Deterministic in config.seed, independent of
// config.threads.
TrainResult train(const std::vector<CorpusRecord>& train, const std::vector<CorpusRecord>& dev,
                  const TrainConfig& config);

// Training log as CSV: header "epoch,mean_loss,dev_P,dev_R,dev_F1", one row
// per epoch.
void write_train_log(const std::vector<EpochRecord>& log, std::ostream& out);

// encode -> biaffine -> potential_normalize -> cky_decode -> extract_entities.
std::vector<Span> predict(const ScorerParams& params, const std::vector<std::string>& tokens);

EvalReport evaluate(const ScorerParams& params, const std::vector<CorpusRecord>& records,
                    int threads = 1);

struct SweepRow {
  int latent_count = 0;
  int best_epoch = 0;
  EvalReport dev;
};

std::vector<SweepRow> sweep_latent_labels(const std::vector<CorpusRecord>& train,
                                          const std::vector<CorpusRecord>& dev,
                                          const TrainConfig& config, const std::vector<int>& counts);

}  // namespace pocrf

#endif  // POCRF_TRAIN_HPP
