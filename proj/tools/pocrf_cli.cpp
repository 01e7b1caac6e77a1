#include <CLI11.hpp>

#include <climits>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pocrf/bench.hpp"
#include "pocrf/corpus.hpp"
#include "pocrf/error.hpp"
#include "pocrf/model_io.hpp"
#include "pocrf/oracle.hpp"
#include "pocrf/parallel.hpp"
#include "pocrf/selfcheck.hpp"
#include "pocrf/train.hpp"

namespace {

using namespace pocrf;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const CLI::Range kPositive(1, INT_MAX);

struct TrainFlags {
  std::string data, model, log;
  int epochs = 20;
  double lr = 1e-3;
  double epsilon = 0.01;
  int latent = 1;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  int batch = 8;
  int threads = default_thread_count();
};

TrainConfig to_config(const TrainFlags& f) {
  TrainConfig c;
  c.epochs = f.epochs;
  c.learning_rate = f.lr;
  c.epsilon_smoothing = f.epsilon;
  c.latent_label_count = f.latent;
  c.seed = f.seed;
  c.batch_size = f.batch;
  c.threads = f.threads;
  return c;
}

void print_report(const EvalReport& report) {
  std::cout << report.to_text() << report.to_line() << '\n';
}

int run_gen(const SynthConfig& config, const std::string& out) {
  write_corpus(gen_synthetic(config), out);
  return 0;
}

int run_train(const TrainFlags& f) {
  const auto config = to_config(f);
  config.validate();
  const auto split = split_corpus(read_corpus(f.data), f.split_seed);
  if (split.train.empty()) throw Error(ErrorCode::empty_corpus, "no training records in '" + f.data + "'");
  const auto result = train(split.train, split.dev, config);
  save_model(result.params, f.model);
  const std::string log_path = f.log.empty() ? f.model + ".log.csv" : f.log;
  std::ofstream log(log_path);
  if (!log) throw Error(ErrorCode::io, "cannot open '" + log_path + "' for writing");
  write_train_log(result.log, log);
  std::cout << "best epoch " << result.best_epoch << " of " << result.log.size() << " ("
            << split.train.size() << " train, " << split.dev.size() << " dev sentences)\n";
  print_report(result.best_dev);
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data, const std::string& out) {
  const auto params = load_model(model_path);
  auto records = read_corpus(data);
  for (auto& r : records) {
    std::vector<Span> spans;
    if (!r.tokens.empty()) spans = predict(params, r.tokens);
    r.entities.clear();
    for (const auto& s : spans)
      r.entities.push_back(RawSpan{s.start, s.end + 1, params.schema.name(s.label)});
  }
  write_corpus(records, out);
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data, int threads) {
  const auto params = load_model(model_path);
  print_report(evaluate(params, read_corpus(data), threads));
  return 0;
}

int run_selfcheck_cmd(const SelfcheckConfig& config) {
  bool ok = true;
  for (const auto& r : pocrf::run_selfcheck(config)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.cases << " checks, worst "
              << r.worst << ")";
    if (!r.passed) std::cout << "  first failure: " << r.detail;
    std::cout << '\n';
    ok &= r.passed;
  }
  std::cout << (ok ? "selfcheck passed" : "selfcheck FAILED") << '\n';
  return ok ? 0 : kExitFailure;
}

int run_bench_cmd(const BenchConfig& config) {
  const auto row = run_bench(config);
  std::cout << bench_csv_header() << '\n' << bench_csv_row(row) << '\n';
  const bool agree = row.max_value_discrepancy <= kBenchTolerance;
  std::cerr << "vanilla " << row.vanilla_time * 1e3 << " ms, masked batched "
            << row.masked_batched_time * 1e3 << " ms, speedup " << row.speedup_ratio << "x, "
            << (agree ? "values agree" : "VALUES DISAGREE") << " (max discrepancy "
            << row.max_value_discrepancy << ")\n";
  return agree ? 0 : kExitFailure;
}

int run_sweep(const TrainFlags& f, const std::vector<int>& counts) {
  auto config = to_config(f);
  config.validate();
  const auto split = split_corpus(read_corpus(f.data), f.split_seed);
  if (split.train.empty()) throw Error(ErrorCode::empty_corpus, "no training records in '" + f.data + "'");
  const auto rows = sweep_latent_labels(split.train, split.dev, config, counts);
  std::cout << "# dev scores by number of latent labels\n"
               "# context: more latent labels have been seen to lower precision and raise recall;\n"
               "# that trend depends on the data and is not checked here\n"
               "latent,best_epoch,precision,recall,f1\n";
  for (const auto& r : rows)
    std::cout << r.latent_count << ',' << r.best_epoch << ',' << r.dev.precision() << ','
              << r.dev.recall() << ',' << r.dev.f1() << '\n';
  return 0;
}

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--data", f.data, "Corpus (JSON lines); split 80/10/10 into train/dev/test")
      ->required();
  cmd->add_option("--epochs", f.epochs, "Training epochs")->check(kPositive);
  cmd->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", f.epsilon, "Structure smoothing for rejected cells, in [0, 1)")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--latent", f.latent, "Number of latent labels (>= 1)")->check(kPositive);
  cmd->add_option("--seed", f.seed, "Initialization and shuffling seed");
  cmd->add_option("--split-seed", f.split_seed, "Seed of the train/dev/test split");
  cmd->add_option("--batch", f.batch, "Sentences per optimizer step")->check(kPositive);
  cmd->add_option("--threads", f.threads, "Worker threads (default: POCRF_THREADS or all cores)")
      ->check(kPositive);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested named-entity recognition with partially-observed TreeCRFs"};
  app.require_subcommand(1);

  SynthConfig synth;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic nested-entity corpus");
  gen->add_option("--out", gen_out, "Output corpus path")->required();
  gen->add_option("--sentences", synth.num_sentences, "Number of sentences")->check(kPositive);
  gen->add_option("--types", synth.num_entity_types, "Number of entity types")->check(kPositive);
  gen->add_option("--depth", synth.max_nesting_depth, "Maximum nesting depth")->check(kPositive);
  gen->add_option("--vocab", synth.vocab_size, "Filler vocabulary size")->check(kPositive);
  gen->add_option("--max-length", synth.max_length, "Maximum sentence length")->check(CLI::Range(3, 1000));
  gen->add_option("--seed", synth.seed, "Generator seed");

  TrainFlags tf;
  auto* train_cmd = app.add_subcommand("train", "Train a model and report dev scores");
  add_train_flags(train_cmd, tf);
  train_cmd->add_option("--model", tf.model, "Output model path")->required();
  train_cmd->add_option("--log", tf.log, "Training log CSV (default: <model>.log.csv)");

  std::string model_path, data_path, out_path;
  int threads = default_thread_count();
  auto* predict_cmd = app.add_subcommand("predict", "Decode entities for every record");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--data", data_path, "Input corpus")->required();
  predict_cmd->add_option("--out", out_path, "Output corpus with predicted entities")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold entities");
  eval_cmd->add_option("--model", model_path, "Model file")->required();
  eval_cmd->add_option("--data", data_path, "Gold corpus")->required();
  eval_cmd->add_option("--threads", threads, "Worker threads")->check(kPositive);

  SelfcheckConfig check;
  auto* selfcheck = app.add_subcommand("selfcheck", "Check the dynamic programs against brute force");
  selfcheck->add_option("--max-n", check.max_n, "Longest sentence enumerated")
      ->check(CLI::Range(1, oracle::kMaxLength));
  selfcheck->add_option("--cases", check.cases, "Random instances per check")->check(kPositive);
  selfcheck->add_option("--seed", check.seed, "Instance seed");
  selfcheck->add_flag("--inject-fault", check.options.flip_split_sign)->group("");

  BenchConfig bench;
  bench.threads = default_thread_count();
  auto* bench_cmd = app.add_subcommand("bench", "Time vanilla vs batched masked partial marginalization");
  bench_cmd->add_option("--batch", bench.batch, "Sentences per batch")->check(kPositive);
  bench_cmd->add_option("--length", bench.length, "Sentence length")->check(kPositive);
  bench_cmd->add_option("--labels", bench.labels, "Label count (>= 2)")->check(CLI::Range(2, 1 << 16));
  bench_cmd->add_option("--repeats", bench.repeats, "Timed repeats (best is kept)")->check(kPositive);
  bench_cmd->add_option("--threads", bench.threads, "Threads for the batched path")->check(kPositive);
  bench_cmd->add_option("--entity-rate", bench.entity_rate, "Annotation density in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--seed", bench.seed, "Instance seed");

  TrainFlags sf;
  std::vector<int> counts{1, 2, 3, 4};
  auto* sweep = app.add_subcommand("sweep-latent", "Train once per latent-label count");
  add_train_flags(sweep, sf);
  sweep->add_option("--counts", counts, "Latent-label counts")->delimiter(',')->check(kPositive);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return run_gen(synth, gen_out);
    if (*train_cmd) return run_train(tf);
    if (*predict_cmd) return run_predict(model_path, data_path, out_path);
    if (*eval_cmd) return run_eval(model_path, data_path, threads);
    if (*selfcheck) return run_selfcheck_cmd(check);
    if (*bench_cmd) return run_bench_cmd(bench);
    if (*sweep) return run_sweep(sf, counts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::bad_config || e.code() == ErrorCode::empty_corpus;
    return usage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
