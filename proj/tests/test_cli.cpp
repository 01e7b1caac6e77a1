#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pocrf/annotation.hpp"
#include "pocrf/corpus.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Workdir {
 public:
  Workdir() {
    dir_ = fs::temp_directory_path() / ("pocrf_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Run run(const std::string& args) const {
    const std::string cmd = std::string("POCRF_THREADS=2 '") + POCRF_CLI_PATH + "' " + args + " > '" +
                            path("stdout") + "' 2> '" + path("stderr") + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(path("stdout"));
    r.err = slurp(path("stderr"));
    return r;
  }

 private:
  fs::path dir_;
};

const Workdir& work() {
  static const Workdir w;
  return w;
}

// A small corpus and a model trained on it, shared by the tests below.
const std::string& small_corpus() {
  static const std::string path = [] {
    const auto p = work().path("small.jsonl");
    REQUIRE(work().run("gen --out " + p + " --sentences 400 --seed 1").code == 0);
    return p;
  }();
  return path;
}

const std::string& small_model() {
  static const std::string path = [] {
    const auto p = work().path("small.model");
    REQUIRE(work().run("train --data " + small_corpus() + " --model " + p + " --epochs 4").code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const auto& w = work();
  const auto missing_out = w.run("gen --sentences 5");
  CHECK(missing_out.code == 2);
  CHECK(missing_out.err.find("--out") != std::string::npos);
  CHECK(w.run("").code == 2);
  CHECK(w.run("frobnicate").code == 2);
  CHECK(w.run("train --data x --model y --latent 0").code == 2);
  CHECK(w.run("train --data x --model y --epsilon 1").code == 2);
  CHECK(w.run("selfcheck --max-n 9").code == 2);
  CHECK(w.run("bench --batch 0").code == 2);
  CHECK(w.run("bench --length -3").code == 2);
  CHECK(w.run("sweep-latent --data x --counts 1,0").code == 2);
  CHECK(w.run("--help").code == 0);
}

TEST_CASE("gen is byte-deterministic") {
  const auto& w = work();
  const auto a = w.path("a.jsonl"), b = w.path("b.jsonl");
  CHECK(w.run("gen --out " + a + " --sentences 2000 --types 3 --depth 3 --seed 0").code == 0);
  CHECK(w.run("gen --out " + b + " --sentences 2000 --types 3 --depth 3 --seed 0").code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(pocrf::read_corpus(a).size() == 2000);
  CHECK(w.run("gen --out /nonexistent/dir/x.jsonl").code == 1);
}

TEST_CASE("train writes a model and a log and reports dev scores") {
  const auto& w = work();
  const auto model = small_model();
  CHECK(fs::exists(model));
  const std::string log = slurp(model + ".log.csv");
  CHECK(log.rfind("epoch,mean_loss,dev_P,dev_R,dev_F1\n", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 5);

  const auto r = w.run("train --data " + small_corpus() + " --model " + w.path("eps0.model") +
                       " --epochs 1 --epsilon 0 --latent 2 --log " + w.path("eps0.csv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("EVAL precision=") != std::string::npos);
  CHECK(fs::exists(w.path("eps0.csv")));
  CHECK(w.run("train --data " + w.path("missing.jsonl") + " --model " + w.path("m")).code == 1);
}

TEST_CASE("predict writes valid annotations and eval of them scores 1") {
  const auto& w = work();
  const auto out = w.path("pred.jsonl");
  REQUIRE(w.run("predict --model " + small_model() + " --data " + small_corpus() + " --out " + out).code == 0);
  const auto records = pocrf::read_corpus(out);
  REQUIRE(records.size() == pocrf::read_corpus(small_corpus()).size());
  const auto labels = pocrf::LabelSchema({"T0", "T1", "T2"}, 1);
  for (const auto& r : records) CHECK_NOTHROW(pocrf::validate_annotation(r.tokens, r.entities, labels));

  std::size_t predicted = 0;
  for (const auto& r : records) predicted += r.entities.size();
  REQUIRE(predicted > 0);

  const auto self = w.run("eval --model " + small_model() + " --data " + out);
  CHECK(self.code == 0);
  CHECK(self.out.find("f1=1.000000") != std::string::npos);
  CHECK(self.out.find("micro") != std::string::npos);

  const auto gold = w.run("eval --model " + small_model() + " --data " + small_corpus());
  CHECK(gold.code == 0);
  CHECK(gold.out.find("EVAL precision=") != std::string::npos);
}

TEST_CASE("eval failures") {
  const auto& w = work();
  std::ofstream(w.path("empty.jsonl")).close();
  CHECK(w.run("eval --model " + small_model() + " --data " + w.path("empty.jsonl")).code == 2);

  // Bump the format version stored right after the 8-byte magic.
  std::string bytes = slurp(small_model());
  bytes[8] = 7;
  std::ofstream(w.path("future.model"), std::ios::binary) << bytes;
  const auto r = w.run("eval --model " + w.path("future.model") + " --data " + small_corpus());
  CHECK(r.code == 1);
  CHECK(r.err.find("version 7") != std::string::npos);
  CHECK(r.err.find("version 1") != std::string::npos);

  std::ofstream(w.path("bad.jsonl")) << "{\"tokens\": [\"a\"], \"entities\": [{\"start\": 0}]}\n";
  const auto parse = w.run("eval --model " + small_model() + " --data " + w.path("bad.jsonl"));
  CHECK(parse.code == 1);
  CHECK(parse.err.find("line 1") != std::string::npos);
}

TEST_CASE("selfcheck passes and catches an injected fault") {
  const auto& w = work();
  const auto ok = w.run("selfcheck --max-n 5 --cases 30 --seed 3");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  const auto bad = w.run("selfcheck --max-n 5 --cases 30 --inject-fault");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("bench emits CSV") {
  const auto r = work().run("bench --batch 4 --length 12 --labels 4 --repeats 1 --threads 2");
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header ==
        "batch_size,sentence_length,label_count,threads,entity_rate,vanilla_time,"
        "masked_batched_time,speedup_ratio,max_value_discrepancy");
  CHECK(row.rfind("4,12,4,2,0.1,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 8);
}

TEST_CASE("sweep-latent prints one row per count") {
  const auto r = work().run("sweep-latent --data " + small_corpus() + " --counts 1,2 --epochs 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("latent,best_epoch,precision,recall,f1\n") != std::string::npos);
  CHECK(r.out.find("\n1,1,") != std::string::npos);
  CHECK(r.out.find("\n2,1,") != std::string::npos);
}
