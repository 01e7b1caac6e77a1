#include "pocrf/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "pocrf/error.hpp"

namespace pocrf {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Error parse_error(std::size_t line, const std::string& what) {
  return Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

CorpusRecord parse_record(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw parse_error(line, "record is not an object");
  CorpusRecord r;
  if (!j.contains("tokens") || !j["tokens"].is_array())
    throw parse_error(line, "field 'tokens' missing or not an array");
  for (const auto& t : j["tokens"]) {
    if (!t.is_string()) throw parse_error(line, "field 'tokens' holds a non-string");
    r.tokens.push_back(t.get<std::string>());
  }
  if (!j.contains("entities") || !j["entities"].is_array())
    throw parse_error(line, "field 'entities' missing or not an array");
  for (const auto& e : j["entities"]) {
    if (!e.is_object()) throw parse_error(line, "entity is not an object");
    for (const char* key : {"start", "end"})
      if (!e.contains(key) || !e[key].is_number_integer())
        throw parse_error(line, std::string("entity field '") + key + "' missing or not an integer");
    if (!e.contains("label") || !e["label"].is_string())
      throw parse_error(line, "entity field 'label' missing or not a string");
    RawSpan s{e["start"].get<int>(), e["end"].get<int>(), e["label"].get<std::string>()};
    if (s.start < 0) throw parse_error(line, "entity field 'start' is negative");
    if (s.end <= s.start) throw parse_error(line, "entity field 'end' must exceed 'start'");
    if (s.end > static_cast<int>(r.tokens.size()))
      throw parse_error(line, "entity field 'end' is past the last token");
    r.entities.push_back(std::move(s));
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class SentenceBuilder {
 public:
  SentenceBuilder(const SynthConfig& config, std::mt19937_64& rng) : config_(config), rng_(rng) {}

  CorpusRecord build() {
    CorpusRecord r;
    next_tag_ = 0;
    const int target = std::uniform_int_distribution<int>(3, config_.max_length)(rng_);
    while (static_cast<int>(r.tokens.size()) < target) {
      const int room = target - static_cast<int>(r.tokens.size());
      if (room >= 3 && coin(0.55))
        entity(r, 1, room);
      else
        filler(r);
    }
    return r;
  }

  // Places `type` at the given depth with a forced child of the next type
  // while depth allows; used to guarantee coverage.
  void chain(CorpusRecord& r, int type, int depth, int levels) {
    const int start = static_cast<int>(r.tokens.size());
    const int tag = take_tag(start);
    r.tokens.push_back(open_marker(type, tag));
    filler(r);
    if (levels > 1) chain(r, (type + 1) % config_.num_entity_types, depth + 1, levels - 1);
    r.tokens.push_back(close_marker(type, tag));
    r.entities.push_back(RawSpan{start, static_cast<int>(r.tokens.size()), entity_type_name(type)});
  }

  void filler(CorpusRecord& r) {
    r.tokens.push_back("w" + std::to_string(std::uniform_int_distribution<int>(0, config_.vocab_size - 1)(rng_)));
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  // Needs room >= 3: two markers and at least one body token.
  void entity(CorpusRecord& r, int depth, int room) {
    const int type = std::uniform_int_distribution<int>(0, config_.num_entity_types - 1)(rng_);
    const int start = static_cast<int>(r.tokens.size());
    const int body_max = std::min(room - 2, std::max(1, config_.max_length / 2));
    const int body = std::uniform_int_distribution<int>(1, body_max)(rng_);
    const int tag = take_tag(start);
    r.tokens.push_back(open_marker(type, tag));
    int used = 0;
    while (used < body) {
      const int left = body - used;
      if (depth < config_.max_nesting_depth && left >= 3 && coin(0.45)) {
        const std::size_t before = r.tokens.size();
        entity(r, depth + 1, left);
        used += static_cast<int>(r.tokens.size() - before);
      } else {
        filler(r);
        ++used;
      }
    }
    r.tokens.push_back(close_marker(type, tag));
    r.entities.push_back(RawSpan{start, static_cast<int>(r.tokens.size()), entity_type_name(type)});
  }

  // Entities are tagged in opening order; a record starting fresh resets.
  int take_tag(int start) {
    if (start == 0) next_tag_ = 0;
    return next_tag_++ % kMarkerTags;
  }

  const SynthConfig& config_;
  std::mt19937_64& rng_;
  int next_tag_ = 0;
};

void canonical_order(CorpusRecord& r) {
  std::sort(r.entities.begin(), r.entities.end(), [](const RawSpan& a, const RawSpan& b) {
    return std::tie(a.start, b.end, a.label) < std::tie(b.start, a.end, b.label);
  });
}

}  // namespace

std::vector<CorpusRecord> read_corpus(std::istream& in) {
  std::vector<CorpusRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record(text, line));
  }
  if (in.bad()) throw Error(ErrorCode::io, "read failure after line " + std::to_string(line));
  return out;
}

std::vector<CorpusRecord> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open corpus '" + path + "'");
  return read_corpus(in);
}

void write_corpus(const std::vector<CorpusRecord>& records, std::ostream& out) {
  for (const auto& r : records) {
    ordered_json j;
    j["tokens"] = r.tokens;
    j["entities"] = ordered_json::array();
    for (const auto& e : r.entities)
      j["entities"].push_back(ordered_json{{"start", e.start}, {"end", e.end}, {"label", e.label}});
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "failed to write corpus");
}

void write_corpus(const std::vector<CorpusRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  write_corpus(records, out);
}

std::string open_marker(int type, int tag) {
  return "<" + entity_type_name(type) + "." + std::to_string(tag) + ">";
}
std::string close_marker(int type, int tag) {
  return "</" + entity_type_name(type) + "." + std::to_string(tag) + ">";
}
std::string entity_type_name(int type) { return "T" + std::to_string(type); }

std::vector<CorpusRecord> gen_synthetic(const SynthConfig& config) {
  if (config.num_sentences < 1 || config.vocab_size < 1 || config.num_entity_types < 1 ||
      config.max_nesting_depth < 1 || config.max_length < 3)
    throw Error(ErrorCode::bad_config,
                "need sentences >= 1, vocab >= 1, types >= 1, depth >= 1, max length >= 3");
  std::mt19937_64 rng(config.seed);
  SentenceBuilder builder(config, rng);
  std::vector<CorpusRecord> out;
  out.reserve(config.num_sentences);
  for (int s = 0; s < config.num_sentences; ++s) out.push_back(builder.build());

  // Coverage: every type once, and one nesting of depth >= 2 when allowed.
  std::set<std::string> types;
  bool nested = false;
  for (const auto& r : out) {
    for (const auto& e : r.entities) types.insert(e.label);
    nested |= nesting_depth(r) >= 2;
  }
  const bool want_nesting = config.max_nesting_depth >= 2 && config.max_length >= 5;
  if (static_cast<int>(types.size()) < config.num_entity_types || (want_nesting && !nested)) {
    // Coverage records replace the first records; each holds as many
    // single-entity chains as fit.
    std::vector<CorpusRecord> forced(1);
    int type = 0;
    if (want_nesting) {
      builder.chain(forced.back(), 0, 1, 2);
      type = std::min(2, config.num_entity_types);
    }
    for (; type < config.num_entity_types; ++type) {
      if (static_cast<int>(forced.back().tokens.size()) + 3 > config.max_length) forced.emplace_back();
      builder.chain(forced.back(), type, 1, 1);
    }
    for (std::size_t f = 0; f < forced.size() && f < out.size(); ++f) out[f] = std::move(forced[f]);
  }
  for (auto& r : out) canonical_order(r);
  return out;
}

int nesting_depth(const CorpusRecord& record) {
  int deepest = 0;
  for (const auto& e : record.entities) {
    int depth = 0;
    for (const auto& other : record.entities)
      if (other.start <= e.start && e.end <= other.end) ++depth;
    deepest = std::max(deepest, depth);
  }
  return deepest;
}

CorpusSplit split_corpus(const std::vector<CorpusRecord>& records, std::uint64_t seed) {
  CorpusSplit split;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto bucket = splitmix64(i ^ splitmix64(seed)) % 10;
    if (bucket < 8)
      split.train.push_back(records[i]);
    else if (bucket == 8)
      split.dev.push_back(records[i]);
    else
      split.test.push_back(records[i]);
  }
  return split;
}

LabelSchema schema_from_corpus(const std::vector<CorpusRecord>& records, int latent_count) {
  std::set<std::string> labels;
  for (const auto& r : records)
    for (const auto& e : r.entities) labels.insert(e.label);
  if (labels.empty()) throw Error(ErrorCode::empty_corpus, "corpus has no labeled entities");
  return LabelSchema(std::vector<std::string>(labels.begin(), labels.end()), latent_count);
}

Vocab vocab_from_corpus(const std::vector<CorpusRecord>& records) {
  std::set<std::string> tokens;
  for (const auto& r : records) tokens.insert(r.tokens.begin(), r.tokens.end());
  return Vocab(std::vector<std::string>(tokens.begin(), tokens.end()));
}

std::vector<Example> preprocess(const std::vector<CorpusRecord>& records, const LabelSchema& schema,
                                const Vocab& vocab, double epsilon) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    Example ex;
    ex.ids = vocab.encode(r.tokens);
    ex.tree = validate_annotation(r.tokens, r.entities, schema);
    ex.symbols = classify_nodes(ex.tree);
    ex.mask = smooth_mask(build_mask(ex.symbols, schema), ex.symbols, epsilon);
    ex.epsilon = epsilon;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace pocrf
