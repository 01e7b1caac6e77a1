#ifndef POCRF_CORPUS_HPP
#define POCRF_CORPUS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pocrf/annotation.hpp"
#include "pocrf/label_schema.hpp"
#include "pocrf/mask.hpp"
#include "pocrf/scorer.hpp"

namespace pocrf {

// One sentence as stored on disk; entity offsets are end-exclusive.
struct CorpusRecord {
  std::vector<std::string> tokens;
  std::vector<RawSpan> entities;

  bool operator==(const CorpusRecord&) const = default;
};

// One JSON object per line:
//   {"tokens":["a","b"],"entities":[{"start":0,"end":2,"label":"PER"}]}
// Blank lines are skipped. Writing emits exactly this key order.
std::vector<CorpusRecord> read_corpus(std::istream& in);
std::vector<CorpusRecord> read_corpus(const std::string& path);
void write_corpus(const std::vector<CorpusRecord>& records, std::ostream& out);
void write_corpus(const std::vector<CorpusRecord>& records, const std::string& path);

struct SynthConfig {
  int num_sentences = 2000;
  int vocab_size = 200;
  int num_entity_types = 3;
  int max_nesting_depth = 3;
  int max_length = 20;
  std::uint64_t seed = 0;
};

// Marker tokens delimiting an entity of the given type. The tag is the
// entity's opening-order index in its sentence modulo kMarkerTags, so the
// open and close markers of one entity pair up by token identity.
inline constexpr int kMarkerTags = 8;
std::string open_marker(int type, int tag);
std::string close_marker(int type, int tag);
std::string entity_type_name(int type);

// Nested-entity corpus: an entity is open-marker, body, close-marker, its
// body mixing filler words with child entities. Gold spans run from marker
// to marker inclusive.
std::vector<CorpusRecord> gen_synthetic(const SynthConfig& config);

// Deepest nesting level among a record's entities (0 when it has none).
int nesting_depth(const CorpusRecord& record);

struct CorpusSplit {
  std::vector<CorpusRecord> train;
  std::vector<CorpusRecord> dev;
  std::vector<CorpusRecord> test;
};

// 80/10/10 by a hash of record index and seed.
CorpusSplit split_corpus(const std::vector<CorpusRecord>& records, std::uint64_t seed);

// Observed labels are the sorted distinct entity labels.
LabelSchema schema_from_corpus(const std::vector<CorpusRecord>& records, int latent_count);
Vocab vocab_from_corpus(const std::vector<CorpusRecord>& records);

// A record ready for training: token ids and its precomputed mask.
struct Example {
  std::vector<int> ids;
  PartialTree tree;
  SymbolTree symbols;
  ChartMask mask;
  double epsilon = 0.0;
};

// validate -> classify_nodes -> build_mask -> smooth_mask, per record.
std::vector<Example> preprocess(const std::vector<CorpusRecord>& records, const LabelSchema& schema,
                                const Vocab& vocab, double epsilon);

}  // namespace pocrf

#endif  // POCRF_CORPUS_HPP
