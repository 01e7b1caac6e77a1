#include "pocrf/annotation.hpp"

#include <algorithm>

namespace pocrf {
namespace {

std::string describe(const Span& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + "]";
}

}  // namespace

PartialTree make_partial_tree(int n, std::vector<Span> entities, const LabelSchema& schema) {
  if (n <= 0) throw Error(ErrorCode::empty_sentence, "sentence has no tokens");
  for (const auto& s : entities) {
    if (!schema.is_observed(s.label))
      throw Error(ErrorCode::unknown_label, "label index " + std::to_string(s.label) +
                                                " is not an observed label");
    if (s.start < 0 || s.end >= n || s.start > s.end)
      throw Error(ErrorCode::out_of_bounds, "span " + describe(s) + " outside sentence of length " +
                                                std::to_string(n));
  }
  // First crossing pair in input order.
  for (std::size_t a = 0; a < entities.size(); ++a)
    for (std::size_t b = a + 1; b < entities.size(); ++b)
      if (crosses(entities[a].start, entities[a].end, entities[b].start, entities[b].end))
        throw Error(ErrorCode::crossing_spans,
                    "spans " + describe(entities[a]) + " and " + describe(entities[b]) + " cross");

  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
  return PartialTree{n, std::move(entities)};
}

PartialTree validate_annotation(const std::vector<std::string>& tokens,
                                const std::vector<RawSpan>& raw_spans,
                                const LabelSchema& schema) {
  if (tokens.empty()) throw Error(ErrorCode::empty_sentence, "sentence has no tokens");
  const int n = static_cast<int>(tokens.size());
  std::vector<Span> spans;
  spans.reserve(raw_spans.size());
  for (const auto& raw : raw_spans) {
    auto label = schema.find(raw.label);
    if (!label) throw Error(ErrorCode::unknown_label, "label '" + raw.label + "' not in schema");
    if (raw.start < 0 || raw.end < 0 || raw.start > n || raw.end > n)
      throw Error(ErrorCode::out_of_bounds, "offsets (" + std::to_string(raw.start) + "," +
                                                std::to_string(raw.end) + ") outside [0," +
                                                std::to_string(n) + "]");
    if (raw.start >= raw.end)
      throw Error(ErrorCode::empty_span, "span (" + std::to_string(raw.start) + "," +
                                             std::to_string(raw.end) + ") is empty");
    spans.push_back(Span{raw.start, raw.end - 1, *label});
  }
  return make_partial_tree(n, std::move(spans), schema);
}

std::vector<RawSpan> to_raw_spans(const std::vector<Span>& spans, const LabelSchema& schema) {
  std::vector<RawSpan> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.push_back(RawSpan{s.start, s.end + 1, schema.name(s.label)});
  return out;
}

}  // namespace pocrf
