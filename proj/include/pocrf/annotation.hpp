#ifndef POCRF_ANNOTATION_HPP
#define POCRF_ANNOTATION_HPP

#include <string>
#include <vector>

#include "pocrf/chart.hpp"
#include "pocrf/label_schema.hpp"

namespace pocrf {

// Span as it appears in corpus files: 0-based, end-exclusive, named label.
struct RawSpan {
  int start = 0;
  int end = 0;
  std::string label;

  bool operator==(const RawSpan&) const = default;
};

// Observed annotation of one sentence: a laminar set of labeled spans,
// end-inclusive, sorted by (start, end, label), no duplicates.
struct PartialTree {
  int n = 0;
  std::vector<Span> entities;

  bool operator==(const PartialTree&) const = default;
};

PartialTree validate_annotation(const std::vector<std::string>& tokens,
                                const std::vector<RawSpan>& raw_spans,
                                const LabelSchema& schema);

// Same checks for spans already in the internal convention.
PartialTree make_partial_tree(int n, std::vector<Span> entities, const LabelSchema& schema);

std::vector<RawSpan> to_raw_spans(const std::vector<Span>& spans, const LabelSchema& schema);

}  // namespace pocrf

#endif  // POCRF_ANNOTATION_HPP
