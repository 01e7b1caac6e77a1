#include "pocrf/error.hpp"

namespace pocrf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_label: return "UnknownLabel";
    case ErrorCode::out_of_bounds: return "OutOfBounds";
    case ErrorCode::crossing_spans: return "CrossingSpans";
    case ErrorCode::empty_span: return "EmptySpan";
    case ErrorCode::degenerate_chart: return "DegenerateChart";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::bad_config: return "BadConfig";
    case ErrorCode::empty_sentence: return "EmptySentence";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::non_finite_loss: return "NonFiniteLoss";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io: return "Io";
    case ErrorCode::format_version: return "FormatVersion";
  }
  return "Error";
}

}  // namespace pocrf
