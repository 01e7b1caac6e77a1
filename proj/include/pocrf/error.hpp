#ifndef POCRF_ERROR_HPP
#define POCRF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pocrf {

enum class ErrorCode {
  unknown_label,
  out_of_bounds,
  crossing_spans,
  empty_span,
  degenerate_chart,
  dimension_mismatch,
  too_large,
  bad_config,
  empty_sentence,
  empty_corpus,
  non_finite_loss,
  parse_error,
  io,
  format_version,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pocrf

#endif  // POCRF_ERROR_HPP
