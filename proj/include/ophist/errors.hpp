#ifndef OPHIST_ERRORS_HPP
#define OPHIST_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ophist {

enum class ErrorCode {
  syntax_error,
  duplicate_subroutine,
  orphan_instruction,
  empty_subroutine,
  zero_mass,
  no_features,
  kind_mismatch,
  empty_set,
  duplicate_id,
  invalid_permutation,
  empty_rulebook,
  invalid_metric,
  invalid_matrix,
  io_error,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the whole library; `code()` identifies the
// failure class and `line()` is nonzero only for listing parse errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::size_t line = 0)
      : std::runtime_error(std::move(message)), code_(code), line_(line) {}

  ErrorCode code() const { return code_; }
  std::size_t line() const { return line_; }

  // Parse-class errors map to a distinct process exit code in the CLI.
  bool is_parse_error() const {
    return code_ == ErrorCode::syntax_error ||
           code_ == ErrorCode::duplicate_subroutine ||
           code_ == ErrorCode::orphan_instruction ||
           code_ == ErrorCode::io_error;
  }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace ophist

#endif  // OPHIST_ERRORS_HPP
