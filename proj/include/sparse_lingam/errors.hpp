#pragma once

#include <stdexcept>
#include <string>

namespace sparse_lingam {

/// Failure categories. The CLI maps each category onto a distinct exit code.
enum class ErrorKind {
  parse,           // malformed input text
  missing_data,    // empty or NaN cell where a complete table is required
  degenerate,      // zero-variance column, zero row, zero diagonal
  rank_deficient,  // covariance not of full rank
  parameter,       // invalid configuration value
  singular,        // singular demixing matrix
  divergence,      // non-finite or exploding iterate
  selection,       // cross-validation could not select anything
  io,              // file system failure
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sparse_lingam
