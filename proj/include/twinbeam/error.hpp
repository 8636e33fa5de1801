#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace twinbeam {

enum class ErrorCode {
  invalid_argument,
  invalid_state,
  invalid_basis,
  internal,
  plugin_contract,
  insufficient_data,
  parse,
  io,
};

const char* to_string(ErrorCode code);

/// Exception type for every failure raised by the library. `diagnostics`
/// carries numeric context when there is any (e.g. the symplectic spectrum of
/// a state that failed a physicality check).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<double> diagnostics = {})
      : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<double>& diagnostics() const noexcept { return diagnostics_; }

 private:
  ErrorCode code_;
  std::vector<double> diagnostics_;
};

/// Parse failure with the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorCode::parse, source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace twinbeam
