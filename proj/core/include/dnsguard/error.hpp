#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dnsguard {

enum class Errc {
  InvalidConfig,
  ParseError,
  ZeroVector,
  InvalidWidth,
  SingularUpdate,
  TooFewPoints,
  NeedTwoCenters,
  DegenerateDesign,
  EmptyData,
  Unlabeled,
  LengthMismatch,
  TooFewSamples,
  ConfigError,
  TrainingError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed trace, dataset, model or config input. `line` is 1-based; 0 when
/// the problem is not tied to a line (e.g. truncated stream).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace dnsguard
