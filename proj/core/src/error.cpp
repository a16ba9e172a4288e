#include "dnsguard/error.hpp"

#include <utility>

namespace dnsguard {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ParseError: return "ParseError";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::InvalidWidth: return "InvalidWidth";
    case Errc::SingularUpdate: return "SingularUpdate";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::NeedTwoCenters: return "NeedTwoCenters";
    case Errc::DegenerateDesign: return "DegenerateDesign";
    case Errc::EmptyData: return "EmptyData";
    case Errc::Unlabeled: return "Unlabeled";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::ConfigError: return "ConfigError";
    case Errc::TrainingError: return "TrainingError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

namespace {

std::string format_parse_message(std::size_t line, const std::string& field,
                                 const std::string& message) {
  std::string out = "parse error";
  if (line != 0) out += " at line " + std::to_string(line);
  if (!field.empty()) out += " (field '" + field + "')";
  out += ": " + message;
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::string field, const std::string& message)
    : Error(Errc::ParseError, format_parse_message(line, field, message)),
      line_(line),
      field_(std::move(field)) {}

}  // namespace dnsguard
