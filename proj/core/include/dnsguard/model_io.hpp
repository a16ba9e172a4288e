#pragma once

// JSON model files tagged with "type": "mlp" | "rbf" | "som". Every weight is
// written at full round-trip precision alongside the training config and the
// training report.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "dnsguard/mlp.hpp"
#include "dnsguard/rbf.hpp"
#include "dnsguard/som.hpp"

namespace dnsguard::classifiers {

struct MlpRecord {
  MlpModel model;
  MlpTrainConfig config;
  TrainReport report;
};

struct RbfRecord {
  RbfModel model;
  RbfTrainConfig config;
  TrainReport report;
};

struct SomRecord {
  SomModel model;
  SomTrainConfig config;
  TrainReport report;
};

using ModelRecord = std::variant<MlpRecord, RbfRecord, SomRecord>;

/// `provenance` is stored verbatim (e.g. seed and config hash).
void write_model(std::ostream& out, const ModelRecord& record, const std::string& provenance = {});
/// Throws ParseError on malformed or mistyped documents.
ModelRecord read_model(std::istream& in, std::string* provenance = nullptr);

void save_model(const std::filesystem::path& path, const ModelRecord& record,
                const std::string& provenance = {});
ModelRecord load_model(const std::filesystem::path& path, std::string* provenance = nullptr);

/// Classify with whichever model the record holds.
ClassLabel classify(const ModelRecord& record, const FeatureVector& x);

}  // namespace dnsguard::classifiers
