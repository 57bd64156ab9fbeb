#pragma once

// Model file format: "SYHD" magic, format version, model kind, then chained
// sections (IMEM item memory, HDMD classifier, MLPM extractor), closed by an
// FNV-1a 64 checksum over everything before it. Round trips are bit-exact;
// magic, version, and checksum failures raise distinct error types.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "syhd/errors.hpp"
#include "syhd/hd_classifier.hpp"
#include "syhd/mlp.hpp"

namespace syhd {

constexpr std::uint16_t kModelFormatVersion = 1;

enum class ModelKind : std::uint8_t { kHdl = 1, kNnHdl = 2, kSynergic = 3 };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

class BadMagicError : public ParseError {
 public:
  explicit BadMagicError(const std::string& what) : ParseError(what) {}
};
class BadVersionError : public ParseError {
 public:
  explicit BadVersionError(const std::string& what) : ParseError(what) {}
};
class BadChecksumError : public ParseError {
 public:
  explicit BadChecksumError(const std::string& what) : ParseError(what) {}
};

struct ModelBundle {
  ModelKind kind = ModelKind::kHdl;
  HdModel hd;
  std::optional<MlpModel> mlp;           // nn_hdl and synergic only
  std::vector<long long> label_values;   // dense index - 1 -> original label

  bool operator==(const ModelBundle&) const = default;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_model(const ModelBundle& bundle);
ModelBundle deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace syhd
