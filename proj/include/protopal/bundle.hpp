#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "protopal/model.hpp"

namespace protopal {

inline constexpr int kBundleVersion = 1;

/// Self-describing container of trained disease models. Serialized as one
/// JSON document; numeric arrays are base64 little-endian float64, row-major,
/// with explicit shapes, so save/load is bit-exact.
struct ModelBundle {
  int version = kBundleVersion;
  FeatureSchema schema;
  Standardizer standardizer;
  std::vector<TrainedDiseaseModel> models;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> warnings;  // filled on load

  const TrainedDiseaseModel* find(const std::string& disease) const;
};

void save_bundle(const ModelBundle& bundle, std::ostream& out);
ModelBundle load_bundle(std::istream& in);
void save_bundle_file(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle_file(const std::string& path);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

}  // namespace protopal
