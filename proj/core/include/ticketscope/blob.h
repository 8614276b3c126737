#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ticketscope/matrix.h"

namespace ticketscope {

// Binary matrix blob, little-endian throughout:
//
//   offset  size  field
//   0       8     magic "TSBLOB01"
//   8       4     element type: 1 = float64 (IEEE-754), 2 = uint32
//   12      4     reserved, zero
//   16      8     rows (uint64)
//   24      8     cols (uint64)
//   32      ...   rows * cols elements, row-major
void write_matrix_blob(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_blob(const std::filesystem::path& path);

struct U32Blob {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<std::uint32_t> data;
};
void write_u32_blob(const std::filesystem::path& path, const U32Blob& blob);
U32Blob read_u32_blob(const std::filesystem::path& path);

// manifest.json describing one stored artifact directory.
struct ArtifactManifest {
  static constexpr int kFormatVersion = 1;

  std::string kind;         // "feature_model", "index", "classifier", ...
  std::string feature_set;  // empty when not applicable
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string vocab_hash;
  std::string corpus_hash;
  std::string created_at;  // ISO-8601 UTC, supplied by the caller
  int format_version = kFormatVersion;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static ArtifactManifest from_json(const nlohmann::json& j);
};

void write_manifest(const std::filesystem::path& dir, const ArtifactManifest& manifest);
ArtifactManifest read_manifest(const std::filesystem::path& dir);

// Pretty JSON with a trailing newline; the same value always yields the same bytes.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ticketscope
