#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "gna/gna_model.hpp"
#include "gna/text.hpp"

namespace gna {

// Binary layout, all integers and floats little-endian:
//   "GNAR" | u32 version | u64 metadata bytes | metadata JSON
//   u64 tensor count | per tensor: u32 name bytes, name, u32 rank, u64 dims..., f64 values...
inline constexpr char kCheckpointMagic[4] = {'G', 'N', 'A', 'R'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct LoadedCheckpoint {
  GnaModel model;
  Vocabulary vocab;
  nlohmann::json config;  // training config snapshot stored at save time
};

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Writes to a temporary sibling and renames it over path, so a failure never
// leaves a partial file at path.
void save_checkpoint(const GnaModel& model, const Vocabulary& vocab, const nlohmann::json& config,
                     const std::filesystem::path& path);
std::string serialize_checkpoint(const GnaModel& model, const Vocabulary& vocab, const nlohmann::json& config);

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);
LoadedCheckpoint deserialize_checkpoint(const std::string& bytes, const std::string& source = "<memory>");

}  // namespace gna
