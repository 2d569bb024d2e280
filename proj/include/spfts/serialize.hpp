#pragma once

#include <string>

#include <json.hpp>

#include "spfts/diagnostics.hpp"
#include "spfts/dgp.hpp"
#include "spfts/rank.hpp"

namespace spfts {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const json& j);

json to_json(const SpectralReport& report);
SpectralReport spectral_report_from_json(const json& j);

json to_json(const EffectiveRankReport& report);

// FNV-1a over the canonical (sorted-key) dump; stamped on every output file.
std::string config_hash(const json& j);

json load_json_file(const std::string& path);     // DataError on I/O, ConfigError on parse
void write_json_file(const std::string& path, const json& j);

}  // namespace spfts
