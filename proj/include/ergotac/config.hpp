#pragma once

#include <ergotac/explorer.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

namespace ergotac
{
inline constexpr int kConfigSchemaVersion = 1;

/// Configuration that fails schema validation. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& j);

/// Fully resolved config: every field and every named seed written out.
nlohmann::json to_json(const RunConfig& cfg);

/// Strict parse: unknown keys, wrong types and invalid values raise ConfigError.
/// `seed_override` replaces the top-level "seed" before named seeds are derived.
RunConfig run_config_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads and validates a config file. Missing or unparsable files raise ConfigError naming the path.
RunConfig load_run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace ergotac
