#pragma once

#include <string>

#include "fkdv/evolution.hpp"
#include "fkdv/nsoliton.hpp"
#include "fkdv_cli/io.hpp"

namespace fkdv::cli {

/// Strict readers: unknown keys and type mismatches raise Configuration errors
/// naming the key path (e.g. "config.speeds[1]").
ExperimentPlan plan_from_json(const json& j, const std::string& where = "config");
json plan_to_json(const ExperimentPlan& p);

EvolutionConfig evolution_from_json(const json& j, const std::string& where = "config");
json evolution_to_json(const EvolutionConfig& c);

/// Reads a JSON file; the extension must be .json.
json load_config_file(const fs::path& path);

}  // namespace fkdv::cli
