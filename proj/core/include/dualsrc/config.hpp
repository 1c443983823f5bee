#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dualsrc/demand.hpp"
#include "dualsrc/model.hpp"
#include "dualsrc/optimizer.hpp"
#include "dualsrc/policies.hpp"
#include "dualsrc/simulator.hpp"

namespace dualsrc {

using Json = nlohmann::json;

/// Parses a JSON file. Syntax errors are rethrown as ValidationError naming
/// the file, line and column.
Json load_json_file(const std::filesystem::path& path);

DemandModel demand_from_json(const Json& j);
Json to_json(const DemandModel& d);

Instance instance_from_json(const Json& j);
Json to_json(const Instance& inst);

PolicyParams policy_from_json(const Json& j);
Json to_json(const PolicyParams& p);

SimulationConfig simulation_from_json(const Json& j);
Json to_json(const SimulationConfig& c);

/// `sim` supplies the simulation settings; "optimizer" keys refine search.
OptimizerSettings optimizer_from_json(const Json& j, const SimulationConfig& sim);
Json to_json(const OptimizerSettings& s);

/// 16 hex digits of FNV-1a over the compact serialization.
std::string config_hash(const Json& j);

/// Shortest round-trip decimal for CSV/JSON output.
std::string format_number(double x);

}  // namespace dualsrc
