#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spreadnet/optimizer.hpp"

namespace spreadnet {

// Intelligence mission: strong follower coordination and reliable flow from
// followers to commanders; power is expensive.
MissionSpec preset_intelligence();

// Encounter battle: commander coordination and flow from commanders to
// followers; commander density is pinned at 5 km^-2 and power is cheap.
MissionSpec preset_encounter();

std::vector<std::string> preset_names();
std::optional<MissionSpec> find_preset(const std::string& name);

// JSON mission files carry explicit unit tags (lambda_unit "per_km2",
// r_unit "m" or "km"); everything is normalised to km / km^-2 on load.
// Schema violations throw std::invalid_argument naming the field; weights
// that do not sum to 1 are rejected, never renormalised.
MissionSpec load_mission(const std::string& path);
void save_mission(const MissionSpec& mission, const std::string& path);

std::string mission_to_json(const MissionSpec& mission);
MissionSpec mission_from_json(const std::string& text);

}  // namespace spreadnet
