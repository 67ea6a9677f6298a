#include "spreadnet/mission.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spreadnet {

using nlohmann::json;

MissionSpec preset_intelligence() {
  MissionSpec ms;
  ms.name = "intelligence";
  ms.layers = {LayerSpec::bounded(0.1, 10.0, 0.1, 1.0),
               LayerSpec::bounded(1.0, 40.0, 0.01, 0.5)};
  ms.weights = {0.8, 0.2};
  ms.power_price = 40.0;
  ms.path_loss_exponent = 4.0;
  ms.thresholds.intra = {0.0, 0.7};
  ms.thresholds.inter = {{0.0, 0.8}, {0.0, 0.0}};
  ms.thresholds.global = 0.7;
  ms.gamma = 1.0;
  ms.delta = 0.0;
  ms.validate();
  return ms;
}

MissionSpec preset_encounter() {
  MissionSpec ms;
  ms.name = "encounter";
  ms.layers = {LayerSpec::bounded(5.0, 5.0, 0.1, 1.0),
               LayerSpec::bounded(1.0, 40.0, 0.01, 0.5)};
  ms.weights = {0.8, 0.2};
  ms.power_price = 8.0;
  ms.path_loss_exponent = 4.0;
  ms.thresholds.intra = {0.6, 0.0};
  ms.thresholds.inter = {{0.0, 0.0}, {0.7, 0.0}};
  ms.thresholds.global = 0.7;
  ms.gamma = 1.0;
  ms.delta = 0.0;
  ms.validate();
  return ms;
}

std::vector<std::string> preset_names() { return {"intelligence", "encounter"}; }

std::optional<MissionSpec> find_preset(const std::string& name) {
  if (name == "intelligence") return preset_intelligence();
  if (name == "encounter") return preset_encounter();
  return std::nullopt;
}

namespace {

double number_field(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw std::invalid_argument("mission file: missing field '" + field + "'");
  if (!j.at(field).is_number())
    throw std::invalid_argument("mission file: field '" + field + "' must be a number");
  return j.at(field).get<double>();
}

double range_to_km(double value, const std::string& unit, const std::string& field) {
  if (unit == "km") return value;
  if (unit == "m") return value / 1000.0;
  throw std::invalid_argument("mission file: field '" + field + "' has unknown unit '" +
                              unit + "' (expected \"m\" or \"km\")");
}

}  // namespace

MissionSpec mission_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("mission file: not valid JSON: ") + err.what());
  }

  MissionSpec ms;
  ms.name = j.value("name", "unnamed");
  ms.gamma = number_field(j, "gamma");
  ms.delta = number_field(j, "delta");
  ms.power_price = number_field(j, "power_price");
  ms.path_loss_exponent = number_field(j, "path_loss_exponent");
  ms.area_km2 = j.contains("area_km2") ? number_field(j, "area_km2") : 1.0;

  if (!j.contains("weights") || !j.at("weights").is_array())
    throw std::invalid_argument("mission file: missing array field 'weights'");
  ms.weights = j.at("weights").get<std::vector<double>>();

  if (!j.contains("layers") || !j.at("layers").is_array())
    throw std::invalid_argument("mission file: missing array field 'layers'");
  for (const auto& layer : j.at("layers")) {
    const std::string lambda_unit = layer.value("lambda_unit", "per_km2");
    if (lambda_unit != "per_km2")
      throw std::invalid_argument("mission file: field 'lambda_unit' has unknown unit '" +
                                  lambda_unit + "' (expected \"per_km2\")");
    const std::string r_unit = layer.value("r_unit", "km");
    const double r_min = range_to_km(number_field(layer, "r_min"), r_unit, "r_min");
    const double r_max = range_to_km(number_field(layer, "r_max"), r_unit, "r_max");
    try {
      ms.layers.push_back(LayerSpec::bounded(number_field(layer, "lambda_min"),
                                             number_field(layer, "lambda_max"), r_min, r_max));
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("mission file: bad layer bounds: " + std::string(err.what()));
    }
  }

  if (!j.contains("thresholds") || !j.at("thresholds").is_object())
    throw std::invalid_argument("mission file: missing object field 'thresholds'");
  const json& th = j.at("thresholds");
  if (!th.contains("intra") || !th.at("intra").is_array())
    throw std::invalid_argument("mission file: missing array field 'thresholds.intra'");
  ms.thresholds.intra = th.at("intra").get<std::vector<double>>();
  if (!th.contains("inter") || !th.at("inter").is_array())
    throw std::invalid_argument("mission file: missing array field 'thresholds.inter'");
  ms.thresholds.inter = th.at("inter").get<std::vector<std::vector<double>>>();
  ms.thresholds.global = number_field(th, "global");

  try {
    ms.validate();
  } catch (const std::invalid_argument& err) {
    throw std::invalid_argument("mission file: " + std::string(err.what()));
  }
  return ms;
}

std::string mission_to_json(const MissionSpec& mission) {
  mission.validate();
  json j;
  j["name"] = mission.name;
  j["gamma"] = mission.gamma;
  j["delta"] = mission.delta;
  j["power_price"] = mission.power_price;
  j["path_loss_exponent"] = mission.path_loss_exponent;
  j["area_km2"] = mission.area_km2;
  j["weights"] = mission.weights;
  j["layers"] = json::array();
  for (const auto& layer : mission.layers) {
    j["layers"].push_back({{"lambda_min", layer.density_min},
                           {"lambda_max", layer.density_max},
                           {"lambda_unit", "per_km2"},
                           {"r_min", layer.range_min_km},
                           {"r_max", layer.range_max_km},
                           {"r_unit", "km"}});
  }
  j["thresholds"] = {{"intra", mission.thresholds.intra},
                     {"inter", mission.thresholds.inter},
                     {"global", mission.thresholds.global}};
  return j.dump(2) + "\n";
}

MissionSpec load_mission(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("mission file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return mission_from_json(buf.str());
}

void save_mission(const MissionSpec& mission, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << mission_to_json(mission);
}

}  // namespace spreadnet
