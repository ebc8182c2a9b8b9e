#include "ntrailer/config_json.hpp"

#include <cmath>

#include "ntrailer/errors.hpp"

namespace ntrailer {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

double number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing \"" + std::string(key) + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": \"" + std::string(key) + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + ": \"" + std::string(key) + "\" is not finite");
  return d;
}

Vec2 point_field(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object with \"x\" and \"y\"");
  reject_unknown_keys(obj, {"x", "y"}, where);
  return {number_field(obj, "x", where), number_field(obj, "y", where)};
}

}  // namespace

double angle_scale(AngleUnit unit) {
  return unit == AngleUnit::Degrees ? M_PI / 180.0 : 1.0;
}

VehicleConfig parse_vehicle_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("vehicle config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("vehicle config: top level must be an object");
  reject_unknown_keys(doc, {"units", "angle_unit"}, "vehicle config");

  VehicleConfig cfg;
  if (doc.contains("angle_unit")) {
    const json& au = doc.at("angle_unit");
    if (au == "rad")
      cfg.angle_unit = AngleUnit::Radians;
    else if (au == "deg")
      cfg.angle_unit = AngleUnit::Degrees;
    else
      throw ConfigError("vehicle config: angle_unit must be \"rad\" or \"deg\"");
  }

  if (!doc.contains("units") || !doc.at("units").is_array())
    throw ConfigError("vehicle config: \"units\" array is required");

  int ui = 0;
  for (const json& ju : doc.at("units")) {
    ++ui;
    const std::string where = "unit " + std::to_string(ui);
    if (!ju.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown_keys(ju, {"label", "wheels", "hitch_front", "hitch_rear"}, where);

    UnitSpec unit;
    if (ju.contains("label")) {
      if (!ju.at("label").is_string()) throw ConfigError(where + ": label must be a string");
      unit.label = ju.at("label").get<std::string>();
    }
    if (!ju.contains("wheels") || !ju.at("wheels").is_array())
      throw ConfigError(where + ": \"wheels\" array is required");
    int wi = 0;
    for (const json& jw : ju.at("wheels")) {
      ++wi;
      const std::string wwhere = where + " wheel " + std::to_string(wi);
      if (!jw.is_object()) throw ConfigError(wwhere + ": expected an object");
      reject_unknown_keys(jw, {"x", "y", "label"}, wwhere);
      WheelSpec w;
      w.position = {number_field(jw, "x", wwhere), number_field(jw, "y", wwhere)};
      if (jw.contains("label")) {
        if (!jw.at("label").is_string()) throw ConfigError(wwhere + ": label must be a string");
        w.label = jw.at("label").get<std::string>();
      }
      unit.wheels.push_back(std::move(w));
    }
    if (ju.contains("hitch_front") && !ju.at("hitch_front").is_null())
      unit.hitch_front = point_field(ju.at("hitch_front"), where + " hitch_front");
    if (ju.contains("hitch_rear") && !ju.at("hitch_rear").is_null())
      unit.hitch_rear = point_field(ju.at("hitch_rear"), where + " hitch_rear");
    cfg.spec.units.push_back(std::move(unit));
  }
  return cfg;
}

std::string emit_vehicle_config(const ValidatedSpec& spec) {
  ordered_json units = ordered_json::array();
  for (int i = 1; i <= spec.unit_count(); ++i) {
    const UnitSpec& u = spec.spec().units[static_cast<std::size_t>(i - 1)];
    ordered_json wheels = ordered_json::array();
    for (const auto& w : u.wheels) {
      ordered_json jw{{"x", w.position.x}, {"y", w.position.y}};
      if (!w.label.empty()) jw["label"] = w.label;
      wheels.push_back(std::move(jw));
    }
    ordered_json ju;
    if (!u.label.empty()) ju["label"] = u.label;
    ju["wheels"] = std::move(wheels);
    ju["hitch_front"] =
        u.hitch_front ? ordered_json{{"x", u.hitch_front->x}, {"y", u.hitch_front->y}}
                      : ordered_json(nullptr);
    ju["hitch_rear"] = u.hitch_rear
                           ? ordered_json{{"x", u.hitch_rear->x}, {"y", u.hitch_rear->y}}
                           : ordered_json(nullptr);
    units.push_back(std::move(ju));
  }
  ordered_json doc{{"units", std::move(units)}, {"angle_unit", "rad"}};
  return doc.dump(2) + "\n";
}

}  // namespace ntrailer
