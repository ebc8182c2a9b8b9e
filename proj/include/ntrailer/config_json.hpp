#pragma once

#include <string>

#include "ntrailer/expr_io.hpp"
#include "ntrailer/vehicle.hpp"

namespace ntrailer {

enum class AngleUnit { Radians, Degrees };

struct VehicleConfig {
  VehicleSpec spec;
  AngleUnit angle_unit = AngleUnit::Radians;
};

/// Strict parse of the vehicle description document:
///   {"units": [{"label", "wheels": [{"x","y","label"}...],
///               "hitch_front": {"x","y"}|null, "hitch_rear": {"x","y"}|null}...],
///    "angle_unit": "rad"|"deg"}
/// Unknown keys are rejected. Throws ConfigError.
VehicleConfig parse_vehicle_config(const std::string& text);

/// Emit a validated spec back to the document form (angle_unit "rad",
/// rebased coordinates). parse(emit(spec)) round-trips.
std::string emit_vehicle_config(const ValidatedSpec& spec);

/// Multiplier converting angle inputs in `unit` to radians.
double angle_scale(AngleUnit unit);

}  // namespace ntrailer
