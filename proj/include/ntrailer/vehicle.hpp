#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ntrailer/expr.hpp"
#include "ntrailer/symmat.hpp"

namespace ntrailer {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

/// Rotate v by `angle` about +z (counterclockwise, +y is left).
Vec2 rotate(double angle, const Vec2& v);

struct WheelSpec {
  Vec2 position;  // body frame, meters
  std::string label;
};

struct UnitSpec {
  std::vector<WheelSpec> wheels;
  std::optional<Vec2> hitch_front;  // absent on the tractor
  std::optional<Vec2> hitch_rear;   // absent on the last unit
  std::string label;
};

struct VehicleSpec {
  std::vector<UnitSpec> units;
};

/// One generalized coordinate.
struct Coord {
  enum class Kind { PosX, PosY, Yaw, Steer };

  Kind kind = Kind::PosX;
  int unit = 0;
  int wheel = 0;

  std::string name() const;
  bool is_angle() const { return kind == Kind::Yaw || kind == Kind::Steer; }
};

using StateLayout = std::vector<Coord>;

struct Pose {
  Vec2 p;
  double psi = 0.0;
};

/// A vehicle description that passed validation. Frames are rebased so that
/// wheel 1 of every unit sits at the body-frame origin; geometry entries that
/// are exactly zero enter the symbolic layer as literal zero constants, all
/// others as named parameters with their values recorded here. Immutable and
/// safe to share.
class ValidatedSpec {
public:
  /// Throws ValidationError (EmptyVehicle, MissingHitch, UnexpectedHitch,
  /// TractorTooFewWheels, TooFewWheels) and ConfigError for non-finite
  /// coordinates. Rebasing that moved coordinates is reported as a warning
  /// record, not an error.
  static ValidatedSpec validate(VehicleSpec spec);

  const VehicleSpec& spec() const { return spec_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  int unit_count() const { return static_cast<int>(spec_.units.size()); }
  int wheel_count(int unit) const {
    return static_cast<int>(spec_.units[check_unit(unit) - 1].wheels.size());
  }
  int total_wheels() const;

  /// Reduced state x: (x1, y1, psi_1..psi_n, theta_1_1, theta_1_2,
  /// theta_2_1, ..., theta_n_1); dimension 2n+3.
  StateLayout state_layout() const;
  /// Full configuration q: all steering angles; dimension 2 + n + sum K_i.
  StateLayout full_layout() const;

  int state_dim() const { return 2 * unit_count() + 3; }
  int full_dim() const { return 2 + unit_count() + total_wheels(); }

  /// Independently commanded wheels: tractor wheels 1 and 2, wheel 1 of each
  /// trailer. Everything else is steered by the generalized Ackermann law.
  bool is_independent(int unit, int wheel) const;
  std::vector<std::pair<int, int>> independent_wheels() const;
  std::vector<std::pair<int, int>> dependent_wheels() const;

  // Indices into the reduced state layout.
  int yaw_index(int unit) const { return 2 + check_unit(unit) - 1; }
  int steer_index(int unit, int wheel) const;

  // Numeric geometry (post-rebase).
  Vec2 wheel_position(int unit, int wheel) const;
  std::optional<Vec2> hitch_front(int unit) const;
  std::optional<Vec2> hitch_rear(int unit) const;

  // Symbolic geometry. Absent hitches and the tractor front hitch are zero
  // vectors, matching their role in the constraint equations.
  Vec2Sym wheel_sym(int unit, int wheel) const;
  Vec2Sym hitch_front_sym(int unit) const;
  Vec2Sym hitch_rear_sym(int unit) const;

  const std::map<std::string, double>& param_values() const { return params_; }

  /// Unit poses from the reduced state, closed form:
  /// p_i = p_1 + sum_{m<i} R(psi_m)(h_{m,r} - h_{m,f}) - R(psi_i) h_{i,f}.
  std::vector<Pose> recover_poses(std::span<const double> state) const;
  /// Same poses via the hitch-to-hitch chain
  /// p_{i+1} = p_i + R(psi_i) h_{i,r} - R(psi_{i+1}) h_{i+1,f}.
  std::vector<Pose> recover_poses_iterative(std::span<const double> state) const;

  Vec2 wheel_world_position(std::span<const double> state, int unit, int wheel) const;

private:
  int check_unit(int unit) const;
  int check_wheel(int unit, int wheel) const;
  ExprPtr geometry_expr(double value, const std::string& name);

  VehicleSpec spec_;
  std::vector<std::string> warnings_;
  std::map<std::string, double> params_;
  std::vector<std::vector<Vec2Sym>> wheel_syms_;   // [unit][wheel]
  std::vector<Vec2Sym> hitch_front_syms_, hitch_rear_syms_;
};

/// Evaluation context for a reduced state vector: binds every angle
/// coordinate of the layout plus the geometry parameters.
EvalContext make_context(const StateLayout& layout, std::span<const double> state,
                         const std::map<std::string, double>& params, double eps_div = 1e-12);

}  // namespace ntrailer
