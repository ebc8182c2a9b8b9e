#include "ntrailer/vehicle.hpp"

#include <cmath>
#include <stdexcept>

#include "ntrailer/errors.hpp"

namespace ntrailer {

Vec2 rotate(double angle, const Vec2& v) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

std::string Coord::name() const {
  switch (kind) {
    case Kind::PosX:
      return "x1";
    case Kind::PosY:
      return "y1";
    case Kind::Yaw:
      return AngleVar::yaw(unit).name();
    case Kind::Steer:
      return AngleVar::steer(unit, wheel).name();
  }
  return {};
}

int ValidatedSpec::check_unit(int unit) const {
  if (unit < 1 || unit > unit_count())
    throw std::out_of_range("unit index " + std::to_string(unit) + " out of range");
  return unit;
}

int ValidatedSpec::check_wheel(int unit, int wheel) const {
  check_unit(unit);
  if (wheel < 1 || wheel > wheel_count(unit))
    throw std::out_of_range("wheel index (" + std::to_string(unit) + "," + std::to_string(wheel) +
                            ") out of range");
  return wheel;
}

ExprPtr ValidatedSpec::geometry_expr(double value, const std::string& name) {
  if (value == 0.0) return zero();
  params_[name] = value;
  return param(name);
}

ValidatedSpec ValidatedSpec::validate(VehicleSpec spec) {
  const int n = static_cast<int>(spec.units.size());
  if (n == 0) throw ValidationError(ValidationError::Code::EmptyVehicle, 0, "empty vehicle: no units");

  for (int i = 1; i <= n; ++i) {
    UnitSpec& u = spec.units[i - 1];
    const std::string where = "unit " + std::to_string(i);
    if (i == 1 && u.wheels.size() < 2)
      throw ValidationError(ValidationError::Code::TractorTooFewWheels, i,
                            "tractor needs at least 2 wheels to define its yaw rate");
    if (u.wheels.empty())
      throw ValidationError(ValidationError::Code::TooFewWheels, i, where + " has no wheels");
    if (i == 1 && u.hitch_front)
      throw ValidationError(ValidationError::Code::UnexpectedHitch, i,
                            "the tractor cannot have a front hitch");
    if (i > 1 && !u.hitch_front)
      throw ValidationError(ValidationError::Code::MissingHitch, i, where + " has no front hitch");
    if (i == n && u.hitch_rear)
      throw ValidationError(ValidationError::Code::UnexpectedHitch, i,
                            "the last unit cannot have a rear hitch");
    if (i < n && !u.hitch_rear)
      throw ValidationError(ValidationError::Code::MissingHitch, i, where + " has no rear hitch");

    auto finite = [&](const Vec2& v) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw ConfigError(where + ": non-finite coordinate");
    };
    for (const auto& w : u.wheels) finite(w.position);
    if (u.hitch_front) finite(*u.hitch_front);
    if (u.hitch_rear) finite(*u.hitch_rear);
  }

  ValidatedSpec v;
  v.spec_ = std::move(spec);

  // Rebase each unit frame onto its wheel 1.
  for (int i = 1; i <= n; ++i) {
    UnitSpec& u = v.spec_.units[i - 1];
    const Vec2 shift = u.wheels[0].position;
    if (shift.x != 0.0 || shift.y != 0.0) {
      for (auto& w : u.wheels) w.position = w.position - shift;
      if (u.hitch_front) u.hitch_front = *u.hitch_front - shift;
      if (u.hitch_rear) u.hitch_rear = *u.hitch_rear - shift;
      v.warnings_.push_back("unit " + std::to_string(i) + ": frame rebased onto wheel 1 (shift " +
                            std::to_string(shift.x) + ", " + std::to_string(shift.y) + ")");
    }
  }

  // Symbolic geometry, zero entries as literal zeros.
  v.wheel_syms_.resize(n);
  v.hitch_front_syms_.resize(n);
  v.hitch_rear_syms_.resize(n);
  for (int i = 1; i <= n; ++i) {
    const UnitSpec& u = v.spec_.units[i - 1];
    const std::string is = std::to_string(i);
    auto& ws = v.wheel_syms_[i - 1];
    ws.resize(u.wheels.size());
    for (int k = 1; k <= static_cast<int>(u.wheels.size()); ++k) {
      const std::string ks = std::to_string(k);
      ws[k - 1].x = v.geometry_expr(u.wheels[k - 1].position.x, "a_" + is + "_" + ks);
      ws[k - 1].y = v.geometry_expr(u.wheels[k - 1].position.y, "b_" + is + "_" + ks);
    }
    if (u.hitch_front) {
      v.hitch_front_syms_[i - 1].x = v.geometry_expr(u.hitch_front->x, "hfx_" + is);
      v.hitch_front_syms_[i - 1].y = v.geometry_expr(u.hitch_front->y, "hfy_" + is);
    }
    if (u.hitch_rear) {
      v.hitch_rear_syms_[i - 1].x = v.geometry_expr(u.hitch_rear->x, "hrx_" + is);
      v.hitch_rear_syms_[i - 1].y = v.geometry_expr(u.hitch_rear->y, "hry_" + is);
    }
  }
  return v;
}

int ValidatedSpec::total_wheels() const {
  int k = 0;
  for (const auto& u : spec_.units) k += static_cast<int>(u.wheels.size());
  return k;
}

StateLayout ValidatedSpec::state_layout() const {
  const int n = unit_count();
  StateLayout l;
  l.reserve(static_cast<std::size_t>(state_dim()));
  l.push_back({Coord::Kind::PosX, 1, 0});
  l.push_back({Coord::Kind::PosY, 1, 0});
  for (int i = 1; i <= n; ++i) l.push_back({Coord::Kind::Yaw, i, 0});
  l.push_back({Coord::Kind::Steer, 1, 1});
  l.push_back({Coord::Kind::Steer, 1, 2});
  for (int i = 2; i <= n; ++i) l.push_back({Coord::Kind::Steer, i, 1});
  return l;
}

StateLayout ValidatedSpec::full_layout() const {
  const int n = unit_count();
  StateLayout l;
  l.reserve(static_cast<std::size_t>(full_dim()));
  l.push_back({Coord::Kind::PosX, 1, 0});
  l.push_back({Coord::Kind::PosY, 1, 0});
  for (int i = 1; i <= n; ++i) l.push_back({Coord::Kind::Yaw, i, 0});
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= wheel_count(i); ++k) l.push_back({Coord::Kind::Steer, i, k});
  return l;
}

bool ValidatedSpec::is_independent(int unit, int wheel) const {
  check_wheel(unit, wheel);
  return (unit == 1 && wheel <= 2) || (unit > 1 && wheel < 2);
}

std::vector<std::pair<int, int>> ValidatedSpec::independent_wheels() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= unit_count(); ++i)
    for (int k = 1; k <= wheel_count(i); ++k)
      if (is_independent(i, k)) out.emplace_back(i, k);
  return out;
}

std::vector<std::pair<int, int>> ValidatedSpec::dependent_wheels() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= unit_count(); ++i)
    for (int k = 1; k <= wheel_count(i); ++k)
      if (!is_independent(i, k)) out.emplace_back(i, k);
  return out;
}

int ValidatedSpec::steer_index(int unit, int wheel) const {
  check_wheel(unit, wheel);
  if (!is_independent(unit, wheel))
    throw std::out_of_range("wheel (" + std::to_string(unit) + "," + std::to_string(wheel) +
                            ") is not an independent steering coordinate");
  const int n = unit_count();
  if (unit == 1) return 2 + n + (wheel - 1);
  return 2 + n + 2 + (unit - 2);
}

Vec2 ValidatedSpec::wheel_position(int unit, int wheel) const {
  check_wheel(unit, wheel);
  return spec_.units[unit - 1].wheels[wheel - 1].position;
}

std::optional<Vec2> ValidatedSpec::hitch_front(int unit) const {
  check_unit(unit);
  return spec_.units[unit - 1].hitch_front;
}

std::optional<Vec2> ValidatedSpec::hitch_rear(int unit) const {
  check_unit(unit);
  return spec_.units[unit - 1].hitch_rear;
}

Vec2Sym ValidatedSpec::wheel_sym(int unit, int wheel) const {
  check_wheel(unit, wheel);
  return wheel_syms_[unit - 1][wheel - 1];
}

Vec2Sym ValidatedSpec::hitch_front_sym(int unit) const {
  check_unit(unit);
  return hitch_front_syms_[unit - 1];
}

Vec2Sym ValidatedSpec::hitch_rear_sym(int unit) const {
  check_unit(unit);
  return hitch_rear_syms_[unit - 1];
}

namespace {
Vec2 value_or_zero(const std::optional<Vec2>& v) { return v ? *v : Vec2{}; }
}  // namespace

std::vector<Pose> ValidatedSpec::recover_poses(std::span<const double> state) const {
  const int n = unit_count();
  if (static_cast<int>(state.size()) < 2 + n)
    throw std::invalid_argument("state vector too short for pose recovery");
  std::vector<Pose> poses(static_cast<std::size_t>(n));
  const Vec2 p1{state[0], state[1]};
  poses[0] = {p1, state[2]};

  Vec2 chain{};  // sum_{m<i} R(psi_m)(h_{m,r} - h_{m,f})
  for (int i = 2; i <= n; ++i) {
    const double psi_prev = state[2 + (i - 2)];
    const Vec2 hr = value_or_zero(hitch_rear(i - 1));
    const Vec2 hf_prev = value_or_zero(hitch_front(i - 1));
    chain = chain + rotate(psi_prev, hr - hf_prev);
    const double psi_i = state[2 + (i - 1)];
    poses[i - 1] = {p1 + chain - rotate(psi_i, value_or_zero(hitch_front(i))), psi_i};
  }
  return poses;
}

std::vector<Pose> ValidatedSpec::recover_poses_iterative(std::span<const double> state) const {
  const int n = unit_count();
  if (static_cast<int>(state.size()) < 2 + n)
    throw std::invalid_argument("state vector too short for pose recovery");
  std::vector<Pose> poses(static_cast<std::size_t>(n));
  poses[0] = {{state[0], state[1]}, state[2]};
  for (int i = 1; i < n; ++i) {
    const double psi_i = state[2 + (i - 1)];
    const double psi_next = state[2 + i];
    const Vec2 p_next = poses[i - 1].p + rotate(psi_i, value_or_zero(hitch_rear(i))) -
                        rotate(psi_next, value_or_zero(hitch_front(i + 1)));
    poses[i] = {p_next, psi_next};
  }
  return poses;
}

Vec2 ValidatedSpec::wheel_world_position(std::span<const double> state, int unit,
                                         int wheel) const {
  check_wheel(unit, wheel);
  const auto poses = recover_poses(state);
  const Pose& pose = poses[unit - 1];
  return pose.p + rotate(pose.psi, wheel_position(unit, wheel));
}

EvalContext make_context(const StateLayout& layout, std::span<const double> state,
                         const std::map<std::string, double>& params, double eps_div) {
  if (layout.size() != state.size())
    throw std::invalid_argument("state dimension " + std::to_string(state.size()) +
                                " does not match layout dimension " +
                                std::to_string(layout.size()));
  EvalContext ctx;
  ctx.eps_div = eps_div;
  ctx.params = params;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Coord& c = layout[i];
    if (c.kind == Coord::Kind::Yaw)
      ctx.angles[AngleVar::yaw(c.unit)] = state[i];
    else if (c.kind == Coord::Kind::Steer)
      ctx.angles[AngleVar::steer(c.unit, c.wheel)] = state[i];
  }
  return ctx;
}

}  // namespace ntrailer
