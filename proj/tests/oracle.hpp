#pragma once

// Test-only helpers: a purely numeric reconstruction of the constraint rows
// (independent of the symbolic path it checks), random vehicle generators and
// spec builders shared across the suites.

#include <cmath>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "ntrailer/kernel.hpp"
#include "ntrailer/vehicle.hpp"

namespace ntrailer::testing {

inline Vec2 hz(const std::optional<Vec2>& h) { return h ? *h : Vec2{}; }

/// Numeric constraint row ([0 1] selector) for wheel (i,k), assembled with
/// plain rotation matrices from the validated geometry. `theta` is the
/// wheel's steering angle (read it from the state for independent wheels,
/// pass the resolved angle for dependent ones).
inline Eigen::RowVectorXd oracle_constraint_row(const ValidatedSpec& spec,
                                                std::span<const double> state, int i, int k,
                                                double theta) {
  const int n = spec.unit_count();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * n + 3);
  const double psi_i = state[static_cast<std::size_t>(spec.yaw_index(i))];
  const double a = psi_i + theta;
  row[0] = -std::sin(a);
  row[1] = std::cos(a);
  for (int m = 1; m < i; ++m) {
    const double psi_m = state[static_cast<std::size_t>(spec.yaw_index(m))];
    const Vec2 lever = hz(spec.hitch_rear(m)) - hz(spec.hitch_front(m));
    const Vec2 v = rotate(psi_m - psi_i - theta + M_PI / 2.0, lever);
    row[spec.yaw_index(m)] = v.y;
  }
  const Vec2 sv =
      rotate(M_PI / 2.0 - theta, spec.wheel_position(i, k) - hz(spec.hitch_front(i)));
  row[spec.yaw_index(i)] = sv.y;
  return row;
}

/// Numeric [1 0] (velocity) row for wheel (i,k).
inline Eigen::RowVectorXd oracle_velocity_row(const ValidatedSpec& spec,
                                              std::span<const double> state, int i, int k,
                                              double theta) {
  const int n = spec.unit_count();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * n + 3);
  const double psi_i = state[static_cast<std::size_t>(spec.yaw_index(i))];
  const double a = psi_i + theta;
  row[0] = std::cos(a);
  row[1] = std::sin(a);
  for (int m = 1; m < i; ++m) {
    const double psi_m = state[static_cast<std::size_t>(spec.yaw_index(m))];
    const Vec2 lever = hz(spec.hitch_rear(m)) - hz(spec.hitch_front(m));
    const Vec2 v = rotate(psi_m - psi_i - theta + M_PI / 2.0, lever);
    row[spec.yaw_index(m)] = v.x;
  }
  const Vec2 sv =
      rotate(M_PI / 2.0 - theta, spec.wheel_position(i, k) - hz(spec.hitch_front(i)));
  row[spec.yaw_index(i)] = sv.x;
  return row;
}

/// Stacked numeric rows of all independent wheels.
inline Eigen::MatrixXd oracle_independent_matrix(const ValidatedSpec& spec,
                                                 std::span<const double> state) {
  const auto wheels = spec.independent_wheels();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(wheels.size()), 2 * spec.unit_count() + 3);
  for (std::size_t r = 0; r < wheels.size(); ++r) {
    const auto [i, k] = wheels[r];
    const double theta = state[static_cast<std::size_t>(spec.steer_index(i, k))];
    A.row(static_cast<Eigen::Index>(r)) = oracle_constraint_row(spec, state, i, k, theta);
  }
  return A;
}

// --- spec builders ----------------------------------------------------------

inline VehicleSpec bicycle_spec(double L = 3.0) {
  VehicleSpec s;
  UnitSpec u;
  u.wheels = {{{0.0, 0.0}, "rear"}, {{L, 0.0}, "front"}};
  s.units.push_back(u);
  return s;
}

/// Two lumped axles plus physical front wheels at (L, +-T/2); +y is left.
inline VehicleSpec car_spec(double L = 3.0, double T = 2.0) {
  VehicleSpec s;
  UnitSpec u;
  u.wheels = {{{0.0, 0.0}, "rear"},
              {{L, 0.0}, "front"},
              {{L, T / 2.0}, "front_left"},
              {{L, -T / 2.0}, "front_right"}};
  s.units.push_back(u);
  return s;
}

/// Tractor (wheelbase L) pulling `trailers` identical trailers of wheelbase d.
/// `hitch_offset` is the rear-hitch x on each towing unit (0 = on-axle).
inline VehicleSpec chain_spec(int trailers, double L = 3.0, double d = 4.0,
                              double hitch_offset = 0.0) {
  VehicleSpec s;
  UnitSpec tractor;
  tractor.wheels = {{{0.0, 0.0}, "rear"}, {{L, 0.0}, "front"}};
  tractor.hitch_rear = Vec2{hitch_offset, 0.0};
  s.units.push_back(tractor);
  for (int i = 0; i < trailers; ++i) {
    UnitSpec t;
    t.wheels = {{{0.0, 0.0}, "axle"}};
    t.hitch_front = Vec2{d, 0.0};
    if (i + 1 < trailers) t.hitch_rear = Vec2{hitch_offset, 0.0};
    s.units.push_back(t);
  }
  return s;
}

// --- random generation --------------------------------------------------------

inline double rand_mag(std::mt19937_64& rng, double lo = 0.5, double hi = 5.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double rand_signed_mag(std::mt19937_64& rng, double lo = 0.5, double hi = 5.0) {
  const double m = rand_mag(rng, lo, hi);
  return std::uniform_int_distribution<int>(0, 1)(rng) ? m : -m;
}

/// Random articulated vehicle: n <= max_units units, wheels <= 4 per unit,
/// geometry magnitudes in [0.5, 5] m. Wheel 1 of every unit is at the origin.
inline VehicleSpec random_spec(std::mt19937_64& rng, int max_units = 4) {
  std::uniform_int_distribution<int> units_dist(1, max_units);
  const int n = units_dist(rng);
  VehicleSpec s;
  for (int i = 1; i <= n; ++i) {
    UnitSpec u;
    std::uniform_int_distribution<int> wheels_dist(i == 1 ? 2 : 1, 4);
    const int K = wheels_dist(rng);
    u.wheels.push_back({{0.0, 0.0}, ""});
    for (int k = 2; k <= K; ++k)
      u.wheels.push_back({{rand_signed_mag(rng), rand_signed_mag(rng)}, ""});
    if (i > 1) u.hitch_front = Vec2{rand_mag(rng), rand_signed_mag(rng)};
    if (i < n) u.hitch_rear = Vec2{-rand_signed_mag(rng), rand_signed_mag(rng)};
    s.units.push_back(std::move(u));
  }
  return s;
}

/// Random reduced state whose recorded singularity denominators all stay
/// above `margin` in magnitude.
inline Eigen::VectorXd random_state(std::mt19937_64& rng, const ValidatedSpec& spec,
                                    const KinematicModel& model, double margin = 1e-3) {
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  const StateLayout layout = spec.state_layout();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t c = 0; c < layout.size(); ++c)
      x[static_cast<Eigen::Index>(c)] = layout[c].is_angle() ? ang(rng) : pos(rng);
    const EvalContext ctx =
        make_context(layout, {x.data(), static_cast<std::size_t>(x.size())}, model.params);
    bool ok = true;
    for (const auto& sg : model.singularities)
      if (std::abs(eval(sg.denominator, ctx)) < margin) {
        ok = false;
        break;
      }
    if (ok) return x;
  }
  throw std::runtime_error("random_state: could not find a non-singular state");
}

/// All angle variables referenced by an expression.
inline void collect_angle_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::Sin || e->kind == ExprKind::Cos)
    for (const auto& [v, c] : e->angle.terms()) out.insert(v.name());
  for (const auto& k : e->kids) collect_angle_vars(k, out);
}

}  // namespace ntrailer::testing
