#include "ntrailer/ackermann.hpp"

#include <cmath>
#include <stdexcept>

#include "ntrailer/errors.hpp"

namespace ntrailer {

double PointVelocity::speed() const { return std::hypot(vx, vy); }

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

namespace {
Vec2 hitch_or_zero(const std::optional<Vec2>& h) { return h ? *h : Vec2{}; }
}  // namespace

PointVelocity point_velocity(const ValidatedSpec& spec, const KinematicModel& model,
                             std::span<const double> state, const Eigen::VectorXd& u, int unit,
                             const Vec2& p_body, double eps_div) {
  if (unit < 1 || unit > spec.unit_count()) throw std::out_of_range("unit index out of range");
  const Eigen::VectorXd xdot = state_derivative(model, state, u, eps_div);

  Vec2 v{xdot[0], xdot[1]};
  for (int m = 1; m < unit; ++m) {
    const double psi_m = state[static_cast<std::size_t>(spec.yaw_index(m))];
    const Vec2 lever = hitch_or_zero(spec.hitch_rear(m)) - hitch_or_zero(spec.hitch_front(m));
    v = v + xdot[spec.yaw_index(m)] * rotate(psi_m + M_PI / 2.0, lever);
  }
  const double psi_i = state[static_cast<std::size_t>(spec.yaw_index(unit))];
  v = v + xdot[spec.yaw_index(unit)] *
              rotate(psi_i + M_PI / 2.0, p_body - hitch_or_zero(spec.hitch_front(unit)));
  return {v.x, v.y, unit};
}

namespace {

SteeringSolution steer_from_point(const ValidatedSpec& spec, const KinematicModel& model,
                                  std::span<const double> state, const Eigen::VectorXd& u,
                                  int unit, const Vec2& p_body, double eps_v, double eps_div) {
  const PointVelocity v = point_velocity(spec, model, state, u, unit, p_body, eps_div);
  if (v.speed() < eps_v) return {0.0, true};
  const double psi_i = state[static_cast<std::size_t>(spec.yaw_index(unit))];
  return {wrap_angle(std::atan2(v.vy, v.vx) - psi_i), false};
}

}  // namespace

SteeringSolution dependent_steer_angle(const ValidatedSpec& spec, const KinematicModel& model,
                                       std::span<const double> state, const Eigen::VectorXd& u,
                                       int unit, int wheel, double eps_v, double eps_div) {
  return steer_from_point(spec, model, state, u, unit, spec.wheel_position(unit, wheel), eps_v,
                          eps_div);
}

double single_unit_tan_formula(double a2, double b2, double ak, double bk, double theta1,
                               double theta2) {
  const double t1 = std::tan(theta1), t2 = std::tan(theta2);
  const double num = (a2 - ak) * t1 + (ak + b2 * t1) * t2;
  const double den = a2 + (b2 - bk) * t2 + bk * t1;
  if (std::abs(den) < 1e-12) throw DivisionNearZeroError(den);
  return num / den;
}

SteeringSolution virtual_hitch_steer(const ValidatedSpec& spec, const KinematicModel& model,
                                     std::span<const double> state, const Eigen::VectorXd& u,
                                     int unit, HitchEnd which, double eps_v, double eps_div) {
  const std::optional<Vec2> h =
      which == HitchEnd::Front ? spec.hitch_front(unit) : spec.hitch_rear(unit);
  if (!h)
    throw std::out_of_range("unit " + std::to_string(unit) + " has no " +
                            (which == HitchEnd::Front ? "front" : "rear") + " hitch");
  return steer_from_point(spec, model, state, u, unit, *h, eps_v, eps_div);
}

}  // namespace ntrailer
