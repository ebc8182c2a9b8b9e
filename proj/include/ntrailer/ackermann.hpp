#pragma once

#include <span>

#include "ntrailer/kernel.hpp"

namespace ntrailer {

/// World-frame velocity of a body-fixed point of one vehicle unit.
struct PointVelocity {
  double vx = 0.0;
  double vy = 0.0;
  int unit = 0;

  double speed() const;
};

struct SteeringSolution {
  double angle = 0.0;      // radians in (-pi, pi], relative to the unit frame
  bool degenerate = false; // point velocity below eps_v: angle undefined (at rest / at the ICR)
};

enum class HitchEnd { Front, Rear };

/// Wrap to (-pi, pi].
double wrap_angle(double a);

/// Velocity of the point p_body (coordinates in unit i's frame) under the
/// model flow xdot = J(x)u:
///   v = pdot_1 + sum_{m<i} R(psi_m + pi/2)(h_{m,r} - h_{m,f}) psidot_m
///     + R(psi_i + pi/2)(p_body - h_{i,f}) psidot_i
PointVelocity point_velocity(const ValidatedSpec& spec, const KinematicModel& model,
                             std::span<const double> state, const Eigen::VectorXd& u, int unit,
                             const Vec2& p_body, double eps_div = 1e-12);

/// Steering angle that aligns wheel (i,k) with its contact-point velocity;
/// this is the angle satisfying the wheel's no-slip constraint row. Reported
/// degenerate when the point moves slower than eps_v.
SteeringSolution dependent_steer_angle(const ValidatedSpec& spec, const KinematicModel& model,
                                       std::span<const double> state, const Eigen::VectorXd& u,
                                       int unit, int wheel, double eps_v = 1e-9,
                                       double eps_div = 1e-12);

/// Closed form for a dependent wheel of a single multi-axle unit:
///   tan(theta_k) = N / D
///   N = (a2 - ak) tan(theta1) + (ak + b2 tan(theta1)) tan(theta2)
///   D = a2 + (b2 - bk) tan(theta2) + bk tan(theta1)
/// where (a2, b2) is wheel 2 (wheel 1 at the origin) and (ak, bk) the
/// dependent wheel. Throws DivisionNearZeroError when D vanishes.
double single_unit_tan_formula(double a2, double b2, double ak, double bk, double theta1,
                               double theta2);

/// Virtual steering angle of a hitch point of unit i: the same alignment
/// condition with the hitch coordinates in place of a wheel. Throws
/// std::out_of_range when the unit has no such hitch.
SteeringSolution virtual_hitch_steer(const ValidatedSpec& spec, const KinematicModel& model,
                                     std::span<const double> state, const Eigen::VectorXd& u,
                                     int unit, HitchEnd which, double eps_v = 1e-9,
                                     double eps_div = 1e-12);

}  // namespace ntrailer
