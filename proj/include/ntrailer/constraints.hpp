#pragma once

#include <string>
#include <vector>

#include "ntrailer/expr_io.hpp"
#include "ntrailer/symmat.hpp"
#include "ntrailer/vehicle.hpp"

namespace ntrailer {

/// One no-slip constraint row over the reduced state velocities
/// (xdot1, ydot1, psidot_1..psidot_n, steering rates). Steering-rate
/// coefficients are identically zero, and a row sourced from unit i only
/// touches psidot_1..psidot_i.
struct ConstraintRow {
  int unit = 0;
  int wheel = 0;
  bool independent = false;
  std::vector<ExprPtr> coeffs;  // aligned with the state layout
};

struct PfaffianMatrix {
  StateLayout layout;
  std::vector<ConstraintRow> rows;  // independent wheels only, n+1 rows
};

/// I_{i,m,k} = R(psi_m - psi_i - theta_{i,k} + pi/2) (h_{m,r} - h_{m,f}),
/// the yaw-rate coupling of intermediate unit m into wheel (i,k). Requires
/// 1 <= m < i.
Vec2Sym intermediate_term(const ValidatedSpec& spec, int i, int m, int k);

/// S_{i,k} = R(pi/2 - theta_{i,k}) (w_{i,k} - h_{i,f}), the own-unit yaw-rate
/// coupling. Zero for wheel 1 of every unit by the frame convention.
Vec2Sym self_term(const ValidatedSpec& spec, int i, int k);

/// Bottom row of the wheel velocity transform: [0 1] applied to
/// (R(psi_i+theta_{i,k})^T | I_{i,1,k} ... I_{i,i-1,k} | S_{i,k} | 0...).
/// Valid for dependent wheels too (their steering angle stays a free
/// symbolic angle, resolved later by the Ackermann law).
ConstraintRow wheel_constraint_row(const ValidatedSpec& spec, int i, int k);

/// Stacked rows of all independently commanded wheels, in iteration order
/// (tractor wheels 1 and 2, then wheel 1 of each trailer).
PfaffianMatrix build_pfaffian(const ValidatedSpec& spec);

/// Top row of the wheel velocity transform ([1 0] selector) as a coefficient
/// vector over the state velocities.
std::vector<ExprPtr> wheel_velocity_row(const ValidatedSpec& spec, int i, int k);

/// The same linear form as a single expression; state velocities enter as
/// parameters named dot_<coordinate> (dot_x1, dot_psi_2, ...).
ExprPtr wheel_velocity_expr(const ValidatedSpec& spec, int i, int k);

ordered_json pfaffian_to_json(const PfaffianMatrix& pf);
std::string pfaffian_to_latex(const PfaffianMatrix& pf);

}  // namespace ntrailer
