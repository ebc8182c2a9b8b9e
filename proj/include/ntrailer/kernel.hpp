#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ntrailer/constraints.hpp"

namespace ntrailer {

struct ControlDesc {
  std::string name;
  int unit = 0;
  int wheel = 0;
  bool is_speed = false;  // true only for the wheel (1,1) speed control
};

/// A denominator introduced by back-substitution; evaluating near its zero
/// set is a singular configuration (jackknife-like geometry).
struct SingularityReport {
  int unit = 0;
  int wheel = 0;
  ExprPtr denominator;
  std::string description;
};

/// Closed-form kinematic model xdot = J(x) u with
/// u = (v_w_1_1, omega_1_1, omega_1_2, omega_2_1, ..., omega_n_1).
/// J is (2n+3) x (n+2): column 0 carries F = (f_x1, f_y1, f_psi_1..f_psi_n)
/// over the pose coordinates, and the steering rates pass through an
/// identity block. Immutable and shareable once derived.
struct KinematicModel {
  int n = 0;  // vehicle units
  StateLayout layout;
  std::vector<ControlDesc> controls;         // n+2
  std::vector<ExprPtr> F;                    // n+2 entries
  std::vector<SingularityReport> singularities;
  std::map<std::string, double> params;      // geometry values bound at evaluation

  int state_dim() const { return 2 * n + 3; }
  int control_dim() const { return n + 2; }
};

/// Iterative back-substitution over the Pfaffian rows: tractor heading row,
/// tractor yaw row, then trailers front to back. Throws
/// StructurallySingularError when a divisor is identically zero (malformed
/// geometry such as a trailer hitched at its own wheel 1).
KinematicModel solve_kernel(const PfaffianMatrix& pf, std::map<std::string, double> params);

/// build_pfaffian + solve_kernel.
KinematicModel derive_model(const ValidatedSpec& spec);

struct ModelEval {
  Eigen::VectorXd F;  // n+2
  Eigen::MatrixXd J;  // (2n+3) x (n+2)
};

/// Numeric evaluation at a reduced state. Throws SingularStateError carrying
/// the singularity report when a recorded denominator falls below eps_div.
ModelEval evaluate_model(const KinematicModel& model, std::span<const double> state,
                         double eps_div = 1e-12);

/// xdot = J(x) u.
Eigen::VectorXd state_derivative(const KinematicModel& model, std::span<const double> state,
                                 const Eigen::VectorXd& u, double eps_div = 1e-12);

ordered_json model_to_json(const KinematicModel& model);
std::string model_to_latex(const KinematicModel& model);

}  // namespace ntrailer
