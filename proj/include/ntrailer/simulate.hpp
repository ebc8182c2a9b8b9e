#pragma once

#include <cstdint>
#include <vector>

#include "ntrailer/ackermann.hpp"

namespace ntrailer {

enum class HoldPolicy { ZeroOrder, Linear };

/// Time series of control vectors u = (v, omega_1_1, omega_1_2,
/// omega_2_1, ..., omega_n_1); timestamps strictly increasing.
struct ControlTrace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> u;
  HoldPolicy hold = HoldPolicy::ZeroOrder;

  int dim() const { return t.empty() ? 0 : static_cast<int>(u.front().size()); }
  double t_begin() const { return t.front(); }
  double t_end() const { return t.back(); }

  /// Control at an arbitrary time under the hold policy; clamped to the
  /// first/last sample outside the trace window.
  Eigen::VectorXd at(double time) const;

  /// Throws ConfigError on inconsistent lengths, non-increasing timestamps,
  /// non-finite values or a control dimension mismatch.
  void check(int expected_dim) const;
};

/// Simulation output: states plus everything recovered from them.
struct Trajectory {
  StateLayout layout;
  int n = 0;
  std::vector<std::pair<int, int>> wheels;            // all (unit, wheel), layout order
  std::vector<std::pair<int, int>> dependent_wheels;  // Ackermann-resolved subset

  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;                 // applied control at each sample
  std::vector<std::vector<Pose>> poses;           // [sample][unit-1]
  std::vector<Eigen::VectorXd> yaw_rates;         // [sample], size n
  std::vector<std::vector<Vec2>> wheel_world;     // [sample][wheel index]
  std::vector<std::vector<double>> dep_angles;    // [sample][dependent index]
  std::vector<std::vector<std::uint8_t>> dep_valid;
  std::vector<std::uint8_t> degenerate;           // any dependent angle undefined at sample

  std::size_t samples() const { return t.size(); }
};

struct IntegrationOptions {
  double dt = 0.01;
  double eps_div = 1e-12;
  double eps_v = 1e-9;
};

/// Classical fixed-step RK4 over xdot = J(x)u from the first to the last
/// trace timestamp. Poses, wheel paths, yaw rates and dependent steering
/// angles are recovered at every sample. Throws SingularStateError (with the
/// last valid sample index) and NonFiniteStateError.
Trajectory integrate(const ValidatedSpec& spec, const KinematicModel& model,
                     const Eigen::VectorXd& x0, const ControlTrace& trace,
                     const IntegrationOptions& opts = {});

/// Rearward yaw-rate amplification of unit j with respect to unit i (i <= j).
/// The pointwise series psidot_j/psidot_i is masked where |psidot_i| falls
/// below eps_yaw; the peak-ratio scalar max|psidot_j| / max|psidot_i| is the
/// literature definition and is reported separately, together with the lag
/// between the two yaw-rate peaks.
struct RwaSeries {
  int i = 0, j = 0;
  std::vector<double> value;
  std::vector<std::uint8_t> valid;
  double peak_pointwise = 0.0;
  bool peak_pointwise_defined = false;
  double peak_ratio = 0.0;
  bool peak_ratio_defined = false;
  double peak_time_lag = 0.0;  // t(peak |psidot_j|) - t(peak |psidot_i|)
};

RwaSeries rwa(const Trajectory& traj, int i, int j, double eps_yaw = 1e-3);

/// Signed lateral deviation (left of travel positive) of the target unit's
/// reference point from the polyline traced by the reference unit.
std::vector<double> offtracking(const Trajectory& traj, int reference_unit, int target_unit);

/// Additive Gaussian noise on the speed column (sigma_v) and every steering
/// rate column (sigma_omega); deterministic for a fixed seed.
ControlTrace inject_noise(const ControlTrace& trace, double sigma_v, double sigma_omega,
                          std::uint64_t seed);

// Built-in open-loop scenarios. All hold the speed constant and steer only
// wheel (1,2); rates are zero outside the described intervals.

/// Steer ramps to `steer` over `ramp` seconds starting at `start`, holds for
/// `hold` seconds, then ramps back to zero.
ControlTrace scenario_step(int units, double v, double steer, double ramp, double start,
                           double hold, double duration, double dt);

/// Steering angle follows amp*sin(2*pi*freq*(t-start)).
ControlTrace scenario_sine(int units, double v, double amp, double freq, double start,
                           double duration, double dt);

/// Steer ramps to `steer` over `ramp` seconds and holds it for the rest of
/// the trace.
ControlTrace scenario_circle(int units, double v, double steer, double ramp, double duration,
                             double dt);

}  // namespace ntrailer
