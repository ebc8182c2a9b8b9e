#pragma once

#include <string>
#include <vector>

#include "ntrailer/simulate.hpp"

namespace ntrailer {

/// Control trace CSV: header "t,v,omega_1_1,omega_1_2,omega_2_1,...,omega_n_1",
/// one sample per line, '.' decimal separator, LF line endings. The hold
/// policy is not part of the file; the caller chooses it.
ControlTrace read_trace_csv(const std::string& text);
std::string write_trace_csv(const ControlTrace& trace);

/// Trajectory CSV columns: t, x1, y1, psi_1..psi_n, independent steering
/// angles, resolved dependent steering angles, per-unit x_i, y_i, psidot_i,
/// pointwise rwa_1_j (j = 2..n), flag. Masked/degenerate entries are "nan";
/// flag is 1 when any dependent angle was degenerate at the sample.
std::string write_trajectory_csv(const Trajectory& traj, const std::vector<RwaSeries>& rwa_series);

/// Shortest round-trip decimal rendering (deterministic).
std::string format_double(double v);

}  // namespace ntrailer
