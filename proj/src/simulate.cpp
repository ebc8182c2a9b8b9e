#include "ntrailer/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "ntrailer/errors.hpp"

namespace ntrailer {

Eigen::VectorXd ControlTrace::at(double time) const {
  if (t.empty()) throw ConfigError("control trace is empty");
  if (time <= t.front()) return u.front();
  if (time >= t.back()) return u.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t hi = static_cast<std::size_t>(it - t.begin());
  const std::size_t lo = hi - 1;
  if (hold == HoldPolicy::ZeroOrder) return u[lo];
  const double w = (time - t[lo]) / (t[hi] - t[lo]);
  return (1.0 - w) * u[lo] + w * u[hi];
}

void ControlTrace::check(int expected_dim) const {
  if (t.empty()) throw ConfigError("control trace is empty");
  if (t.size() != u.size()) throw ConfigError("control trace: time/sample count mismatch");
  for (std::size_t s = 0; s < t.size(); ++s) {
    if (!std::isfinite(t[s])) throw ConfigError("control trace: non-finite timestamp");
    if (s > 0 && t[s] <= t[s - 1])
      throw ConfigError("control trace: timestamps must be strictly increasing (sample " +
                        std::to_string(s) + ")");
    if (u[s].size() != expected_dim)
      throw ConfigError("control trace: sample " + std::to_string(s) + " has dimension " +
                        std::to_string(u[s].size()) + ", expected " +
                        std::to_string(expected_dim));
    if (!u[s].allFinite()) throw ConfigError("control trace: non-finite control value");
  }
}

namespace {

void record_sample(const ValidatedSpec& spec, const KinematicModel& model, Trajectory& traj,
                   double time, const Eigen::VectorXd& x, const ControlTrace& trace,
                   const IntegrationOptions& opts) {
  const Eigen::VectorXd u = trace.at(time);
  const std::span<const double> state{x.data(), static_cast<std::size_t>(x.size())};
  const Eigen::VectorXd xdot = state_derivative(model, state, u, opts.eps_div);

  traj.t.push_back(time);
  traj.x.push_back(x);
  traj.u.push_back(u);
  traj.poses.push_back(spec.recover_poses(state));

  Eigen::VectorXd yr(traj.n);
  for (int i = 1; i <= traj.n; ++i) yr[i - 1] = xdot[spec.yaw_index(i)];
  traj.yaw_rates.push_back(std::move(yr));

  std::vector<Vec2> ww;
  ww.reserve(traj.wheels.size());
  const auto& poses = traj.poses.back();
  for (const auto& [i, k] : traj.wheels)
    ww.push_back(poses[i - 1].p + rotate(poses[i - 1].psi, spec.wheel_position(i, k)));
  traj.wheel_world.push_back(std::move(ww));

  std::vector<double> angles;
  std::vector<std::uint8_t> valid;
  std::uint8_t any_degenerate = 0;
  for (const auto& [i, k] : traj.dependent_wheels) {
    const SteeringSolution sol =
        dependent_steer_angle(spec, model, state, u, i, k, opts.eps_v, opts.eps_div);
    angles.push_back(sol.degenerate ? std::numeric_limits<double>::quiet_NaN() : sol.angle);
    valid.push_back(sol.degenerate ? 0 : 1);
    if (sol.degenerate) any_degenerate = 1;
  }
  traj.dep_angles.push_back(std::move(angles));
  traj.dep_valid.push_back(std::move(valid));
  traj.degenerate.push_back(any_degenerate);
}

}  // namespace

Trajectory integrate(const ValidatedSpec& spec, const KinematicModel& model,
                     const Eigen::VectorXd& x0, const ControlTrace& trace,
                     const IntegrationOptions& opts) {
  if (opts.dt <= 0.0) throw ConfigError("integration step must be positive");
  if (x0.size() != model.state_dim())
    throw ConfigError("initial state has dimension " + std::to_string(x0.size()) +
                      ", expected " + std::to_string(model.state_dim()));
  trace.check(model.control_dim());

  Trajectory traj;
  traj.layout = model.layout;
  traj.n = model.n;
  for (int i = 1; i <= spec.unit_count(); ++i)
    for (int k = 1; k <= spec.wheel_count(i); ++k) traj.wheels.emplace_back(i, k);
  traj.dependent_wheels = spec.dependent_wheels();

  const double t0 = trace.t_begin();
  const long steps = std::max<long>(0, std::lround((trace.t_end() - t0) / opts.dt));

  Eigen::VectorXd x = x0;
  auto f = [&](double time, const Eigen::VectorXd& xs) {
    return state_derivative(model, {xs.data(), static_cast<std::size_t>(xs.size())},
                            trace.at(time), opts.eps_div);
  };

  long last_valid = -1;
  try {
    record_sample(spec, model, traj, t0, x, trace, opts);
    last_valid = 0;
    const double h = opts.dt;
    for (long s = 0; s < steps; ++s) {
      const double time = t0 + static_cast<double>(s) * h;
      const Eigen::VectorXd k1 = f(time, x);
      const Eigen::VectorXd k2 = f(time + h / 2.0, x + (h / 2.0) * k1);
      const Eigen::VectorXd k3 = f(time + h / 2.0, x + (h / 2.0) * k2);
      const Eigen::VectorXd k4 = f(time + h, x + h * k3);
      x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite()) throw NonFiniteStateError(s + 1);
      record_sample(spec, model, traj, t0 + static_cast<double>(s + 1) * h, x, trace, opts);
      last_valid = s + 1;
    }
  } catch (SingularStateError& e) {
    e.set_sample(last_valid);
    throw;
  }
  return traj;
}

RwaSeries rwa(const Trajectory& traj, int i, int j, double eps_yaw) {
  if (i < 1 || j < i || j > traj.n)
    throw std::out_of_range("rwa requires 1 <= i <= j <= n");
  RwaSeries out;
  out.i = i;
  out.j = j;
  const std::size_t ns = traj.samples();
  out.value.resize(ns, std::numeric_limits<double>::quiet_NaN());
  out.valid.resize(ns, 0);

  double max_i = 0.0, max_j = 0.0;
  std::size_t arg_i = 0, arg_j = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    const double wi = traj.yaw_rates[s][i - 1];
    const double wj = traj.yaw_rates[s][j - 1];
    if (std::abs(wi) > max_i) {
      max_i = std::abs(wi);
      arg_i = s;
    }
    if (std::abs(wj) > max_j) {
      max_j = std::abs(wj);
      arg_j = s;
    }
    if (std::abs(wi) >= eps_yaw) {
      out.value[s] = wj / wi;
      out.valid[s] = 1;
      if (!out.peak_pointwise_defined || std::abs(out.value[s]) > out.peak_pointwise) {
        out.peak_pointwise = std::abs(out.value[s]);
        out.peak_pointwise_defined = true;
      }
    }
  }
  if (max_i >= eps_yaw) {
    out.peak_ratio = max_j / max_i;
    out.peak_ratio_defined = true;
    out.peak_time_lag = traj.t[arg_j] - traj.t[arg_i];
  }
  return out;
}

std::vector<double> offtracking(const Trajectory& traj, int reference_unit, int target_unit) {
  if (reference_unit < 1 || reference_unit > traj.n || target_unit < 1 || target_unit > traj.n)
    throw std::out_of_range("offtracking: unit index out of range");
  const std::size_t ns = traj.samples();
  std::vector<double> out(ns, 0.0);
  if (ns < 2) return out;

  for (std::size_t s = 0; s < ns; ++s) {
    const Vec2 q = traj.poses[s][static_cast<std::size_t>(target_unit - 1)].p;
    double best = std::numeric_limits<double>::infinity();
    double sign = 0.0;
    for (std::size_t e = 0; e + 1 < ns; ++e) {
      const Vec2 a = traj.poses[e][static_cast<std::size_t>(reference_unit - 1)].p;
      const Vec2 b = traj.poses[e + 1][static_cast<std::size_t>(reference_unit - 1)].p;
      const Vec2 d = b - a;
      const double len2 = d.x * d.x + d.y * d.y;
      Vec2 nearest = a;
      if (len2 > 0.0) {
        double tpar = ((q.x - a.x) * d.x + (q.y - a.y) * d.y) / len2;
        // the first and last segments extend as lines, so a target trailing
        // behind the path start (or past its end) measures lateral deviation
        // rather than distance to the endpoint
        const double lo = e == 0 ? -std::numeric_limits<double>::infinity() : 0.0;
        const double hi = e + 2 == ns ? std::numeric_limits<double>::infinity() : 1.0;
        tpar = std::clamp(tpar, lo, hi);
        nearest = a + tpar * d;
      }
      const double dist = std::hypot(q.x - nearest.x, q.y - nearest.y);
      if (dist < best) {
        best = dist;
        const double cross = d.x * (q.y - a.y) - d.y * (q.x - a.x);
        sign = len2 > 0.0 ? (cross >= 0.0 ? 1.0 : -1.0) : 0.0;
      }
    }
    out[s] = sign * best;
  }
  return out;
}

ControlTrace inject_noise(const ControlTrace& trace, double sigma_v, double sigma_omega,
                          std::uint64_t seed) {
  if (sigma_v < 0.0 || sigma_omega < 0.0) throw ConfigError("noise sigma must be non-negative");
  ControlTrace out = trace;
  if (sigma_v == 0.0 && sigma_omega == 0.0) return out;

  // Box-Muller on a fixed-seed engine: bit-identical across runs.
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    const double u1 =
        (static_cast<double>(rng()) + 1.0) / (static_cast<double>(std::mt19937_64::max()) + 2.0);
    const double u2 =
        static_cast<double>(rng()) / (static_cast<double>(std::mt19937_64::max()) + 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };

  for (auto& uk : out.u) {
    if (sigma_v > 0.0) uk[0] += sigma_v * gauss();
    if (sigma_omega > 0.0)
      for (Eigen::Index c = 1; c < uk.size(); ++c) uk[c] += sigma_omega * gauss();
  }
  return out;
}

namespace {

ControlTrace build_trace(int units, double v, double duration, double dt,
                         const std::function<double(double)>& steer_rate) {
  if (units < 1) throw ConfigError("scenario: need at least one vehicle unit");
  if (duration <= 0.0) throw ConfigError("scenario: duration must be positive");
  if (dt <= 0.0) throw ConfigError("scenario: sample step must be positive");
  if (!std::isfinite(v)) throw ConfigError("scenario: non-finite speed");

  const int m = units + 2;
  const long samples = std::lround(duration / dt);
  ControlTrace trace;
  trace.hold = HoldPolicy::ZeroOrder;
  for (long s = 0; s <= samples; ++s) {
    const double time = static_cast<double>(s) * dt;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    u[0] = v;
    u[2] = steer_rate(time);
    trace.t.push_back(time);
    trace.u.push_back(std::move(u));
  }
  return trace;
}

}  // namespace

ControlTrace scenario_step(int units, double v, double steer, double ramp, double start,
                           double hold, double duration, double dt) {
  if (ramp <= 0.0) throw ConfigError("step scenario: ramp must be positive");
  if (start < 0.0 || hold < 0.0) throw ConfigError("step scenario: negative interval");
  const double rate = steer / ramp;
  return build_trace(units, v, duration, dt, [=](double t) {
    if (t >= start && t < start + ramp) return rate;
    const double back = start + ramp + hold;
    if (t >= back && t < back + ramp) return -rate;
    return 0.0;
  });
}

ControlTrace scenario_sine(int units, double v, double amp, double freq, double start,
                           double duration, double dt) {
  if (freq <= 0.0) throw ConfigError("sine scenario: frequency must be positive");
  if (start < 0.0) throw ConfigError("sine scenario: negative start");
  const double w = 2.0 * M_PI * freq;
  return build_trace(units, v, duration, dt, [=](double t) {
    return t >= start ? amp * w * std::cos(w * (t - start)) : 0.0;
  });
}

ControlTrace scenario_circle(int units, double v, double steer, double ramp, double duration,
                             double dt) {
  if (ramp <= 0.0) throw ConfigError("circle scenario: ramp must be positive");
  const double rate = steer / ramp;
  return build_trace(units, v, duration, dt, [=](double t) { return t < ramp ? rate : 0.0; });
}

}  // namespace ntrailer
