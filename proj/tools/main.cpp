#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntrailer/config_json.hpp"
#include "ntrailer/csv.hpp"
#include "ntrailer/errors.hpp"
#include "ntrailer/kernel.hpp"
#include "ntrailer/simulate.hpp"

namespace {

using namespace ntrailer;

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("NTRAILER_LOG");
    if (!env) return LogLevel::Warn;
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    std::fprintf(stderr, "ntrailer: ignoring unknown NTRAILER_LOG value \"%s\"\n", env);
    return LogLevel::Warn;
  }();
  return level;
}

void log_msg(LogLevel lvl, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (lvl <= log_level())
    std::fprintf(stderr, "ntrailer[%s]: %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

void emit_output(const std::optional<std::string>& path, const std::string& content) {
  if (path)
    write_file(*path, content);
  else
    std::fputs(content.c_str(), stdout);
}

ValidatedSpec load_spec(const std::string& config_path, AngleUnit* unit_out = nullptr) {
  const VehicleConfig cfg = parse_vehicle_config(read_file(config_path));
  if (unit_out) *unit_out = cfg.angle_unit;
  ValidatedSpec spec = ValidatedSpec::validate(cfg.spec);
  for (const auto& w : spec.warnings()) log_msg(LogLevel::Warn, w);
  return spec;
}

/// `arg` is either an inline JSON array or @path to a file holding one.
std::vector<double> parse_vector_arg(const std::string& arg, const std::string& what) {
  const std::string text = (!arg.empty() && arg[0] == '@') ? read_file(arg.substr(1)) : arg;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON: " + e.what());
  }
  if (!doc.is_array()) throw ConfigError(what + ": expected a JSON array of numbers");
  std::vector<double> out;
  for (const auto& v : doc) {
    if (!v.is_number()) throw ConfigError(what + ": expected a JSON array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Angle-valued state entries arrive in the config's declared unit.
Eigen::VectorXd state_from_arg(const ValidatedSpec& spec, const std::vector<double>& values,
                               AngleUnit unit, const std::string& what) {
  const StateLayout layout = spec.state_layout();
  if (values.size() != layout.size())
    throw ConfigError(what + ": expected " + std::to_string(layout.size()) +
                      " entries, got " + std::to_string(values.size()));
  const double scale = angle_scale(unit);
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = layout[i].is_angle() ? values[i] * scale : values[i];
  return x;
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("bad --params entry \"" + item + "\" (expected key=value)");
    const std::string key = item.substr(0, eq);
    try {
      out[key] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value in --params entry \"" + item + "\"");
    }
  }
  return out;
}

double take_param(std::map<std::string, double>& params, const std::string& key, double dflt) {
  const auto it = params.find(key);
  if (it == params.end()) return dflt;
  const double v = it->second;
  params.erase(it);
  return v;
}

ordered_json json_or_null(double v, bool defined) {
  return defined ? ordered_json(v) : ordered_json(nullptr);
}

// --- subcommands -----------------------------------------------------------

int cmd_derive(const std::string& config_path, const std::string& emit,
               const std::optional<std::string>& out_path) {
  const ValidatedSpec spec = load_spec(config_path);
  const KinematicModel model = derive_model(spec);
  log_msg(LogLevel::Info, "derived model for " + std::to_string(model.n) + " unit(s), " +
                              std::to_string(node_count({model.F.data(), model.F.size()})) +
                              " expression nodes");
  if (emit == "latex")
    emit_output(out_path, model_to_latex(model));
  else
    emit_output(out_path, model_to_json(model).dump(2) + "\n");
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& controls_path,
                 const std::string& x0_arg, double dt, const std::string& hold,
                 const std::optional<std::string>& out_path, double sigma_v, double sigma_omega,
                 std::uint64_t seed) {
  AngleUnit unit = AngleUnit::Radians;
  const ValidatedSpec spec = load_spec(config_path, &unit);
  const KinematicModel model = derive_model(spec);

  ControlTrace trace = read_trace_csv(read_file(controls_path));
  trace.hold = hold == "linear" ? HoldPolicy::Linear : HoldPolicy::ZeroOrder;
  trace.check(model.control_dim());
  if (sigma_v > 0.0 || sigma_omega > 0.0) {
    trace = inject_noise(trace, sigma_v, sigma_omega, seed);
    log_msg(LogLevel::Info, "injected control noise (seed " + std::to_string(seed) + ")");
  }

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(model.state_dim());
  if (!x0_arg.empty())
    x0 = state_from_arg(spec, parse_vector_arg(x0_arg, "--x0"), unit, "--x0");

  IntegrationOptions opts;
  opts.dt = dt;
  const Trajectory traj = integrate(spec, model, x0, trace, opts);

  std::vector<RwaSeries> series;
  for (int j = 2; j <= traj.n; ++j) series.push_back(rwa(traj, 1, j));

  if (out_path) write_file(*out_path, write_trajectory_csv(traj, series));

  ordered_json peak_ratio = ordered_json::object();
  ordered_json peak_pointwise = ordered_json::object();
  ordered_json peak_lag = ordered_json::object();
  for (const auto& r : series) {
    const std::string key = std::to_string(r.i) + "_" + std::to_string(r.j);
    peak_ratio[key] = json_or_null(r.peak_ratio, r.peak_ratio_defined);
    peak_pointwise[key] = json_or_null(r.peak_pointwise, r.peak_pointwise_defined);
    peak_lag[key] = json_or_null(r.peak_time_lag, r.peak_ratio_defined);
  }
  ordered_json peak_offtracking = ordered_json::object();
  for (int jU = 2; jU <= traj.n; ++jU) {
    const auto off = offtracking(traj, 1, jU);
    double peak = 0.0;
    for (double v : off) peak = std::max(peak, std::abs(v));
    peak_offtracking[std::to_string(jU)] = peak;
  }
  long degenerate = 0;
  for (auto d : traj.degenerate) degenerate += d;

  const ordered_json summary{{"samples", traj.samples()},
                             {"t_end", traj.t.empty() ? 0.0 : traj.t.back()},
                             {"peak_rwa_ratio", std::move(peak_ratio)},
                             {"peak_rwa_pointwise", std::move(peak_pointwise)},
                             {"peak_yaw_lag", std::move(peak_lag)},
                             {"peak_offtracking", std::move(peak_offtracking)},
                             {"degenerate_samples", degenerate}};
  std::fputs((summary.dump(2) + "\n").c_str(), stdout);
  return 0;
}

int cmd_ackermann(const std::string& config_path, const std::string& state_arg,
                  const std::string& u_arg) {
  AngleUnit unit = AngleUnit::Radians;
  const ValidatedSpec spec = load_spec(config_path, &unit);
  const KinematicModel model = derive_model(spec);

  const Eigen::VectorXd x =
      state_from_arg(spec, parse_vector_arg(state_arg, "--state"), unit, "--state");
  const std::vector<double> uv = parse_vector_arg(u_arg, "--u");
  if (static_cast<int>(uv.size()) != model.control_dim())
    throw ConfigError("--u: expected " + std::to_string(model.control_dim()) + " entries, got " +
                      std::to_string(uv.size()));
  Eigen::VectorXd u(model.control_dim());
  for (int c = 0; c < model.control_dim(); ++c) u[c] = uv[static_cast<std::size_t>(c)];

  const std::span<const double> state{x.data(), static_cast<std::size_t>(x.size())};
  bool any_degenerate = false;

  ordered_json wheels = ordered_json::object();
  for (const auto& [i, k] : spec.dependent_wheels()) {
    const SteeringSolution sol = dependent_steer_angle(spec, model, state, u, i, k);
    any_degenerate |= sol.degenerate;
    wheels["theta_" + std::to_string(i) + "_" + std::to_string(k)] =
        json_or_null(sol.angle, !sol.degenerate);
  }
  ordered_json hitches = ordered_json::object();
  for (int i = 1; i <= spec.unit_count(); ++i) {
    if (spec.hitch_rear(i)) {
      const SteeringSolution sol = virtual_hitch_steer(spec, model, state, u, i, HitchEnd::Rear);
      any_degenerate |= sol.degenerate;
      hitches["rear_" + std::to_string(i)] = json_or_null(sol.angle, !sol.degenerate);
    }
    if (spec.hitch_front(i)) {
      const SteeringSolution sol = virtual_hitch_steer(spec, model, state, u, i, HitchEnd::Front);
      any_degenerate |= sol.degenerate;
      hitches["front_" + std::to_string(i)] = json_or_null(sol.angle, !sol.degenerate);
    }
  }

  const ordered_json out{{"dependent_wheels", std::move(wheels)},
                         {"virtual_hitch", std::move(hitches)},
                         {"degenerate", any_degenerate}};
  std::fputs((out.dump(2) + "\n").c_str(), stdout);
  if (any_degenerate) {
    log_msg(LogLevel::Error, "degenerate point velocity: steering angles undefined");
    return 4;
  }
  return 0;
}

int cmd_scenario(const std::string& kind, const std::string& params_arg,
                 const std::optional<std::string>& out_path) {
  std::map<std::string, double> p = parse_params(params_arg);
  const int units = 1 + static_cast<int>(take_param(p, "trailers", 1));
  const double v = take_param(p, "v", 5.0);
  const double duration = take_param(p, "duration", 20.0);
  const double dt = take_param(p, "dt", 0.01);

  ControlTrace trace;
  if (kind == "step") {
    const double steer = take_param(p, "steer", 0.3);
    const double ramp = take_param(p, "ramp", 0.5);
    const double start = take_param(p, "start", 1.0);
    const double hold = take_param(p, "hold", 8.0);
    if (!p.empty()) throw ConfigError("unknown --params key \"" + p.begin()->first + "\"");
    trace = scenario_step(units, v, steer, ramp, start, hold, duration, dt);
  } else if (kind == "sine") {
    const double amp = take_param(p, "amp", 0.2);
    const double freq = take_param(p, "freq", 0.25);
    const double start = take_param(p, "start", 1.0);
    if (!p.empty()) throw ConfigError("unknown --params key \"" + p.begin()->first + "\"");
    trace = scenario_sine(units, v, amp, freq, start, duration, dt);
  } else if (kind == "circle") {
    const double steer = take_param(p, "steer", 0.2);
    const double ramp = take_param(p, "ramp", 1.0);
    if (!p.empty()) throw ConfigError("unknown --params key \"" + p.begin()->first + "\"");
    trace = scenario_circle(units, v, steer, ramp, duration, dt);
  } else {
    throw ConfigError("unknown scenario kind \"" + kind + "\"");
  }
  emit_output(out_path, write_trace_csv(trace));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form kinematic models for articulated n-trailer vehicles"};
  app.require_subcommand(1);

  std::string config_path, controls_path, emit = "json", x0_arg, state_arg, u_arg;
  std::string hold = "zoh", kind, params_arg;
  std::optional<std::string> out_path;
  double dt = 0.01, sigma_v = 0.0, sigma_omega = 0.0;
  std::uint64_t seed = 0;

  auto* derive = app.add_subcommand("derive", "Derive the symbolic kinematic model");
  derive->add_option("--config", config_path, "vehicle description JSON")->required();
  derive->add_option("--emit", emit, "output format")->check(CLI::IsMember({"json", "latex"}));
  derive->add_option("--out", out_path, "output path (stdout when omitted)");

  auto* simulate = app.add_subcommand("simulate", "Integrate the model over a control trace");
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--controls", controls_path, "control trace CSV")->required();
  simulate->add_option("--x0", x0_arg, "initial state (JSON array or @file; zeros by default)");
  simulate->add_option("--dt", dt, "integration step [s]");
  simulate->add_option("--hold", hold, "control hold policy")
      ->check(CLI::IsMember({"zoh", "linear"}));
  simulate->add_option("--out", out_path, "trajectory CSV path")->required();
  simulate->add_option("--noise-sigma-v", sigma_v, "speed noise std dev [m/s]");
  simulate->add_option("--noise-sigma-omega", sigma_omega, "steer-rate noise std dev [rad/s]");
  simulate->add_option("--seed", seed, "noise seed");

  auto* ackermann = app.add_subcommand("ackermann", "Resolve dependent and virtual steering");
  ackermann->add_option("--config", config_path)->required();
  ackermann->add_option("--state", state_arg, "reduced state (JSON array or @file)")->required();
  ackermann->add_option("--u", u_arg, "control vector (JSON array or @file)")->required();

  auto* scenario = app.add_subcommand("scenario", "Generate a built-in control trace");
  scenario->add_option("--kind", kind, "scenario kind")
      ->required()
      ->check(CLI::IsMember({"step", "sine", "circle"}));
  scenario->add_option("--params", params_arg,
                       "comma-separated key=value list (trailers,v,duration,dt,...)");
  scenario->add_option("--out", out_path, "trace CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (derive->parsed()) return cmd_derive(config_path, emit, out_path);
    if (simulate->parsed())
      return cmd_simulate(config_path, controls_path, x0_arg, dt, hold, out_path, sigma_v,
                          sigma_omega, seed);
    if (ackermann->parsed()) return cmd_ackermann(config_path, state_arg, u_arg);
    if (scenario->parsed()) return cmd_scenario(kind, params_arg, out_path);
  } catch (const StructurallySingularError& e) {
    log_msg(LogLevel::Error, e.what());
    return 3;
  } catch (const SingularStateError& e) {
    log_msg(LogLevel::Error, std::string(e.what()) +
                                 (e.sample() >= 0
                                      ? " (last valid sample " + std::to_string(e.sample()) + ")"
                                      : ""));
    return 4;
  } catch (const ValidationError& e) {
    log_msg(LogLevel::Error, e.what());
    return 2;
  } catch (const ConfigError& e) {
    log_msg(LogLevel::Error, e.what());
    return 2;
  } catch (const Error& e) {
    log_msg(LogLevel::Error, e.what());
    return 1;
  } catch (const std::exception& e) {
    log_msg(LogLevel::Error, e.what());
    return 1;
  }
  return 0;
}
