#include "ntrailer/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ntrailer/errors.hpp"

namespace ntrailer {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  double v = 0.0;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw CsvError("not a number: \"" + field + "\"", row, col);
  return v;
}

std::vector<std::string> trace_header(int units) {
  std::vector<std::string> h{"t", "v", "omega_1_1", "omega_1_2"};
  for (int i = 2; i <= units; ++i) h.push_back("omega_" + std::to_string(i) + "_1");
  return h;
}

}  // namespace

ControlTrace read_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  ControlTrace trace;
  int m = -1;  // control dimension n+2

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);

    if (row == 1) {
      if (fields.size() < 4) throw CsvError("trace header needs at least 4 columns", 1, 1);
      const int units = static_cast<int>(fields.size()) - 3;
      const auto expect = trace_header(units);
      for (std::size_t c = 0; c < fields.size(); ++c)
        if (fields[c] != expect[c])
          throw CsvError("unexpected trace column \"" + fields[c] + "\" (expected \"" +
                             expect[c] + "\")",
                         1, c + 1);
      m = units + 2;
      continue;
    }

    if (static_cast<int>(fields.size()) != m + 1)
      throw CsvError("expected " + std::to_string(m + 1) + " fields, got " +
                         std::to_string(fields.size()),
                     row, 1);
    trace.t.push_back(parse_number(fields[0], row, 1));
    Eigen::VectorXd u(m);
    for (int c = 0; c < m; ++c)
      u[c] = parse_number(fields[static_cast<std::size_t>(c + 1)], row, static_cast<std::size_t>(c + 2));
    trace.u.push_back(std::move(u));
  }
  if (m < 0) throw CsvError("empty trace file", 1, 1);
  if (trace.t.empty()) throw CsvError("trace has no samples", 2, 1);
  return trace;
}

std::string write_trace_csv(const ControlTrace& trace) {
  if (trace.t.empty()) throw ConfigError("cannot write an empty trace");
  const int m = trace.dim();
  std::string out;
  const auto header = trace_header(m - 2);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (std::size_t s = 0; s < trace.t.size(); ++s) {
    out += format_double(trace.t[s]);
    for (int c = 0; c < m; ++c) {
      out += ',';
      out += format_double(trace.u[s][c]);
    }
    out += '\n';
  }
  return out;
}

std::string write_trajectory_csv(const Trajectory& traj,
                                 const std::vector<RwaSeries>& rwa_series) {
  const int n = traj.n;
  std::string out = "t,x1,y1";
  for (int i = 1; i <= n; ++i) out += ",psi_" + std::to_string(i);
  out += ",theta_1_1,theta_1_2";
  for (int i = 2; i <= n; ++i) out += ",theta_" + std::to_string(i) + "_1";
  for (const auto& [i, k] : traj.dependent_wheels)
    out += ",theta_" + std::to_string(i) + "_" + std::to_string(k);
  for (int i = 1; i <= n; ++i) {
    const std::string is = std::to_string(i);
    out += ",x_" + is + ",y_" + is + ",psidot_" + is;
  }
  for (const auto& r : rwa_series)
    out += ",rwa_" + std::to_string(r.i) + "_" + std::to_string(r.j);
  out += ",flag\n";

  const std::size_t ns = traj.samples();
  for (std::size_t s = 0; s < ns; ++s) {
    out += format_double(traj.t[s]);
    const Eigen::VectorXd& x = traj.x[s];
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      out += ',';
      out += format_double(x[c]);
    }
    for (std::size_t d = 0; d < traj.dependent_wheels.size(); ++d) {
      out += ',';
      out += traj.dep_valid[s][d] ? format_double(traj.dep_angles[s][d]) : "nan";
    }
    for (int i = 1; i <= n; ++i) {
      const Pose& p = traj.poses[s][static_cast<std::size_t>(i - 1)];
      out += ',' + format_double(p.p.x) + ',' + format_double(p.p.y) + ',' +
             format_double(traj.yaw_rates[s][i - 1]);
    }
    for (const auto& r : rwa_series) {
      out += ',';
      out += r.valid[s] ? format_double(r.value[s]) : "nan";
    }
    out += ',';
    out += traj.degenerate[s] ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace ntrailer
