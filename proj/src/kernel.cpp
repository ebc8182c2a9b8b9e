#include "ntrailer/kernel.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "ntrailer/errors.hpp"

namespace ntrailer {

KinematicModel solve_kernel(const PfaffianMatrix& pf, std::map<std::string, double> params) {
  KinematicModel model;
  model.layout = pf.layout;
  model.n = (static_cast<int>(pf.layout.size()) - 3) / 2;
  model.params = std::move(params);
  const int n = model.n;
  if (static_cast<int>(pf.rows.size()) != n + 1)
    throw std::invalid_argument("Pfaffian matrix must have n+1 independent rows");

  model.controls.push_back({"v_w_1_1", 1, 1, true});
  model.controls.push_back({"omega_1_1", 1, 1, false});
  model.controls.push_back({"omega_1_2", 1, 2, false});
  for (int i = 2; i <= n; ++i)
    model.controls.push_back({"omega_" + std::to_string(i) + "_1", i, 1, false});

  const auto yaw_index = [n](int unit) { return 2 + unit - 1; };

  // Wheel (1,1) sits at the tractor frame origin, so its row constrains only
  // the heading of pdot_1; the admissible direction is the wheel axis and the
  // free scale is the wheel speed control.
  const ConstraintRow& heading_row = pf.rows[0];
  assert(heading_row.unit == 1 && heading_row.wheel == 1);
  for (std::size_t j = 2; j < heading_row.coeffs.size(); ++j)
    assert(is_zero(heading_row.coeffs[j]));
  model.F.push_back(heading_row.coeffs[1]);          //  cos(psi_1 + theta_1_1)
  model.F.push_back(negate(heading_row.coeffs[0]));  //  sin(psi_1 + theta_1_1)

  // Remaining rows resolve one yaw rate each:
  //   f_psi_i = -(c_x f_x1 + c_y f_y1 + sum_{m<i} c_psi_m f_psi_m) / c_psi_i
  for (int r = 1; r <= n; ++r) {
    const ConstraintRow& row = pf.rows[static_cast<std::size_t>(r)];
    const int i = row.unit;
    std::vector<ExprPtr> residual;
    residual.push_back(product({row.coeffs[0], model.F[0]}));
    residual.push_back(product({row.coeffs[1], model.F[1]}));
    for (int m = 1; m < i; ++m) {
      const ExprPtr& c = row.coeffs[static_cast<std::size_t>(yaw_index(m))];
      if (!is_zero(c)) residual.push_back(product({c, model.F[static_cast<std::size_t>(2 + m - 1)]}));
    }
    const ExprPtr den = row.coeffs[static_cast<std::size_t>(yaw_index(i))];
    if (is_zero(den))
      throw StructurallySingularError(
          i, row.wheel,
          "yaw-rate divisor for unit " + std::to_string(i) + " from wheel (" + std::to_string(i) +
              "," + std::to_string(row.wheel) +
              ") is identically zero; the wheel coincides with the unit's steering reference "
              "(degenerate geometry)");
    model.F.push_back(negate(quotient(sum(std::move(residual)), den)));
    model.singularities.push_back(
        {i, row.wheel, den,
         "denominator dividing the yaw rate of unit " + std::to_string(i) +
             " during back-substitution of wheel (" + std::to_string(i) + "," +
             std::to_string(row.wheel) + ")"});
  }
  return model;
}

KinematicModel derive_model(const ValidatedSpec& spec) {
  return solve_kernel(build_pfaffian(spec), spec.param_values());
}

ModelEval evaluate_model(const KinematicModel& model, std::span<const double> state,
                         double eps_div) {
  const EvalContext ctx = make_context(model.layout, state, model.params, eps_div);

  // Check the recorded divisors first so singular configurations surface with
  // their location instead of a bare division error.
  for (const auto& s : model.singularities) {
    const double d = eval(s.denominator, ctx);
    if (std::abs(d) < eps_div)
      throw SingularStateError("singular configuration: " + s.description +
                                   " evaluates to " + std::to_string(d),
                               s.unit, s.wheel);
  }

  ModelEval out;
  const int m = model.control_dim();
  out.F.resize(m);
  for (int r = 0; r < m; ++r) out.F[r] = eval(model.F[static_cast<std::size_t>(r)], ctx);

  out.J = Eigen::MatrixXd::Zero(model.state_dim(), m);
  for (int r = 0; r < m; ++r) out.J(r, 0) = out.F[r];
  for (int c = 1; c < m; ++c) out.J(m + c - 1, c) = 1.0;
  return out;
}

Eigen::VectorXd state_derivative(const KinematicModel& model, std::span<const double> state,
                                 const Eigen::VectorXd& u, double eps_div) {
  if (u.size() != model.control_dim())
    throw std::invalid_argument("control vector has dimension " + std::to_string(u.size()) +
                                ", expected " + std::to_string(model.control_dim()));
  const ModelEval ev = evaluate_model(model, state, eps_div);
  Eigen::VectorXd xdot = Eigen::VectorXd::Zero(model.state_dim());
  const int m = model.control_dim();
  for (int r = 0; r < m; ++r) xdot[r] = ev.F[r] * u[0];
  for (int c = 1; c < m; ++c) xdot[m + c - 1] = u[c];
  return xdot;
}

ordered_json model_to_json(const KinematicModel& model) {
  ordered_json state = ordered_json::array();
  for (const auto& c : model.layout) state.push_back(c.name());
  ordered_json controls = ordered_json::array();
  for (const auto& c : model.controls) controls.push_back(c.name);

  ordered_json f = ordered_json::object();
  f["f_x1"] = expr_to_json(model.F[0]);
  f["f_y1"] = expr_to_json(model.F[1]);
  for (int i = 1; i <= model.n; ++i)
    f["f_psi_" + std::to_string(i)] = expr_to_json(model.F[static_cast<std::size_t>(1 + i)]);

  ordered_json sing = ordered_json::array();
  for (const auto& s : model.singularities)
    sing.push_back(ordered_json{{"unit", s.unit},
                                {"wheel", s.wheel},
                                {"description", s.description},
                                {"denominator", expr_to_json(s.denominator)}});

  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : model.params) params[k] = v;  // std::map: sorted, deterministic

  return ordered_json{{"units", model.n},       {"state", std::move(state)},
                      {"controls", std::move(controls)}, {"F", std::move(f)},
                      {"singularities", std::move(sing)}, {"params", std::move(params)}};
}

std::string model_to_latex(const KinematicModel& model) {
  std::string s;
  s += "% kinematic model: xdot = J(x) u, u = (";
  for (std::size_t i = 0; i < model.controls.size(); ++i) {
    if (i) s += ", ";
    s += model.controls[i].name;
  }
  s += ")\n\\begin{align*}\n";
  const auto line = [&](const std::string& lhs, const ExprPtr& e, bool last) {
    s += lhs + " &= " + expr_to_latex(e);
    if (!last) s += " \\\\";
    s += "\n";
  };
  line("f_{x_1}", model.F[0], false);
  line("f_{y_1}", model.F[1], model.n == 0);
  for (int i = 1; i <= model.n; ++i)
    line("f_{\\psi_{" + std::to_string(i) + "}}", model.F[static_cast<std::size_t>(1 + i)],
         i == model.n);
  s += "\\end{align*}\n";
  return s;
}

}  // namespace ntrailer
