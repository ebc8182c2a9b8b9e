#include "ntrailer/constraints.hpp"

#include <stdexcept>

namespace ntrailer {

namespace {

AngleSum heading(int i, int k) {
  return AngleSum::of(AngleVar::yaw(i)) + AngleSum::of(AngleVar::steer(i, k));
}

Vec2Sym vec_diff(const Vec2Sym& a, const Vec2Sym& b) {
  return {sum({a.x, negate(b.x)}), sum({a.y, negate(b.y)})};
}

void check_indices(const ValidatedSpec& spec, int i, int k) {
  if (i < 1 || i > spec.unit_count() || k < 1 || k > spec.wheel_count(i))
    throw std::out_of_range("wheel (" + std::to_string(i) + "," + std::to_string(k) +
                            ") out of range");
}

// Shared assembly of the 2-row wheel velocity transform; `select_y` picks the
// constraint row, otherwise the velocity row.
std::vector<ExprPtr> wheel_rows(const ValidatedSpec& spec, int i, int k, bool select_y) {
  check_indices(spec, i, k);
  std::vector<ExprPtr> coeffs(static_cast<std::size_t>(spec.state_dim()), zero());

  const Mat2Sym rt = transpose_rot(heading(i, k));
  coeffs[0] = select_y ? rt.c : rt.a;
  coeffs[1] = select_y ? rt.d : rt.b;

  for (int m = 1; m < i; ++m) {
    const Vec2Sym im = intermediate_term(spec, i, m, k);
    coeffs[static_cast<std::size_t>(spec.yaw_index(m))] = select_y ? im.y : im.x;
  }
  const Vec2Sym s = self_term(spec, i, k);
  coeffs[static_cast<std::size_t>(spec.yaw_index(i))] = select_y ? s.y : s.x;
  return coeffs;
}

}  // namespace

Vec2Sym intermediate_term(const ValidatedSpec& spec, int i, int m, int k) {
  check_indices(spec, i, k);
  if (m < 1 || m >= i)
    throw std::out_of_range("intermediate unit " + std::to_string(m) + " not in [1, " +
                            std::to_string(i) + ")");
  const AngleSum angle = AngleSum::of(AngleVar::yaw(m)) - AngleSum::of(AngleVar::yaw(i)) -
                         AngleSum::of(AngleVar::steer(i, k)) + AngleSum::quarter_turn(1);
  return rot(angle) * vec_diff(spec.hitch_rear_sym(m), spec.hitch_front_sym(m));
}

Vec2Sym self_term(const ValidatedSpec& spec, int i, int k) {
  check_indices(spec, i, k);
  const AngleSum angle = AngleSum::quarter_turn(1) - AngleSum::of(AngleVar::steer(i, k));
  return rot(angle) * vec_diff(spec.wheel_sym(i, k), spec.hitch_front_sym(i));
}

ConstraintRow wheel_constraint_row(const ValidatedSpec& spec, int i, int k) {
  ConstraintRow row;
  row.unit = i;
  row.wheel = k;
  row.independent = spec.is_independent(i, k);
  row.coeffs = wheel_rows(spec, i, k, /*select_y=*/true);
  return row;
}

PfaffianMatrix build_pfaffian(const ValidatedSpec& spec) {
  PfaffianMatrix pf;
  pf.layout = spec.state_layout();
  for (const auto& [i, k] : spec.independent_wheels())
    pf.rows.push_back(wheel_constraint_row(spec, i, k));
  return pf;
}

std::vector<ExprPtr> wheel_velocity_row(const ValidatedSpec& spec, int i, int k) {
  return wheel_rows(spec, i, k, /*select_y=*/false);
}

ExprPtr wheel_velocity_expr(const ValidatedSpec& spec, int i, int k) {
  const auto coeffs = wheel_velocity_row(spec, i, k);
  const StateLayout layout = spec.state_layout();
  std::vector<ExprPtr> terms;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (is_zero(coeffs[j])) continue;
    terms.push_back(product({coeffs[j], param("dot_" + layout[j].name())}));
  }
  if (terms.empty()) return zero();
  return sum(std::move(terms));
}

ordered_json pfaffian_to_json(const PfaffianMatrix& pf) {
  ordered_json layout = ordered_json::array();
  for (const auto& c : pf.layout) layout.push_back(c.name());
  ordered_json rows = ordered_json::array();
  for (const auto& r : pf.rows) {
    ordered_json coeffs = ordered_json::array();
    for (const auto& e : r.coeffs) coeffs.push_back(expr_to_json(e));
    rows.push_back(ordered_json{{"unit", r.unit},
                                {"wheel", r.wheel},
                                {"independent", r.independent},
                                {"coefficients", std::move(coeffs)}});
  }
  return ordered_json{{"state", std::move(layout)}, {"rows", std::move(rows)}};
}

std::string pfaffian_to_latex(const PfaffianMatrix& pf) {
  std::string s = "A(x) = \\begin{pmatrix}\n";
  for (std::size_t r = 0; r < pf.rows.size(); ++r) {
    for (std::size_t c = 0; c < pf.rows[r].coeffs.size(); ++c) {
      if (c) s += " & ";
      s += expr_to_latex(pf.rows[r].coeffs[c]);
    }
    if (r + 1 < pf.rows.size()) s += " \\\\";
    s += "\n";
  }
  s += "\\end{pmatrix}\n";
  return s;
}

}  // namespace ntrailer
