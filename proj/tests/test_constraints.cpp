#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ntrailer/constraints.hpp"
#include "oracle.hpp"

using namespace ntrailer;
using namespace ntrailer::testing;

namespace {

AngleSum heading(int i, int k) {
  return AngleSum::of(AngleVar::yaw(i)) + AngleSum::of(AngleVar::steer(i, k));
}

}  // namespace

TEST_CASE("intermediate_term") {
  // on-axle tractor hitch: zero lever annihilates the whole term
  const ValidatedSpec on_axle = ValidatedSpec::validate(chain_spec(1, 3.0, 4.0, 0.0));
  CHECK(intermediate_term(on_axle, 2, 1, 1).is_zero_vector());

  // off-axle h_1r = (-c, 0): second component is -c cos(psi1 - psi2) at theta = 0
  VehicleSpec s = chain_spec(1, 3.0, 4.0);
  const double c = 0.8;
  s.units[0].hitch_rear = Vec2{-c, 0.0};
  const ValidatedSpec off_axle = ValidatedSpec::validate(s);
  const Vec2Sym term = intermediate_term(off_axle, 2, 1, 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int t = 0; t < 50; ++t) {
    EvalContext ctx;
    const double psi1 = ang(rng), psi2 = ang(rng);
    ctx.angles[AngleVar::yaw(1)] = psi1;
    ctx.angles[AngleVar::yaw(2)] = psi2;
    ctx.angles[AngleVar::steer(2, 1)] = 0.0;
    ctx.params = off_axle.param_values();
    CHECK(eval(term.y, ctx) == doctest::Approx(-c * std::cos(psi1 - psi2)).epsilon(1e-12));
  }

  // structurally: no yaw variable beyond unit i appears
  std::set<std::string> vars;
  collect_angle_vars(term.x, vars);
  collect_angle_vars(term.y, vars);
  CHECK(vars.count("psi_1") == 1);
  CHECK(vars.count("psi_2") == 1);
  CHECK(vars.count("psi_3") == 0);

  CHECK_THROWS_AS(intermediate_term(off_axle, 2, 2, 1), std::out_of_range);
  CHECK_THROWS_AS(intermediate_term(off_axle, 1, 1, 1), std::out_of_range);
}

TEST_CASE("self_term") {
  // wheel 1 of the tractor sits at the frame origin: S vanishes structurally
  const ValidatedSpec bike = ValidatedSpec::validate(bicycle_spec());
  CHECK(self_term(bike, 1, 1).is_zero_vector());

  // wheel (1,2) at (a, b): second component = a cos(theta12) + b sin(theta12)
  VehicleSpec s = bicycle_spec(3.0);
  s.units[0].wheels[1].position = {3.0, 0.7};
  const ValidatedSpec v = ValidatedSpec::validate(s);
  const Vec2Sym s12 = self_term(v, 1, 2);
  const AngleSum th12 = AngleSum::of(AngleVar::steer(1, 2));
  const ExprPtr expect = sum({product({param("a_1_2"), cos_of(th12)}),
                              product({param("b_1_2"), sin_of(th12)})});
  CHECK(equal(s12.y, expect));

  // trailer wheel 1 at the origin with h_f = (d, 0): second component -d cos(theta_i1)
  const ValidatedSpec chain = ValidatedSpec::validate(chain_spec(1, 3.0, 4.0));
  const Vec2Sym s21 = self_term(chain, 2, 1);
  const AngleSum th21 = AngleSum::of(AngleVar::steer(2, 1));
  CHECK(equal(s21.y, negate(product({param("hfx_2"), cos_of(th21)}))));
}

TEST_CASE("wheel_constraint_row: pinned coefficients") {
  const ValidatedSpec bike = ValidatedSpec::validate(bicycle_spec(3.0));

  // wheel (1,1): pure heading row (-sin(psi1+th11), cos(psi1+th11), 0, 0, 0)
  const ConstraintRow r11 = wheel_constraint_row(bike, 1, 1);
  REQUIRE(r11.coeffs.size() == 5);
  CHECK(equal(r11.coeffs[0], negate(sin_of(heading(1, 1)))));
  CHECK(equal(r11.coeffs[1], cos_of(heading(1, 1))));
  for (std::size_t c = 2; c < 5; ++c) CHECK(is_zero(r11.coeffs[c]));

  // frame-origin property: no parameters, no yaw-rate coefficients
  std::set<std::string> params;
  for (const auto& e : r11.coeffs) collect_params(e, params);
  CHECK(params.empty());

  // wheel (1,2): psidot_1 coefficient = a cos(theta12) (+ b sin for off-axis wheels)
  const ConstraintRow r12 = wheel_constraint_row(bike, 1, 2);
  const AngleSum th12 = AngleSum::of(AngleVar::steer(1, 2));
  CHECK(equal(r12.coeffs[2], product({param("a_1_2"), cos_of(th12)})));

  // trailer row with on-axle tractor hitch: psidot_1 coefficient vanishes,
  // psidot_2 coefficient = -d cos(theta21)
  const ValidatedSpec chain = ValidatedSpec::validate(chain_spec(1, 3.0, 4.0));
  const ConstraintRow r21 = wheel_constraint_row(chain, 2, 1);
  REQUIRE(r21.coeffs.size() == 7);
  CHECK(is_zero(r21.coeffs[2]));
  const AngleSum th21 = AngleSum::of(AngleVar::steer(2, 1));
  CHECK(equal(r21.coeffs[3], negate(product({param("hfx_2"), cos_of(th21)}))));
}

TEST_CASE("build_pfaffian: shape and order") {
  const ValidatedSpec bike = ValidatedSpec::validate(bicycle_spec());
  const PfaffianMatrix p1 = build_pfaffian(bike);
  CHECK(p1.rows.size() == 2);
  CHECK(p1.layout.size() == 5);

  // three units total -> n+1 = 4 rows
  const ValidatedSpec chain = ValidatedSpec::validate(chain_spec(2));
  const PfaffianMatrix p3 = build_pfaffian(chain);
  REQUIRE(p3.rows.size() == 4);
  CHECK(p3.rows[0].unit == 1);
  CHECK(p3.rows[0].wheel == 1);
  CHECK(p3.rows[1].unit == 1);
  CHECK(p3.rows[1].wheel == 2);
  CHECK(p3.rows[2].unit == 2);
  CHECK(p3.rows[3].unit == 3);
  for (const auto& r : p3.rows) CHECK(r.independent);
}

TEST_CASE("triangularity and zero padding over random specs") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 25; ++t) {
    const ValidatedSpec v = ValidatedSpec::validate(random_spec(rng));
    const int n = v.unit_count();
    const PfaffianMatrix pf = build_pfaffian(v);
    for (const auto& row : pf.rows) {
      for (int j = row.unit + 1; j <= n; ++j)
        CHECK(is_zero(row.coeffs[static_cast<std::size_t>(v.yaw_index(j))]));
      for (std::size_t c = static_cast<std::size_t>(2 + n); c < row.coeffs.size(); ++c)
        CHECK(is_zero(row.coeffs[c]));
    }
  }
}

TEST_CASE("numeric cross-check against the double-precision oracle") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  for (int t = 0; t < 25; ++t) {
    const ValidatedSpec v = ValidatedSpec::validate(random_spec(rng));
    const StateLayout layout = v.state_layout();
    std::vector<double> state(layout.size());
    for (std::size_t c = 0; c < state.size(); ++c)
      state[c] = layout[c].is_angle() ? ang(rng) : pos(rng);
    EvalContext ctx = make_context(layout, state, v.param_values());

    for (const auto& [i, k] : v.independent_wheels()) {
      const ConstraintRow row = wheel_constraint_row(v, i, k);
      const double theta = state[static_cast<std::size_t>(v.steer_index(i, k))];
      const Eigen::RowVectorXd oracle = oracle_constraint_row(v, state, i, k, theta);
      const Eigen::RowVectorXd voracle = oracle_velocity_row(v, state, i, k, theta);
      const auto vrow = wheel_velocity_row(v, i, k);
      for (std::size_t c = 0; c < row.coeffs.size(); ++c) {
        CHECK(std::abs(eval(row.coeffs[c], ctx) - oracle[static_cast<Eigen::Index>(c)]) < 1e-12);
        CHECK(std::abs(eval(vrow[c], ctx) - voracle[static_cast<Eigen::Index>(c)]) < 1e-12);
      }
    }
  }
}

TEST_CASE("wheel_velocity_expr") {
  const ValidatedSpec bike = ValidatedSpec::validate(bicycle_spec());
  const ExprPtr vexpr = wheel_velocity_expr(bike, 1, 1);

  // v = cos(psi1+th11) xdot1 + sin(psi1+th11) ydot1; plugging the aligned
  // velocity direction returns the speed itself
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> spd(-5.0, 5.0);
  for (int t = 0; t < 50; ++t) {
    const double psi = ang(rng), th = ang(rng), speed = spd(rng);
    EvalContext ctx;
    ctx.angles[AngleVar::yaw(1)] = psi;
    ctx.angles[AngleVar::steer(1, 1)] = th;
    ctx.params["dot_x1"] = speed * std::cos(psi + th);
    ctx.params["dot_y1"] = speed * std::sin(psi + th);
    ctx.params["dot_psi_1"] = 0.0;
    CHECK(eval(vexpr, ctx) == doctest::Approx(speed).epsilon(1e-12));
  }

  // rear-trailer wheel speed at straight-line motion equals the tractor speed
  const ValidatedSpec chain = ValidatedSpec::validate(chain_spec(2));
  const ExprPtr v31 = wheel_velocity_expr(chain, 3, 1);
  EvalContext ctx;
  for (int i = 1; i <= 3; ++i) ctx.angles[AngleVar::yaw(i)] = 0.0;
  ctx.angles[AngleVar::steer(1, 1)] = 0.0;
  ctx.angles[AngleVar::steer(3, 1)] = 0.0;
  ctx.params = chain.param_values();
  ctx.params["dot_x1"] = 2.5;
  ctx.params["dot_y1"] = 0.0;
  for (int i = 1; i <= 3; ++i) ctx.params["dot_psi_" + std::to_string(i)] = 0.0;
  CHECK(eval(v31, ctx) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("pfaffian serialization") {
  const ValidatedSpec chain = ValidatedSpec::validate(chain_spec(1));
  const PfaffianMatrix pf = build_pfaffian(chain);
  const ordered_json j = pfaffian_to_json(pf);
  CHECK(j.at("rows").size() == 3);
  CHECK(j.at("state").size() == 7);
  CHECK(pfaffian_to_json(pf).dump() == j.dump());  // deterministic
  const std::string latex = pfaffian_to_latex(pf);
  CHECK(latex.find("\\begin{pmatrix}") != std::string::npos);
}
