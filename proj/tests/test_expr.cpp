#include <doctest.h>

#include <cmath>
#include <random>

#include "ntrailer/errors.hpp"
#include "ntrailer/expr.hpp"
#include "ntrailer/expr_io.hpp"
#include "ntrailer/symmat.hpp"

using namespace ntrailer;

namespace {

const AngleVar kPsi1 = AngleVar::yaw(1);
const AngleVar kPsi2 = AngleVar::yaw(2);
const AngleVar kTh11 = AngleVar::steer(1, 1);
const AngleVar kTh12 = AngleVar::steer(1, 2);

AngleSum av(const AngleVar& v) { return AngleSum::of(v); }

EvalContext random_ctx(std::mt19937_64& rng, double eps_div = 1e-12) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> par(-3.0, 3.0);
  EvalContext ctx;
  ctx.eps_div = eps_div;
  ctx.angles[kPsi1] = ang(rng);
  ctx.angles[kPsi2] = ang(rng);
  ctx.angles[kTh11] = ang(rng);
  ctx.angles[kTh12] = ang(rng);
  ctx.params["p"] = par(rng);
  ctx.params["q"] = par(rng);
  return ctx;
}

double eval_mat_entry(const Mat2Sym& m, int r, int c, const EvalContext& ctx) {
  const ExprPtr& e = r == 0 ? (c == 0 ? m.a : m.b) : (c == 0 ? m.c : m.d);
  return eval(e, ctx);
}

// --- blueprint fuzzer: an independent recursive-double oracle ---------------

struct Blue {
  ExprKind kind = ExprKind::Rational;
  Rational r;
  std::string param;
  AngleSum angle;
  std::vector<Blue> kids;
};

Blue random_blue(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> leaf_pick(0, 3);
  std::uniform_int_distribution<int> node_pick(0, 7);
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::uniform_int_distribution<int> qt(0, 3);
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> arity(2, 3);

  const int pick = depth <= 0 ? leaf_pick(rng) : node_pick(rng);
  Blue b;
  switch (pick) {
    case 0:
      b.kind = ExprKind::Rational;
      b.r = Rational(num(rng), den(rng));
      return b;
    case 1:
      b.kind = ExprKind::Param;
      b.param = std::uniform_int_distribution<int>(0, 1)(rng) ? "p" : "q";
      return b;
    case 2:
    case 3: {
      b.kind = pick == 2 ? ExprKind::Sin : ExprKind::Cos;
      AngleSum a = AngleSum::quarter_turn(qt(rng));
      for (const AngleVar& v : {kPsi1, kPsi2, kTh11, kTh12}) a.add(v, coeff(rng));
      b.angle = a;
      return b;
    }
    case 4:
    case 5: {
      b.kind = pick == 4 ? ExprKind::Sum : ExprKind::Product;
      const int k = arity(rng);
      for (int i = 0; i < k; ++i) b.kids.push_back(random_blue(rng, depth - 1));
      return b;
    }
    case 6:
      b.kind = ExprKind::Quotient;
      b.kids.push_back(random_blue(rng, depth - 1));
      b.kids.push_back(random_blue(rng, depth - 1));
      return b;
    default:
      b.kind = ExprKind::Neg;
      b.kids.push_back(random_blue(rng, depth - 1));
      return b;
  }
}

double eval_blue(const Blue& b, const EvalContext& ctx) {
  switch (b.kind) {
    case ExprKind::Rational:
      return b.r.to_double();
    case ExprKind::Param:
      return ctx.params.at(b.param);
    case ExprKind::Sin:
      return std::sin(b.angle.eval(ctx.angles));
    case ExprKind::Cos:
      return std::cos(b.angle.eval(ctx.angles));
    case ExprKind::Sum: {
      double s = 0.0;
      for (const auto& k : b.kids) s += eval_blue(k, ctx);
      return s;
    }
    case ExprKind::Product: {
      double s = 1.0;
      for (const auto& k : b.kids) s *= eval_blue(k, ctx);
      return s;
    }
    case ExprKind::Quotient: {
      const double d = eval_blue(b.kids[1], ctx);
      if (std::abs(d) < ctx.eps_div) throw DivisionNearZeroError(d);
      return eval_blue(b.kids[0], ctx) / d;
    }
    case ExprKind::Neg:
      return -eval_blue(b.kids[0], ctx);
  }
  return 0.0;
}

// May throw std::invalid_argument when a denominator folds to literal zero.
ExprPtr build_blue(const Blue& b) {
  switch (b.kind) {
    case ExprKind::Rational:
      return rational(b.r);
    case ExprKind::Param:
      return param(b.param);
    case ExprKind::Sin:
      return sin_of(b.angle);
    case ExprKind::Cos:
      return cos_of(b.angle);
    case ExprKind::Sum:
    case ExprKind::Product: {
      std::vector<ExprPtr> kids;
      for (const auto& k : b.kids) kids.push_back(build_blue(k));
      return b.kind == ExprKind::Sum ? sum(std::move(kids)) : product(std::move(kids));
    }
    case ExprKind::Quotient:
      return quotient(build_blue(b.kids[0]), build_blue(b.kids[1]));
    case ExprKind::Neg:
      return negate(build_blue(b.kids[0]));
  }
  return zero();
}

}  // namespace

TEST_CASE("rotation matrices: pinned forms") {
  // zero angle
  const Mat2Sym r0 = rot(AngleSum{});
  CHECK(is_one(r0.a));
  CHECK(is_zero(r0.b));
  CHECK(is_zero(r0.c));
  CHECK(is_one(r0.d));

  // quarter-turn folding: rot(psi1 + pi/2) = [[-sin psi1, -cos psi1], [cos psi1, -sin psi1]]
  const Mat2Sym rq = rot(av(kPsi1) + AngleSum::quarter_turn(1));
  CHECK(equal(rq.a, negate(sin_of(av(kPsi1)))));
  CHECK(equal(rq.b, negate(cos_of(av(kPsi1)))));
  CHECK(equal(rq.c, cos_of(av(kPsi1))));
  CHECK(equal(rq.d, negate(sin_of(av(kPsi1)))));

  // transpose_rot(psi1) = rot(-psi1)
  const Mat2Sym t = transpose_rot(av(kPsi1));
  const Mat2Sym rn = rot(-av(kPsi1));
  CHECK(equal(t.a, rn.a));
  CHECK(equal(t.b, rn.b));
  CHECK(equal(t.c, rn.c));
  CHECK(equal(t.d, rn.d));

  const Mat2Sym t0 = transpose_rot(AngleSum{});
  CHECK(is_one(t0.a));
  CHECK(is_one(t0.d));
}

TEST_CASE("rotation algebra: structural and numeric") {
  const AngleSum a = av(kPsi1) + av(kTh11);
  const AngleSum b = av(kPsi2);

  // rot(a) * rot(b) == rot(a + b) structurally
  const Mat2Sym prod = rot(a) * rot(b);
  const Mat2Sym direct = rot(a + b);
  CHECK(equal(prod.a, direct.a));
  CHECK(equal(prod.b, direct.b));
  CHECK(equal(prod.c, direct.c));
  CHECK(equal(prod.d, direct.d));

  // transpose_rot(a) * rot(a) == identity structurally
  const Mat2Sym ident = transpose_rot(a) * rot(a);
  CHECK(is_one(ident.a));
  CHECK(is_zero(ident.b));
  CHECK(is_zero(ident.c));
  CHECK(is_one(ident.d));

  // transpose_rot(psi1+th12) * rot(psi1+th11) == rot(th11 - th12), numerically
  const Mat2Sym mixed = transpose_rot(av(kPsi1) + av(kTh12)) * rot(av(kPsi1) + av(kTh11));
  const Mat2Sym expect = rot(av(kTh11) - av(kTh12));
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const EvalContext ctx = random_ctx(rng);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        CHECK(eval_mat_entry(mixed, r, c, ctx) ==
              doctest::Approx(eval_mat_entry(expect, r, c, ctx)).epsilon(1e-12));
  }
  // and structurally after canonicalization
  CHECK(equal(mixed.a, expect.a));
  CHECK(equal(mixed.c, expect.c));
}

TEST_CASE("simplification: pinned rewrites") {
  // Sum(Sin, -Sin) -> 0
  CHECK(is_zero(sum({sin_of(av(kPsi1)), negate(sin_of(av(kPsi1)))})));

  // Sin(psi + 2 quarter turns) -> -Sin(psi)
  CHECK(equal(sin_of(av(kPsi1) + AngleSum::quarter_turn(2)), negate(sin_of(av(kPsi1)))));

  // Product(Cos t, Quotient(Sin t, Cos t)) -> Sin t
  const ExprPtr cancelled =
      product({cos_of(av(kTh12)), quotient(sin_of(av(kTh12)), cos_of(av(kTh12)))});
  CHECK(equal(cancelled, sin_of(av(kTh12))));

  // numeric sanity of the cancellation on 100 random points
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const EvalContext ctx = random_ctx(rng, 1e-6);
    try {
      CHECK(eval(cancelled, ctx) == doctest::Approx(std::sin(ctx.angles.at(kTh12))).epsilon(1e-12));
    } catch (const DivisionNearZeroError&) {
    }
  }

  // sin^2 + cos^2 -> 1
  CHECK(is_one(sum({product({sin_of(av(kPsi1)), sin_of(av(kPsi1))}),
                    product({cos_of(av(kPsi1)), cos_of(av(kPsi1))})})));
}

TEST_CASE("evaluation: pinned values and errors") {
  EvalContext ctx;
  ctx.angles[kPsi1] = M_PI / 2.0;
  CHECK(eval(sin_of(av(kPsi1)), ctx) == doctest::Approx(1.0).epsilon(1e-15));

  // 1 / cos(theta) at theta = pi/2 -> division near zero
  EvalContext sing;
  sing.angles[kTh12] = M_PI / 2.0;
  CHECK_THROWS_AS(eval(quotient(one(), cos_of(av(kTh12))), sing), DivisionNearZeroError);

  // unbound symbol
  CHECK_THROWS_AS(eval(param("nope"), ctx), UnboundSymbolError);
  EvalContext empty;
  CHECK_THROWS_AS(eval(sin_of(av(kTh11)), empty), UnboundSymbolError);

  // gamma_psi1 at th11=0, th12=0.3, a=3, b=0  ->  tan(0.3)/3
  const ExprPtr gamma = quotient(sin_of(av(kTh12) - av(kTh11)),
                                 sum({product({param("a_1_2"), cos_of(av(kTh12))}),
                                      product({param("b_1_2"), sin_of(av(kTh12))})}));
  EvalContext g;
  g.angles[kTh11] = 0.0;
  g.angles[kTh12] = 0.3;
  g.params["a_1_2"] = 3.0;
  g.params["b_1_2"] = 0.0;
  CHECK(eval(gamma, g) == doctest::Approx(std::tan(0.3) / 3.0).epsilon(1e-14));
}

TEST_CASE("canonical form: uniqueness and ordering") {
  // same term multiset built in different orders -> structurally identical
  const AngleSum a1 = av(kPsi1) + av(kTh12) - av(kTh11);
  AngleSum a2 = AngleSum::of(kTh12);
  a2 = a2 - av(kTh11);
  a2 = a2 + av(kPsi1);
  CHECK(a1 == a2);
  CHECK(equal(sin_of(a1), sin_of(a2)));

  const ExprPtr s1 = sum({param("p"), cos_of(av(kPsi1)), rational(2)});
  const ExprPtr s2 = sum({rational(2), cos_of(av(kPsi1)), param("p")});
  CHECK(equal(s1, s2));

  const ExprPtr p1 = product({param("p"), cos_of(av(kPsi1)), rational(-3)});
  const ExprPtr p2 = product({rational(-3), cos_of(av(kPsi1)), param("p")});
  CHECK(equal(p1, p2));

  // constant folding: no all-constant sums or products survive
  CHECK(is_rational(sum({rational(1, 2), rational(1, 3)})));
  CHECK(is_rational(product({rational(2, 3), rational(3, 2)})));
  CHECK(equal(product({rational(2), param("p"), rational(1, 2)}), param("p")));
}

TEST_CASE("quotient invariants") {
  CHECK_THROWS_AS(quotient(param("p"), zero()), std::invalid_argument);
  CHECK(is_zero(quotient(zero(), param("p"))));
  // constant denominator folds into the coefficient
  CHECK(equal(quotient(param("p"), rational(2)), product({rational(1, 2), param("p")})));
  // nested quotients flatten
  const ExprPtr nested = quotient(quotient(param("p"), cos_of(av(kTh11))), sin_of(av(kTh12)));
  const ExprPtr flat = quotient(param("p"), product({cos_of(av(kTh11)), sin_of(av(kTh12))}));
  CHECK(equal(nested, flat));
  // sign normalization: (-p)/(-cos) == p/cos
  CHECK(equal(quotient(negate(param("p")), negate(cos_of(av(kTh11)))),
              quotient(param("p"), cos_of(av(kTh11)))));
}

TEST_CASE("fuzz: soundness against a recursive-double oracle and idempotence") {
  std::mt19937_64 rng(20260809);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const Blue blue = random_blue(rng, 4);
    ExprPtr built;
    try {
      built = build_blue(blue);
    } catch (const std::invalid_argument&) {
      continue;  // a denominator folded to the literal zero constant
    }

    // idempotence
    const ExprPtr s1 = simplify(built);
    CHECK(equal(s1, built));
    CHECK(equal(simplify(s1), s1));

    for (int b = 0; b < 10; ++b) {
      const EvalContext ctx = random_ctx(rng, 1e-3);
      double ref = 0.0, got = 0.0;
      bool ref_sing = false, got_sing = false;
      try {
        ref = eval_blue(blue, ctx);
      } catch (const DivisionNearZeroError&) {
        ref_sing = true;
      }
      try {
        got = eval(built, ctx);
      } catch (const DivisionNearZeroError&) {
        got_sing = true;
      }
      if (ref_sing || got_sing) continue;  // singular under either route: skip binding
      ++checked;
      CHECK(std::abs(got - ref) <= 1e-10 * (1.0 + std::abs(ref)));
    }
  }
  CHECK(checked > 5000);  // the skip path must not eat the test
}

TEST_CASE("node_count shares subtrees") {
  const ExprPtr shared = cos_of(av(kTh11));
  const ExprPtr a = product({param("p"), shared});
  const ExprPtr b = product({param("q"), shared});
  const std::vector<ExprPtr> roots{a, b};
  // shared cos node counted once: p, q, cos, 2 products
  CHECK(node_count({roots.data(), roots.size()}) == 5);
}

TEST_CASE("expression serialization is deterministic") {
  const ExprPtr gamma = quotient(sin_of(av(kTh12) - av(kTh11)),
                                 sum({product({param("a_1_2"), cos_of(av(kTh12))}),
                                      product({param("b_1_2"), sin_of(av(kTh12))})}));
  const std::string j1 = expr_to_json(gamma).dump();
  const std::string j2 = expr_to_json(gamma).dump();
  CHECK(j1 == j2);
  CHECK(j1.find("\"kind\":\"quotient\"") != std::string::npos);

  const std::string latex = expr_to_latex(gamma);
  CHECK(latex.find("\\frac") != std::string::npos);
  CHECK(latex.find("\\theta_{1,2}") != std::string::npos);
}
