#include "ntrailer/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ntrailer/errors.hpp"

namespace ntrailer {

namespace {

ExprPtr make_node(ExprKind k) { return std::make_shared<Expr>(Expr::factory_tag{}, k); }

int kind_rank(ExprKind k) { return static_cast<int>(k); }

// A term is coeff * factor_1 * ... * factor_m with sorted, non-constant,
// non-negated factors. Every canonical non-Sum expression decomposes into
// exactly one term.
struct Term {
  Rational coeff{1};
  std::vector<ExprPtr> factors;  // sorted by compare()
};

bool factor_less(const ExprPtr& a, const ExprPtr& b) { return compare(a, b) < 0; }

Term term_of(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Rational:
      return Term{e->value, {}};
    case ExprKind::Neg: {
      Term t = term_of(e->kids[0]);
      t.coeff = -t.coeff;
      return t;
    }
    case ExprKind::Product: {
      Term t;
      std::size_t first = 0;
      if (e->kids[0]->kind == ExprKind::Rational) {
        t.coeff = e->kids[0]->value;
        first = 1;
      }
      t.factors.assign(e->kids.begin() + first, e->kids.end());
      return t;
    }
    default:
      return Term{Rational(1), {e}};
  }
}

bool contains_quotient(const std::vector<ExprPtr>& factors) {
  return std::any_of(factors.begin(), factors.end(),
                     [](const ExprPtr& f) { return f->kind == ExprKind::Quotient; });
}

ExprPtr rebuild_term(const Rational& coeff, std::vector<ExprPtr> factors) {
  if (coeff.is_zero()) return zero();
  if (factors.empty()) return rational(coeff);
  if (factors.size() > 1 && contains_quotient(factors)) {
    // route through product() so the quotient is pulled back on top
    factors.insert(factors.begin(), rational(coeff));
    return product(std::move(factors));
  }
  const bool neg = coeff.negative();
  const Rational a = coeff.abs();
  // a bare negated sum distributes the sign into its terms
  if (neg && a.is_one() && factors.size() == 1 && factors[0]->kind == ExprKind::Sum)
    return negate(factors[0]);
  ExprPtr core;
  if (a.is_one() && factors.size() == 1) {
    core = factors[0];
  } else {
    std::vector<ExprPtr> kids;
    if (!a.is_one()) kids.push_back(rational(a));
    kids.insert(kids.end(), factors.begin(), factors.end());
    if (kids.size() == 1) {
      core = kids[0];
    } else {
      auto node = make_node(ExprKind::Product);
      const_cast<Expr*>(node.get())->kids = std::move(kids);
      core = node;
    }
  }
  if (!neg) return core;
  auto node = make_node(ExprKind::Neg);
  const_cast<Expr*>(node.get())->kids = {core};
  return node;
}

ExprPtr rebuild_term(const Term& t) { return rebuild_term(t.coeff, t.factors); }

// Multiset difference of two sorted factor vectors.
void multiset_diff(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b,
                   std::vector<ExprPtr>& only_a, std::vector<ExprPtr>& only_b,
                   std::vector<ExprPtr>& common) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int c = compare(a[i], b[j]);
    if (c == 0) {
      common.push_back(a[i]);
      ++i;
      ++j;
    } else if (c < 0) {
      only_a.push_back(a[i++]);
    } else {
      only_b.push_back(b[j++]);
    }
  }
  for (; i < a.size(); ++i) only_a.push_back(a[i]);
  for (; j < b.size(); ++j) only_b.push_back(b[j]);
}

struct TrigAtom {
  bool is_sin;
  const AngleSum* angle;
};

std::optional<TrigAtom> trig_atom(const ExprPtr& e) {
  if (e->kind == ExprKind::Sin) return TrigAtom{true, &e->angle};
  if (e->kind == ExprKind::Cos) return TrigAtom{false, &e->angle};
  return std::nullopt;
}

// Angle-addition contraction across a pair of sum terms:
//   sin A cos B + cos A sin B -> sin(A+B)     sin A cos B - cos A sin B -> sin(A-B)
//   cos A cos B - sin A sin B -> cos(A+B)     cos A cos B + sin A sin B -> cos(A-B)
// With A == B the last rule is the Pythagorean identity. Terms must agree in
// every other factor and in |coefficient|.
std::optional<Term> try_contract(const Term& t1, const Term& t2) {
  const bool same_sign = t1.coeff == t2.coeff;
  const bool opp_sign = t1.coeff == -t2.coeff;
  if (!same_sign && !opp_sign) return std::nullopt;

  std::vector<ExprPtr> d1, d2, common;
  multiset_diff(t1.factors, t2.factors, d1, d2, common);
  if (d1.size() != 2 || d2.size() != 2) return std::nullopt;

  auto a0 = trig_atom(d1[0]), a1 = trig_atom(d1[1]);
  auto b0 = trig_atom(d2[0]), b1 = trig_atom(d2[1]);
  if (!a0 || !a1 || !b0 || !b1) return std::nullopt;

  ExprPtr contracted;  // replaces the four differing atoms
  const int sins1 = (a0->is_sin ? 1 : 0) + (a1->is_sin ? 1 : 0);
  const int sins2 = (b0->is_sin ? 1 : 0) + (b1->is_sin ? 1 : 0);
  Rational coeff = t1.coeff;

  if (sins1 == 1 && sins2 == 1) {
    // c1*sin(A)cos(B) + c2*cos(A)sin(B)
    const TrigAtom& s1 = a0->is_sin ? *a0 : *a1;
    const TrigAtom& c1f = a0->is_sin ? *a1 : *a0;
    const TrigAtom& s2 = b0->is_sin ? *b0 : *b1;
    const TrigAtom& c2f = b0->is_sin ? *b1 : *b0;
    const AngleSum &A = *s1.angle, &B = *c1f.angle;
    if (!(*c2f.angle == A) || !(*s2.angle == B)) return std::nullopt;
    contracted = same_sign ? sin_of(A + B) : sin_of(A - B);
  } else if (sins1 == 0 && sins2 == 2) {
    // c1*cos(A)cos(B) + c2*sin(A)sin(B)
    const AngleSum &A = *a0->angle, &B = *a1->angle;
    std::vector<const AngleSum*> ss{b0->angle, b1->angle};
    const bool match = (*ss[0] == A && *ss[1] == B) || (*ss[0] == B && *ss[1] == A);
    if (!match) return std::nullopt;
    contracted = opp_sign ? cos_of(A + B) : cos_of(A - B);
  } else if (sins1 == 2 && sins2 == 0) {
    // c1*sin(A)sin(B) + c2*cos(A)cos(B)
    const AngleSum &A = *a0->angle, &B = *a1->angle;
    std::vector<const AngleSum*> cc{b0->angle, b1->angle};
    const bool match = (*cc[0] == A && *cc[1] == B) || (*cc[0] == B && *cc[1] == A);
    if (!match) return std::nullopt;
    if (same_sign) {
      contracted = cos_of(A - B);
    } else {
      contracted = cos_of(A + B);
      coeff = -coeff;
    }
  } else {
    return std::nullopt;
  }

  Term result;
  const Term extra = term_of(contracted);  // sin_of/cos_of may fold to +-1, 0 or Neg
  result.coeff = coeff * extra.coeff;
  result.factors = common;
  for (const auto& f : extra.factors) {
    auto it = std::lower_bound(result.factors.begin(), result.factors.end(), f, factor_less);
    result.factors.insert(it, f);
  }
  return result;
}

void merge_term(std::vector<Term>& terms, const Term& t) {
  if (t.coeff.is_zero()) return;
  for (auto it = terms.begin(); it != terms.end(); ++it) {
    if (it->factors.size() != t.factors.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      if (compare(it->factors[i], t.factors[i]) != 0) {
        same = false;
        break;
      }
    }
    if (same) {
      it->coeff = it->coeff + t.coeff;
      if (it->coeff.is_zero()) terms.erase(it);
      return;
    }
  }
  terms.push_back(t);
}

ExprPtr trig(bool want_cos, const AngleSum& a, int sign) {
  AngleSum rest = a;
  if (!rest.has_terms()) {
    // pure constant angle (quarter turns already folded by the caller)
    if (want_cos) return rational(sign);
    return zero();
  }
  if (rest.leading_sign() < 0) {
    rest = -rest;
    if (!want_cos) sign = -sign;
  }
  auto node = make_node(want_cos ? ExprKind::Cos : ExprKind::Sin);
  const_cast<Expr*>(node.get())->angle = rest;
  if (sign >= 0) return node;
  auto neg = make_node(ExprKind::Neg);
  const_cast<Expr*>(neg.get())->kids = {node};
  return neg;
}

}  // namespace

ExprPtr zero() {
  static const ExprPtr z = rational(Rational(0));
  return z;
}

ExprPtr one() {
  static const ExprPtr o = rational(Rational(1));
  return o;
}

ExprPtr rational(Rational r) {
  auto node = make_node(ExprKind::Rational);
  const_cast<Expr*>(node.get())->value = r;
  return node;
}

ExprPtr rational(std::int64_t num, std::int64_t den) { return rational(Rational(num, den)); }

ExprPtr param(std::string name) {
  auto node = make_node(ExprKind::Param);
  const_cast<Expr*>(node.get())->param = std::move(name);
  return node;
}

ExprPtr sin_of(const AngleSum& a) {
  const int qt = a.quarter_turns();
  const bool want_cos = (qt == 1 || qt == 3);
  const int sign = (qt == 2 || qt == 3) ? -1 : 1;
  return trig(want_cos, a.without_quarter_turns(), sign);
}

ExprPtr cos_of(const AngleSum& a) {
  const int qt = a.quarter_turns();
  const bool want_cos = (qt == 0 || qt == 2);
  const int sign = (qt == 1 || qt == 2) ? -1 : 1;
  return trig(want_cos, a.without_quarter_turns(), sign);
}

ExprPtr negate(ExprPtr e) {
  switch (e->kind) {
    case ExprKind::Rational:
      return rational(-e->value);
    case ExprKind::Neg:
      return e->kids[0];
    case ExprKind::Sum: {
      std::vector<ExprPtr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(negate(k));
      return sum(std::move(kids));
    }
    default: {
      Term t = term_of(e);
      t.coeff = -t.coeff;
      return rebuild_term(t);
    }
  }
}

ExprPtr product(std::vector<ExprPtr> factors) {
  Rational coeff(1);
  std::vector<ExprPtr> plain, nums, dens;

  auto take = [&](auto&& self, const ExprPtr& f) -> void {
    switch (f->kind) {
      case ExprKind::Rational:
        coeff = coeff * f->value;
        break;
      case ExprKind::Neg:
        coeff = -coeff;
        self(self, f->kids[0]);
        break;
      case ExprKind::Product:
        for (const auto& k : f->kids) self(self, k);
        break;
      case ExprKind::Quotient:
        nums.push_back(f->kids[0]);
        dens.push_back(f->kids[1]);
        break;
      default:
        plain.push_back(f);
        break;
    }
  };
  for (const auto& f : factors) take(take, f);

  if (coeff.is_zero()) return zero();

  if (!dens.empty()) {
    std::vector<ExprPtr> num_parts = std::move(plain);
    num_parts.push_back(rational(coeff));
    num_parts.insert(num_parts.end(), nums.begin(), nums.end());
    return quotient(product(std::move(num_parts)), product(std::move(dens)));
  }

  std::sort(plain.begin(), plain.end(), factor_less);
  return rebuild_term(coeff, std::move(plain));
}

namespace {

// Splits a factor tree into numerator/denominator factor lists, descending
// into quotient factors so nested quotients always flatten. Sums stay opaque.
void split_fraction(const ExprPtr& e, bool to_num, Rational& c_num, Rational& c_den,
                    std::vector<ExprPtr>& nums, std::vector<ExprPtr>& dens) {
  if (e->kind == ExprKind::Quotient) {
    split_fraction(e->kids[0], to_num, c_num, c_den, nums, dens);
    split_fraction(e->kids[1], !to_num, c_num, c_den, nums, dens);
    return;
  }
  const Term t = term_of(e);
  (to_num ? c_num : c_den) = (to_num ? c_num : c_den) * t.coeff;
  for (const auto& f : t.factors) {
    if (f->kind == ExprKind::Quotient) {
      split_fraction(f->kids[0], to_num, c_num, c_den, nums, dens);
      split_fraction(f->kids[1], !to_num, c_num, c_den, nums, dens);
    } else {
      (to_num ? nums : dens).push_back(f);
    }
  }
}

}  // namespace

ExprPtr quotient(ExprPtr num, ExprPtr den) {
  if (is_zero(den)) throw std::invalid_argument("quotient: denominator is the zero constant");
  if (is_zero(num)) return zero();

  Rational c_num(1), c_den(1);
  std::vector<ExprPtr> nums, dens;
  split_fraction(num, true, c_num, c_den, nums, dens);
  split_fraction(den, false, c_num, c_den, nums, dens);
  std::sort(nums.begin(), nums.end(), factor_less);
  std::sort(dens.begin(), dens.end(), factor_less);

  std::vector<ExprPtr> fn, fd, common;
  multiset_diff(nums, dens, fn, fd, common);
  const Rational k = c_num / c_den;
  if (fd.empty()) return rebuild_term(k, std::move(fn));

  auto node = make_node(ExprKind::Quotient);
  const_cast<Expr*>(node.get())->kids = {rebuild_term(Rational(1), std::move(fn)),
                                         rebuild_term(Rational(1), std::move(fd))};
  return rebuild_term(k, {node});
}

ExprPtr sum(std::vector<ExprPtr> input) {
  std::vector<Term> terms;

  auto take = [&](auto&& self, const ExprPtr& e) -> void {
    if (e->kind == ExprKind::Sum) {
      for (const auto& k : e->kids) self(self, k);
    } else if (e->kind == ExprKind::Neg && e->kids[0]->kind == ExprKind::Sum) {
      for (const auto& k : e->kids[0]->kids) self(self, negate(k));
    } else {
      merge_term(terms, term_of(e));
    }
  };
  for (const auto& e : input) take(take, e);

  // contraction to fixpoint
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < terms.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < terms.size() && !changed; ++j) {
        if (auto c = try_contract(terms[i], terms[j])) {
          terms.erase(terms.begin() + j);
          terms.erase(terms.begin() + i);
          merge_term(terms, *c);
          changed = true;
        }
      }
    }
  }

  if (terms.empty()) return zero();
  if (terms.size() == 1) return rebuild_term(terms[0]);

  std::vector<ExprPtr> kids;
  kids.reserve(terms.size());
  for (const auto& t : terms) kids.push_back(rebuild_term(t));
  std::sort(kids.begin(), kids.end(), factor_less);
  auto node = make_node(ExprKind::Sum);
  const_cast<Expr*>(node.get())->kids = std::move(kids);
  return node;
}

int compare(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
  switch (a->kind) {
    case ExprKind::Rational:
      return compare(a->value, b->value);
    case ExprKind::Param:
      return a->param.compare(b->param) < 0 ? -1 : (a->param == b->param ? 0 : 1);
    case ExprKind::Sin:
    case ExprKind::Cos:
      return compare(a->angle, b->angle);
    default: {
      const std::size_t n = std::min(a->kids.size(), b->kids.size());
      for (std::size_t i = 0; i < n; ++i) {
        const int c = compare(a->kids[i], b->kids[i]);
        if (c != 0) return c;
      }
      if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
      return 0;
    }
  }
}

std::size_t node_count(std::span<const ExprPtr> roots) {
  std::unordered_set<const Expr*> seen;
  auto visit = [&](auto&& self, const ExprPtr& e) -> void {
    if (!seen.insert(e.get()).second) return;
    for (const auto& k : e->kids) self(self, k);
  };
  for (const auto& r : roots) visit(visit, r);
  return seen.size();
}

void collect_params(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::Param) out.insert(e->param);
  for (const auto& k : e->kids) collect_params(k, out);
}

namespace {

double eval_rec(const ExprPtr& e, const EvalContext& ctx,
                std::unordered_map<const Expr*, double>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  double v = 0.0;
  switch (e->kind) {
    case ExprKind::Rational:
      v = e->value.to_double();
      break;
    case ExprKind::Param: {
      auto p = ctx.params.find(e->param);
      if (p == ctx.params.end()) throw UnboundSymbolError(e->param);
      v = p->second;
      break;
    }
    case ExprKind::Sin:
      v = std::sin(e->angle.eval(ctx.angles));
      break;
    case ExprKind::Cos:
      v = std::cos(e->angle.eval(ctx.angles));
      break;
    case ExprKind::Sum:
      for (const auto& k : e->kids) v += eval_rec(k, ctx, memo);
      break;
    case ExprKind::Product:
      v = 1.0;
      for (const auto& k : e->kids) v *= eval_rec(k, ctx, memo);
      break;
    case ExprKind::Quotient: {
      const double den = eval_rec(e->kids[1], ctx, memo);
      if (std::abs(den) < ctx.eps_div) throw DivisionNearZeroError(den);
      v = eval_rec(e->kids[0], ctx, memo) / den;
      break;
    }
    case ExprKind::Neg:
      v = -eval_rec(e->kids[0], ctx, memo);
      break;
  }
  memo.emplace(e.get(), v);
  return v;
}

ExprPtr simplify_rec(const ExprPtr& e, std::unordered_map<const Expr*, ExprPtr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  ExprPtr r;
  switch (e->kind) {
    case ExprKind::Rational:
    case ExprKind::Param:
      r = e;
      break;
    case ExprKind::Sin:
      r = sin_of(e->angle);
      break;
    case ExprKind::Cos:
      r = cos_of(e->angle);
      break;
    case ExprKind::Neg:
      r = negate(simplify_rec(e->kids[0], memo));
      break;
    case ExprKind::Quotient:
      r = quotient(simplify_rec(e->kids[0], memo), simplify_rec(e->kids[1], memo));
      break;
    case ExprKind::Sum:
    case ExprKind::Product: {
      std::vector<ExprPtr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(simplify_rec(k, memo));
      r = e->kind == ExprKind::Sum ? sum(std::move(kids)) : product(std::move(kids));
      break;
    }
  }
  memo.emplace(e.get(), r);
  return r;
}

std::string angle_str(const AngleSum& a) {
  std::string s;
  for (const auto& [v, c] : a.terms()) {
    if (!s.empty() || c < 0) s += c < 0 ? "-" : "+";
    if (std::abs(c) != 1) s += std::to_string(std::abs(c)) + "*";
    s += v.name();
  }
  if (a.quarter_turns() != 0) {
    if (!s.empty()) s += "+";
    s += std::to_string(a.quarter_turns()) + "*pi/2";
  }
  if (s.empty()) s = "0";
  return s;
}

}  // namespace

double eval(const ExprPtr& e, const EvalContext& ctx) {
  std::unordered_map<const Expr*, double> memo;
  return eval_rec(e, ctx, memo);
}

ExprPtr simplify(const ExprPtr& e) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  return simplify_rec(e, memo);
}

std::string to_string(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Rational:
      return e->value.str();
    case ExprKind::Param:
      return e->param;
    case ExprKind::Sin:
      return "sin(" + angle_str(e->angle) + ")";
    case ExprKind::Cos:
      return "cos(" + angle_str(e->angle) + ")";
    case ExprKind::Sum: {
      std::string s = "(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) s += " + ";
        s += to_string(e->kids[i]);
      }
      return s + ")";
    }
    case ExprKind::Product: {
      std::string s;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) s += "*";
        s += to_string(e->kids[i]);
      }
      return s;
    }
    case ExprKind::Quotient:
      return to_string(e->kids[0]) + "/(" + to_string(e->kids[1]) + ")";
    case ExprKind::Neg:
      return "-" + to_string(e->kids[0]);
  }
  return "?";
}

}  // namespace ntrailer
