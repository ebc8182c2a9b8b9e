#include "ntrailer/expr_io.hpp"

#include <cstdlib>
#include <vector>

namespace ntrailer {

namespace {

ordered_json angle_to_json(const AngleSum& a) {
  ordered_json terms = ordered_json::array();
  for (const auto& [v, c] : a.terms()) {
    terms.push_back({{"var", v.name()}, {"coeff", c}});
  }
  return ordered_json{{"terms", std::move(terms)}, {"quarter_turns", a.quarter_turns()}};
}

// "theta_1_2" -> "\theta_{1,2}", "psi_3" -> "\psi_{3}", "a_1_2" -> "a_{1,2}",
// "hfx_2" -> "\mathrm{hfx}_{2}"
std::string symbol_to_latex(const std::string& name) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : name) {
    if (ch == '_') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);

  std::string head = parts[0];
  if (head == "psi") head = "\\psi";
  else if (head == "theta") head = "\\theta";
  else if (head.size() > 1) head = "\\mathrm{" + head + "}";

  if (parts.size() == 1) return head;
  std::string sub;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (i > 1) sub += ",";
    sub += parts[i];
  }
  return head + "_{" + sub + "}";
}

// precedence context: 0 = sum, 1 = product, 2 = tight (unary/atom)
std::string latex_rec(const ExprPtr& e, int ctx) {
  switch (e->kind) {
    case ExprKind::Rational: {
      std::string s = e->value.is_integer()
                          ? std::to_string(e->value.num())
                          : "\\tfrac{" + std::to_string(e->value.num()) + "}{" +
                                std::to_string(e->value.den()) + "}";
      if (ctx >= 1 && e->value.negative()) s = "\\left(" + s + "\\right)";
      return s;
    }
    case ExprKind::Param:
      return symbol_to_latex(e->param);
    case ExprKind::Sin:
      return "\\sin\\left(" + angle_to_latex(e->angle) + "\\right)";
    case ExprKind::Cos:
      return "\\cos\\left(" + angle_to_latex(e->angle) + "\\right)";
    case ExprKind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        const ExprPtr& k = e->kids[i];
        if (i == 0) {
          s += latex_rec(k, 0);
        } else if (k->kind == ExprKind::Neg) {
          s += " - " + latex_rec(k->kids[0], 1);
        } else {
          s += " + " + latex_rec(k, 0);
        }
      }
      if (ctx >= 1) s = "\\left(" + s + "\\right)";
      return s;
    }
    case ExprKind::Product: {
      std::string s;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) s += " \\, ";
        s += latex_rec(e->kids[i], 1);
      }
      if (ctx >= 2) s = "\\left(" + s + "\\right)";
      return s;
    }
    case ExprKind::Quotient:
      return "\\frac{" + latex_rec(e->kids[0], 0) + "}{" + latex_rec(e->kids[1], 0) + "}";
    case ExprKind::Neg: {
      std::string s = "-" + latex_rec(e->kids[0], 1);
      if (ctx >= 1) s = "\\left(" + s + "\\right)";
      return s;
    }
  }
  return "?";
}

}  // namespace

std::string angle_to_latex(const AngleSum& a) {
  std::string s;
  for (const auto& [v, c] : a.terms()) {
    if (s.empty()) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    const int m = c < 0 ? -c : c;
    if (m != 1) s += std::to_string(m) + " \\, ";
    s += symbol_to_latex(v.name());
  }
  if (a.quarter_turns() != 0) {
    if (!s.empty()) s += " + ";
    s += std::to_string(a.quarter_turns()) + " \\, \\tfrac{\\pi}{2}";
  }
  if (s.empty()) s = "0";
  return s;
}

std::string expr_to_latex(const ExprPtr& e) { return latex_rec(e, 0); }

ordered_json expr_to_json(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Rational:
      return ordered_json{{"kind", "rational"}, {"num", e->value.num()}, {"den", e->value.den()}};
    case ExprKind::Param:
      return ordered_json{{"kind", "param"}, {"name", e->param}};
    case ExprKind::Sin:
      return ordered_json{{"kind", "sin"}, {"angle", angle_to_json(e->angle)}};
    case ExprKind::Cos:
      return ordered_json{{"kind", "cos"}, {"angle", angle_to_json(e->angle)}};
    case ExprKind::Sum:
    case ExprKind::Product: {
      ordered_json kids = ordered_json::array();
      for (const auto& k : e->kids) kids.push_back(expr_to_json(k));
      return ordered_json{{"kind", e->kind == ExprKind::Sum ? "sum" : "product"},
                          {"terms", std::move(kids)}};
    }
    case ExprKind::Quotient:
      return ordered_json{{"kind", "quotient"},
                          {"num", expr_to_json(e->kids[0])},
                          {"den", expr_to_json(e->kids[1])}};
    case ExprKind::Neg:
      return ordered_json{{"kind", "neg"}, {"arg", expr_to_json(e->kids[0])}};
  }
  return {};
}

}  // namespace ntrailer
