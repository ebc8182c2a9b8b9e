#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ntrailer/angle.hpp"
#include "ntrailer/rational.hpp"

namespace ntrailer {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind { Rational, Param, Sin, Cos, Sum, Product, Quotient, Neg };

/// Immutable symbolic scalar over trig atoms of AngleSums, named geometry
/// parameters and exact rationals. Nodes are only created through the
/// factory functions below, which enforce the canonical form: flattened and
/// sorted sums/products, folded constants, quarter turns rewritten into the
/// atoms, signs pulled into Neg wrappers, quotients pulled out of products,
/// angle-addition contraction applied across sum terms. Expressions are
/// freely shared across threads once built.
class Expr {
public:
  ExprKind kind;
  class Rational value;         // Rational
  std::string param;            // Param
  AngleSum angle;               // Sin, Cos
  std::vector<ExprPtr> kids;    // Sum (>=2), Product (>=2), Quotient (2), Neg (1)

  struct factory_tag {};
  Expr(factory_tag, ExprKind k) : kind(k) {}
};

// --- factories -------------------------------------------------------------

ExprPtr rational(Rational r);
ExprPtr rational(std::int64_t num, std::int64_t den = 1);
ExprPtr param(std::string name);
ExprPtr sin_of(const AngleSum& a);
ExprPtr cos_of(const AngleSum& a);
ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr product(std::vector<ExprPtr> factors);
/// Throws std::invalid_argument when `den` is the literal zero constant.
ExprPtr quotient(ExprPtr num, ExprPtr den);
ExprPtr negate(ExprPtr e);

ExprPtr zero();
ExprPtr one();

// --- inspection ------------------------------------------------------------

inline bool is_rational(const ExprPtr& e) { return e->kind == ExprKind::Rational; }
inline bool is_zero(const ExprPtr& e) {
  return e->kind == ExprKind::Rational && e->value.is_zero();
}
inline bool is_one(const ExprPtr& e) {
  return e->kind == ExprKind::Rational && e->value.is_one();
}

/// Total structural order; 0 iff structurally equal.
int compare(const ExprPtr& a, const ExprPtr& b);
inline bool equal(const ExprPtr& a, const ExprPtr& b) { return compare(a, b) == 0; }

/// Number of distinct nodes reachable from the given roots (shared subtrees
/// counted once).
std::size_t node_count(std::span<const ExprPtr> roots);
inline std::size_t node_count(const ExprPtr& root) { return node_count({&root, 1}); }

/// Names of all Param nodes reachable from `e`.
void collect_params(const ExprPtr& e, std::set<std::string>& out);

/// Compact human-readable rendering (tests, diagnostics).
std::string to_string(const ExprPtr& e);

// --- evaluation ------------------------------------------------------------

struct EvalContext {
  std::map<AngleVar, double> angles;
  std::map<std::string, double> params;
  double eps_div = 1e-12;  // |denominator| below this raises DivisionNearZeroError
};

/// IEEE double evaluation. Shared subtrees are evaluated once per call.
/// Throws UnboundSymbolError and DivisionNearZeroError.
double eval(const ExprPtr& e, const EvalContext& ctx);

// --- normalization ---------------------------------------------------------

/// Rebuild `e` bottom-up through the canonicalizing factories. Idempotent;
/// numerically equal to its input wherever both are defined.
ExprPtr simplify(const ExprPtr& e);

}  // namespace ntrailer
