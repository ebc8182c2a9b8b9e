#pragma once

#include "ntrailer/expr.hpp"

namespace ntrailer {

struct Vec2Sym {
  ExprPtr x = zero();
  ExprPtr y = zero();

  bool is_zero_vector() const { return ntrailer::is_zero(x) && ntrailer::is_zero(y); }
};

/// Row-major symbolic 2x2 matrix [[a, b], [c, d]].
struct Mat2Sym {
  ExprPtr a, b, c, d;

  Vec2Sym operator*(const Vec2Sym& v) const {
    return {sum({product({a, v.x}), product({b, v.y})}),
            sum({product({c, v.x}), product({d, v.y})})};
  }

  Mat2Sym operator*(const Mat2Sym& o) const {
    return {sum({product({a, o.a}), product({b, o.c})}),
            sum({product({a, o.b}), product({b, o.d})}),
            sum({product({c, o.a}), product({d, o.c})}),
            sum({product({c, o.b}), product({d, o.d})})};
  }
};

/// Planar rotation by a symbolic angle; quarter-turn offsets fold into the
/// sin/cos atoms, so e.g. rot(psi + pi/2) comes out as [[-sin, -cos], [cos, -sin]].
inline Mat2Sym rot(const AngleSum& angle) {
  const ExprPtr c = cos_of(angle);
  const ExprPtr s = sin_of(angle);
  return {c, negate(s), s, c};
}

/// R(a)^T = R(-a).
inline Mat2Sym transpose_rot(const AngleSum& angle) { return rot(-angle); }

inline Mat2Sym identity2() { return {one(), zero(), zero(), one()}; }

}  // namespace ntrailer
