#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ntrailer/errors.hpp"

namespace ntrailer {

/// One angular state variable: a unit yaw ψ_i or a wheel steering angle θ_{i,k}.
struct AngleVar {
  enum class Kind { Yaw, Steer };

  Kind kind = Kind::Yaw;
  int unit = 1;   // 1-based unit index
  int wheel = 0;  // 1-based wheel index, 0 for yaw variables

  static AngleVar yaw(int unit) { return {Kind::Yaw, unit, 0}; }
  static AngleVar steer(int unit, int wheel) { return {Kind::Steer, unit, wheel}; }

  /// "psi_3" or "theta_1_2"; these names are also the JSON/CSV identifiers.
  std::string name() const {
    if (kind == Kind::Yaw) return "psi_" + std::to_string(unit);
    return "theta_" + std::to_string(unit) + "_" + std::to_string(wheel);
  }

  friend bool operator==(const AngleVar& a, const AngleVar& b) {
    return a.kind == b.kind && a.unit == b.unit && a.wheel == b.wheel;
  }
  friend bool operator<(const AngleVar& a, const AngleVar& b) {
    if (a.unit != b.unit) return a.unit < b.unit;
    if (a.kind != b.kind) return a.kind < b.kind;  // yaw before steer within a unit
    return a.wheel < b.wheel;
  }
};

/// Canonical symbolic angle: an integer-weighted sum of angle variables plus
/// a quarter-turn offset kept modulo 4. Zero coefficients are never stored
/// and terms are kept sorted by (unit, kind, wheel).
class AngleSum {
public:
  AngleSum() = default;

  static AngleSum of(const AngleVar& v) {
    AngleSum a;
    a.terms_.emplace_back(v, 1);
    return a;
  }
  static AngleSum quarter_turn(int q) {
    AngleSum a;
    a.quarter_ = mod4(q);
    return a;
  }

  const std::vector<std::pair<AngleVar, int>>& terms() const { return terms_; }
  int quarter_turns() const { return quarter_; }

  bool is_zero() const { return terms_.empty() && quarter_ == 0; }
  bool has_terms() const { return !terms_.empty(); }

  /// Sign of the first (canonically smallest) variable's coefficient;
  /// 0 when there are no terms.
  int leading_sign() const {
    if (terms_.empty()) return 0;
    return terms_.front().second > 0 ? 1 : -1;
  }

  AngleSum& add(const AngleVar& v, int coeff) {
    if (coeff == 0) return *this;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
                               [](const auto& t, const AngleVar& vv) { return t.first < vv; });
    if (it != terms_.end() && it->first == v) {
      it->second += coeff;
      if (it->second == 0) terms_.erase(it);
    } else {
      terms_.insert(it, {v, coeff});
    }
    return *this;
  }

  AngleSum& add_quarter_turns(int q) {
    quarter_ = mod4(quarter_ + q);
    return *this;
  }

  AngleSum operator+(const AngleSum& o) const {
    AngleSum r = *this;
    for (const auto& [v, c] : o.terms_) r.add(v, c);
    r.add_quarter_turns(o.quarter_);
    return r;
  }

  /// Negation flips every coefficient and maps quarter turns q -> (-q mod 4).
  AngleSum operator-() const {
    AngleSum r;
    r.terms_.reserve(terms_.size());
    for (const auto& [v, c] : terms_) r.terms_.emplace_back(v, -c);
    r.quarter_ = mod4(-quarter_);
    return r;
  }

  AngleSum operator-(const AngleSum& o) const { return *this + (-o); }

  /// Strip the quarter-turn offset (used when folding it into trig atoms).
  AngleSum without_quarter_turns() const {
    AngleSum r = *this;
    r.quarter_ = 0;
    return r;
  }

  double eval(const std::map<AngleVar, double>& bindings) const {
    double a = quarter_ * (M_PI / 2.0);
    for (const auto& [v, c] : terms_) {
      auto it = bindings.find(v);
      if (it == bindings.end()) throw UnboundSymbolError(v.name());
      a += c * it->second;
    }
    return a;
  }

  friend bool operator==(const AngleSum& a, const AngleSum& b) {
    return a.quarter_ == b.quarter_ && a.terms_ == b.terms_;
  }

  friend int compare(const AngleSum& a, const AngleSum& b) {
    if (a.quarter_ != b.quarter_) return a.quarter_ < b.quarter_ ? -1 : 1;
    const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!(a.terms_[i].first == b.terms_[i].first))
        return a.terms_[i].first < b.terms_[i].first ? -1 : 1;
      if (a.terms_[i].second != b.terms_[i].second)
        return a.terms_[i].second < b.terms_[i].second ? -1 : 1;
    }
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
    return 0;
  }

private:
  static int mod4(int q) {
    int r = q % 4;
    return r < 0 ? r + 4 : r;
  }

  std::vector<std::pair<AngleVar, int>> terms_;
  int quarter_ = 0;  // in {0,1,2,3}
};

inline AngleSum operator+(const AngleVar& a, const AngleVar& b) {
  return AngleSum::of(a) + AngleSum::of(b);
}
inline AngleSum operator-(const AngleVar& a, const AngleVar& b) {
  return AngleSum::of(a) - AngleSum::of(b);
}

}  // namespace ntrailer
