#pragma once

#include <string>

#include <json.hpp>

#include "ntrailer/expr.hpp"

namespace ntrailer {

using ordered_json = nlohmann::ordered_json;

/// Serialize an expression to a JSON tree. Emission is deterministic: key
/// order is fixed and children are already canonically sorted.
ordered_json expr_to_json(const ExprPtr& e);

/// Render an expression as LaTeX (psi_2 -> \psi_{2}, theta_1_2 -> \theta_{1,2},
/// quotients as \frac, parenthesization by precedence).
std::string expr_to_latex(const ExprPtr& e);

std::string angle_to_latex(const AngleSum& a);

}  // namespace ntrailer
