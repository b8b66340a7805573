#pragma once

#include "heightlab/certify.hpp"
#include "heightlab/poly.hpp"

#include <string>
#include <vector>

namespace hl {

// {"vars": [...], "terms": [{"exp": [...], "coef": "p/q"}, ...]}, terms in grlex-descending order.
json poly_to_json(const Poly& P);
Poly poly_from_json(const json& j);
// Infix text such as "X0^2 - 3/2*X0*X1 + 1". Without `vars`, variables are taken in order of
// first appearance.
Poly parse_poly_text(const std::string& text, std::vector<std::string> vars = {});
// JSON object text (leading '{') or infix text.
Poly parse_poly(const std::string& text, const std::vector<std::string>& vars = {});

json rationals_to_json(const std::vector<Rational>& xs);
std::vector<Rational> rationals_from_json(const json& j);
// A rational given as a JSON string or integer.
Rational rational_from_json(const json& j);

json index_to_json(const MultiIndex& I);
MultiIndex index_from_json(const json& j);

}  // namespace hl
