#pragma once

#include <functional>
#include <string>

namespace stieltjes {

// Compiles a small arithmetic expression in the variable t into a callable.
// Grammar: numbers, t, + - * / ^, parentheses, unary minus, and the
// functions sin cos tan exp log sqrt abs floor min(a,b) max(a,b) pow(a,b).
// Throws SchemaError on malformed input.
[[nodiscard]] std::function<double(double)> compile_expression(const std::string& text);

}  // namespace stieltjes
