#pragma once

#include <optional>
#include <string_view>

namespace mcdist::dss {

/// Evaluate a parenthesized reverse-polish expression such as "(3 4 * 2 /)".
/// Binary operators: + - * /. Unary: sqrt, sqr, inv.
/// Throws ParseError on stack underflow, leftover operands, unknown
/// operators and division by zero.
double parse_rpn(std::string_view expr);

/// Decimal or scientific literal, optionally quoted; a parenthesized
/// value is evaluated as RPN.
double parse_number(std::string_view text);

std::optional<double> try_parse_double(std::string_view text);

}  // namespace mcdist::dss
