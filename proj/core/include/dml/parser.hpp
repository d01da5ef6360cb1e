#pragma once

#include <string_view>
#include <vector>

#include "dml/ast.hpp"
#include "dml/lexer.hpp"

namespace dml {

/// Parses a token stream produced by lex(). Throws ParseError.
Program parse(const std::vector<Token>& tokens);

/// lex + parse.
Program parse_source(std::string_view source);

/// Parses a single expression (the whole input must be one expression).
ExprPtr parse_expression(std::string_view source);

/// Parses a binding pattern: an identifier, `_`, or a nested tuple of those.
Pattern parse_pattern(std::string_view source);

/// Converts an already-parsed expression into a pattern, or throws ParseError.
Pattern expr_to_pattern(const Expr& e);

}  // namespace dml
