#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dml/diagnostics.hpp"

namespace dml {

enum class TokenKind { Keyword, Ident, Int, String, Punct, Indent, Dedent, Newline, Eof };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  /// Source spelling; for strings, the decoded contents.
  std::string lexeme;
  int line = 0;
  int col = 0;

  SourceLoc loc() const { return {line, col}; }
  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
};

bool is_keyword(std::string_view word);

/// Splits source text into tokens, synthesizing Indent/Dedent from leading
/// spaces. Newlines inside brackets are not significant. Throws ParseError.
std::vector<Token> lex(std::string_view source);

}  // namespace dml
