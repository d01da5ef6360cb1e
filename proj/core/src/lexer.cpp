#include "dml/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace dml {

namespace {

constexpr std::array kKeywords = {
    "each", "some",  "setof", "listof", "sumof", "productof", "countof", "maxof",
    "minof", "and",  "or",    "not",    "implies", "in",      "def",     "return",
    "if",   "elif",  "else",  "while",  "for",    "True",      "False",
};

constexpr std::array kTwoCharPuncts = {"==", "!=", "<=", ">=", "//"};
constexpr std::string_view kOneCharPuncts = "()[]{},:.=<>+-*%|&";

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_line_start()) continue;
      }
      lex_token_or_space();
    }
    if (line_has_tokens_) push(TokenKind::Newline, "", line_, col());
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenKind::Dedent, "", line_, 1);
    }
    push(TokenKind::Eof, "", line_, col());
    return std::move(tokens_);
  }

 private:
  int col() const { return static_cast<int>(pos_ - line_begin_) + 1; }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, {line_, col()}); }

  void push(TokenKind kind, std::string lexeme, int line, int col) {
    tokens_.push_back(Token{kind, std::move(lexeme), line, col});
  }

  void newline() {
    ++pos_;
    ++line_;
    line_begin_ = pos_;
    at_line_start_ = true;
  }

  // Measures indentation of a fresh logical line. Returns false when the
  // line was blank or comment-only and has been consumed.
  bool handle_line_start() {
    std::size_t p = pos_;
    while (p < src_.size() && src_[p] == ' ') ++p;
    if (p < src_.size() && src_[p] == '\t') {
      pos_ = p;
      fail("tab character in input");
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    if (src_[p] == '\n' || src_[p] == '#') {
      pos_ = p;
      while (pos_ < src_.size() && src_[pos_] != '\n') {
        if (src_[pos_] == '\t') fail("tab character in input");
        ++pos_;
      }
      if (pos_ < src_.size()) newline();
      return false;
    }
    const int width = static_cast<int>(p - pos_);
    pos_ = p;
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(TokenKind::Indent, "", line_, col());
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(TokenKind::Dedent, "", line_, col());
      }
      if (width != indents_.back()) fail("inconsistent dedent");
    }
    return true;
  }

  void lex_token_or_space() {
    const char c = src_[pos_];
    if (c == '\n') {
      if (depth_ == 0 && line_has_tokens_) {
        push(TokenKind::Newline, "", line_, col());
        line_has_tokens_ = false;
      }
      newline();
      return;
    }
    if (c == ' ') {
      ++pos_;
      return;
    }
    if (c == '\t') fail("tab character in input");
    if (c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') {
        if (src_[pos_] == '\t') fail("tab character in input");
        ++pos_;
      }
      return;
    }
    at_line_start_ = false;
    line_has_tokens_ = true;
    const int start_col = col();
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      std::string word(src_.substr(pos_, end - pos_));
      pos_ = end;
      const TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Ident;
      push(kind, std::move(word), line_, start_col);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      if (end < src_.size() && is_ident_char(src_[end])) {
        pos_ = end;
        fail("malformed integer literal");
      }
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + end, value);
      if (ec != std::errc()) fail("integer literal out of 64-bit range");
      push(TokenKind::Int, std::string(src_.substr(pos_, end - pos_)), line_, start_col);
      pos_ = end;
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(c, start_col);
      return;
    }
    if (pos_ + 1 < src_.size()) {
      const std::string_view two = src_.substr(pos_, 2);
      for (std::string_view p : kTwoCharPuncts) {
        if (two == p) {
          pos_ += 2;
          push(TokenKind::Punct, std::string(p), line_, start_col);
          return;
        }
      }
    }
    if (kOneCharPuncts.find(c) != std::string_view::npos) {
      if (c == '(' || c == '[' || c == '{') ++depth_;
      if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
      ++pos_;
      push(TokenKind::Punct, std::string(1, c), line_, start_col);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void lex_string(char quote, int start_col) {
    std::string out;
    ++pos_;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw ParseError("unterminated string literal", {line_, start_col});
      }
      const char c = src_[pos_];
      if (c == '\t') fail("tab character in input");
      if (c == quote) {
        ++pos_;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) throw ParseError("unterminated string literal", {line_, start_col});
        const char e = src_[pos_ + 1];
        switch (e) {
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          case '"': out += '"'; break;
          case 'n': out += '\n'; break;
          default:
            ++pos_;
            fail(std::string("unknown escape '\\") + e + "'");
        }
        pos_ += 2;
        continue;
      }
      out += c;
      ++pos_;
    }
    push(TokenKind::String, std::move(out), line_, start_col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_begin_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_tokens_ = false;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Ident: return "ident";
    case TokenKind::Int: return "int";
    case TokenKind::String: return "string";
    case TokenKind::Punct: return "punct";
    case TokenKind::Indent: return "indent";
    case TokenKind::Dedent: return "dedent";
    case TokenKind::Newline: return "newline";
    case TokenKind::Eof: return "eof";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords)
    if (k == word) return true;
  return false;
}

std::vector<Token> lex(std::string_view source) {
  std::string cleaned;
  cleaned.reserve(source.size());
  for (char c : source)
    if (c != '\r') cleaned += c;
  return Lexer(cleaned).run();
}

}  // namespace dml
