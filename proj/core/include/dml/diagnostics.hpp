#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dml {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

/// Any error detected before execution: lexing, parsing, resolution or
/// planning. Maps to exit code 2.
class StaticError : public std::runtime_error {
 public:
  StaticError(std::string tag, const std::string& message, SourceLoc loc)
      : std::runtime_error(message), tag_(std::move(tag)), loc_(loc) {}

  const std::string& tag() const { return tag_; }
  SourceLoc loc() const { return loc_; }

 private:
  std::string tag_;
  SourceLoc loc_;
};

class ParseError : public StaticError {
 public:
  ParseError(const std::string& message, SourceLoc loc, std::vector<std::string> expected = {})
      : StaticError("ParseError", message, loc), expected_(std::move(expected)) {}

  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::vector<std::string> expected_;
};

/// `file:line:col: error: <tag>: <message>`
std::string format_diagnostic(std::string_view file, SourceLoc loc, std::string_view tag,
                              std::string_view message);

}  // namespace dml
