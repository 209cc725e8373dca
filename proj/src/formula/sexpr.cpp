#include "sosat/sexpr.hpp"

namespace sosat {

namespace {

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> readAll() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

private:
  SExpr read() {
    skip();
    if (pos_ >= text_.size())
      throw SyntaxError("unexpected end of input", line_, col_);
    SExpr e;
    e.line = line_;
    e.column = col_;
    char ch = text_[pos_];
    if (ch == ')')
      throw SyntaxError("unexpected ')'", line_, col_);
    if (ch == '(') {
      advance();
      e.isList = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size())
          throw SyntaxError("unterminated list", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !isDelimiter(text_[pos_]))
      advance();
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  static bool isDelimiter(char c) {
    return c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' ||
           c == '\r' || c == ';';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  unsigned line_ = 1;
  unsigned col_ = 1;
};

} // namespace

std::vector<SExpr> parseSExprs(std::string_view text) {
  return Reader(text).readAll();
}

} // namespace sosat
