#pragma once

#include "sosat/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sosat {

/// A parsed s-expression node with its source position.
struct SExpr {
  bool isList = false;
  std::string atom;
  std::vector<SExpr> items;
  unsigned line = 1;
  unsigned column = 1;

  bool isAtom() const { return !isList; }
  bool isAtom(std::string_view text) const { return !isList && atom == text; }
  /// True for a list whose first element is the atom `head`.
  bool isForm(std::string_view head) const {
    return isList && !items.empty() && items.front().isAtom(head);
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw SyntaxError(msg, line, column);
  }
};

/// Parses every top-level s-expression in `text`. ';' starts a comment.
std::vector<SExpr> parseSExprs(std::string_view text);

} // namespace sosat
