#pragma once

#include <stdexcept>
#include <string>

#include "veroweb/expr.hpp"

namespace veroweb {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  size_t position;
};

/// Grammar: identifiers, decimal literals, + - * / ^ (integer powers),
/// exp(), ln(), sqrt(), sin(), cos(), parentheses, unary minus.
Expr parse_expr(const std::string& text);

}  // namespace veroweb
