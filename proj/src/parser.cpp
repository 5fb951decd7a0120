#include "veroweb/parser.hpp"

#include <cctype>
#include <cstdlib>

namespace veroweb {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Expr run() {
    Expr e = sum();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr sum() {
    Expr e = term();
    while (true) {
      if (consume('+')) {
        e = e + term();
      } else if (consume('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    while (true) {
      if (consume('*')) {
        e = e * factor();
      } else if (consume('/')) {
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (consume('-')) return Expr::constant(0.0) - factor();
    if (consume('+')) return factor();
    Expr base = primary();
    while (consume('^')) base = pow_int(base, integer());
    return base;
  }

  int integer() {
    skip_ws();
    const size_t start = pos_;
    bool neg = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      neg = text_[pos_] == '-';
      ++pos_;
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected integer exponent", start);
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      v = v * 10 + (text_[pos_++] - '0');
    return static_cast<int>(neg ? -v : v);
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr number() {
    const size_t start = pos_;
    char* end = nullptr;
    const double v = std::strtod(text_.c_str() + start, &end);
    if (end == text_.c_str() + start) throw ParseError("malformed number", start);
    pos_ = end - text_.c_str();
    return Expr::constant(v);
  }

  Expr identifier() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (peek() == '(') {
      ++pos_;
      Expr arg = sum();
      if (!consume(')')) throw ParseError("expected ')' after " + name, pos_);
      if (name == "exp") return exp(arg);
      if (name == "ln") return ln(arg);
      if (name == "sqrt") return sqrt(arg);
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      throw ParseError("unknown function '" + name + "'", start);
    }
    return Expr::symbol(name);
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).run(); }

}  // namespace veroweb
