#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "veroweb/jets.hpp"

namespace veroweb {

/// Ordered coordinate labels of a chart, e.g. (x,y,z) or (X,Y,T) or the
/// 5-dimensional (x,y,z,p0,p1).
struct Chart {
  std::vector<std::string> names;

  int dim() const { return static_cast<int>(names.size()); }
  /// Index of a coordinate name, or -1 when absent.
  int index(const std::string& name) const;

  static Chart xyz() { return {{"x", "y", "z"}}; }
  static Chart XYT() { return {{"X", "Y", "T"}}; }
  static Chart with_fibre(const Chart& base);  // appends p0, p1
  static Chart hierarchy(int n);               // x, x0, ..., x_{n-1}
};

enum class ExprKind { Constant, Symbol, Add, Sub, Mul, Div, Pow, Exp, Ln, Sqrt, Sin, Cos };

class Expr;

struct ExprNode {
  ExprKind kind;
  double value = 0.0;      // Constant
  std::string name;        // Symbol
  int exponent = 0;        // Pow
  std::shared_ptr<const ExprNode> a, b;
};

/// Immutable expression tree with value semantics. Symbols resolve at
/// evaluation time against a chart (coordinates) and a parameter binding,
/// so one tree serves every point and every parameter sweep.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  const std::shared_ptr<const ExprNode>& ptr() const { return node_; }
  bool empty() const { return node_ == nullptr; }

  static Expr constant(double v);
  static Expr symbol(const std::string& name);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator+(const Expr& a, double b) { return a + constant(b); }
  friend Expr operator+(double a, const Expr& b) { return constant(a) + b; }
  friend Expr operator-(const Expr& a, double b) { return a - constant(b); }
  friend Expr operator-(double a, const Expr& b) { return constant(a) - b; }
  friend Expr operator*(const Expr& a, double b) { return a * constant(b); }
  friend Expr operator*(double a, const Expr& b) { return constant(a) * b; }
  friend Expr operator/(const Expr& a, double b) { return a / constant(b); }
  friend Expr operator/(double a, const Expr& b) { return constant(a) / b; }

 private:
  std::shared_ptr<const ExprNode> node_;
};

Expr pow_int(const Expr& a, int k);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

/// Exact derivative of the tree with respect to the named symbol.
Expr diff(const Expr& e, const std::string& name);

/// Printable form; parse_expr(to_string(e)) evaluates identically to e.
std::string to_string(const Expr& e);

/// Every symbol name appearing in the tree.
std::set<std::string> symbols(const Expr& e);

using Bindings = std::map<std::string, double>;

/// Exact truncated Taylor expansion of e at p on the chart; parameters not in
/// the chart must appear in `params`.
Jet eval_jet(const Expr& e, const Chart& chart, std::span<const double> p, int order,
             const Bindings& params = {});

/// Evaluation over an arbitrary symbol -> jet environment (all jets must share
/// one space and base point).
Jet eval_jet_env(const Expr& e, const std::map<std::string, Jet>& env);

/// Plain value, no derivative bookkeeping.
double eval_scalar(const Expr& e, const Chart& chart, std::span<const double> p,
                   const Bindings& params = {});

/// Expression flattened to a postfix program for tight grid loops; parameter
/// values are baked at compile time.
class Program {
 public:
  Program() = default;
  static Program compile(const Expr& e, const Chart& chart, const Bindings& params = {});
  double eval(std::span<const double> coords) const;

 private:
  enum class Op : uint8_t { PushConst, PushCoord, Add, Sub, Mul, Div, PowInt, Exp, Ln, Sqrt, Sin, Cos };
  struct Instr {
    Op op;
    double imm = 0.0;
    int idx = 0;
  };
  std::vector<Instr> code_;
  mutable std::vector<double> stack_;
};

}  // namespace veroweb
