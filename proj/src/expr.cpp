#include "veroweb/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace veroweb {

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode n) {
  return std::make_shared<const ExprNode>(std::move(n));
}

Expr constant_node(double v) {
  ExprNode n;
  n.kind = ExprKind::Constant;
  n.value = v;
  return Expr(make_node(std::move(n)));
}

Expr binary_node(ExprKind kind, const Expr& a, const Expr& b) {
  ExprNode n;
  n.kind = kind;
  n.a = a.ptr();
  n.b = b.ptr();
  return Expr(make_node(std::move(n)));
}

bool is_const(const Expr& e, double v) {
  return !e.empty() && e.node().kind == ExprKind::Constant && e.node().value == v;
}

bool both_const(const Expr& a, const Expr& b) {
  return a.node().kind == ExprKind::Constant && b.node().kind == ExprKind::Constant;
}

}  // namespace

int Chart::index(const std::string& name) const {
  for (int i = 0; i < dim(); ++i)
    if (names[i] == name) return i;
  return -1;
}

Chart Chart::with_fibre(const Chart& base) {
  Chart c = base;
  c.names.push_back("p0");
  c.names.push_back("p1");
  return c;
}

Chart Chart::hierarchy(int n) {
  Chart c{{"x"}};
  for (int i = 0; i < n; ++i) c.names.push_back("x" + std::to_string(i));
  return c;
}

Expr Expr::constant(double v) { return constant_node(v); }

Expr Expr::symbol(const std::string& name) {
  ExprNode n;
  n.kind = ExprKind::Symbol;
  n.name = name;
  return Expr(make_node(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (both_const(a, b)) return Expr::constant(a.node().value + b.node().value);
  return binary_node(ExprKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (is_const(b, 0.0)) return a;
  if (both_const(a, b)) return Expr::constant(a.node().value - b.node().value);
  return binary_node(ExprKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (both_const(a, b)) return Expr::constant(a.node().value * b.node().value);
  return binary_node(ExprKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (both_const(a, b) && b.node().value != 0.0)
    return Expr::constant(a.node().value / b.node().value);
  return binary_node(ExprKind::Div, a, b);
}

Expr operator-(const Expr& a) { return Expr::constant(0.0) - a; }

Expr pow_int(const Expr& a, int k) {
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (a.node().kind == ExprKind::Constant) return Expr::constant(std::pow(a.node().value, k));
  ExprNode n;
  n.kind = ExprKind::Pow;
  n.exponent = k;
  n.a = a.ptr();
  return Expr(make_node(std::move(n)));
}

namespace {

Expr unary(ExprKind kind, const Expr& a) {
  ExprNode n;
  n.kind = kind;
  n.a = a.ptr();
  return Expr(make_node(std::move(n)));
}

}  // namespace

Expr exp(const Expr& a) { return unary(ExprKind::Exp, a); }
Expr ln(const Expr& a) { return unary(ExprKind::Ln, a); }
Expr sqrt(const Expr& a) { return unary(ExprKind::Sqrt, a); }
Expr sin(const Expr& a) { return unary(ExprKind::Sin, a); }
Expr cos(const Expr& a) { return unary(ExprKind::Cos, a); }

Expr diff(const Expr& e, const std::string& name) {
  const ExprNode& n = e.node();
  const auto sub = [&](const std::shared_ptr<const ExprNode>& p) { return Expr(p); };
  switch (n.kind) {
    case ExprKind::Constant:
      return Expr::constant(0.0);
    case ExprKind::Symbol:
      return Expr::constant(n.name == name ? 1.0 : 0.0);
    case ExprKind::Add:
      return diff(sub(n.a), name) + diff(sub(n.b), name);
    case ExprKind::Sub:
      return diff(sub(n.a), name) - diff(sub(n.b), name);
    case ExprKind::Mul:
      return diff(sub(n.a), name) * sub(n.b) + sub(n.a) * diff(sub(n.b), name);
    case ExprKind::Div:
      return (diff(sub(n.a), name) * sub(n.b) - sub(n.a) * diff(sub(n.b), name)) /
             pow_int(sub(n.b), 2);
    case ExprKind::Pow:
      return Expr::constant(n.exponent) * pow_int(sub(n.a), n.exponent - 1) * diff(sub(n.a), name);
    case ExprKind::Exp:
      return e * diff(sub(n.a), name);
    case ExprKind::Ln:
      return diff(sub(n.a), name) / sub(n.a);
    case ExprKind::Sqrt:
      return diff(sub(n.a), name) / (Expr::constant(2.0) * e);
    case ExprKind::Sin:
      return cos(sub(n.a)) * diff(sub(n.a), name);
    case ExprKind::Cos:
      return -(sin(sub(n.a)) * diff(sub(n.a), name));
  }
  throw std::logic_error("diff: unknown node kind");
}

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Pow:
      return 3;
    default:
      return 4;
  }
}

void print(const ExprNode& n, std::ostream& os, int parent_prec, bool rhs) {
  const int prec = precedence(n.kind);
  const bool parens =
      prec < parent_prec || (prec == parent_prec && rhs && (parent_prec == 1 || parent_prec == 2));
  if (parens) os << "(";
  switch (n.kind) {
    case ExprKind::Constant: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      std::string s = tmp.str();
      if (n.value < 0) {
        os << "(" << s << ")";
      } else {
        os << s;
      }
      break;
    }
    case ExprKind::Symbol:
      os << n.name;
      break;
    case ExprKind::Add:
      print(*n.a, os, prec, false);
      os << "+";
      print(*n.b, os, prec, true);
      break;
    case ExprKind::Sub:
      print(*n.a, os, prec, false);
      os << "-";
      print(*n.b, os, prec, true);
      break;
    case ExprKind::Mul:
      print(*n.a, os, prec, false);
      os << "*";
      print(*n.b, os, prec, true);
      break;
    case ExprKind::Div:
      print(*n.a, os, prec, false);
      os << "/";
      print(*n.b, os, prec, true);
      break;
    case ExprKind::Pow:
      print(*n.a, os, prec + 1, false);
      os << "^" << n.exponent;
      break;
    case ExprKind::Exp:
      os << "exp(";
      print(*n.a, os, 0, false);
      os << ")";
      break;
    case ExprKind::Ln:
      os << "ln(";
      print(*n.a, os, 0, false);
      os << ")";
      break;
    case ExprKind::Sqrt:
      os << "sqrt(";
      print(*n.a, os, 0, false);
      os << ")";
      break;
    case ExprKind::Sin:
      os << "sin(";
      print(*n.a, os, 0, false);
      os << ")";
      break;
    case ExprKind::Cos:
      os << "cos(";
      print(*n.a, os, 0, false);
      os << ")";
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(e.node(), os, 0, false);
  return os.str();
}

namespace {

void collect_symbols(const ExprNode& n, std::set<std::string>& out) {
  if (n.kind == ExprKind::Symbol) out.insert(n.name);
  if (n.a) collect_symbols(*n.a, out);
  if (n.b) collect_symbols(*n.b, out);
}

// Scalar counterparts so eval_generic<double> picks the std functions.
inline double pow_int(double x, int k) { return std::pow(x, k); }
inline double exp(double x) { return std::exp(x); }
inline double ln(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }

template <typename Scalar, typename Leaf>
Scalar eval_generic(const ExprNode& n, const Leaf& leaf) {
  switch (n.kind) {
    case ExprKind::Constant:
      return leaf.constant(n.value);
    case ExprKind::Symbol:
      return leaf.symbol(n.name);
    case ExprKind::Add:
      return eval_generic<Scalar>(*n.a, leaf) + eval_generic<Scalar>(*n.b, leaf);
    case ExprKind::Sub:
      return eval_generic<Scalar>(*n.a, leaf) - eval_generic<Scalar>(*n.b, leaf);
    case ExprKind::Mul:
      return eval_generic<Scalar>(*n.a, leaf) * eval_generic<Scalar>(*n.b, leaf);
    case ExprKind::Div:
      return eval_generic<Scalar>(*n.a, leaf) / eval_generic<Scalar>(*n.b, leaf);
    case ExprKind::Pow:
      return pow_int(eval_generic<Scalar>(*n.a, leaf), n.exponent);
    case ExprKind::Exp:
      return exp(eval_generic<Scalar>(*n.a, leaf));
    case ExprKind::Ln:
      return ln(eval_generic<Scalar>(*n.a, leaf));
    case ExprKind::Sqrt:
      return sqrt(eval_generic<Scalar>(*n.a, leaf));
    case ExprKind::Sin:
      return sin(eval_generic<Scalar>(*n.a, leaf));
    case ExprKind::Cos:
      return cos(eval_generic<Scalar>(*n.a, leaf));
  }
  throw std::logic_error("eval: unknown node kind");
}

struct JetLeaf {
  const JetSpace& space;
  std::span<const double> p;
  const Chart& chart;
  const Bindings& params;

  Jet constant(double v) const { return Jet::constant(space, p, v); }
  Jet symbol(const std::string& name) const {
    const int axis = chart.index(name);
    if (axis >= 0) return Jet::coordinate(space, p, axis);
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("unbound symbol '" + name + "'");
    return Jet::constant(space, p, it->second);
  }
};

struct EnvLeaf {
  const std::map<std::string, Jet>& env;
  const Jet& any;

  Jet constant(double v) const { return Jet::constant(any.space(), any.point(), v); }
  Jet symbol(const std::string& name) const {
    auto it = env.find(name);
    if (it == env.end()) throw std::invalid_argument("unbound symbol '" + name + "'");
    return it->second;
  }
};

struct ScalarLeaf {
  const Chart& chart;
  std::span<const double> p;
  const Bindings& params;

  double constant(double v) const { return v; }
  double symbol(const std::string& name) const {
    const int axis = chart.index(name);
    if (axis >= 0) return p[axis];
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("unbound symbol '" + name + "'");
    return it->second;
  }
};

}  // namespace

std::set<std::string> symbols(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e.node(), out);
  return out;
}

Jet eval_jet(const Expr& e, const Chart& chart, std::span<const double> p, int order,
             const Bindings& params) {
  const JetSpace& space = JetSpace::get(chart.dim(), order);
  return eval_generic<Jet>(e.node(), JetLeaf{space, p, chart, params});
}

Jet eval_jet_env(const Expr& e, const std::map<std::string, Jet>& env) {
  if (env.empty()) throw std::invalid_argument("eval_jet_env: empty environment");
  return eval_generic<Jet>(e.node(), EnvLeaf{env, env.begin()->second});
}

double eval_scalar(const Expr& e, const Chart& chart, std::span<const double> p,
                   const Bindings& params) {
  return eval_generic<double>(e.node(), ScalarLeaf{chart, p, params});
}

Program Program::compile(const Expr& e, const Chart& chart, const Bindings& params) {
  Program prog;
  int depth = 0, max_depth = 0;
  const auto emit = [&](Instr ins, int delta) {
    prog.code_.push_back(ins);
    depth += delta;
    max_depth = std::max(max_depth, depth);
  };
  const std::function<void(const ExprNode&)> walk = [&](const ExprNode& n) {
    switch (n.kind) {
      case ExprKind::Constant:
        emit({Op::PushConst, n.value, 0}, +1);
        return;
      case ExprKind::Symbol: {
        const int axis = chart.index(n.name);
        if (axis >= 0) {
          emit({Op::PushCoord, 0.0, axis}, +1);
        } else {
          auto it = params.find(n.name);
          if (it == params.end()) throw std::invalid_argument("unbound symbol '" + n.name + "'");
          emit({Op::PushConst, it->second, 0}, +1);
        }
        return;
      }
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
      case ExprKind::Div:
        walk(*n.a);
        walk(*n.b);
        switch (n.kind) {
          case ExprKind::Add: emit({Op::Add, 0, 0}, -1); break;
          case ExprKind::Sub: emit({Op::Sub, 0, 0}, -1); break;
          case ExprKind::Mul: emit({Op::Mul, 0, 0}, -1); break;
          default: emit({Op::Div, 0, 0}, -1); break;
        }
        return;
      case ExprKind::Pow:
        walk(*n.a);
        emit({Op::PowInt, 0.0, n.exponent}, 0);
        return;
      case ExprKind::Exp:
        walk(*n.a);
        emit({Op::Exp, 0, 0}, 0);
        return;
      case ExprKind::Ln:
        walk(*n.a);
        emit({Op::Ln, 0, 0}, 0);
        return;
      case ExprKind::Sqrt:
        walk(*n.a);
        emit({Op::Sqrt, 0, 0}, 0);
        return;
      case ExprKind::Sin:
        walk(*n.a);
        emit({Op::Sin, 0, 0}, 0);
        return;
      case ExprKind::Cos:
        walk(*n.a);
        emit({Op::Cos, 0, 0}, 0);
        return;
    }
  };
  walk(e.node());
  prog.stack_.resize(max_depth);
  return prog;
}

double Program::eval(std::span<const double> coords) const {
  double* sp = stack_.data();
  for (const Instr& ins : code_) {
    switch (ins.op) {
      case Op::PushConst: *sp++ = ins.imm; break;
      case Op::PushCoord: *sp++ = coords[ins.idx]; break;
      case Op::Add: sp[-2] += sp[-1]; --sp; break;
      case Op::Sub: sp[-2] -= sp[-1]; --sp; break;
      case Op::Mul: sp[-2] *= sp[-1]; --sp; break;
      case Op::Div: sp[-2] /= sp[-1]; --sp; break;
      case Op::PowInt: sp[-1] = std::pow(sp[-1], ins.idx); break;
      case Op::Exp: sp[-1] = std::exp(sp[-1]); break;
      case Op::Ln: sp[-1] = std::log(sp[-1]); break;
      case Op::Sqrt: sp[-1] = std::sqrt(sp[-1]); break;
      case Op::Sin: sp[-1] = std::sin(sp[-1]); break;
      case Op::Cos: sp[-1] = std::cos(sp[-1]); break;
    }
  }
  return sp[-1];
}

}  // namespace veroweb
