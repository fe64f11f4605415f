#include "hybridheat/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "hybridheat/errors.hpp"

namespace hybridheat {

namespace {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos, Sqrt };

}  // namespace

struct Expression::Node {
  struct Constant {
    double value;
  };
  struct Variable {};
  struct Unary {
    Op op;
    std::shared_ptr<const Node> arg;
  };
  struct Binary {
    Op op;
    std::shared_ptr<const Node> lhs, rhs;
  };
  std::variant<Constant, Variable, Unary, Binary> data;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Constant c) { return std::make_shared<const Node>(Node{c}); }
NodePtr make(Node::Variable v) { return std::make_shared<const Node>(Node{v}); }
NodePtr make(Node::Unary u) { return std::make_shared<const Node>(Node{std::move(u)}); }
NodePtr make(Node::Binary b) { return std::make_shared<const Node>(Node{std::move(b)}); }

bool constant_value(const NodePtr& n, double& out);

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "expression \"" << src_ << "\": " << msg << " at column " << pos_ + 1;
    throw ValidationError(os.str());
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Binary{Op::Add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(Node::Binary{Op::Sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Binary{Op::Mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Node::Binary{Op::Div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Unary{Op::Neg, unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Binary{Op::Pow, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "x") return make(Node::Variable{});
      if (name == "pi") return make(Node::Constant{std::numbers::pi});
      if (name == "e") return make(Node::Constant{std::numbers::e});
      Op op;
      if (name == "exp") {
        op = Op::Exp;
      } else if (name == "sin") {
        op = Op::Sin;
      } else if (name == "cos") {
        op = Op::Cos;
      } else if (name == "sqrt") {
        op = Op::Sqrt;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after " + std::string(name));
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make(Node::Unary{op, arg});
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make(Node::Constant{v});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

bool integral_exponent(double p, long& n) {
  if (std::abs(p) > 64.0 || p != std::floor(p)) return false;
  n = static_cast<long>(p);
  return true;
}

Dual ipow(Dual a, long n) {
  if (n == 0) return {1.0, 0.0};
  const bool invert = n < 0;
  unsigned long k = static_cast<unsigned long>(invert ? -n : n);
  // value and derivative of a^k
  double v = 1.0;
  double base = a.value;
  unsigned long e = k;
  while (e > 0) {
    if (e & 1UL) v *= base;
    base *= base;
    e >>= 1;
  }
  double pk1 = 1.0;  // a^(k-1)
  base = a.value;
  e = k - 1;
  while (e > 0) {
    if (e & 1UL) pk1 *= base;
    base *= base;
    e >>= 1;
  }
  Dual r{v, static_cast<double>(k) * pk1 * a.deriv};
  if (invert) r = {1.0 / r.value, -r.deriv / (r.value * r.value)};
  return r;
}

Dual evaluate(const Node& node, double x);

Dual evaluate_ptr(const NodePtr& n, double x) { return evaluate(*n, x); }

Dual evaluate(const Node& node, double x) {
  return std::visit(
      [x](const auto& n) -> Dual {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return {n.value, 0.0};
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          return {x, 1.0};
        } else if constexpr (std::is_same_v<T, Node::Unary>) {
          const Dual a = evaluate_ptr(n.arg, x);
          switch (n.op) {
            case Op::Neg: return {-a.value, -a.deriv};
            case Op::Exp: {
              const double ex = std::exp(a.value);
              return {ex, ex * a.deriv};
            }
            case Op::Sin: return {std::sin(a.value), std::cos(a.value) * a.deriv};
            case Op::Cos: return {std::cos(a.value), -std::sin(a.value) * a.deriv};
            case Op::Sqrt: {
              const double s = std::sqrt(a.value);
              return {s, a.deriv / (2.0 * s)};
            }
            default: break;
          }
          return {std::nan(""), std::nan("")};
        } else {
          const Dual a = evaluate_ptr(n.lhs, x);
          if (n.op == Op::Pow) {
            double p = 0.0;
            long k = 0;
            if (constant_value(n.rhs, p)) {
              if (integral_exponent(p, k)) return ipow(a, k);
              const double v = std::pow(a.value, p);
              return {v, p * std::pow(a.value, p - 1.0) * a.deriv};
            }
            const Dual b = evaluate_ptr(n.rhs, x);
            const double v = std::pow(a.value, b.value);
            return {v, v * (b.deriv * std::log(a.value) + b.value * a.deriv / a.value)};
          }
          const Dual b = evaluate_ptr(n.rhs, x);
          switch (n.op) {
            case Op::Add: return {a.value + b.value, a.deriv + b.deriv};
            case Op::Sub: return {a.value - b.value, a.deriv - b.deriv};
            case Op::Mul: return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
            case Op::Div:
              return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
            default: break;
          }
          return {std::nan(""), std::nan("")};
        }
      },
      node.data);
}

bool depends_on_x(const Node& node) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return false;
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, Node::Unary>) {
          return depends_on_x(*n.arg);
        } else {
          return depends_on_x(*n.lhs) || depends_on_x(*n.rhs);
        }
      },
      node.data);
}

bool constant_value(const NodePtr& n, double& out) {
  if (depends_on_x(*n)) return false;
  out = evaluate(*n, 0.0).value;
  return true;
}

}  // namespace

Expression Expression::parse(std::string_view source) {
  Parser p(source);
  return Expression(std::string(source), p.parse());
}

double Expression::operator()(double x) const { return evaluate(*root_, x).value; }

Dual Expression::eval(double x) const { return evaluate(*root_, x); }

bool Expression::is_constant() const { return !depends_on_x(*root_); }

}  // namespace hybridheat
