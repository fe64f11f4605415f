#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace hybridheat {

/// Value together with its first derivative in x (forward-mode dual number).
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
};

/// A compiled arithmetic expression in the single variable `x`.
///
/// Grammar (whitespace ignored):
///
///     expr    := term   (('+' | '-') term)*
///     term    := unary  (('*' | '/') unary)*
///     unary   := ('+' | '-') unary | power
///     power   := primary ('^' unary)?            right associative
///     primary := number | 'x' | 'pi' | 'e'
///              | ('exp' | 'sin' | 'cos' | 'sqrt') '(' expr ')'
///              | '(' expr ')'
///
/// Numbers accept the usual decimal and exponent forms (`2`, `0.5`, `1e-3`).
/// Integer exponents are expanded by repeated multiplication so negative
/// bases are fine; non-integer exponents require a positive base.
class Expression {
 public:
  struct Node;

  /// Throws ValidationError with the offending column on malformed input.
  static Expression parse(std::string_view source);

  double operator()(double x) const;
  Dual eval(double x) const;

  const std::string& source() const { return source_; }
  bool is_constant() const;

 private:
  Expression(std::string source, std::shared_ptr<const Node> root)
      : source_(std::move(source)), root_(std::move(root)) {}

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace hybridheat
