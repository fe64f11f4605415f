#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hybridheat/expression.hpp"
#include "hybridheat/spline.hpp"

namespace hybridheat {

enum class Side { Left, Right };

/// Closed interval occupied by a rod: [-1, 0] for the left rod, [0, 1] for the right.
struct Interval {
  double lo;
  double hi;
};

constexpr Interval rod_interval(Side side) {
  return side == Side::Left ? Interval{-1.0, 0.0} : Interval{0.0, 1.0};
}

/// Sampled coefficient, interpolated by a natural cubic spline.
struct CoefficientTable {
  std::vector<double> x;
  std::vector<double> values;
};

/// One coefficient function on a rod: a constant, a parsed expression in x,
/// or a spline through a table. Cheap to copy; the parsed representation is shared.
class CoefficientFunction {
 public:
  CoefficientFunction() : CoefficientFunction(1.0) {}
  CoefficientFunction(double constant);
  explicit CoefficientFunction(Expression expr);
  explicit CoefficientFunction(CoefficientTable table);

  static CoefficientFunction parse(const std::string& expression) {
    return CoefficientFunction(Expression::parse(expression));
  }

  double operator()(double x) const;
  double derivative(double x) const;

  bool is_constant() const;
  bool is_table() const { return std::holds_alternative<Table>(repr_); }
  bool is_expression() const { return std::holds_alternative<Expression>(repr_); }

  /// Constant value; only meaningful when holds a literal constant.
  double constant() const;
  const std::string& expression_source() const;
  const CoefficientTable& table() const;

  friend bool operator==(const CoefficientFunction& a, const CoefficientFunction& b);

 private:
  struct Table {
    std::shared_ptr<const CoefficientTable> data;
    std::shared_ptr<const NaturalCubicSpline> spline;
  };
  std::variant<double, Expression, Table> repr_;
};

/// Problem data of the two-rod system: density, conductivity and potential
/// on each rod together with the point mass at x = 0.
struct CoefficientSet {
  CoefficientFunction rho1 = 1.0, sigma1 = 1.0, q1 = 0.0;
  CoefficientFunction rho2 = 1.0, sigma2 = 1.0, q2 = 0.0;
  double mass = 1.0;

  const CoefficientFunction& rho(Side s) const { return s == Side::Left ? rho1 : rho2; }
  const CoefficientFunction& sigma(Side s) const { return s == Side::Left ? sigma1 : sigma2; }
  const CoefficientFunction& q(Side s) const { return s == Side::Left ? q1 : q2; }

  /// Same rods with a different point mass (mass 0 gives the regular problem).
  CoefficientSet with_mass(double m) const {
    CoefficientSet c = *this;
    c.mass = m;
    return c;
  }

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;
};

constexpr int kPositivitySamples = 1001;

/// Samples every coefficient at kPositivitySamples points per rod. rho and
/// sigma must be strictly positive and finite, q non-negative, mass positive.
/// Throws ValidationError naming the field and offending x. Returns warnings
/// (currently: a potential whose minimum is below 1e-12).
std::vector<std::string> validate(const CoefficientSet& c);

struct TravelTimes {
  double gamma1;
  double gamma2;
  double total() const { return gamma1 + gamma2; }
};

/// gamma_i = integral of sqrt(rho_i / sigma_i) over rod i, by adaptive Simpson
/// to 1e-10 absolute and relative tolerance.
TravelTimes travel_times(const CoefficientSet& c);

/// Cumulative travel time measured from the far end of the rod: the integral
/// from -1 to x on the left rod, from x to 1 on the right rod. Evaluated at
/// each of the given points.
std::vector<double> travel_time_profile(const CoefficientSet& c, Side side,
                                        const std::vector<double>& x);

}  // namespace hybridheat
