#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hybridheat/coefficients.hpp"
#include "hybridheat/errors.hpp"
#include "hybridheat/expression.hpp"
#include "hybridheat/quadrature.hpp"
#include "hybridheat/spline.hpp"
#include "oracles.hpp"

using namespace hybridheat;

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

TEST_SUITE("coefficients") {

TEST_CASE("expression grammar") {
  CHECK(Expression::parse("1 + 2*3")(0.0) == doctest::Approx(7.0));
  CHECK(Expression::parse("2^3^2")(0.0) == doctest::Approx(512.0));
  CHECK(Expression::parse("-x^2")(3.0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("(-x)^3")(2.0) == doctest::Approx(-8.0));
  CHECK(Expression::parse("exp(x/2)*sin(pi*x) + sqrt(4) - cos(0)")(1.0) ==
        doctest::Approx(std::exp(0.5) * std::sin(M_PI) + 1.0));
  CHECK(Expression::parse("1e-3 * e")(0.0) == doctest::Approx(1e-3 * std::exp(1.0)));
  CHECK(Expression::parse("3").is_constant());
  CHECK_FALSE(Expression::parse("3*x").is_constant());

  const Dual d = Expression::parse("x^2*exp(x)").eval(1.5);
  CHECK(d.deriv == doctest::Approx((2 * 1.5 + 1.5 * 1.5) * std::exp(1.5)).epsilon(1e-14));

  CHECK_THROWS_AS(Expression::parse("1 +"), ValidationError);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), ValidationError);
  CHECK_THROWS_AS(Expression::parse("(x"), ValidationError);
  CHECK_THROWS_AS(Expression::parse("x y"), ValidationError);
}

TEST_CASE("natural spline reproduces linear data and has zero end curvature") {
  std::vector<double> x, y;
  for (int i = 0; i <= 10; ++i) {
    x.push_back(i * 0.1);
    y.push_back(3.0 - 2.0 * x.back());
  }
  NaturalCubicSpline s(x, y);
  for (double t : {0.0, 0.037, 0.5, 0.99, 1.0}) {
    CHECK(s(t) == doctest::Approx(3.0 - 2.0 * t).epsilon(1e-14));
    CHECK(s.derivative(t) == doctest::Approx(-2.0).epsilon(1e-12));
  }
  std::vector<double> ys;
  for (double t : x) ys.push_back(std::sin(3 * t));
  NaturalCubicSpline w(x, ys);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(w(x[i]) == doctest::Approx(ys[i]).epsilon(1e-15));
  CHECK(std::abs(w(0.55) - std::sin(1.65)) < 1e-3);
  CHECK_THROWS(NaturalCubicSpline(std::vector<double>{0, 1}, std::vector<double>{0, 1}));
}

TEST_CASE("quadrature rules") {
  CHECK(adaptive_simpson([](double t) { return std::exp(t); }, 0, 1) ==
        doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
  std::vector<double> s;
  for (int i = 0; i <= 100; ++i) s.push_back(std::pow(i * 0.01, 3));
  CHECK(simpson(s, 0.01) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(trapezoid(s, 0.01) == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("travel times of uniform rods") {
  const auto t = travel_times(CoefficientSet{});
  CHECK(t.gamma1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.gamma2 == doctest::Approx(1.0).epsilon(1e-12));
  CoefficientSet c;
  c.rho2 = 4.0;
  CHECK(travel_times(c).gamma2 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("travel times against closed forms") {
  CoefficientSet c;
  c.rho1 = CoefficientFunction::parse("1 + x^2");
  const double exact = (std::sqrt(2.0) + std::asinh(1.0)) / 2.0;
  CHECK(exact == doctest::Approx(1.147793575).epsilon(1e-9));
  CHECK(std::abs(travel_times(c).gamma1 - exact) < 1e-10);
  CHECK(std::abs(travel_times(c).gamma1 -
                 oracle::simpson([](double x) { return std::sqrt(1 + x * x); }, -1, 0)) < 1e-10);

  CoefficientSet d;
  d.sigma1 = CoefficientFunction::parse("exp(x)");
  CHECK(std::abs(travel_times(d).gamma1 - 2.0 * (std::exp(0.5) - 1.0)) < 1e-10);
  CHECK(2.0 * (std::exp(0.5) - 1.0) == doctest::Approx(1.297442541).epsilon(1e-9));
}

TEST_CASE("travel times are invariant under joint scaling of rho and sigma") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.1, 10.0);
  CoefficientSet base;
  base.rho1 = CoefficientFunction::parse("1 + x^2");
  base.sigma1 = CoefficientFunction::parse("exp(x/2)");
  base.rho2 = CoefficientFunction::parse("2 - x");
  base.sigma2 = CoefficientFunction::parse("1 + 0.3*sin(pi*x)^2");
  const auto ref = travel_times(base);
  for (int i = 0; i < 5; ++i) {
    const std::string k = fmt(dist(rng));
    CoefficientSet s = base;
    s.rho1 = CoefficientFunction::parse(k + "*(1 + x^2)");
    s.sigma1 = CoefficientFunction::parse(k + "*exp(x/2)");
    s.rho2 = CoefficientFunction::parse(k + "*(2 - x)");
    s.sigma2 = CoefficientFunction::parse(k + "*(1 + 0.3*sin(pi*x)^2)");
    const auto t = travel_times(s);
    CHECK(std::abs(t.gamma1 - ref.gamma1) < 1e-12);
    CHECK(std::abs(t.gamma2 - ref.gamma2) < 1e-12);
  }
}

TEST_CASE("travel time profile ends at the rod travel time") {
  CoefficientSet c;
  c.rho1 = CoefficientFunction::parse("1 + x^2");
  c.rho2 = 4.0;
  const auto tt = travel_times(c);
  const auto left = travel_time_profile(c, Side::Left, {-1.0, -0.5, 0.0});
  CHECK(left[0] == doctest::Approx(0.0));
  CHECK(left[2] == doctest::Approx(tt.gamma1).epsilon(1e-10));
  const auto right = travel_time_profile(c, Side::Right, {0.0, 0.25, 1.0});
  CHECK(right[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(right[1] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(right[2] == doctest::Approx(0.0));
}

TEST_CASE("validation by sampling") {
  CoefficientSet c;
  c.sigma1 = CoefficientFunction::parse("x + 1");  // vanishes at x = -1
  try {
    validate(c);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("non-positive coefficient") != std::string::npos);
    CHECK(msg.find("rods.left.sigma") != std::string::npos);
    CHECK(msg.find("x=-1") != std::string::npos);
  }
  CoefficientSet m;
  m.mass = -1;
  CHECK_THROWS_AS(validate(m), ValidationError);
  CoefficientSet q;
  q.q2 = -0.1;
  CHECK_THROWS_AS(validate(q), ValidationError);

  const auto warnings = validate(CoefficientSet{});
  CHECK(warnings.size() == 2);  // both potentials vanish
  CoefficientSet pos;
  pos.q1 = 0.5;
  pos.q2 = 0.25;
  CHECK(validate(pos).empty());
}

TEST_CASE("tabulated coefficient follows its spline") {
  CoefficientTable t;
  for (int i = 0; i < 65; ++i) {
    t.x.push_back(i / 64.0);
    t.values.push_back(1.0 + 0.3 * std::pow(std::sin(M_PI * t.x.back()), 2));
  }
  CoefficientFunction f(t);
  CHECK(f.is_table());
  CHECK(f(0.5) == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(std::abs(f(0.3) - (1.0 + 0.3 * std::pow(std::sin(0.3 * M_PI), 2))) < 1e-5);
  CHECK(std::abs(f.derivative(0.25) - 0.3 * M_PI * std::sin(0.5 * M_PI)) < 1e-3);
}

}  // TEST_SUITE
