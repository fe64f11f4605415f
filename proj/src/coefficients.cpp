#include "hybridheat/coefficients.hpp"

#include <cmath>
#include <sstream>

#include "hybridheat/errors.hpp"
#include "hybridheat/quadrature.hpp"

namespace hybridheat {

CoefficientFunction::CoefficientFunction(double constant) : repr_(constant) {}

CoefficientFunction::CoefficientFunction(Expression expr) : repr_(std::move(expr)) {}

CoefficientFunction::CoefficientFunction(CoefficientTable table) {
  auto data = std::make_shared<const CoefficientTable>(std::move(table));
  auto spline = std::make_shared<const NaturalCubicSpline>(data->x, data->values);
  repr_ = Table{std::move(data), std::move(spline)};
}

double CoefficientFunction::operator()(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, double>) {
          return r;
        } else if constexpr (std::is_same_v<T, Expression>) {
          return r(x);
        } else {
          return (*r.spline)(x);
        }
      },
      repr_);
}

double CoefficientFunction::derivative(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, double>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Expression>) {
          return r.eval(x).deriv;
        } else {
          return r.spline->derivative(x);
        }
      },
      repr_);
}

bool CoefficientFunction::is_constant() const {
  if (std::holds_alternative<double>(repr_)) return true;
  if (const auto* e = std::get_if<Expression>(&repr_)) return e->is_constant();
  return false;
}

double CoefficientFunction::constant() const {
  if (const auto* v = std::get_if<double>(&repr_)) return *v;
  if (const auto* e = std::get_if<Expression>(&repr_); e && e->is_constant()) return (*e)(0.0);
  throw ValidationError("coefficient is not constant");
}

const std::string& CoefficientFunction::expression_source() const {
  return std::get<Expression>(repr_).source();
}

const CoefficientTable& CoefficientFunction::table() const { return *std::get<Table>(repr_).data; }

bool operator==(const CoefficientFunction& a, const CoefficientFunction& b) {
  if (a.repr_.index() != b.repr_.index()) return false;
  if (const auto* v = std::get_if<double>(&a.repr_)) return *v == std::get<double>(b.repr_);
  if (a.is_expression()) return a.expression_source() == b.expression_source();
  return a.table().x == b.table().x && a.table().values == b.table().values;
}

namespace {

const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

void check_function(const CoefficientFunction& f, Side side, const char* name, bool allow_zero,
                    std::vector<std::string>& warnings) {
  const Interval iv = rod_interval(side);
  double min_value = std::numeric_limits<double>::infinity();
  double min_at = iv.lo;
  for (int i = 0; i < kPositivitySamples; ++i) {
    const double x = iv.lo + (iv.hi - iv.lo) * i / (kPositivitySamples - 1);
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "rods." << side_name(side) << "." << name << ": non-finite coefficient at x=" << x;
      throw ValidationError(os.str());
    }
    if (v < min_value) {
      min_value = v;
      min_at = x;
    }
  }
  const bool bad = allow_zero ? min_value < 0.0 : min_value <= 0.0;
  if (bad) {
    std::ostringstream os;
    os << "rods." << side_name(side) << "." << name << ": non-positive coefficient at x=" << min_at
       << " (value " << min_value << ")";
    throw ValidationError(os.str());
  }
  if (allow_zero && min_value < 1e-12) {
    std::ostringstream os;
    os << "rods." << side_name(side) << "." << name << ": potential vanishes (min " << min_value
       << " at x=" << min_at << "); accepted as q >= 0";
    warnings.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> validate(const CoefficientSet& c) {
  std::vector<std::string> warnings;
  if (!(c.mass > 0.0) || !std::isfinite(c.mass)) {
    std::ostringstream os;
    os << "mass: must be positive (got " << c.mass << ")";
    throw ValidationError(os.str());
  }
  for (Side s : {Side::Left, Side::Right}) {
    check_function(c.rho(s), s, "rho", false, warnings);
    check_function(c.sigma(s), s, "sigma", false, warnings);
    check_function(c.q(s), s, "q", true, warnings);
  }
  return warnings;
}

namespace {

double slowness_integral(const CoefficientSet& c, Side side, double a, double b) {
  const auto& rho = c.rho(side);
  const auto& sigma = c.sigma(side);
  return adaptive_simpson([&](double x) { return std::sqrt(rho(x) / sigma(x)); }, a, b, 1e-10, 1e-10);
}

}  // namespace

TravelTimes travel_times(const CoefficientSet& c) {
  return {slowness_integral(c, Side::Left, -1.0, 0.0), slowness_integral(c, Side::Right, 0.0, 1.0)};
}

std::vector<double> travel_time_profile(const CoefficientSet& c, Side side,
                                        const std::vector<double>& x) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  if (side == Side::Left) {
    double acc = slowness_integral(c, side, -1.0, x.front());
    out.front() = acc;
    for (std::size_t i = 1; i < x.size(); ++i) {
      acc += slowness_integral(c, side, x[i - 1], x[i]);
      out[i] = acc;
    }
  } else {
    double acc = slowness_integral(c, side, x.back(), 1.0);
    out.back() = acc;
    for (std::size_t i = x.size() - 1; i-- > 0;) {
      acc += slowness_integral(c, side, x[i], x[i + 1]);
      out[i] = acc;
    }
  }
  return out;
}

}  // namespace hybridheat
