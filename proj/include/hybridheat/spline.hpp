#pragma once

#include <span>
#include <vector>

namespace hybridheat {

/// Interpolating cubic spline with natural end conditions (zero second
/// derivative at both ends). Evaluation outside the knot range extrapolates
/// with the end polynomial pieces.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline() = default;
  /// Knots must be strictly increasing, at least three of them.
  NaturalCubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

}  // namespace hybridheat
