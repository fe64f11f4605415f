#pragma once

#include <functional>
#include <span>

namespace hybridheat {

/// Adaptive Simpson quadrature. Accepts a panel when the Richardson estimate
/// |S2 - S1| / 15 is below max(abs_tol, rel_tol * |S2|) scaled to the panel.
/// Throws NumericalError when the recursion depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 48);

/// Composite Simpson rule on equally spaced samples; an even number of
/// intervals is required (odd sample count).
double simpson(std::span<const double> samples, double spacing);

/// Trapezoid rule on equally spaced samples.
double trapezoid(std::span<const double> samples, double spacing);

}  // namespace hybridheat
