#include "hybridheat/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "hybridheat/errors.hpp"

namespace hybridheat {

namespace {

double simpson_panel(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m, double fm,
               double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_panel(a, fa, flm, m, fm);
  const double right = simpson_panel(m, fm, frm, b, fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    std::ostringstream os;
    os << "adaptive Simpson did not converge on [" << a << ", " << b << "] (estimated error "
       << std::abs(delta) / 15.0 << ")";
    throw NumericalError(os.str());
  }
  return recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson_panel(a, fa, fm, b, fb);
  // A coarse 16-panel estimate fixes the scale for the relative tolerance.
  double coarse = 0.0;
  {
    const int n = 16;
    const double h = (b - a) / n;
    double s = fa + fb;
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    coarse = s * h / 3.0;
  }
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse));
  return recurse(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double simpson(std::span<const double> samples, double spacing) {
  const std::size_t n = samples.size();
  if (n < 3 || n % 2 == 0) throw ValidationError("simpson: need an odd number (>= 3) of samples");
  double s = samples.front() + samples.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * samples[i];
  return s * spacing / 3.0;
}

double trapezoid(std::span<const double> samples, double spacing) {
  const std::size_t n = samples.size();
  if (n < 2) return 0.0;
  double s = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < n; ++i) s += samples[i];
  return s * spacing;
}

}  // namespace hybridheat
