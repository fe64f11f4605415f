#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <sstream>

#include "hybridheat/errors.hpp"

namespace hybridheat {

struct Dopri5Options {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  double initial_step = 1e-3;
  long max_steps = 2'000'000;
};

struct Dopri5Stats {
  long accepted = 0;
  long rejected = 0;
};

/// Dormand-Prince 5(4) with FSAL, step-size control in the max norm and the
/// 4th-order continuous extension. Integrates y' = rhs(t, y) from t0 to t1
/// (t1 > t0). For every requested output time (ascending, inside [t0, t1])
/// `sink(index, t, y)` is called with the interpolated state. Throws
/// NumericalError with the failure location and error estimate when the
/// step size collapses.
template <std::size_t N, class Rhs, class Sink>
std::array<double, N> dopri5(const Rhs& rhs, double t0, double t1, std::array<double, N> y,
                             std::span<const double> outputs, const Dopri5Options& opt, Sink&& sink,
                             Dopri5Stats* stats = nullptr) {
  using State = std::array<double, N>;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0, e4 = b4 - 393.0 / 640.0,
                   e5 = b5 + 92097.0 / 339200.0, e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;
  constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

  auto combine = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = base;
    for (const auto& [w, k] : terms) {
      for (std::size_t i = 0; i < N; ++i) out[i] += h * w * (*k)[i];
    }
    return out;
  };

  std::size_t next_out = 0;
  while (next_out < outputs.size() && outputs[next_out] <= t0) {
    sink(next_out, outputs[next_out], y);
    ++next_out;
  }

  const double span = t1 - t0;
  double t = t0;
  double h = std::min(opt.initial_step, span);
  State k1 = rhs(t, y);
  long steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) {
      std::ostringstream os;
      os << "dopri5: step budget exhausted at t=" << t;
      throw NumericalError(os.str());
    }
    bool last = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    const State k2 = rhs(t + c2 * h, combine(y, h, {{a21, &k1}}));
    const State k3 = rhs(t + c3 * h, combine(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(t + c4 * h, combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(t + c5 * h, combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(t + h, combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State ynew = combine(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(t + h, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei / sc));
    }

    if (!std::isfinite(err) || err > 1.0) {
      if (stats) ++stats->rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      if (h < 1e-14 * std::max(1.0, std::abs(t)) * std::max(1.0, span)) {
        std::ostringstream os;
        os << "dopri5: step size underflow at t=" << t << " (local error estimate " << err << ")";
        throw NumericalError(os.str());
      }
      continue;
    }

    const double t_new = last ? t1 : t + h;
    while (next_out < outputs.size() && outputs[next_out] <= t_new) {
      const double theta = (outputs[next_out] - t) / h;
      const double tm1 = theta - 1.0;
      const double th2 = theta * theta;
      const double A = th2 * (3.0 - 2.0 * theta);
      const double B = th2 * tm1;
      const double C = th2 * tm1 * tm1;
      const double D = theta * tm1 * tm1;
      const double X1 = 5.0 * (2558722523.0 - 31403016.0 * theta) / 11282082432.0;
      const double X3 = 100.0 * (882725551.0 - 15701508.0 * theta) / 32700410799.0;
      const double X4 = 25.0 * (443332067.0 - 31403016.0 * theta) / 1880347072.0;
      const double X5 = 32805.0 * (23143187.0 - 3489224.0 * theta) / 199316789632.0;
      const double X6 = 55.0 * (29972135.0 - 7076736.0 * theta) / 822651844.0;
      const double X7 = 10.0 * (7414447.0 - 829305.0 * theta) / 29380423.0;
      const double w1 = A * b1 - C * X1 + D;
      const double w3 = A * b3 + C * X3;
      const double w4 = A * b4 - C * X4;
      const double w5 = A * b5 + C * X5;
      const double w6 = A * b6 - C * X6;
      const double w7 = B + C * X7;
      State yi = combine(y, h, {{w1, &k1}, {w3, &k3}, {w4, &k4}, {w5, &k5}, {w6, &k6}, {w7, &k7}});
      if (outputs[next_out] == t_new) yi = ynew;
      sink(next_out, outputs[next_out], yi);
      ++next_out;
    }

    if (stats) ++stats->accepted;
    t = t_new;
    y = ynew;
    k1 = k7;
    const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
    h *= fac;
  }
  return y;
}

}  // namespace hybridheat
