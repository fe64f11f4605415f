#include "hybridheat/shooting.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hybridheat/dopri5.hpp"
#include "hybridheat/errors.hpp"

namespace hybridheat {

namespace {

using State = std::array<double, 4>;  // y, p = sigma y', dy/dlambda, dp/dlambda

Dopri5Options integrator_options(const ShootingOptions& opt, double lambda) {
  Dopri5Options o;
  o.abs_tol = opt.abs_tol;
  o.rel_tol = opt.rel_tol;
  o.initial_step = 0.01 / (1.0 + std::sqrt(std::abs(lambda)));
  return o;
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda)) throw ValidationError("shooting: spectral parameter must be finite");
}

std::vector<double> uniform_grid(Interval iv, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = iv.lo + (iv.hi - iv.lo) * i / (n - 1);
  g.back() = iv.hi;
  return g;
}

}  // namespace

ShootingTrace shoot_left(const CoefficientSet& c, double lambda, const ShootingOptions& opt) {
  check_lambda(lambda);
  const auto& rho = c.rho1;
  const auto& sigma = c.sigma1;
  const auto& q = c.q1;
  auto rhs = [&](double x, const State& s) -> State {
    const double r = rho(x);
    const double sg = sigma(x);
    const double k = q(x) - lambda * r;
    return {s[1] / sg, k * s[0], s[3] / sg, k * s[2] - r * s[0]};
  };

  ShootingTrace tr;
  tr.lambda = lambda;
  tr.side = Side::Left;
  if (opt.grid_points > 0) {
    tr.grid = uniform_grid(rod_interval(Side::Left), opt.grid_points);
    tr.y.resize(tr.grid.size());
    tr.flux.resize(tr.grid.size());
  }
  const State init{0.0, sigma(-1.0), 0.0, 0.0};
  Dopri5Stats stats;
  const State end = dopri5<4>(
      rhs, -1.0, 0.0, init, tr.grid, integrator_options(opt, lambda),
      [&](std::size_t i, double, const State& s) {
        tr.y[i] = s[0];
        tr.flux[i] = s[1];
      },
      &stats);
  tr.y_at_zero = end[0];
  tr.flux_at_zero = end[1];
  tr.dy_dlambda_at_zero = end[2];
  tr.dflux_dlambda_at_zero = end[3];
  tr.steps = stats.accepted;
  if (!tr.y.empty()) {
    tr.y.back() = end[0];
    tr.flux.back() = end[1];
  }
  return tr;
}

ShootingTrace shoot_right(const CoefficientSet& c, double lambda, BcVariant variant,
                          const ShootingOptions& opt) {
  check_lambda(lambda);
  const auto& rho = c.rho2;
  const auto& sigma = c.sigma2;
  const auto& q = c.q2;
  // s = 1 - x turns the backward problem into a forward one:
  // dY/ds = -P / sigma, dP/ds = -(q - lambda rho) Y with P = sigma v'(x).
  auto rhs = [&](double s, const State& st) -> State {
    const double x = 1.0 - s;
    const double r = rho(x);
    const double sg = sigma(x);
    const double k = q(x) - lambda * r;
    return {-st[1] / sg, -k * st[0], -st[3] / sg, -k * st[2] + r * st[0]};
  };

  ShootingTrace tr;
  tr.lambda = lambda;
  tr.side = Side::Right;
  tr.variant = variant;
  std::vector<double> s_out;
  if (opt.grid_points > 0) {
    tr.grid = uniform_grid(rod_interval(Side::Right), opt.grid_points);
    tr.y.resize(tr.grid.size());
    tr.flux.resize(tr.grid.size());
    s_out.resize(tr.grid.size());
    for (std::size_t j = 0; j < s_out.size(); ++j) s_out[j] = 1.0 - tr.grid[tr.grid.size() - 1 - j];
    s_out.front() = 0.0;
  }
  const State init = variant == BcVariant::DirichletControl ? State{0.0, -sigma(1.0), 0.0, 0.0}
                                                            : State{1.0, 0.0, 0.0, 0.0};
  const std::size_t n = tr.grid.size();
  Dopri5Stats stats;
  const State end = dopri5<4>(
      rhs, 0.0, 1.0, init, s_out, integrator_options(opt, lambda),
      [&](std::size_t j, double, const State& s) {
        tr.y[n - 1 - j] = s[0];
        tr.flux[n - 1 - j] = s[1];
      },
      &stats);
  tr.y_at_zero = end[0];
  tr.flux_at_zero = end[1];
  tr.dy_dlambda_at_zero = end[2];
  tr.dflux_dlambda_at_zero = end[3];
  tr.steps = stats.accepted;
  if (n > 0) {
    tr.y.front() = end[0];
    tr.flux.front() = end[1];
  }
  return tr;
}

ShootingTrace shoot(const CoefficientSet& c, double lambda, Side side, BcVariant variant,
                    const ShootingOptions& opt) {
  return side == Side::Left ? shoot_left(c, lambda, opt) : shoot_right(c, lambda, variant, opt);
}

WkbPrediction wkb_reference(const CoefficientSet& c, double lambda, Side side, BcVariant variant) {
  if (!(lambda >= 100.0)) throw ValidationError("wkb_reference: lambda must be >= 100");
  const TravelTimes tt = travel_times(c);
  const double k = std::sqrt(lambda);
  const auto& rho = c.rho(side);
  const auto& sigma = c.sigma(side);
  const double rs0 = rho(0.0) * sigma(0.0);
  // Liouville-Green: y ~ A (rho sigma)^(-1/4) trig(k tau), sigma y' ~ A k (rho sigma)^(1/4) trig'(k tau),
  // with A chosen from the starting data at the far end of the rod.
  WkbPrediction w{};
  if (side == Side::Left) {
    const double a = std::pow(sigma(-1.0), 0.75) * std::pow(rho(-1.0), -0.25) / k;
    const double phase = k * tt.gamma1;
    w.y_scale = a * std::pow(rs0, -0.25);
    w.flux_scale = a * k * std::pow(rs0, 0.25);
    w.y_at_zero = w.y_scale * std::sin(phase);
    w.flux_at_zero = w.flux_scale * std::cos(phase);
  } else if (variant == BcVariant::DirichletControl) {
    const double a = std::pow(sigma(1.0), 0.75) * std::pow(rho(1.0), -0.25) / k;
    const double phase = k * tt.gamma2;
    w.y_scale = a * std::pow(rs0, -0.25);
    w.flux_scale = a * k * std::pow(rs0, 0.25);
    w.y_at_zero = w.y_scale * std::sin(phase);
    w.flux_at_zero = -w.flux_scale * std::cos(phase);
  } else {
    const double a = std::pow(rho(1.0) * sigma(1.0), 0.25);
    const double phase = k * tt.gamma2;
    w.y_scale = a * std::pow(rs0, -0.25);
    w.flux_scale = a * k * std::pow(rs0, 0.25);
    w.y_at_zero = w.y_scale * std::cos(phase);
    w.flux_at_zero = w.flux_scale * std::sin(phase);
  }
  return w;
}

double wkb_deviation(const ShootingTrace& trace, const WkbPrediction& w) {
  const double dy = (trace.y_at_zero - w.y_at_zero) / w.y_scale;
  const double df = (trace.flux_at_zero - w.flux_at_zero) / w.flux_scale;
  return std::hypot(dy, df);
}

void write_trace_csv(const ShootingTrace& trace, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write trace");
  os << "x,y,flux\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.grid.size(); ++i) {
    os << trace.grid[i] << ',' << trace.y[i] << ',' << trace.flux[i] << '\n';
  }
}

}  // namespace hybridheat
