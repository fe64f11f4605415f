#pragma once

#include <filesystem>
#include <vector>

#include "hybridheat/coefficients.hpp"
#include "hybridheat/config.hpp"

namespace hybridheat {

constexpr int kTraceGridPoints = 2049;

struct ShootingOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  /// Number of uniformly spaced output samples on the rod; 0 computes the
  /// endpoint values only.
  int grid_points = kTraceGridPoints;

  static ShootingOptions from(const Tolerances& t, int grid_points = kTraceGridPoints) {
    return {t.ode_abs, t.ode_rel, grid_points};
  }
  static ShootingOptions endpoint_only(const Tolerances& t) { return from(t, 0); }
};

/// Solution of one rod's initial value problem at a fixed spectral parameter.
///
/// Left rod:  -(s1 u')' + q1 u = lambda r1 u on (-1, 0), u(-1) = 0, u'(-1) = 1.
/// Right rod: -(s2 v')' + q2 v = lambda r2 v on (0, 1), started at x = 1 with
///            v(1) = 0, v'(1) = -1 (Dirichlet) or v(1) = 1, v'(1) = 0 (Neumann).
///
/// `flux` is sigma * y'. The grid is increasing in x for both rods. Values at
/// the interface x = 0 and their lambda-derivatives come from the joint
/// variational integration.
struct ShootingTrace {
  double lambda = 0.0;
  Side side = Side::Left;
  BcVariant variant = BcVariant::DirichletControl;
  std::vector<double> grid;
  std::vector<double> y;
  std::vector<double> flux;
  double y_at_zero = 0.0;
  double flux_at_zero = 0.0;
  double dy_dlambda_at_zero = 0.0;
  double dflux_dlambda_at_zero = 0.0;
  long steps = 0;
};

ShootingTrace shoot_left(const CoefficientSet& c, double lambda, const ShootingOptions& opt = {});
ShootingTrace shoot_right(const CoefficientSet& c, double lambda, BcVariant variant,
                          const ShootingOptions& opt = {});
ShootingTrace shoot(const CoefficientSet& c, double lambda, Side side, BcVariant variant,
                    const ShootingOptions& opt = {});

/// Leading-order Liouville-Green prediction of the interface values, with
/// the amplitude fixed by the starting conditions of the corresponding IVP.
/// `y_scale` and `flux_scale` are the predicted envelopes at x = 0, used to
/// normalise deviations.
struct WkbPrediction {
  double y_at_zero;
  double flux_at_zero;
  double y_scale;
  double flux_scale;
};

/// Requires lambda >= 100; diagnostic only.
WkbPrediction wkb_reference(const CoefficientSet& c, double lambda, Side side, BcVariant variant);

/// Normalised deviation sqrt((dy / y_scale)^2 + (dflux / flux_scale)^2).
double wkb_deviation(const ShootingTrace& trace, const WkbPrediction& w);

/// Writes columns x, y, flux.
void write_trace_csv(const ShootingTrace& trace, const std::filesystem::path& path);

}  // namespace hybridheat
