#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hybridheat/coefficients.hpp"
#include "hybridheat/spectrum.hpp"

namespace hybridheat {

/// State of the hybrid system at one time: temperatures on both rods and of
/// the point mass. Rod samples are on uniform grids including the endpoints.
struct StateSnapshot {
  double t = 0.0;
  std::vector<double> x_left, u;
  std::vector<double> x_right, v;
  double z = 0.0;
  double energy_H = 0.0;  // squared H norm
};

std::vector<double> uniform_rod_grid(Side side, int points);

/// Squared H norm int rho1 u^2 + int rho2 v^2 + M z^2 (Simpson on odd sample
/// counts, trapezoid otherwise).
double energy_H(const CoefficientSet& c, const StateSnapshot& s);

StateSnapshot zero_state(int grid_points = kTraceGridPoints);
StateSnapshot state_from_eigenpair(const Eigenpair& e);

/// Initial data description used by the command-line tool and bindings.
///
///   zero                  the zero state
///   mode:K                the normalised eigenfunction K
///   modes:K1,K2,...       equal-weight combination, scaled to unit norm
///   expr:U;V;Z            expressions in x for the two rods and the mass value
///   file:PATH             CSV with columns x, value, piece (u, v or z), as
///                         written by write_eigenfunction_csv
struct InitialDataSpec {
  enum class Kind { Zero, Modes, Expressions, File } kind = Kind::Zero;
  std::vector<int> modes;
  std::string u_expr, v_expr;
  double z = 0.0;
  std::string path;

  int highest_mode() const;
};

InitialDataSpec parse_initial_spec(std::string_view spec);

/// Builds the state on the eigenpair grids. `eigs` must contain every mode
/// named by the spec (index k at position k - 1).
StateSnapshot build_initial_state(const CoefficientSet& c, const InitialDataSpec& spec,
                                  const std::vector<Eigenpair>& eigs, int grid_points = kTraceGridPoints);

/// Samples of `s` at the given points (cubic spline through the stored samples,
/// exact where the points coincide with stored grid nodes).
std::vector<double> resample(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& at);

/// terminal.csv: x, value, piece.
void write_state_csv(const StateSnapshot& s, const std::filesystem::path& path);

}  // namespace hybridheat
