#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hybridheat/moments.hpp"
#include "hybridheat/spectrum.hpp"
#include "hybridheat/state.hpp"

namespace hybridheat {

/// Boundary input h(t); an empty function means h = 0.
using InputSignal = std::function<double(double)>;

InputSignal input_from(const ControlSignal& s);

struct TrajectoryPoint {
  double t = 0.0;
  double energy_H = 0.0;
  double z = 0.0;
  std::vector<double> modal;  // <Y(t), phi_n>_H, n = 1..N
};

struct SimulationResult {
  std::vector<TrajectoryPoint> trajectory;
  StateSnapshot terminal;
  double tail_energy = 0.0;  // terminal energy minus captured modal energy
  double interface_residual = 0.0;  // finite differences only; see simulate_fd
  long steps = 0;
  std::vector<std::string> warnings;
};

struct GalerkinOptions {
  int steps = 2000;      // at least 1000
  int store_every = 1;
};

/// Modal Galerkin evolution a_n' = -lambda_n a_n + b_n h(t) with the exact
/// exponential propagator and 20-point Gauss-Legendre quadrature of the input
/// term on every step. `y0` holds the initial modal coefficients.
SimulationResult simulate_galerkin(const CoefficientSet& c, const std::vector<Eigenpair>& eigs,
                                   const std::vector<double>& y0, const InputSignal& h, double horizon,
                                   const GalerkinOptions& opt = {});

struct FdOptions {
  int nx = 128;  // cells per rod, at least 64
  int nt = 2048; // time steps, at least 512
  int store_every = 1;
};

/// Crank-Nicolson with a conservative three-point discretisation of
/// (sigma y')' on each rod. The mass temperature is the shared node at x = 0,
/// carrying the point mass plus the two adjacent half cells. Dirichlet input is
/// imposed strongly at x = 1, Neumann input as the boundary flux sigma2(1) h.
///
/// `interface_residual` is the largest value over the run of
/// |M z' - sigma2(0) v_x(0) + sigma1(0) u_x(0)| with one-sided three-point
/// derivatives, evaluated at step midpoints. Modal coefficients are recorded
/// against `eigs` when it is non-empty.
SimulationResult simulate_fd(const CoefficientSet& c, BcVariant variant, const StateSnapshot& y0,
                             const InputSignal& h, double horizon, const FdOptions& opt = {},
                             const std::vector<Eigenpair>& eigs = {});

/// Discrete energy used by simulate_fd: lumped masses on the FD nodes.
double fd_energy(const CoefficientSet& c, const StateSnapshot& s);

struct VerificationReport {
  BcVariant variant = BcVariant::DirichletControl;
  double horizon = 1.0;
  int n_modes = 0;
  int n_galerkin = 0;
  double initial_energy = 0.0;
  double modal_terminal_energy = 0.0;       // controlled modes n <= N, Galerkin
  double modal_terminal_energy_fd = 0.0;    // same modes, projected from the FD state
  double galerkin_tail_energy = 0.0;        // modes N < n <= N_galerkin at T
  double initial_tail_energy = 0.0;         // energy of Y0 outside modes 1..N
  double tail_bound = 0.0;
  double fd_terminal_energy = 0.0;
  double baseline_terminal_energy = 0.0;    // h = 0, finite differences
  double baseline_ratio = 0.0;
  double max_moment_residual = 0.0;
  double gram_condition = 0.0;
  double control_l2_norm = 0.0;
  bool modal_pass = false;
  bool fd_pass = false;
  bool pass() const { return modal_pass && fd_pass; }
};

struct VerifyOptions {
  Precision precision = Precision::Extended;
  FdOptions fd{256, 4096, 16};
  GalerkinOptions galerkin{4000, 40};
  int extra_modes = 24;  // modes beyond N carried by the Galerkin run
  int taper = 3;         // see MomentProblem
};

/// Synthesises the control for Y0, runs both simulators and compares the
/// terminal energies. PASS iff the controlled modal energy is at most 1e-10 of
/// the initial energy and the FD terminal energy is at most ten times the
/// tail bound 2 (E_tail(Y0) e^{-2 lambda_{N+1} T} + E_spill), where E_spill is
/// the energy the control deposits in the uncontrolled Galerkin modes.
VerificationReport verify_null_control(const CoefficientSet& c, BcVariant variant, const InitialDataSpec& y0,
                                       double horizon, int n_modes, const VerifyOptions& opt = {},
                                       const Tolerances& tol = {});

/// trajectory.csv: t, energy_H, z, a_1..a_N.
void write_trajectory_csv(const SimulationResult& r, const std::filesystem::path& path);

}  // namespace hybridheat
