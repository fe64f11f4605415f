#include "hybridheat/simulator.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

namespace hybridheat {

InputSignal input_from(const ControlSignal& s) {
  if (s.is_zero()) return {};
  return [s](double t) { return s.h_at(t); };
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

double eval(const InputSignal& h, double t) { return h ? h(t) : 0.0; }

StateSnapshot reconstruct(const std::vector<Eigenpair>& eigs, const std::vector<double>& a, double t) {
  StateSnapshot s;
  s.t = t;
  if (eigs.empty()) return s;
  s.x_left = eigs[0].x_left;
  s.x_right = eigs[0].x_right;
  s.u.assign(s.x_left.size(), 0.0);
  s.v.assign(s.x_right.size(), 0.0);
  for (std::size_t n = 0; n < eigs.size(); ++n) {
    for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] += a[n] * eigs[n].u_part[i];
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] += a[n] * eigs[n].v_part[i];
    s.z += a[n] * eigs[n].z;
  }
  return s;
}

double sum_squares(const std::vector<double>& a, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  double e = 0.0;
  for (std::size_t i = from; i < std::min(to, a.size()); ++i) e += a[i] * a[i];
  return e;
}

}  // namespace

SimulationResult simulate_galerkin(const CoefficientSet& c, const std::vector<Eigenpair>& eigs,
                                   const std::vector<double>& y0, const InputSignal& h, double horizon,
                                   const GalerkinOptions& opt) {
  if (eigs.empty()) throw ValidationError("galerkin: no eigenpairs");
  if (y0.size() != eigs.size()) throw ValidationError("galerkin: initial coefficients do not match the eigenpairs");
  if (!(horizon > 0.0)) throw ValidationError("galerkin: horizon must be positive");
  if (opt.steps < 1000) throw ValidationError("galerkin: time grid coarser than 1e-3 T (steps < 1000)");
  const std::size_t N = eigs.size();
  std::vector<double> lam(N), b(N), decay(N);
  const double dt = horizon / opt.steps;
  for (std::size_t n = 0; n < N; ++n) {
    lam[n] = eigs[n].lambda;
    b[n] = input_coefficient(c, eigs[n]);
    decay[n] = std::exp(-lam[n] * dt);
  }
  const auto& abscissa = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  // Nodes on [-1, 1] (symmetric pairs) mapped to the step.
  std::vector<double> nodes, wts;
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    nodes.push_back(abscissa[k]);
    wts.push_back(weights[k]);
    if (abscissa[k] != 0.0) {
      nodes.push_back(-abscissa[k]);
      wts.push_back(weights[k]);
    }
  }

  SimulationResult r;
  std::vector<double> a = y0;
  auto z_of = [&](const std::vector<double>& coeffs) {
    double z = 0.0;
    for (std::size_t n = 0; n < N; ++n) z += coeffs[n] * eigs[n].z;
    return z;
  };
  r.trajectory.push_back({0.0, sum_squares(a), z_of(a), a});
  std::vector<double> hv(nodes.size());
  for (int step = 0; step < opt.steps; ++step) {
    const double t0 = horizon * step / opt.steps;
    const double t1 = horizon * (step + 1) / opt.steps;
    const double mid = 0.5 * (t0 + t1);
    const double half = 0.5 * (t1 - t0);
    if (h) {
      for (std::size_t k = 0; k < nodes.size(); ++k) hv[k] = h(mid + half * nodes[k]);
    }
    for (std::size_t n = 0; n < N; ++n) {
      double forced = 0.0;
      if (h) {
        for (std::size_t k = 0; k < nodes.size(); ++k) {
          const double s = mid + half * nodes[k];
          forced += wts[k] * hv[k] * std::exp(-lam[n] * (t1 - s));
        }
        forced *= half;
      }
      a[n] = decay[n] * a[n] + b[n] * forced;
    }
    ++r.steps;
    if ((step + 1) % opt.store_every == 0 || step + 1 == opt.steps) {
      r.trajectory.push_back({t1, sum_squares(a), z_of(a), a});
    }
  }
  r.terminal = reconstruct(eigs, a, horizon);
  r.terminal.energy_H = sum_squares(a);
  r.tail_energy = std::max(0.0, energy_H(c, r.terminal) - r.terminal.energy_H);
  return r;
}

namespace {

// Symmetric tridiagonal system solved by the Thomas algorithm.
struct Tridiagonal {
  std::vector<double> diag, off;  // off[i] couples i and i + 1

  std::vector<double> apply(const std::vector<double>& y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      double s = diag[i] * y[i];
      if (i > 0) s += off[i - 1] * y[i - 1];
      if (i + 1 < y.size()) s += off[i] * y[i + 1];
      out[i] = s;
    }
    return out;
  }
};

class ThomasSolver {
 public:
  explicit ThomasSolver(const Tridiagonal& m) : off_(m.off), c_(m.diag.size()), inv_(m.diag.size()) {
    const std::size_t n = m.diag.size();
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = m.diag[i] - (i > 0 ? m.off[i - 1] * prev_c : 0.0);
      if (!(std::abs(d) > 0.0) || !std::isfinite(d)) throw NumericalError("finite differences: singular tridiagonal system");
      inv_[i] = 1.0 / d;
      c_[i] = i + 1 < n ? m.off[i] * inv_[i] : 0.0;
      prev_c = c_[i];
    }
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - off_[i - 1] * rhs[i - 1]) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c_[i] * rhs[i + 1];
  }

 private:
  std::vector<double> off_, c_, inv_;
};

struct FdLayout {
  int nx;
  bool neumann;
  std::size_t size() const { return static_cast<std::size_t>(2 * nx - 1 + (neumann ? 1 : 0)); }
  std::size_t left(int i) const { return static_cast<std::size_t>(i - 1); }   // i = 1..nx-1
  std::size_t z() const { return static_cast<std::size_t>(nx - 1); }
  std::size_t right(int j) const { return static_cast<std::size_t>(nx - 1 + j); }  // j = 1..nx-1 (nx if Neumann)
};

std::vector<double> lumped_weights(const CoefficientSet& c, const FdLayout& L, bool with_density) {
  const double dx = 1.0 / L.nx;
  std::vector<double> w(L.size());
  auto r1 = [&](double x) { return with_density ? c.rho1(x) : 1.0; };
  auto r2 = [&](double x) { return with_density ? c.rho2(x) : 1.0; };
  for (int i = 1; i < L.nx; ++i) w[L.left(i)] = r1(-1.0 + i * dx) * dx;
  w[L.z()] = (with_density ? c.mass : 0.0) + 0.5 * dx * (r1(0.0) + r2(0.0));
  for (int j = 1; j < L.nx; ++j) w[L.right(j)] = r2(j * dx) * dx;
  if (L.neumann) w[L.right(L.nx)] = 0.5 * dx * r2(1.0);
  return w;
}

}  // namespace

double fd_energy(const CoefficientSet& c, const StateSnapshot& s) {
  const std::size_t n = s.x_left.size() - 1;
  if (s.x_right.size() != n + 1 || n < 2) throw ValidationError("fd_energy: rod grids must match");
  const double dx = 1.0 / static_cast<double>(n);
  double e = c.mass * s.z * s.z;
  for (std::size_t i = 1; i < n; ++i) e += c.rho1(s.x_left[i]) * dx * s.u[i] * s.u[i];
  for (std::size_t j = 1; j < n; ++j) e += c.rho2(s.x_right[j]) * dx * s.v[j] * s.v[j];
  e += 0.5 * dx * (c.rho1(0.0) + c.rho2(0.0)) * s.z * s.z;
  e += 0.5 * dx * c.rho1(-1.0) * s.u[0] * s.u[0];
  e += 0.5 * dx * c.rho2(1.0) * s.v[n] * s.v[n];
  return e;
}

SimulationResult simulate_fd(const CoefficientSet& c, BcVariant variant, const StateSnapshot& y0,
                             const InputSignal& h, double horizon, const FdOptions& opt,
                             const std::vector<Eigenpair>& eigs) {
  if (opt.nx < 64) throw ValidationError("finite differences: nx must be at least 64 cells per rod");
  if (opt.nt < 512) throw ValidationError("finite differences: nt must be at least 512 steps");
  if (!(horizon > 0.0)) throw ValidationError("finite differences: horizon must be positive");
  if (opt.store_every < 1) throw ValidationError("finite differences: store_every must be positive");
  const bool neumann = variant == BcVariant::NeumannControl;
  const FdLayout L{opt.nx, neumann};
  const int n = opt.nx;
  const double dx = 1.0 / n;
  const double dt = horizon / opt.nt;
  const std::size_t S = L.size();

  const std::vector<double> mass = lumped_weights(c, L, true);
  const std::vector<double> cell = lumped_weights(c, L, false);
  Tridiagonal K{std::vector<double>(S, 0.0), std::vector<double>(S - 1, 0.0)};
  auto add_edge = [&](std::size_t a, std::size_t b, double k) {
    K.diag[a] += k;
    K.diag[b] += k;
    K.off[std::min(a, b)] -= k;
  };
  // Left rod: node 0 is held at zero.
  K.diag[L.left(1)] += c.sigma1(-1.0 + 0.5 * dx) / dx;
  for (int i = 1; i < n - 1; ++i) add_edge(L.left(i), L.left(i + 1), c.sigma1(-1.0 + (i + 0.5) * dx) / dx);
  add_edge(L.left(n - 1), L.z(), c.sigma1(-0.5 * dx) / dx);
  add_edge(L.z(), L.right(1), c.sigma2(0.5 * dx) / dx);
  for (int j = 1; j < n - 1; ++j) add_edge(L.right(j), L.right(j + 1), c.sigma2((j + 0.5) * dx) / dx);
  const double k_end = c.sigma2(1.0 - 0.5 * dx) / dx;
  if (neumann) {
    add_edge(L.right(n - 1), L.right(n), k_end);
  } else {
    K.diag[L.right(n - 1)] += k_end;
  }
  for (int i = 1; i < n; ++i) K.diag[L.left(i)] += c.q1(-1.0 + i * dx) * cell[L.left(i)];
  K.diag[L.z()] += 0.5 * dx * (c.q1(0.0) + c.q2(0.0));
  for (int j = 1; j < n; ++j) K.diag[L.right(j)] += c.q2(j * dx) * cell[L.right(j)];
  if (neumann) K.diag[L.right(n)] += c.q2(1.0) * cell[L.right(n)];

  Tridiagonal lhs = K, rhs_op = K;
  for (std::size_t i = 0; i < S; ++i) {
    lhs.diag[i] = mass[i] + 0.5 * dt * K.diag[i];
    rhs_op.diag[i] = mass[i] - 0.5 * dt * K.diag[i];
  }
  for (std::size_t i = 0; i + 1 < S; ++i) {
    lhs.off[i] = 0.5 * dt * K.off[i];
    rhs_op.off[i] = -0.5 * dt * K.off[i];
  }
  const ThomasSolver solver(lhs);
  const std::size_t input_row = neumann ? L.right(n) : L.right(n - 1);
  const double input_gain = neumann ? c.sigma2(1.0) : k_end;

  // Initial data on the FD nodes.
  const std::vector<double> xl = uniform_rod_grid(Side::Left, n + 1);
  const std::vector<double> xr = uniform_rod_grid(Side::Right, n + 1);
  const std::vector<double> u0 = resample(y0.x_left, y0.u, xl);
  const std::vector<double> v0 = resample(y0.x_right, y0.v, xr);
  std::vector<double> y(S);
  for (int i = 1; i < n; ++i) y[L.left(i)] = u0[static_cast<std::size_t>(i)];
  y[L.z()] = y0.z;
  for (int j = 1; j < n; ++j) y[L.right(j)] = v0[static_cast<std::size_t>(j)];
  if (neumann) y[L.right(n)] = v0[static_cast<std::size_t>(n)];

  // Eigenfunctions on the FD nodes, for modal projections in the discrete inner product.
  std::vector<std::vector<double>> phi;
  for (const Eigenpair& e : eigs) {
    const auto pu = resample(e.x_left, e.u_part, xl);
    const auto pv = resample(e.x_right, e.v_part, xr);
    std::vector<double> p(S);
    for (int i = 1; i < n; ++i) p[L.left(i)] = pu[static_cast<std::size_t>(i)];
    p[L.z()] = e.z;
    for (int j = 1; j < n; ++j) p[L.right(j)] = pv[static_cast<std::size_t>(j)];
    if (neumann) p[L.right(n)] = pv[static_cast<std::size_t>(n)];
    phi.push_back(std::move(p));
  }

  auto snapshot = [&](const std::vector<double>& state, double t) {
    StateSnapshot s;
    s.t = t;
    s.x_left = xl;
    s.x_right = xr;
    s.u.assign(xl.size(), 0.0);
    s.v.assign(xr.size(), 0.0);
    for (int i = 1; i < n; ++i) s.u[static_cast<std::size_t>(i)] = state[L.left(i)];
    s.u.back() = state[L.z()];
    s.v.front() = state[L.z()];
    for (int j = 1; j < n; ++j) s.v[static_cast<std::size_t>(j)] = state[L.right(j)];
    s.v.back() = neumann ? state[L.right(n)] : eval(h, t);
    s.z = state[L.z()];
    s.energy_H = fd_energy(c, s);
    return s;
  };
  auto point = [&](const std::vector<double>& state, double t) {
    TrajectoryPoint p;
    p.t = t;
    const StateSnapshot s = snapshot(state, t);
    p.energy_H = s.energy_H;
    p.z = s.z;
    for (const auto& f : phi) {
      double acc = 0.0;
      for (std::size_t i = 0; i < S; ++i) acc += mass[i] * state[i] * f[i];
      p.modal.push_back(acc);
    }
    return p;
  };

  // One-sided three-point interface fluxes.
  auto interface_terms = [&](const std::vector<double>& st) {
    const double zz = st[L.z()];
    const double u1 = st[L.left(n - 1)], u2 = st[L.left(n - 2)];
    const double v1 = st[L.right(1)], v2 = st[L.right(2)];
    const double ux = (3.0 * zz - 4.0 * u1 + u2) / (2.0 * dx);
    const double vx = (-3.0 * zz + 4.0 * v1 - v2) / (2.0 * dx);
    return c.sigma2(0.0) * vx - c.sigma1(0.0) * ux;
  };

  SimulationResult r;
  if (dt > dx) {
    std::ostringstream os;
    os << "finite differences: step ratio dt/dx = " << dt / dx << " > 1, the time error may dominate; raise nt";
    r.warnings.push_back(os.str());
  }
  r.trajectory.push_back(point(y, 0.0));
  double g_prev = input_gain * eval(h, 0.0);
  std::vector<double> next;
  for (int step = 0; step < opt.nt; ++step) {
    const double t1 = horizon * (step + 1) / opt.nt;
    const double g_next = input_gain * eval(h, t1);
    next = rhs_op.apply(y);
    next[input_row] += 0.5 * dt * (g_prev + g_next);
    solver.solve(next);
    const double zdot = (next[L.z()] - y[L.z()]) / dt;
    const double flux = 0.5 * (interface_terms(y) + interface_terms(next));
    r.interface_residual = std::max(r.interface_residual, std::abs(c.mass * zdot - flux));
    y.swap(next);
    g_prev = g_next;
    ++r.steps;
    if ((step + 1) % opt.store_every == 0 || step + 1 == opt.nt) r.trajectory.push_back(point(y, t1));
  }
  r.terminal = snapshot(y, horizon);
  r.tail_energy = std::max(0.0, r.terminal.energy_H - sum_squares(r.trajectory.back().modal));
  return r;
}

VerificationReport verify_null_control(const CoefficientSet& c, BcVariant variant, const InitialDataSpec& y0spec,
                                       double horizon, int n_modes, const VerifyOptions& opt, const Tolerances& tol) {
  if (n_modes < 1) throw ValidationError("verify: n_modes must be positive");
  VerificationReport rep;
  rep.variant = variant;
  rep.horizon = horizon;
  rep.n_modes = n_modes;
  if (opt.taper < 0 || opt.taper > opt.extra_modes) throw ValidationError("verify: taper must lie in [0, extra_modes]");
  const int n_total = std::max(n_modes + opt.extra_modes, y0spec.highest_mode());
  rep.n_galerkin = n_total;
  const std::vector<Eigenpair> eigs = eigenpairs(c, variant, n_total, tol);
  const StateSnapshot y0 = build_initial_state(c, y0spec, eigs);
  const std::vector<double> coeffs = project_initial_data(c, y0, eigs);
  rep.initial_energy = y0.energy_H;

  const std::vector<Eigenpair> controlled(eigs.begin(), eigs.begin() + n_modes);
  const std::vector<double> controlled_coeffs(coeffs.begin(), coeffs.begin() + n_modes);
  const MomentProblem problem = build_moment_problem(c, variant, eigs, controlled_coeffs, horizon, opt.taper);
  const BiorthogonalFamily family = build_biorthogonal(problem.exponents, horizon, opt.precision, tol);
  const ControlSignal control = synthesize_control(problem, family, tol);
  rep.max_moment_residual = control.max_residual;
  rep.gram_condition = family.gram_condition;
  rep.control_l2_norm = control.l2_norm;
  const InputSignal h = input_from(control);

  auto galerkin = std::async(std::launch::async, [&] { return simulate_galerkin(c, eigs, coeffs, h, horizon, opt.galerkin); });
  auto baseline = std::async(std::launch::async, [&] { return simulate_fd(c, variant, y0, {}, horizon, opt.fd); });
  const SimulationResult fd = simulate_fd(c, variant, y0, h, horizon, opt.fd, controlled);
  const SimulationResult gal = galerkin.get();
  const SimulationResult base = baseline.get();

  const std::vector<double>& aT = gal.trajectory.back().modal;
  rep.modal_terminal_energy = sum_squares(aT, 0, static_cast<std::size_t>(n_modes));
  rep.modal_terminal_energy_fd = sum_squares(fd.trajectory.back().modal);
  double spill = 0.0;
  for (std::size_t k = static_cast<std::size_t>(n_modes); k < aT.size(); ++k) {
    const double free = coeffs[k] * std::exp(-eigs[k].lambda * horizon);
    spill += (aT[k] - free) * (aT[k] - free);
  }
  rep.galerkin_tail_energy = sum_squares(aT, static_cast<std::size_t>(n_modes));
  rep.initial_tail_energy = std::max(0.0, rep.initial_energy - sum_squares(coeffs, 0, static_cast<std::size_t>(n_modes)));
  const double damp = std::exp(-2.0 * eigs[static_cast<std::size_t>(n_modes)].lambda * horizon);
  rep.tail_bound = 2.0 * (rep.initial_tail_energy * damp + spill);
  rep.fd_terminal_energy = fd.terminal.energy_H;
  rep.baseline_terminal_energy = base.terminal.energy_H;
  rep.baseline_ratio = rep.fd_terminal_energy > 0.0 ? rep.baseline_terminal_energy / rep.fd_terminal_energy
                                                    : std::numeric_limits<double>::infinity();
  rep.modal_pass = rep.modal_terminal_energy <= 1e-10 * rep.initial_energy;
  rep.fd_pass = rep.fd_terminal_energy <= 10.0 * rep.tail_bound;
  return rep;
}

void write_trajectory_csv(const SimulationResult& r, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write trajectory");
  const std::size_t N = r.trajectory.empty() ? 0 : r.trajectory.front().modal.size();
  os << "t,energy_H,z";
  for (std::size_t n = 0; n < N; ++n) os << ",a_" << n + 1;
  os << '\n' << std::setprecision(17);
  for (const auto& p : r.trajectory) {
    os << p.t << ',' << p.energy_H << ',' << p.z;
    for (double a : p.modal) os << ',' << a;
    os << '\n';
  }
}

}  // namespace hybridheat
