#include "hybridheat/spectrum.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "hybridheat/quadrature.hpp"

namespace hybridheat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double grid_spacing(const std::vector<double>& g) { return (g.back() - g.front()) / static_cast<double>(g.size() - 1); }

// Amplitude of a trace near x = 0, combining value and scaled flux so that it
// does not vanish at a zero of either.
double amplitude(double y, double flux, double lambda, double rs0) {
  const double k = std::sqrt(std::max(std::abs(lambda), 1.0)) * std::sqrt(rs0);
  return std::hypot(y, flux / k);
}

double weighted_square_integral(const CoefficientFunction& rho, const ShootingTrace& tr) {
  std::vector<double> f(tr.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rho(tr.grid[i]) * tr.y[i] * tr.y[i];
  return simpson(f, grid_spacing(tr.grid));
}

template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, const Tolerances& tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  auto stop = [&](double lo, double hi) { return std::abs(hi - lo) <= tol.root_rel * std::max({std::abs(lo), std::abs(hi), 1e-300}); };
  boost::uintmax_t iters = 300;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> rod_eigenvalues(const CoefficientSet& c, Side side, BcVariant variant, int n,
                                    const Tolerances& tol) {
  const ShootingOptions full = ShootingOptions::from(tol, std::max(kTraceGridPoints, 64 * n + 1));
  const ShootingOptions ends = ShootingOptions::endpoint_only(tol);
  auto count = [&](double lam) { return count_interior_zeros(shoot(c, lam, side, variant, full)); };
  auto y0 = [&](double lam) { return shoot(c, lam, side, variant, ends).y_at_zero; };

  double lo = 0.0;
  int c_lo = count(lo);
  for (double step = 1.0; c_lo > 0; step *= 4.0) {
    lo = -step;
    c_lo = count(lo);
    if (step > 1e12) throw NumericalError("auxiliary spectrum: no lower bound found");
  }
  const double gamma = side == Side::Left ? travel_times(c).gamma1 : travel_times(c).gamma2;
  double hi = std::pow((n + 1) * std::numbers::pi / gamma, 2) + 10.0;
  int c_hi = count(hi);
  while (c_hi < n) {
    lo = hi;
    c_lo = c_hi;
    hi *= 2.0;
    c_hi = count(hi);
    if (hi > 1e14) throw NumericalError("auxiliary spectrum: upper bound search diverged");
  }
  if (c_lo > 0) {
    lo = 0.0;
    c_lo = count(0.0);
  }

  struct Bracket {
    double a, b;
    int ca, cb;
  };
  std::vector<Bracket> stack{{lo, hi, c_lo, c_hi}};
  std::vector<double> roots;
  while (!stack.empty()) {
    const Bracket br = stack.back();
    stack.pop_back();
    if (br.cb == br.ca || br.ca >= n) continue;
    if (br.cb - br.ca == 1) {
      const double fa = y0(br.a);
      const double fb = y0(br.b);
      if (fa * fb > 0.0) {
        std::ostringstream os;
        os << "auxiliary spectrum: oscillation count and interface sign disagree on [" << br.a << ", " << br.b << "]";
        throw NumericalError(os.str());
      }
      roots.push_back(refine_root(y0, br.a, br.b, fa, fb, tol));
      continue;
    }
    const double m = 0.5 * (br.a + br.b);
    if (m <= br.a || m >= br.b) throw NumericalError("auxiliary spectrum: cannot separate clustered eigenvalues");
    const int cm = count(m);
    stack.push_back({m, br.b, cm, br.cb});
    stack.push_back({br.a, m, br.ca, cm});
  }
  std::sort(roots.begin(), roots.end());
  if (static_cast<int>(roots.size()) < n) throw NumericalError("auxiliary spectrum: missing eigenvalues");
  roots.resize(static_cast<std::size_t>(n));
  return roots;
}

bool close(double a, double b, const Tolerances& tol) {
  return std::abs(a - b) <= tol.coincidence * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// G = u_flux v - v_flux u - M lambda u v; entire in lambda, equal to
// u(0) v(0) (F - M lambda).
struct Secular {
  const CoefficientSet& c;
  BcVariant variant;
  const Tolerances& tol;

  InterfaceValues at(double lam) const { return interface_values(c, lam, variant, tol); }
  double G(const InterfaceValues& iv) const {
    return iv.u_flux0 * iv.v0 - iv.v_flux0 * iv.u0 - c.mass * iv.lambda * iv.u0 * iv.v0;
  }
  double G(double lam) const { return G(at(lam)); }
  // Sign of F - M lambda, or 0 when undefined.
  int sign_H(double lam) const {
    const InterfaceValues iv = at(lam);
    const double uv = iv.u0 * iv.v0;
    const double g = G(iv);
    if (uv == 0.0 || g == 0.0) return 0;
    return (g > 0) == (uv > 0) ? 1 : -1;
  }
};

double solve_gap(const Secular& s, double a, double b, const Tolerances& tol) {
  std::optional<double> lo, hi;
  if (!std::isfinite(a)) {
    double x = std::min(0.0, b - 1.0);
    for (double step = 1.0; s.sign_H(x) <= 0; step *= 4.0) {
      x = std::min(0.0, b - 1.0) - step;
      if (step > 1e12) throw NumericalError("eigenvalue search: no lower bracket below the first pole");
    }
    lo = x;
    a = x;
  }
  const double w = b - a;
  for (double rel = 1e-3; rel > 1e-17 && !(lo && hi); rel *= 1e-3) {
    const double d = std::max(rel * w, 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)));
    for (double p : {a + d, b - d}) {
      if (p <= a || p >= b) continue;
      const int sg = s.sign_H(p);
      if (sg > 0 && (!lo || p > *lo)) lo = p;
      if (sg < 0 && (!hi || p < *hi)) hi = p;
    }
  }
  if (!lo || !hi || *lo >= *hi) {
    std::ostringstream os;
    os << "eigenvalue search: monotonicity violated in (" << a << ", " << b << ")";
    throw NumericalError(os.str());
  }
  auto g = [&](double lam) { return s.G(lam); };
  return refine_root(g, *lo, *hi, g(*lo), g(*hi), tol);
}

bool gap_coincident(const AuxiliarySpectra& aux, std::size_t m, const Tolerances& tol) {
  return m + 1 < aux.merged.size() && aux.coincident[m] && aux.coincident[m + 1] &&
         close(aux.merged[m], aux.merged[m + 1], tol);
}

}  // namespace

int count_interior_zeros(const ShootingTrace& trace) {
  int n = 0;
  int last = 0;
  for (double y : trace.y) {
    const int sg = (y > 0.0) - (y < 0.0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++n;
    last = sg;
  }
  return n;
}

InterfaceValues interface_values(const CoefficientSet& c, double lambda, BcVariant variant,
                                 const Tolerances& tol) {
  const ShootingOptions ends = ShootingOptions::endpoint_only(tol);
  const ShootingTrace l = shoot_left(c, lambda, ends);
  const ShootingTrace r = shoot_right(c, lambda, variant, ends);
  return {lambda,
          l.y_at_zero, l.flux_at_zero, l.dy_dlambda_at_zero, l.dflux_dlambda_at_zero,
          r.y_at_zero, r.flux_at_zero, r.dy_dlambda_at_zero, r.dflux_dlambda_at_zero};
}

double characteristic_F(const CoefficientSet& c, double lambda, BcVariant variant, const Tolerances& tol) {
  const InterfaceValues iv = interface_values(c, lambda, variant, tol);
  const double au = amplitude(iv.u0, iv.u_flux0, lambda, c.rho1(0.0) * c.sigma1(0.0));
  const double av = amplitude(iv.v0, iv.v_flux0, lambda, c.rho2(0.0) * c.sigma2(0.0));
  if (std::abs(iv.u0) <= tol.pole * au || std::abs(iv.v0) <= tol.pole * av) {
    std::ostringstream os;
    os << "characteristic function: lambda=" << std::setprecision(17) << lambda
       << " is within pole tolerance of the auxiliary spectrum (u(0)=" << iv.u0 << ", v(0)=" << iv.v0 << ")";
    throw PoleProximityError(os.str(), lambda);
  }
  return iv.u_flux0 / iv.u0 - iv.v_flux0 / iv.v0;
}

double characteristic_F_derivative(const CoefficientSet& c, double lambda, BcVariant variant,
                                   const Tolerances& tol) {
  const ShootingOptions full = ShootingOptions::from(tol);
  const ShootingTrace l = shoot_left(c, lambda, full);
  const ShootingTrace r = shoot_right(c, lambda, variant, full);
  const double u0 = l.y_at_zero;
  const double v0 = r.y_at_zero;
  if (u0 == 0.0 || v0 == 0.0) throw PoleProximityError("characteristic derivative: lambda is a pole", lambda);
  const double iu = weighted_square_integral(c.rho1, l);
  const double iv = weighted_square_integral(c.rho2, r);
  return -(iu / (u0 * u0) + iv / (v0 * v0));
}

AuxiliarySpectra auxiliary_spectra(const CoefficientSet& c, BcVariant variant, int n_max, const Tolerances& tol) {
  if (n_max < 1) throw ValidationError("auxiliary_spectra: n_max must be positive");
  AuxiliarySpectra aux;
  auto left = std::async(std::launch::async, [&] { return rod_eigenvalues(c, Side::Left, variant, n_max, tol); });
  aux.right = rod_eigenvalues(c, Side::Right, variant, n_max, tol);
  aux.left = left.get();

  struct Entry {
    double value;
    int source;
    std::size_t pos;
  };
  std::vector<Entry> all;
  for (std::size_t i = 0; i < aux.left.size(); ++i) all.push_back({aux.left[i], 0, i});
  for (std::size_t i = 0; i < aux.right.size(); ++i) all.push_back({aux.right[i], 1, i});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
  all.resize(static_cast<std::size_t>(n_max));
  aux.merged.resize(all.size());
  aux.coincident.assign(all.size(), false);
  for (std::size_t i = 0; i < all.size(); ++i) {
    aux.merged[i] = all[i].value;
    const auto& other = all[i].source == 0 ? aux.right : aux.left;
    for (double o : other) {
      if (close(o, all[i].value, tol)) aux.coincident[i] = true;
    }
    if (aux.coincident[i]) aux.coincident_indices.push_back(static_cast<int>(i));
  }
  return aux;
}

std::vector<double> eigenvalues_from(const CoefficientSet& c, BcVariant variant, int n_max,
                                     const AuxiliarySpectra& aux, const Tolerances& tol) {
  if (static_cast<int>(aux.merged.size()) < n_max) {
    throw ValidationError("eigenvalues: auxiliary spectra too short for the requested index");
  }
  const Secular s{c, variant, tol};
  std::vector<double> lam(static_cast<std::size_t>(n_max));
  std::vector<std::future<double>> jobs(lam.size());
  for (std::size_t n = 0; n < lam.size(); ++n) {
    if (n == 0) {
      jobs[n] = std::async(std::launch::async, [&, n] { return solve_gap(s, -kInf, aux.merged[0], tol); });
      continue;
    }
    const std::size_t m = n - 1;
    if (gap_coincident(aux, m, tol)) {
      lam[n] = 0.5 * (aux.merged[m] + aux.merged[m + 1]);
      continue;
    }
    double a = aux.merged[m];
    if (m > 0 && gap_coincident(aux, m - 1, tol)) a = std::max(a, aux.merged[m - 1]);
    jobs[n] = std::async(std::launch::async, [&, n, a, m] { return solve_gap(s, a, aux.merged[m + 1], tol); });
  }
  for (std::size_t n = 0; n < lam.size(); ++n) {
    if (jobs[n].valid()) lam[n] = jobs[n].get();
  }
  return lam;
}

namespace {

AuxiliarySpectra aux_for(const CoefficientSet& c, BcVariant variant, int n_max, const Tolerances& tol) {
  return auxiliary_spectra(c, variant, n_max + 1, tol);
}

}  // namespace

std::vector<double> eigenvalues_main(const CoefficientSet& c, BcVariant variant, int n_max, const Tolerances& tol) {
  return eigenvalues_from(c, variant, n_max, aux_for(c, variant, n_max, tol), tol);
}

std::vector<double> eigenvalues_regular(const CoefficientSet& c, BcVariant variant, int n_max,
                                        const Tolerances& tol) {
  const CoefficientSet r = c.with_mass(0.0);
  return eigenvalues_from(r, variant, n_max, aux_for(r, variant, n_max, tol), tol);
}

Eigenpair assemble_eigenfunction(const CoefficientSet& c, double lambda, BcVariant variant,
                                 const AssembleOptions& opt, const Tolerances& tol) {
  const ShootingOptions full = ShootingOptions::from(tol);
  const ShootingTrace l = shoot_left(c, lambda, full);
  const ShootingTrace r = shoot_right(c, lambda, variant, full);
  const double u0 = l.y_at_zero, fu0 = l.flux_at_zero;
  const double v0 = r.y_at_zero, fv0 = r.flux_at_zero;
  const double M = c.mass;

  double cu = 0.0, cv = 0.0;
  if (opt.coincident || opt.near_coincident) {
    // Satisfies the flux condition exactly; continuity holds at the eigenvalue.
    cu = fv0;
    cv = fu0 - lambda * M * u0;
  } else {
    const double k = lambda > 0.0 ? std::sqrt(lambda) : 1.0;
    cu = k * v0;
    cv = k * u0;
  }
  const double z_raw = opt.coincident ? 0.0 : 0.5 * (cu * u0 + cv * v0);
  const double iu = weighted_square_integral(c.rho1, l);
  const double iv = weighted_square_integral(c.rho2, r);
  const double raw2 = cu * cu * iu + cv * cv * iv + M * z_raw * z_raw;
  if (!(raw2 > 0.0) || !std::isfinite(raw2)) {
    throw NumericalError("eigenfunction assembly: degenerate two-piece form at lambda=" + std::to_string(lambda));
  }
  const double raw_norm = std::sqrt(raw2);
  const double sign = cu >= 0.0 ? 1.0 : -1.0;

  Eigenpair e;
  e.index = opt.index;
  e.lambda = lambda;
  e.variant = variant;
  e.in_coincidence_set = opt.coincident;
  e.raw_norm_H = raw_norm;
  e.raw_scale = sign * raw_norm;
  const double su = sign * cu / raw_norm;
  const double sv = sign * cv / raw_norm;
  e.x_left = l.grid;
  e.x_right = r.grid;
  e.u_part.resize(l.y.size());
  e.u_flux.resize(l.y.size());
  for (std::size_t i = 0; i < l.y.size(); ++i) {
    e.u_part[i] = su * l.y[i];
    e.u_flux[i] = su * l.flux[i];
  }
  e.v_part.resize(r.y.size());
  e.v_flux.resize(r.y.size());
  for (std::size_t i = 0; i < r.y.size(); ++i) {
    e.v_part[i] = sv * r.y[i];
    e.v_flux[i] = sv * r.flux[i];
  }
  e.z = sign * z_raw / raw_norm;
  e.norm_H = std::sqrt(su * su * iu + sv * sv * iv + M * e.z * e.z);
  e.trace_right = variant == BcVariant::DirichletControl ? e.v_flux.back() / c.sigma2(1.0) : e.v_part.back();

  double sup = 0.0;
  for (double y : e.u_part) sup = std::max(sup, std::abs(y));
  for (double y : e.v_part) sup = std::max(sup, std::abs(y));
  e.continuity_residual = std::abs(e.u_part.back() - e.v_part.front()) / sup;
  const double jump = e.u_flux.back() - e.v_flux.front() - lambda * M * e.z;
  const double fscale = std::abs(e.u_flux.back()) + std::abs(e.v_flux.front()) + std::abs(lambda * M * e.z);
  e.flux_jump_residual = fscale > 0.0 ? std::abs(jump) / fscale : 0.0;

  double tscale = 0.0;
  for (double f : e.v_flux) tscale = std::max(tscale, std::abs(f) / c.sigma2(1.0));
  if (variant == BcVariant::NeumannControl) tscale = sup;
  if (std::abs(e.trace_right) <= 1e-10 * tscale) {
    std::ostringstream os;
    os << "eigenfunction " << opt.index << " has a vanishing control trace at x=1 (" << e.trace_right
       << "); the system is not controllable through this mode";
    throw CertificationError(os.str());
  }
  return e;
}

double inner_product_H(const CoefficientSet& c, const Eigenpair& a, const Eigenpair& b) {
  std::vector<double> fl(a.x_left.size()), fr(a.x_right.size());
  for (std::size_t i = 0; i < fl.size(); ++i) fl[i] = c.rho1(a.x_left[i]) * a.u_part[i] * b.u_part[i];
  for (std::size_t i = 0; i < fr.size(); ++i) fr[i] = c.rho2(a.x_right[i]) * a.v_part[i] * b.v_part[i];
  return simpson(fl, grid_spacing(a.x_left)) + simpson(fr, grid_spacing(a.x_right)) + c.mass * a.z * b.z;
}

std::vector<double> gram_matrix_H(const CoefficientSet& c, const std::vector<Eigenpair>& e) {
  const std::size_t n = e.size();
  std::vector<double> g(n * n);
  if (n == 0) return g;
  const auto& xl = e[0].x_left;
  const auto& xr = e[0].x_right;
  std::vector<double> rl(xl.size()), rr(xr.size());
  for (std::size_t i = 0; i < xl.size(); ++i) rl[i] = c.rho1(xl[i]);
  for (std::size_t i = 0; i < xr.size(); ++i) rr[i] = c.rho2(xr[i]);
  std::vector<double> fl(xl.size()), fr(xr.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t k = 0; k < fl.size(); ++k) fl[k] = rl[k] * e[i].u_part[k] * e[j].u_part[k];
      for (std::size_t k = 0; k < fr.size(); ++k) fr[k] = rr[k] * e[i].v_part[k] * e[j].v_part[k];
      const double v = simpson(fl, grid_spacing(xl)) + simpson(fr, grid_spacing(xr)) + c.mass * e[i].z * e[j].z;
      g[i * n + j] = g[j * n + i] = v;
    }
  }
  return g;
}

std::pair<std::vector<double>, std::vector<double>> asymptotic_eigenfunction(const CoefficientSet& c,
                                                                             const Eigenpair& e) {
  const double k = std::sqrt(e.lambda);
  const auto tau1 = travel_time_profile(c, Side::Left, e.x_left);
  const auto tau2 = travel_time_profile(c, Side::Right, e.x_right);
  const double g1 = tau1.back();
  const double g2 = tau2.front();
  const double a = std::pow(c.sigma1(-1.0), 0.75) * std::pow(c.rho1(-1.0), -0.25) / k;
  const double rs1_0 = c.rho1(0.0) * c.sigma1(0.0);
  const double rs2_0 = c.rho2(0.0) * c.sigma2(0.0);
  const bool dir = e.variant == BcVariant::DirichletControl;
  const double b = dir ? std::pow(c.sigma2(1.0), 0.75) * std::pow(c.rho2(1.0), -0.25) / k
                       : std::pow(c.rho2(1.0) * c.sigma2(1.0), 0.25);
  auto right_shape = [&](double phase) { return dir ? std::sin(phase) : std::cos(phase); };

  const double v0 = b * std::pow(rs2_0, -0.25) * right_shape(k * g2);
  const double u0 = a * std::pow(rs1_0, -0.25) * std::sin(k * g1);
  std::vector<double> u(e.x_left.size()), v(e.x_right.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = e.x_left[i];
    u[i] = k * v0 * a * std::pow(c.rho1(x) * c.sigma1(x), -0.25) * std::sin(k * tau1[i]);
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = e.x_right[i];
    v[i] = k * u0 * b * std::pow(c.rho2(x) * c.sigma2(x), -0.25) * right_shape(k * tau2[i]);
  }
  return {u, v};
}

bool SpectralReport::all_interpolation_ok() const {
  return std::all_of(interpolation_ok.begin(), interpolation_ok.end(), [](bool b) { return b; });
}

namespace {

std::vector<Eigenpair> assemble_all(const CoefficientSet& c, BcVariant variant, const std::vector<double>& lam,
                                    const AuxiliarySpectra& aux, const Tolerances& tol) {
  std::vector<std::future<Eigenpair>> jobs;
  for (std::size_t n = 0; n < lam.size(); ++n) {
    AssembleOptions o;
    o.index = static_cast<int>(n + 1);
    if (n > 0) {
      const std::size_t m = n - 1;
      o.coincident = gap_coincident(aux, m, tol);
      o.near_coincident = !o.coincident && m + 1 < aux.merged.size() &&
                          std::abs(aux.merged[m + 1] - aux.merged[m]) < kNearCoincidence;
    }
    jobs.push_back(std::async(std::launch::async, [&c, variant, l = lam[n], o, &tol] {
      return assemble_eigenfunction(c, l, variant, o, tol);
    }));
  }
  std::vector<Eigenpair> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace

std::vector<Eigenpair> eigenpairs(const CoefficientSet& c, BcVariant variant, int n, const Tolerances& tol) {
  const AuxiliarySpectra aux = aux_for(c, variant, n, tol);
  return assemble_all(c, variant, eigenvalues_from(c, variant, n, aux, tol), aux, tol);
}

SpectralReport spectral_report(const CoefficientSet& c, BcVariant variant, int n_max, const Tolerances& tol,
                               bool with_eigenpairs) {
  SpectralReport r;
  r.variant = variant;
  r.travel = travel_times(c);
  r.auxiliary = aux_for(c, variant, n_max, tol);
  r.eigenvalues = eigenvalues_from(c, variant, n_max, r.auxiliary, tol);
  r.regular_eigenvalues = eigenvalues_from(c.with_mass(0.0), variant, n_max, r.auxiliary, tol);

  const auto& mu = r.auxiliary.merged;
  const auto& lam = r.eigenvalues;
  const auto& reg = r.regular_eigenvalues;
  const std::size_t n = lam.size();
  r.coincidence.assign(n, false);
  r.interpolation_ok.assign(n, false);
  r.asymptote_ratios.resize(n);
  const double big_gamma = r.travel.total();
  for (std::size_t i = 0; i < n; ++i) {
    const double idx = static_cast<double>(i + 1);
    if (i == 0) {
      r.interpolation_ok[i] = lam[0] < reg[0] && reg[0] < mu[0];
    } else {
      const std::size_t m = i - 1;
      if (gap_coincident(r.auxiliary, m, tol)) {
        r.coincidence[i] = true;
        r.interpolation_ok[i] = close(lam[i], mu[m], tol) && close(reg[i], mu[m], tol);
      } else {
        r.interpolation_ok[i] = mu[m] < lam[i] && lam[i] < reg[i] && reg[i] < mu[m + 1];
      }
    }
    const double denom = variant == BcVariant::DirichletControl
                             ? std::pow(idx * std::numbers::pi / big_gamma, 2)
                             : std::pow((2.0 * idx + 1.0) * std::numbers::pi / (2.0 * big_gamma), 2);
    r.asymptote_ratios[i] = lam[i] / denom;
  }
  r.min_gap = kInf;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    r.gaps.push_back(lam[i + 1] - lam[i]);
    r.min_gap = std::min(r.min_gap, r.gaps.back());
  }
  if (with_eigenpairs) r.eigenpairs = assemble_all(c, variant, lam, r.auxiliary, tol);
  return r;
}

void write_spectrum_csv(const SpectralReport& r, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write spectrum");
  os << "n,lambda,regular_lambda,mu,gap,coincidence,interpolation_ok,asymptote_ratio\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    os << i + 1 << ',' << r.eigenvalues[i] << ',' << r.regular_eigenvalues[i] << ',';
    if (i < r.auxiliary.merged.size()) os << r.auxiliary.merged[i];
    os << ',';
    if (i < r.gaps.size()) os << r.gaps[i];
    os << ',' << (r.coincidence[i] ? 1 : 0) << ',' << (r.interpolation_ok[i] ? 1 : 0) << ','
       << r.asymptote_ratios[i] << '\n';
  }
}

void write_eigenfunction_csv(const Eigenpair& e, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write eigenfunction");
  os << "x,value,piece\n" << std::setprecision(17);
  for (std::size_t i = 0; i < e.x_left.size(); ++i) os << e.x_left[i] << ',' << e.u_part[i] << ",u\n";
  for (std::size_t i = 0; i < e.x_right.size(); ++i) os << e.x_right[i] << ',' << e.v_part[i] << ",v\n";
  os << 0.0 << ',' << e.z << ",z\n";
}

}  // namespace hybridheat
