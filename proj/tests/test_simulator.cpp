#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "hybridheat/config.hpp"
#include "hybridheat/errors.hpp"
#include "hybridheat/moments.hpp"
#include "hybridheat/simulator.hpp"
#include "oracles.hpp"

using namespace hybridheat;
using std::numbers::pi;

namespace {

const std::vector<Eigenpair>& uniform_eigs(BcVariant v) {
  static const auto d = eigenpairs(CoefficientSet{}, BcVariant::DirichletControl, 40);
  static const auto n = eigenpairs(CoefficientSet{}, BcVariant::NeumannControl, 40);
  return v == BcVariant::DirichletControl ? d : n;
}

std::vector<Eigenpair> take(const std::vector<Eigenpair>& e, std::size_t n) { return {e.begin(), e.begin() + n}; }

std::vector<double> unit(std::size_t n, std::size_t k) {
  std::vector<double> e(n, 0.0);
  e[k] = 1.0;
  return e;
}

bool non_increasing(const SimulationResult& r) {
  for (std::size_t i = 1; i < r.trajectory.size(); ++i)
    if (r.trajectory[i].energy_H > r.trajectory[i - 1].energy_H) return false;
  return true;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("free decay of the first mode") {
  const auto eigs = take(uniform_eigs(BcVariant::DirichletControl), 8);
  const auto r = simulate_galerkin(CoefficientSet{}, eigs, unit(8, 0), {}, 1.0, {1000, 10});
  const auto& end = r.trajectory.back();
  CHECK(end.t == doctest::Approx(1.0));
  CHECK(std::abs(end.modal[0] - std::exp(-eigs[0].lambda)) < 1e-10);
  for (std::size_t n = 1; n < 8; ++n) CHECK(std::abs(end.modal[n]) < 1e-10);
  CHECK(end.energy_H == doctest::Approx(std::exp(-2 * eigs[0].lambda)).epsilon(1e-8));
  CHECK(non_increasing(r));
}

TEST_CASE("zero data stays zero") {
  const auto eigs = take(uniform_eigs(BcVariant::NeumannControl), 6);
  const auto r = simulate_galerkin(CoefficientSet{}, eigs, std::vector<double>(6, 0.0), {}, 1.0, {1000, 100});
  for (const auto& p : r.trajectory) {
    CHECK(p.energy_H == 0.0);
    for (double a : p.modal) CHECK(a == 0.0);
  }
  const auto f = simulate_fd(CoefficientSet{}, BcVariant::NeumannControl, zero_state(), {}, 1.0, {64, 512, 64});
  for (const auto& p : f.trajectory) CHECK(p.energy_H == 0.0);
}

TEST_CASE("galerkin input validation") {
  const auto eigs = take(uniform_eigs(BcVariant::DirichletControl), 2);
  CHECK_THROWS_AS(simulate_galerkin(CoefficientSet{}, eigs, {1.0, 0.0}, {}, 1.0, {500, 1}), ValidationError);
  CHECK_THROWS_AS(simulate_fd(CoefficientSet{}, BcVariant::DirichletControl, zero_state(), {}, 1.0, {32, 512, 1}),
                  ValidationError);
}

TEST_CASE("synthesised control cancels the controlled modes") {
  for (auto v : {BcVariant::DirichletControl, BcVariant::NeumannControl}) {
    const auto& all = uniform_eigs(v);
    const auto problem = build_moment_problem(CoefficientSet{}, v, all, unit(8, 0), 1.0, 3);
    const auto control = synthesize_control(problem, build_biorthogonal(problem.exponents, 1.0));
    const auto eigs = take(all, 8);
    const auto r = simulate_galerkin(CoefficientSet{}, eigs, unit(8, 0), input_from(control), 1.0, {4000, 4000});
    for (std::size_t n = 0; n < 8; ++n) {
      CAPTURE(n);
      CHECK(std::abs(r.trajectory.back().modal[n]) <= 1e-6);
      // variation of constants evaluated independently
      const double b = input_coefficient(CoefficientSet{}, eigs[n]);
      const double lam = eigs[n].lambda;
      const double forced = oracle::simpson([&](double t) { return control.h_at(t) * std::exp(-lam * (1 - t)); }, 0, 1, 20000);
      const double a = (n == 0 ? std::exp(-lam) : 0.0) + b * forced;
      CHECK(std::abs(a) <= 1e-6);
      CHECK(std::abs(a - r.trajectory.back().modal[n]) <= 1e-8);
    }
  }
}

TEST_CASE("finite differences reproduce free decay") {
  const auto& eigs = uniform_eigs(BcVariant::DirichletControl);
  const auto y0 = state_from_eigenpair(eigs[0]);
  const auto r = simulate_fd(CoefficientSet{}, BcVariant::DirichletControl, y0, {}, 1.0, {128, 2048, 64});
  const double expected = std::exp(-2 * eigs[0].lambda);
  CHECK(r.terminal.energy_H == doctest::Approx(expected).epsilon(0.01));
  CHECK(non_increasing(r));
}

TEST_CASE("energy never grows without input") {
  const auto c = load_config(std::filesystem::path(HYBRIDHEAT_CONFIG_DIR) / "variable.yaml").config.coefficients;
  for (auto v : {BcVariant::DirichletControl, BcVariant::NeumannControl}) {
    const auto eigs = eigenpairs(c, v, 12);
    const auto spec = parse_initial_spec(v == BcVariant::NeumannControl ? "expr:(x+1)*(1+sin(3*x));1+2*x-x^2;1"
                                                                         : "expr:(x+1)*(1+sin(3*x));(1-x)*(1+2*x);1");
    const auto s0 = build_initial_state(c, spec, eigs);
    const auto g = simulate_galerkin(c, eigs, project_initial_data(c, s0, eigs), {}, 0.5, {1000, 1});
    CHECK(non_increasing(g));
    const auto f = simulate_fd(c, v, s0, {}, 0.5, {64, 512, 1});
    CHECK(non_increasing(f));
    CHECK(f.trajectory.size() == 513);
  }
}

TEST_CASE("galerkin and finite differences agree for smooth data and input") {
  for (auto v : {BcVariant::DirichletControl, BcVariant::NeumannControl}) {
    CAPTURE(v);
    const auto eigs = take(uniform_eigs(v), 16);
    const auto y0 = state_from_eigenpair(eigs[1]);
    const InputSignal h = [](double t) { return std::sin(pi * t); };
    const auto g = simulate_galerkin(CoefficientSet{}, eigs, unit(16, 1), h, 1.0, {4000, 4000});
    const auto f = simulate_fd(CoefficientSet{}, v, y0, h, 1.0, {256, 4096, 4096});
    const double eg = g.terminal.energy_H, ef = f.terminal.energy_H;
    MESSAGE("galerkin " << eg << " fd " << ef);
    CHECK(std::abs(eg - ef) <= 1e-3 * ef);
  }
}

TEST_CASE("constant boundary temperature relaxes to the steady profile") {
  const double c0 = 0.7;
  const InputSignal h = [c0](double t) { return c0 * (1 - std::exp(-10 * t)); };
  const auto r = simulate_fd(CoefficientSet{}, BcVariant::DirichletControl, zero_state(), h, 20.0, {128, 8192, 8192});
  // steady state: sigma y' constant, y(-1) = 0, y(1) = c0
  double dev = 0.0;
  const auto& s = r.terminal;
  for (std::size_t i = 0; i < s.x_left.size(); ++i) dev = std::max(dev, std::abs(s.u[i] - c0 * (s.x_left[i] + 1) / 2));
  for (std::size_t i = 0; i < s.x_right.size(); ++i) dev = std::max(dev, std::abs(s.v[i] - c0 * (s.x_right[i] + 1) / 2));
  CHECK(dev <= 1e-6);
  CHECK(s.z == doctest::Approx(c0 / 2).epsilon(1e-6));
}

TEST_CASE("interface residual shrinks quadratically") {
  const auto& eigs = uniform_eigs(BcVariant::DirichletControl);
  const auto y0 = state_from_eigenpair(eigs[0]);
  const InputSignal h = [](double t) { return 0.5 * std::sin(pi * t); };
  const auto a = simulate_fd(CoefficientSet{}, BcVariant::DirichletControl, y0, h, 0.5, {64, 2048, 64});
  const auto b = simulate_fd(CoefficientSet{}, BcVariant::DirichletControl, y0, h, 0.5, {128, 2048, 64});
  const auto c = simulate_fd(CoefficientSet{}, BcVariant::DirichletControl, y0, h, 0.5, {256, 2048, 64});
  MESSAGE("interface residuals " << a.interface_residual << " " << b.interface_residual << " " << c.interface_residual);
  CHECK(std::log2(a.interface_residual / b.interface_residual) >= 1.8);
  CHECK(std::log2(b.interface_residual / c.interface_residual) >= 1.8);
}

TEST_CASE("finite differences converge at second order") {
  const auto v = BcVariant::NeumannControl;
  const auto eigs = take(uniform_eigs(v), 24);
  std::vector<double> y0m(24, 0.0);
  y0m[0] = 0.6;
  y0m[2] = -0.8;
  StateSnapshot y0 = zero_state();
  for (std::size_t i = 0; i < y0.u.size(); ++i) y0.u[i] = 0.6 * eigs[0].u_part[i] - 0.8 * eigs[2].u_part[i];
  for (std::size_t i = 0; i < y0.v.size(); ++i) y0.v[i] = 0.6 * eigs[0].v_part[i] - 0.8 * eigs[2].v_part[i];
  y0.z = 0.6 * eigs[0].z - 0.8 * eigs[2].z;
  const InputSignal h = [](double t) { return t * t * (1 - t) * (1 - t); };
  const auto ref = simulate_galerkin(CoefficientSet{}, eigs, y0m, h, 1.0, {4000, 4000});
  std::vector<double> err;
  for (int nx : {64, 128, 256}) {
    const auto f = simulate_fd(CoefficientSet{}, v, y0, h, 1.0, {nx, 16 * nx, 16 * nx});
    err.push_back(std::abs(f.terminal.energy_H - ref.terminal.energy_H));
  }
  MESSAGE("fd errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
  CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("duality identity") {
  const auto v = BcVariant::DirichletControl;
  const auto& eigs = uniform_eigs(v);
  const auto spec = parse_initial_spec("expr:0.3*sin(pi*(x+1)/2)+0.2*x*(x+1);0.3*(1-x^2)+0.5*x*(1-x)^2;0.3");
  const CoefficientSet c;
  const auto small = take(eigs, 6);
  const auto y0 = build_initial_state(c, spec, small);
  const auto p0 = project_initial_data(c, y0, small);
  const InputSignal h = [](double t) { return t * t * std::exp(-t) * 0.8; };
  std::vector<std::vector<double>> lhs;
  for (int nx : {256, 512}) {
    const auto f = simulate_fd(c, v, y0, h, 1.0, {nx, 4 * 4096, 4 * 4096}, small);
    const auto pT = f.trajectory.back().modal;
    std::vector<double> row;
    for (std::size_t n = 0; n < small.size(); ++n) row.push_back(pT[n] - std::exp(-small[n].lambda) * p0[n]);
    lhs.push_back(row);
  }
  for (std::size_t n = 0; n < small.size(); ++n) {
    const double lam = small[n].lambda;
    const double rhs = input_coefficient(c, small[n]) *
                       oracle::simpson([&](double t) { return h(t) * std::exp(-lam * (1 - t)); }, 0, 1, 20000);
    const double extrapolated = (4 * lhs[1][n] - lhs[0][n]) / 3;
    MESSAGE("mode " << n + 1 << ": " << lhs[1][n] << " extrapolated " << extrapolated << " boundary term " << rhs);
    CHECK(std::abs(extrapolated - rhs) <= 1e-6 * std::abs(rhs));
  }
}

TEST_CASE("verification of the first mode") {
  const auto r = verify_null_control(CoefficientSet{}, BcVariant::DirichletControl, parse_initial_spec("mode:1"), 1.0, 8);
  CHECK(r.pass());
  CHECK(r.modal_terminal_energy <= 1e-10 * r.initial_energy);
  CHECK(r.fd_terminal_energy <= 10 * r.tail_bound);
  CHECK(r.baseline_ratio >= 1e4);
}

TEST_CASE("verification of a three-mode mixture") {
  const CoefficientSet c;
  const auto r = verify_null_control(c, BcVariant::DirichletControl, parse_initial_spec("modes:1,2,3"), 1.0, 8);
  CHECK(r.pass());
  const auto ev = eigenvalues_main(c, BcVariant::DirichletControl, 3);
  const double expected = (std::exp(-2 * ev[0]) + std::exp(-2 * ev[1]) + std::exp(-2 * ev[2])) / 3;
  CHECK(r.baseline_terminal_energy == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("verification with boundary flux control") {
  const auto r = verify_null_control(CoefficientSet{}, BcVariant::NeumannControl, parse_initial_spec("mode:1"), 1.0, 8);
  CHECK(r.pass());
  CHECK(r.modal_terminal_energy <= 1e-10 * r.initial_energy);
}

}  // TEST_SUITE
