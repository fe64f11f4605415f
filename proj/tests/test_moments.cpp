#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "hybridheat/config.hpp"
#include "hybridheat/errors.hpp"
#include "hybridheat/moments.hpp"
#include "hybridheat/state.hpp"
#include "oracles.hpp"

using namespace hybridheat;
using std::numbers::pi;

namespace {

struct Pipeline {
  CoefficientSet c;
  BcVariant variant;
  std::vector<Eigenpair> eigs;
};

const Pipeline& uniform(BcVariant v) {
  static const Pipeline d{CoefficientSet{}, BcVariant::DirichletControl,
                          eigenpairs(CoefficientSet{}, BcVariant::DirichletControl, 12)};
  static const Pipeline n{CoefficientSet{}, BcVariant::NeumannControl,
                          eigenpairs(CoefficientSet{}, BcVariant::NeumannControl, 12)};
  return v == BcVariant::DirichletControl ? d : n;
}

std::vector<double> first(const std::vector<double>& v, std::size_t n) { return {v.begin(), v.begin() + n}; }

ControlSignal control_for(const Pipeline& p, const std::vector<double>& y0, int taper, double horizon = 1.0) {
  const auto problem = build_moment_problem(p.c, p.variant, p.eigs, y0, horizon, taper);
  const auto family = build_biorthogonal(problem.exponents, horizon);
  return synthesize_control(problem, family);
}

std::vector<double> unit(std::size_t n, std::size_t k) {
  std::vector<double> e(n, 0.0);
  e[k] = 1.0;
  return e;
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("single exponential") {
  const double lam = 2.7, T = 0.8;
  const auto f = build_biorthogonal({lam}, T);
  const double g11 = (1 - std::exp(-2 * lam * T)) / (2 * lam);
  CHECK(static_cast<double>(f.coefficients[0]) == doctest::Approx(1.0 / g11).epsilon(1e-14));
  CHECK(f.biorthogonality_residual < 1e-14);
  CHECK(f.theta(0, 0.3) == doctest::Approx(std::exp(-lam * 0.3) / g11).epsilon(1e-14));
}

TEST_CASE("two exponentials against a direct inverse") {
  const double g11 = (1 - std::exp(-2.0)) / 2, g12 = (1 - std::exp(-3.0)) / 3, g22 = (1 - std::exp(-4.0)) / 4;
  const double det = g11 * g22 - g12 * g12;
  const double inv[4] = {g22 / det, -g12 / det, -g12 / det, g11 / det};
  for (auto prec : {Precision::Double, Precision::Extended}) {
    const auto f = build_biorthogonal({1.0, 2.0}, 1.0, prec);
    CHECK(static_cast<double>(f.gram[1]) == doctest::Approx(g12).epsilon(1e-15));
    for (int i = 0; i < 4; ++i) CHECK(static_cast<double>(f.coefficients[i]) == doctest::Approx(inv[i]).epsilon(1e-12));
    CHECK(f.biorthogonality_residual < 1e-12);
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m) {
        const double lm = m == 0 ? 1.0 : 2.0;
        const double moment = oracle::simpson([&](double t) { return f.theta(n, t) * std::exp(-lm * t); }, 0, 1);
        CHECK(std::abs(moment - (n == m ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("exponential moments by quadrature") {
  CHECK(exponential_moment([](double s) { return std::cos(3 * s); }, 40.0, 1.0) ==
        doctest::Approx((40.0 * (1 - std::exp(-40.0) * std::cos(3.0)) + 3 * std::exp(-40.0) * std::sin(3.0)) / 1609.0)
            .epsilon(1e-13));
  CHECK(exponential_moment([](double) { return 1.0; }, 5000.0, 2.0) == doctest::Approx(1.0 / 5000.0).epsilon(1e-12));
}

TEST_CASE("ill-conditioned families are refused") {
  const auto eig = eigenvalues_main(CoefficientSet{}, BcVariant::DirichletControl, 40);
  try {
    build_biorthogonal(eig, 1.0, Precision::Double);
    FAIL("expected a conditioning error");
  } catch (const ConditioningError& e) {
    CHECK(e.condition() > 1e14);
  }
  const auto ok = build_biorthogonal(first(eig, 12), 1.0, Precision::Extended);
  CHECK(ok.biorthogonality_residual <= 1e-8);
  CHECK(ok.gram_condition < 1e40);
}

TEST_CASE("biorthogonal norms grow at most exponentially") {
  const auto eig = eigenvalues_main(CoefficientSet{}, BcVariant::DirichletControl, 12);
  const auto f = build_biorthogonal(eig, 1.0);
  std::vector<double> n, l;
  for (std::size_t i = 0; i < f.norms.size(); ++i) {
    REQUIRE(std::isfinite(f.norms[i]));
    n.push_back(i + 1.0);
    l.push_back(std::log(f.norms[i]));
  }
  const double s = oracle::slope(n, l);
  MESSAGE("log norm slope " << s);
  CHECK(std::isfinite(s));
}

TEST_CASE("projection of eigenfunctions and of zero") {
  const auto& p = uniform(BcVariant::DirichletControl);
  const auto y = project_initial_data(p.c, state_from_eigenpair(p.eigs[2]), p.eigs);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - (i == 2 ? 1.0 : 0.0)) < 1e-7);
  for (double v : project_initial_data(p.c, zero_state(), p.eigs)) CHECK(v == 0.0);
}

TEST_CASE("projection matches closed-form integrals") {
  const auto& p = uniform(BcVariant::DirichletControl);
  StateSnapshot s = zero_state();
  for (std::size_t i = 0; i < s.x_left.size(); ++i) s.u[i] = std::sin(pi * (s.x_left[i] + 1));
  for (std::size_t i = 0; i < s.x_right.size(); ++i) s.v[i] = std::sin(pi * (1 - s.x_right[i]));
  const auto y = project_initial_data(p.c, s, p.eigs);
  for (const auto& e : p.eigs) {
    CAPTURE(e.index);
    const double k = std::sqrt(e.lambda);
    // Symmetric modes: u = v mirrored, z = phi(0); antisymmetric ones (z = 0) are orthogonal.
    const double expected = e.in_coincidence_set ? 0.0 : 2 * pi * e.z / (pi * pi - k * k);
    CHECK(std::abs(y[e.index - 1] - expected) < 1e-8);
  }
}

TEST_CASE("input coefficients") {
  const auto& d = uniform(BcVariant::DirichletControl);
  for (const auto& e : d.eigs) CHECK(input_coefficient(d.c, e) == doctest::Approx(-e.trace_right));
  const auto& n = uniform(BcVariant::NeumannControl);
  for (const auto& e : n.eigs) CHECK(input_coefficient(n.c, e) == doctest::Approx(e.trace_right));
}

TEST_CASE("zero targets give the zero control") {
  const auto& p = uniform(BcVariant::DirichletControl);
  for (int taper : {0, 3}) {
    const auto s = control_for(p, std::vector<double>(8, 0.0), taper);
    CHECK(s.is_zero());
    for (double h : s.h) CHECK(h == 0.0);
  }
  CHECK(zero_control(1.0).is_zero());
}

TEST_CASE("single mode control reproduces its moment") {
  MomentProblem m;
  m.horizon = 1.0;
  m.exponents = {1.5};
  m.targets = {1.0};
  m.initial_coefficients = {0.0};
  m.input_coefficients = {1.0};
  const auto f = build_biorthogonal(m.exponents, 1.0);
  const auto s = synthesize_control(m, f);
  CHECK(std::abs(exponential_moment([&](double t) { return s.w_at(t); }, 1.5, 1.0) - 1.0) < 1e-10);
  CHECK(s.w_at(0.4) == doctest::Approx(f.theta(0, 0.4)).epsilon(1e-14));
}

TEST_CASE("targets carry the sign of the input coefficient") {
  for (auto v : {BcVariant::DirichletControl, BcVariant::NeumannControl}) {
    const auto& p = uniform(v);
    const auto y0 = unit(8, 0);
    const auto m = build_moment_problem(p.c, v, p.eigs, y0, 1.0);
    CHECK(m.targets[0] == doctest::Approx(-std::exp(-p.eigs[0].lambda) / input_coefficient(p.c, p.eigs[0])));
    CHECK(m.input_coefficients[0] == doctest::Approx(input_coefficient(p.c, p.eigs[0])));
    for (int i = 1; i < 8; ++i) CHECK(m.targets[i] == 0.0);
  }
}

TEST_CASE("synthesised controls satisfy every moment") {
  for (auto v : {BcVariant::DirichletControl, BcVariant::NeumannControl}) {
    const auto& p = uniform(v);
    for (int taper : {0, 3}) {
      CAPTURE(taper);
      const auto s = control_for(p, unit(8, 0), taper);
      CHECK(s.max_residual <= 1e-8 * s.residual_scale);
      CHECK(std::isfinite(s.l2_norm));
      CHECK(s.exponents.size() == 8u + taper);
      const auto m = build_moment_problem(p.c, v, p.eigs, unit(8, 0), 1.0);
      for (int n = 0; n < 8; ++n) {
        const double got = exponential_moment([&](double t) { return s.w_at(t); }, p.eigs[n].lambda, 1.0);
        CHECK(std::abs(got - m.targets[n]) <= 1e-8 * std::max(1.0, std::abs(m.targets[0])));
      }
      CHECK(s.h_at(0.25) == doctest::Approx(s.w_at(0.75)));
    }
  }
}

TEST_CASE("tapered control vanishes to high order at the final time") {
  const auto& p = uniform(BcVariant::DirichletControl);
  const auto s = control_for(p, unit(8, 0), 3);
  REQUIRE(s.endpoint_derivatives.size() == 3);
  double amp = 0.0;
  for (const auto& a : s.amplitudes) amp += std::abs(static_cast<double>(a));
  const double lmax = s.exponents.back();
  for (int j = 0; j < 3; ++j) CHECK(std::abs(s.endpoint_derivatives[j]) <= 1e-20 * amp * std::pow(lmax, j));
  CHECK(std::abs(s.w_at(0.0)) < 1e-12);
  CHECK(std::abs(s.h.back()) < 1e-12);
  CHECK(s.system_condition > 0.0);
}

TEST_CASE("controls scale linearly with the initial data") {
  const auto& p = uniform(BcVariant::NeumannControl);
  std::vector<double> y0{0.3, -0.2, 0.1, 0.05, 0.0, 0.01, 0.0, 0.0};
  const auto base = control_for(p, y0, 3);
  for (double k : {2.0, -3.0}) {
    std::vector<double> scaled = y0;
    for (double& v : scaled) v *= k;
    const auto s = control_for(p, scaled, 3);
    double peak = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < s.w.size(); ++i) {
      peak = std::max(peak, std::abs(k * base.w[i]));
      dev = std::max(dev, std::abs(s.w[i] - k * base.w[i]));
    }
    CHECK(dev <= 1e-12 * peak);
    for (std::size_t m = 0; m < s.amplitudes.size(); ++m)
      CHECK(static_cast<double>(s.amplitudes[m]) == doctest::Approx(k * static_cast<double>(base.amplitudes[m])).epsilon(1e-13));
  }
}

TEST_CASE("targets decay faster than exponentially for smooth data") {
  const auto c = load_config(std::filesystem::path(HYBRIDHEAT_CONFIG_DIR) / "variable.yaml").config.coefficients;
  const auto eigs = eigenpairs(c, BcVariant::DirichletControl, 10);
  const auto spec = parse_initial_spec("expr:(x+1)*(1-x/2);1 - x^2;1");
  const auto y0 = project_initial_data(c, build_initial_state(c, spec, eigs), eigs);
  const auto m = build_moment_problem(c, BcVariant::DirichletControl, eigs, y0, 1.0);
  double prev = 0.0;
  for (int n = 4; n <= 10; ++n) {
    const double r = std::log(std::abs(m.targets[n - 1])) / n;
    if (n > 4) CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("working precision cannot take a tapered twelve-mode problem") {
  const auto& p = uniform(BcVariant::DirichletControl);
  const auto eigs = eigenpairs(p.c, p.variant, 15);
  const auto m = build_moment_problem(p.c, p.variant, eigs, unit(12, 0), 1.0, 3);
  const auto f = build_biorthogonal(m.exponents, 1.0, Precision::Double);
  CHECK_THROWS_AS(synthesize_control(m, f), ConditioningError);
}

TEST_CASE("precision names") {
  CHECK(parse_precision("double") == Precision::Double);
  CHECK(to_string(Precision::Extended) == "extended");
  CHECK_THROWS_AS(parse_precision("quad"), ValidationError);
}

}  // TEST_SUITE
