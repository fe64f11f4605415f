#include <doctest.h>

#include "hybridheat/corpus.hpp"
#include "hybridheat/spectrum.hpp"

using namespace hybridheat;

TEST_SUITE("corpus") {

TEST_CASE("perturbations are deterministic and distinct") {
  const auto a = perturbed_corpus(CoefficientSet{}, 20261019, 3);
  const auto b = perturbed_corpus(CoefficientSet{}, 20261019, 3);
  REQUIRE(a.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(a[i] == b[i]);
  CHECK_FALSE(a[0] == a[1]);
  CHECK(perturbed_coefficients(CoefficientSet{}, 20261019, 2) == a[2]);
  CHECK_FALSE(perturbed_coefficients(CoefficientSet{}, 1, 0) == a[0]);
}

TEST_CASE("perturbed sets are valid and close to the base") {
  PerturbationOptions opt;
  for (const auto& c : perturbed_corpus(CoefficientSet{}, 99, 4, opt)) {
    CHECK_NOTHROW(validate(c));
    CHECK(c.mass >= 0.5);
    CHECK(c.mass <= 2.0);
    CHECK(c.rho1.is_table());
    for (double x : {-1.0, -0.3, 0.0}) {
      CHECK(c.rho1(x) > 0.0);
      CHECK(c.sigma1(x) == doctest::Approx(1.0).epsilon(0.35));
      CHECK(c.q1(x) >= 0.0);
    }
    for (double x : {0.0, 0.6, 1.0}) CHECK(c.rho2(x) == doctest::Approx(1.0).epsilon(0.35));
    const auto t = travel_times(c);
    CHECK(t.gamma1 == doctest::Approx(1.0).epsilon(0.3));
    CHECK(t.gamma2 == doctest::Approx(1.0).epsilon(0.3));
  }
}

TEST_CASE("perturbed spectra are certified") {
  const auto c = perturbed_coefficients(CoefficientSet{}, 20261019, 0);
  const auto r = spectral_report(c, BcVariant::DirichletControl, 12);
  CHECK(r.certified());
}

}  // TEST_SUITE
