#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "hybridheat/config.hpp"
#include "hybridheat/errors.hpp"

using namespace hybridheat;

namespace {

const char* kBase = R"yaml(
rods:
  left:  {rho: "1 + x^2", sigma: 1, q: 0.5}
  right: {rho: 1, sigma: "exp(x/2)", q: 0.25}
mass: 1
bc: dirichlet
horizon: 1
n_modes: 8
)yaml";

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "test.yaml");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("shipped configurations load") {
  const std::filesystem::path dir = HYBRIDHEAT_CONFIG_DIR;
  for (const char* name : {"constant_dirichlet.yaml", "constant_neumann.yaml", "variable.yaml"}) {
    CAPTURE(name);
    const auto loaded = load_config(dir / name);
    CHECK(loaded.config.horizon > 0);
  }
  const auto c = load_config(dir / "constant_dirichlet.yaml").config;
  CHECK(c.coefficients == CoefficientSet{});
  CHECK(c.bc == BcVariant::DirichletControl);
  const auto travel = travel_times(c.coefficients);
  CHECK(travel.gamma1 == doctest::Approx(1.0));
  CHECK(travel.gamma2 == doctest::Approx(1.0));
}

TEST_CASE("parse fills every field") {
  const auto cfg = parse_config(std::string(kBase) + "taper: 2\ntolerances: {ode_abs: 1e-10, gram_ceiling: 1e12}\n").config;
  CHECK(cfg.coefficients.rho1(-0.5) == doctest::Approx(1.25));
  CHECK(cfg.coefficients.sigma2(1.0) == doctest::Approx(std::exp(0.5)));
  CHECK(cfg.coefficients.q1(-0.3) == doctest::Approx(0.5));
  CHECK(cfg.taper == 2);
  CHECK(cfg.tolerances.ode_abs == 1e-10);
  CHECK(cfg.tolerances.gram_ceiling == 1e12);
  CHECK(cfg.tolerances.ode_rel == Tolerances{}.ode_rel);
  CHECK(cfg.n_modes == 8);
}

TEST_CASE("save and load round trip is exact") {
  auto cfg = parse_config(kBase).config;
  CoefficientTable t;
  for (int i = 0; i < 64; ++i) {
    t.x.push_back(i / 63.0);
    t.values.push_back(1.0 + 0.1 * t.x.back() + 1.0 / 3.0);
  }
  cfg.coefficients.sigma2 = CoefficientFunction(t);
  cfg.coefficients.mass = 1.0 / 3.0;
  cfg.horizon = 0.7;
  cfg.bc = BcVariant::NeumannControl;
  cfg.taper = 0;
  cfg.tolerances.coincidence = 3.3e-8;
  const auto path = std::filesystem::temp_directory_path() / "hybridheat_roundtrip.yaml";
  save_config(cfg, path);
  const auto back = load_config(path).config;
  std::filesystem::remove(path);
  CHECK(back == cfg);
  CHECK(parse_config(dump_config(back)).config == cfg);
}

TEST_CASE("rejections name the field") {
  CHECK(message_of(std::string(kBase) + "extra: 1\n").find("extra: unknown key") != std::string::npos);
  CHECK(message_of(replace(kBase, "q: 0.5", "q: 0.5, kappa: 2")).find("rods.left.kappa") != std::string::npos);
  CHECK(message_of(replace(kBase, "mass: 1", "mass: -2")).find("mass") != std::string::npos);
  CHECK(message_of(replace(kBase, "mass: 1\n", "")).find("mass: missing field") != std::string::npos);
  CHECK(message_of(replace(kBase, "bc: dirichlet", "bc: robin")).find("bc") != std::string::npos);
  CHECK(message_of(replace(kBase, "horizon: 1", "horizon: 0")).find("horizon: must be positive") !=
        std::string::npos);
  CHECK(message_of(replace(kBase, "n_modes: 8", "n_modes: 2.5")).find("n_modes") != std::string::npos);
  CHECK(message_of(std::string(kBase) + "taper: 9\n").find("taper") != std::string::npos);
  CHECK(message_of(replace(kBase, "sigma: 1,", "sigma: \"x\",")).find("non-positive coefficient") !=
        std::string::npos);
  CHECK(message_of(replace(kBase, "\"1 + x^2\"", "\"1 + \"")).find("rods.left.rho") != std::string::npos);
  CHECK(message_of(replace(kBase, "rho: 1,", "rho: {x: [0, 1], values: [1, 1]},")).find("at least 64") !=
        std::string::npos);
  CHECK(message_of("rods: [").find("parse error") != std::string::npos);
  CHECK(message_of(std::string(kBase) + "tolerances: {pole: -1}\n").find("tolerances.pole") != std::string::npos);
}

TEST_CASE("vanishing potential is accepted with a warning") {
  const auto loaded = parse_config(replace(kBase, "q: 0.5", "q: 0"));
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings[0].find("rods.left.q") != std::string::npos);
}

TEST_CASE("variant names") {
  CHECK(parse_bc_variant("neumann") == BcVariant::NeumannControl);
  CHECK(to_string(BcVariant::DirichletControl) == "dirichlet");
  CHECK_THROWS_AS(parse_bc_variant("Neumann"), ValidationError);
}

}  // TEST_SUITE
