#include "hybridheat/corpus.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>

#include "hybridheat/errors.hpp"

namespace hybridheat {

namespace {

using Engine = boost::random::mt19937_64;

CoefficientFunction perturb(const CoefficientFunction& f, Side side, Engine& rng, const PerturbationOptions& opt,
                            double offset_max) {
  const double pi = boost::math::constants::pi<double>();
  const Interval iv = rod_interval(side);
  std::vector<double> a(static_cast<std::size_t>(opt.harmonics));
  for (int k = 1; k <= opt.harmonics; ++k) {
    boost::random::uniform_real_distribution<double> d(-opt.amplitude / k, opt.amplitude / k);
    a[static_cast<std::size_t>(k - 1)] = d(rng);
  }
  const double offset = offset_max > 0.0 ? boost::random::uniform_real_distribution<double>(0.0, offset_max)(rng) : 0.0;
  CoefficientTable t;
  for (int i = 0; i < opt.table_points; ++i) {
    const double x = iv.lo + (iv.hi - iv.lo) * i / (opt.table_points - 1);
    double factor = 1.0;
    for (int k = 1; k <= opt.harmonics; ++k) factor += a[static_cast<std::size_t>(k - 1)] * std::sin(k * pi * (x - iv.lo));
    t.x.push_back(x);
    t.values.push_back(f(x) * factor + offset);
  }
  t.x.back() = iv.hi;
  return CoefficientFunction(std::move(t));
}

}  // namespace

CoefficientSet perturbed_coefficients(const CoefficientSet& base, std::uint64_t seed, int index,
                                      const PerturbationOptions& opt) {
  if (opt.table_points < 64) throw ValidationError("perturbation: tables need at least 64 points per rod");
  if (!(opt.amplitude >= 0.0) || opt.harmonics < 1) throw ValidationError("perturbation: invalid options");
  // 1 + sum a_k sin(...) >= 1 - amplitude * H_K must stay positive
  double harmonic = 0.0;
  for (int k = 1; k <= opt.harmonics; ++k) harmonic += 1.0 / k;
  if (!(opt.amplitude * harmonic < 1.0)) throw ValidationError("perturbation: amplitude too large for positivity");

  Engine rng(seed);
  rng.discard(static_cast<unsigned long long>(index) * 1000ULL);
  CoefficientSet c;
  c.rho1 = perturb(base.rho1, Side::Left, rng, opt, 0.0);
  c.sigma1 = perturb(base.sigma1, Side::Left, rng, opt, 0.0);
  c.q1 = perturb(base.q1, Side::Left, rng, opt, 1.0);
  c.rho2 = perturb(base.rho2, Side::Right, rng, opt, 0.0);
  c.sigma2 = perturb(base.sigma2, Side::Right, rng, opt, 0.0);
  c.q2 = perturb(base.q2, Side::Right, rng, opt, 1.0);
  c.mass = base.mass * std::exp(boost::random::uniform_real_distribution<double>(std::log(0.5), std::log(2.0))(rng));
  validate(c);
  return c;
}

std::vector<CoefficientSet> perturbed_corpus(const CoefficientSet& base, std::uint64_t seed, int count,
                                             const PerturbationOptions& opt) {
  std::vector<CoefficientSet> out;
  for (int i = 0; i < count; ++i) out.push_back(perturbed_coefficients(base, seed, i, opt));
  return out;
}

}  // namespace hybridheat
