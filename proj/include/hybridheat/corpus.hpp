#pragma once

#include <cstdint>
#include <vector>

#include "hybridheat/coefficients.hpp"

namespace hybridheat {

struct PerturbationOptions {
  double amplitude = 0.15;  // relative size of the smooth factor on rho and sigma
  int table_points = 129;   // per rod
  int harmonics = 4;
};

/// Deterministic smooth perturbation of `base`, selected by (seed, index).
/// rho and sigma are multiplied by 1 + sum_k a_k sin(k pi (x - lo)) with
/// |a_k| <= amplitude / k, q gets a non-negative random offset, the mass a
/// factor in [0.5, 2]. Every coefficient is returned as a spline table.
CoefficientSet perturbed_coefficients(const CoefficientSet& base, std::uint64_t seed, int index,
                                      const PerturbationOptions& opt = {});

std::vector<CoefficientSet> perturbed_corpus(const CoefficientSet& base, std::uint64_t seed, int count,
                                             const PerturbationOptions& opt = {});

}  // namespace hybridheat
