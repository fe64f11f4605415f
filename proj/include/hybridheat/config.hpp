#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hybridheat/coefficients.hpp"

namespace hybridheat {

/// Which boundary condition acts at x = 1: v(1,t) = h(t) or v_x(1,t) = h(t).
enum class BcVariant { DirichletControl, NeumannControl };

std::string_view to_string(BcVariant v);
/// Accepts "dirichlet" or "neumann" (case-sensitive); throws ValidationError otherwise.
BcVariant parse_bc_variant(std::string_view s);

struct Tolerances {
  double ode_abs = 1e-11;
  double ode_rel = 1e-11;
  double root_rel = 1e-12;
  double coincidence = 1e-7;  // relative to (1 + mu)
  double pole = 1e-13;        // |u(0)|, |v(0)| below pole * scale counts as a pole
  double gram_ceiling = 1e14;
  double gram_ceiling_extended = 1e40;
  double biorthogonal_residual = 1e-8;
  double moment_residual = 1e-7;  // relative to max(1, max |d_n|)

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ProblemConfig {
  CoefficientSet coefficients;
  BcVariant bc = BcVariant::DirichletControl;
  double horizon = 1.0;
  int n_modes = 8;
  int taper = 3;  // control endpoint conditions w^(j)(0) = 0, j < taper
  Tolerances tolerances;

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

/// Result of loading: the validated configuration plus non-fatal warnings.
struct LoadedConfig {
  ProblemConfig config;
  std::vector<std::string> warnings;
};

/// Parses YAML text. `origin` names the source in error messages.
LoadedConfig parse_config(std::string_view text, std::string_view origin = "<string>");
LoadedConfig load_config(const std::filesystem::path& path);

std::string dump_config(const ProblemConfig& cfg);
void save_config(const ProblemConfig& cfg, const std::filesystem::path& path);

}  // namespace hybridheat
