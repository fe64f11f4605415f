#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>
#include <filesystem>
#include <string_view>
#include <vector>

#include "hybridheat/config.hpp"
#include "hybridheat/spectrum.hpp"
#include "hybridheat/state.hpp"

namespace hybridheat {

/// 50 significant decimal digits.
using extended = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                               boost::multiprecision::et_off>;
/// Hardware-assisted binary128, used to evaluate the cancelling exponential sums.
using quad = boost::multiprecision::float128;

enum class Precision { Double, Extended };
std::string_view to_string(Precision p);
Precision parse_precision(std::string_view s);

/// Y_n^0 = <Y0, phi_n>_H for orthonormal eigenpairs; the state must be sampled
/// on the eigenpair grids.
std::vector<double> project_initial_data(const CoefficientSet& c, const StateSnapshot& y0,
                                         const std::vector<Eigenpair>& eigs);

/// Truncated moment problem  int_0^T w(s) e^{-lambda_n s} ds = d_n,  n = 1..N.
///
/// Modal coefficients obey a_n' = -lambda_n a_n + b_n h(t) with
/// b_n = -sigma2(1) phi_n'(1) (Dirichlet) or +sigma2(1) phi_n(1) (Neumann), so
/// a_n(T) = 0 exactly when d_n = -Y_n^0 e^{-lambda_n T} / b_n and h(t) = w(T - t).
///
/// With taper k > 0 the control is sought in the span of the first N + k
/// exponentials and must also satisfy w^(j)(0) = 0 for j < k, i.e. h and its
/// first k - 1 derivatives vanish at t = T. The N moments are unchanged; what
/// changes is the energy pushed into the uncontrolled modes n > N.
struct MomentProblem {
  double horizon = 1.0;
  BcVariant variant = BcVariant::DirichletControl;
  std::vector<double> exponents;
  std::vector<double> targets;
  std::vector<double> initial_coefficients;
  std::vector<double> input_coefficients;  // b_n
  std::vector<double> taper_exponents;     // lambda_{N+1..N+k}
};

/// N = initial_coefficients.size(); `eigs` must hold at least N + taper pairs.
MomentProblem build_moment_problem(const CoefficientSet& c, BcVariant variant, const std::vector<Eigenpair>& eigs,
                                   const std::vector<double>& initial_coefficients, double horizon, int taper = 0);

/// b_n for one eigenpair.
double input_coefficient(const CoefficientSet& c, const Eigenpair& e);

/// Minimal-norm biorthogonal family to e^{-lambda_m t} on (0, T) within the
/// span of the first N exponentials: theta_n = sum_m C_nm e^{-lambda_m t}
/// with C the inverse of the exponential Gram matrix.
struct BiorthogonalFamily {
  double horizon = 1.0;
  std::vector<double> exponents;
  Precision precision = Precision::Extended;
  std::vector<extended> coefficients;  // row-major N x N
  std::vector<extended> gram;          // row-major N x N, closed form
  double gram_condition = 0.0;         // ||G||_1 ||G^{-1}||_1
  std::vector<double> norms;           // ||theta_n||_{L2(0,T)}
  double biorthogonality_residual = 0.0;

  std::size_t size() const { return exponents.size(); }
  double theta(std::size_t n, double t) const;
};

/// Throws ConditioningError when the condition estimate exceeds the ceiling of
/// the selected precision (tol.gram_ceiling or tol.gram_ceiling_extended).
BiorthogonalFamily build_biorthogonal(const std::vector<double>& exponents, double horizon,
                                      Precision precision = Precision::Extended, const Tolerances& tol = {});

/// w(s) = sum_m alpha_m e^{-lambda_m s};  h(t) = w(T - t). Without taper
/// alpha = C d, i.e. w = sum_n d_n theta_n.
struct ControlSignal {
  double horizon = 1.0;
  BcVariant variant = BcVariant::DirichletControl;
  Precision precision = Precision::Extended;
  int taper = 0;
  std::vector<double> exponents;     // N + taper
  std::vector<extended> amplitudes;  // alpha_m
  std::vector<quad> quad_amplitudes; // alpha_m rounded for w_at
  std::vector<double> t, w, h;       // sampled on a uniform grid
  std::vector<double> targets;
  std::vector<double> moment_residuals;  // quadrature of w e^{-lambda_n s} minus d_n
  double max_residual = 0.0;
  double residual_scale = 1.0;  // max(1, max |d_n|)
  double gram_condition = 0.0;
  double system_condition = 0.0;             // tapered solve only
  std::vector<double> endpoint_derivatives;  // w^(j)(0), j < taper
  double l2_norm = 0.0;

  double w_at(double s) const;
  double h_at(double t_) const { return w_at(horizon - t_); }
  bool is_zero() const;
};

constexpr int kControlSamples = 2001;

/// Throws NumericalError if the largest moment residual exceeds
/// tol.moment_residual * max(1, max |d_n|), and ConditioningError if the
/// tapered system is too ill-conditioned for the family's precision.
ControlSignal synthesize_control(const MomentProblem& problem, const BiorthogonalFamily& family,
                                 const Tolerances& tol = {}, int samples = kControlSamples);

ControlSignal zero_control(double horizon, int samples = kControlSamples);

/// int_0^T f(s) e^{-lambda s} ds by panelled Gauss-Legendre quadrature.
double exponential_moment(const std::function<double(double)>& f, double lambda, double horizon);

/// control.csv: t, w, h.
void write_control_csv(const ControlSignal& s, const std::filesystem::path& path);
/// moments.json: exponents, targets, residuals, gram condition, norms.
void write_moments_json(const MomentProblem& p, const BiorthogonalFamily& f, const ControlSignal& s,
                        const std::filesystem::path& path);

}  // namespace hybridheat
