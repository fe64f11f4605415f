#pragma once

#include <filesystem>
#include <vector>

#include "hybridheat/coefficients.hpp"
#include "hybridheat/config.hpp"
#include "hybridheat/errors.hpp"
#include "hybridheat/shooting.hpp"

namespace hybridheat {

/// Raised when the characteristic function is evaluated too close to one of
/// its poles (a zero of u(0, .) or v(0, .)); the caller should treat lambda as
/// a member of the auxiliary spectrum.
class PoleProximityError : public NumericalError {
 public:
  PoleProximityError(const std::string& what, double lambda) : NumericalError(what), lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// Interface data of both rod IVPs at one spectral parameter.
struct InterfaceValues {
  double lambda;
  double u0, u_flux0, du0, du_flux0;  // u(0), sigma1(0) u'(0) and their lambda-derivatives
  double v0, v_flux0, dv0, dv_flux0;  // v(0), sigma2(0) v'(0), ...
};

InterfaceValues interface_values(const CoefficientSet& c, double lambda, BcVariant variant,
                                 const Tolerances& tol = {});

/// F(lambda) = (sigma1(0) v(0) u'(0-) - sigma2(0) u(0) v'(0+)) / (u(0) v(0)).
/// Throws PoleProximityError when |u(0)| or |v(0)| falls below tol.pole times
/// the natural scale of the respective trace.
double characteristic_F(const CoefficientSet& c, double lambda, BcVariant variant,
                        const Tolerances& tol = {});

/// dF/dlambda = -(v(0)^2 int rho1 u^2 + u(0)^2 int rho2 v^2) / (u(0)^2 v(0)^2), with
/// the integrals evaluated by Simpson's rule on the shooting grid.
double characteristic_F_derivative(const CoefficientSet& c, double lambda, BcVariant variant,
                                   const Tolerances& tol = {});

/// Eigenvalues of the decoupled rods with a Dirichlet condition at x = 0.
///
/// `left` holds the Dirichlet-Dirichlet eigenvalues of the left rod, `right`
/// those of the right rod (Dirichlet-Dirichlet for the Dirichlet-control
/// variant, Dirichlet-Neumann otherwise). `merged` is their sorted multiset
/// union; coincident pairs appear twice. `coincident[i]` marks members of
/// `merged` that agree, within the coincidence tolerance, with a member of
/// the other list.
struct AuxiliarySpectra {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> merged;
  std::vector<bool> coincident;
  std::vector<int> coincident_indices;  // 0-based positions in `merged`
};

AuxiliarySpectra auxiliary_spectra(const CoefficientSet& c, BcVariant variant, int n_max,
                                   const Tolerances& tol = {});

/// Number of zeros of a rod trace inside the open rod, by sign changes on
/// its grid. By Sturm oscillation this counts the decoupled-rod eigenvalues
/// strictly below the trace's lambda.
int count_interior_zeros(const ShootingTrace& trace);

/// Eigenvalues of the coupled problem as solutions of F(lambda) = M lambda:
/// one in (-inf, mu_1) and one in each gap (mu_n, mu_{n+1}); a coincident pair
/// mu_n = mu_{n+1} is itself the eigenvalue lambda_{n+1}. Mass 0 yields the
/// regular problem (zeros of F).
std::vector<double> eigenvalues_from(const CoefficientSet& c, BcVariant variant, int n_max,
                                     const AuxiliarySpectra& aux, const Tolerances& tol = {});

std::vector<double> eigenvalues_main(const CoefficientSet& c, BcVariant variant, int n_max,
                                     const Tolerances& tol = {});
std::vector<double> eigenvalues_regular(const CoefficientSet& c, BcVariant variant, int n_max,
                                        const Tolerances& tol = {});

/// Eigenfunction of the coupled problem, unit norm in H with
/// <Y1, Y2> = int rho1 u1 u2 + int rho2 v1 v2 + M z1 z2.
struct Eigenpair {
  int index = 0;  // 1-based
  double lambda = 0.0;
  BcVariant variant = BcVariant::DirichletControl;
  std::vector<double> x_left, u_part, u_flux;   // u_flux = sigma1 * u'
  std::vector<double> x_right, v_part, v_flux;  // v_flux = sigma2 * v'
  double z = 0.0;
  double norm_H = 1.0;
  double raw_norm_H = 0.0;  // norm of the unnormalised two-piece form
  double raw_scale = 1.0;   // raw function = raw_scale * normalised function
  double trace_right = 0.0; // phi^v_x(1) (Dirichlet) or phi^v(1) (Neumann)
  bool in_coincidence_set = false;
  double continuity_residual = 0.0;  // |u(0) - v(0)|, relative
  double flux_jump_residual = 0.0;   // |sigma1 u'(0) - sigma2 v'(0) - lambda M z|, relative
};

struct AssembleOptions {
  bool coincident = false;       // u(0) = v(0) = 0 at this eigenvalue
  bool near_coincident = false;  // flanking poles closer than kNearCoincidence
  int index = 0;
};

constexpr double kNearCoincidence = 1e-4;

Eigenpair assemble_eigenfunction(const CoefficientSet& c, double lambda, BcVariant variant,
                                 const AssembleOptions& opt = {}, const Tolerances& tol = {});

/// H inner product of two eigenfunction-shaped states sampled on the shared
/// uniform rod grids (Simpson's rule).
double inner_product_H(const CoefficientSet& c, const Eigenpair& a, const Eigenpair& b);
/// Matrix of pairwise H inner products (row-major, n x n).
std::vector<double> gram_matrix_H(const CoefficientSet& c, const std::vector<Eigenpair>& e);

/// Leading-order large-index form of the unnormalised eigenfunction away from
/// coincidences, sampled on the eigenpair's grids. Returns {u, v}.
std::pair<std::vector<double>, std::vector<double>> asymptotic_eigenfunction(const CoefficientSet& c,
                                                                             const Eigenpair& e);

struct SpectralReport {
  BcVariant variant = BcVariant::DirichletControl;
  TravelTimes travel{};
  std::vector<double> eigenvalues;
  std::vector<double> regular_eigenvalues;
  std::vector<Eigenpair> eigenpairs;  // empty unless requested
  AuxiliarySpectra auxiliary;
  std::vector<bool> coincidence;       // lambda_n equals a coincident pole
  std::vector<double> gaps;            // lambda_{n+1} - lambda_n
  double min_gap = 0.0;
  std::vector<bool> interpolation_ok;  // per index n
  std::vector<double> asymptote_ratios;

  bool all_interpolation_ok() const;
  bool certified() const { return all_interpolation_ok() && min_gap > 0.0; }
};

SpectralReport spectral_report(const CoefficientSet& c, BcVariant variant, int n_max,
                               const Tolerances& tol = {}, bool with_eigenpairs = false);

/// All eigenpairs 1..n (coincidence flags resolved from the auxiliary spectra).
std::vector<Eigenpair> eigenpairs(const CoefficientSet& c, BcVariant variant, int n,
                                  const Tolerances& tol = {});

/// spectrum.csv: n, lambda, regular_lambda, mu, gap, interpolation_ok, asymptote_ratio.
void write_spectrum_csv(const SpectralReport& r, const std::filesystem::path& path);
/// eigenfunction_<n>.csv: x, value, piece (u, v or z).
void write_eigenfunction_csv(const Eigenpair& e, const std::filesystem::path& path);

}  // namespace hybridheat
