#include "hybridheat/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hybridheat/quadrature.hpp"
#include "json.hpp"

namespace hybridheat {

std::string_view to_string(Precision p) { return p == Precision::Double ? "double" : "extended"; }

Precision parse_precision(std::string_view s) {
  if (s == "double") return Precision::Double;
  if (s == "extended") return Precision::Extended;
  throw ValidationError("precision: expected 'double' or 'extended', got '" + std::string(s) + "'");
}

std::vector<double> project_initial_data(const CoefficientSet& c, const StateSnapshot& y0,
                                         const std::vector<Eigenpair>& eigs) {
  std::vector<double> out;
  out.reserve(eigs.size());
  for (const Eigenpair& e : eigs) {
    if (e.x_left.size() != y0.x_left.size() || e.x_right.size() != y0.x_right.size()) {
      throw ValidationError("project_initial_data: initial state is not sampled on the eigenfunction grids");
    }
    StateSnapshot phi = state_from_eigenpair(e);
    std::vector<double> fl(phi.u.size()), fr(phi.v.size());
    for (std::size_t i = 0; i < fl.size(); ++i) fl[i] = c.rho1(phi.x_left[i]) * y0.u[i] * phi.u[i];
    for (std::size_t i = 0; i < fr.size(); ++i) fr[i] = c.rho2(phi.x_right[i]) * y0.v[i] * phi.v[i];
    const double hl = (phi.x_left.back() - phi.x_left.front()) / static_cast<double>(fl.size() - 1);
    const double hr = (phi.x_right.back() - phi.x_right.front()) / static_cast<double>(fr.size() - 1);
    out.push_back(simpson(fl, hl) + simpson(fr, hr) + c.mass * y0.z * phi.z);
  }
  return out;
}

double input_coefficient(const CoefficientSet& c, const Eigenpair& e) {
  return e.variant == BcVariant::DirichletControl ? -c.sigma2(1.0) * e.trace_right : c.sigma2(1.0) * e.trace_right;
}

MomentProblem build_moment_problem(const CoefficientSet& c, BcVariant variant, const std::vector<Eigenpair>& eigs,
                                   const std::vector<double>& initial_coefficients, double horizon, int taper) {
  const std::size_t N = initial_coefficients.size();
  if (N == 0) throw ValidationError("moment problem: no modes");
  if (taper < 0) throw ValidationError("moment problem: taper must be non-negative");
  if (eigs.size() < N + static_cast<std::size_t>(taper)) {
    throw ValidationError("moment problem: need " + std::to_string(N + static_cast<std::size_t>(taper)) +
                          " eigenpairs, got " + std::to_string(eigs.size()));
  }
  if (!(horizon > 0.0)) throw ValidationError("moment problem: horizon must be positive");
  MomentProblem p;
  p.horizon = horizon;
  p.variant = variant;
  p.initial_coefficients = initial_coefficients;
  for (std::size_t n = 0; n < N + static_cast<std::size_t>(taper); ++n) {
    if (eigs[n].variant != variant) throw ValidationError("moment problem: eigenpair variant mismatch");
    if (n > 0 && !(eigs[n].lambda > eigs[n - 1].lambda)) {
      throw ValidationError("moment problem: exponents must be strictly increasing");
    }
    const double lam = eigs[n].lambda;
    if (n >= N) {
      p.taper_exponents.push_back(lam);
      continue;
    }
    const double b = input_coefficient(c, eigs[n]);
    p.exponents.push_back(lam);
    p.input_coefficients.push_back(b);
    // Dirichlet: + Y e^{-lambda T} / (sigma2(1) phi'(1)); Neumann: - Y e^{-lambda T} / (sigma2(1) phi(1)).
    p.targets.push_back(-initial_coefficients[n] * std::exp(-lam * horizon) / b);
  }
  return p;
}

namespace {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

Matrix<extended> gram_matrix(const std::vector<double>& lam, double T) {
  const auto n = static_cast<Eigen::Index>(lam.size());
  Matrix<extended> g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const extended s = extended(lam[static_cast<std::size_t>(i)]) + extended(lam[static_cast<std::size_t>(j)]);
      g(i, j) = -boost::multiprecision::expm1(-s * extended(T)) / s;
    }
  }
  return g;
}

template <class Scalar>
Matrix<Scalar> invert_spd(const Matrix<Scalar>& g) {
  // LDL^T with symmetric (diagonal) pivoting.
  const Eigen::LDLT<Matrix<Scalar>> f(g);
  if (f.info() != Eigen::Success) throw NumericalError("biorthogonal family: Gram factorisation failed");
  const auto d = f.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > Scalar(0))) {
      throw ConditioningError("biorthogonal family: Gram matrix is numerically singular at this precision", 1e300);
    }
  }
  return f.solve(Matrix<Scalar>::Identity(g.rows(), g.cols()));
}

extended norm1(const Matrix<extended>& m) {
  extended best = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    extended s = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

double BiorthogonalFamily::theta(std::size_t n, double t) const {
  const std::size_t N = size();
  extended acc = 0;
  for (std::size_t m = 0; m < N; ++m) acc += coefficients[n * N + m] * exp(-extended(exponents[m]) * extended(t));
  return static_cast<double>(acc);
}

BiorthogonalFamily build_biorthogonal(const std::vector<double>& exponents, double horizon, Precision precision,
                                      const Tolerances& tol) {
  if (exponents.empty()) throw ValidationError("biorthogonal family: no exponents");
  if (!(horizon > 0.0)) throw ValidationError("biorthogonal family: horizon must be positive");
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (!std::isfinite(exponents[i]) || (i > 0 && !(exponents[i] > exponents[i - 1]))) {
      throw ValidationError("biorthogonal family: exponents must be finite and strictly increasing");
    }
  }
  const std::size_t N = exponents.size();
  const Matrix<extended> g = gram_matrix(exponents, horizon);
  Matrix<extended> c;
  if (precision == Precision::Extended) {
    c = invert_spd(g);
  } else {
    const Matrix<double> cd = invert_spd(Matrix<double>(g.cast<double>()));
    c = cd.cast<extended>();
  }
  const double cond = static_cast<double>(norm1(g) * norm1(c));
  const double ceiling = precision == Precision::Extended ? tol.gram_ceiling_extended : tol.gram_ceiling;
  if (!(cond <= ceiling)) {
    std::ostringstream os;
    os << "biorthogonal family: Gram condition estimate " << std::setprecision(3) << cond << " exceeds the "
       << to_string(precision) << "-precision ceiling " << ceiling << " (N=" << N << ", T=" << horizon
       << "); reduce n_modes";
    if (precision == Precision::Double) os << " or use --precision extended";
    throw ConditioningError(os.str(), cond);
  }

  BiorthogonalFamily f;
  f.horizon = horizon;
  f.exponents = exponents;
  f.precision = precision;
  f.gram_condition = cond;
  f.coefficients.resize(N * N);
  f.gram.resize(N * N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      f.coefficients[i * N + j] = c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      f.gram[i * N + j] = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  const Matrix<extended> r = c * g;
  extended worst = 0;
  for (std::size_t i = 0; i < N; ++i) {
    // ||theta_i||^2 = (C G C)_ii
    extended nn = 0;
    for (std::size_t j = 0; j < N; ++j) nn += r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                                           c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    f.norms.push_back(static_cast<double>(sqrt(abs(nn))));
    for (std::size_t j = 0; j < N; ++j) {
      const extended d = r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - (i == j ? 1 : 0);
      worst = std::max(worst, abs(d));
    }
  }
  f.biorthogonality_residual = static_cast<double>(worst);
  return f;
}

double ControlSignal::w_at(double s) const {
  // only populated when sum |alpha_m| <= 1e17, so binary128 still leaves
  // about 17 correct digits after cancellation
  if (quad_amplitudes.size() == amplitudes.size()) {
    quad acc = 0;
    for (std::size_t m = 0; m < amplitudes.size(); ++m) acc += quad_amplitudes[m] * exp(-quad(exponents[m]) * quad(s));
    return static_cast<double>(acc);
  }
  extended acc = 0;
  for (std::size_t m = 0; m < amplitudes.size(); ++m) acc += amplitudes[m] * exp(-extended(exponents[m]) * extended(s));
  return static_cast<double>(acc);
}

bool ControlSignal::is_zero() const {
  return std::all_of(amplitudes.begin(), amplitudes.end(), [](const extended& a) { return a == 0; });
}

double exponential_moment(const std::function<double(double)>& f, double lambda, double horizon) {
  auto integrate = [&](double lo, double hi, int panels) {
    const double width = (hi - lo) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * width;
      sum += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double s) { return f(s) * std::exp(-lambda * s); }, a, a + width);
    }
    return sum;
  };
  // beyond lambda s = 60 the weight is below 1e-26
  const double cut = lambda > 0.0 ? std::min(horizon, 60.0 / lambda) : horizon;
  const int panels = std::max(64, static_cast<int>(std::ceil(std::abs(lambda) * cut / 2.0)));
  double sum = integrate(0.0, cut, panels);
  if (cut < horizon) sum += integrate(cut, horizon, 64);
  return sum;
}

namespace {

void sample(ControlSignal& s, int samples) {
  if (samples < 2) throw ValidationError("control: need at least two samples");
  s.quad_amplitudes.clear();
  extended total = 0;
  for (const extended& a : s.amplitudes) total += abs(a);
  if (total <= extended(1e17)) {
    for (const extended& a : s.amplitudes) s.quad_amplitudes.push_back(static_cast<quad>(a));
  }
  s.t.resize(static_cast<std::size_t>(samples));
  s.w.resize(s.t.size());
  s.h.resize(s.t.size());
  for (int i = 0; i < samples; ++i) {
    const double t = s.horizon * i / (samples - 1);
    s.t[static_cast<std::size_t>(i)] = t;
    s.h[static_cast<std::size_t>(i)] = s.h_at(t);
  }
  for (int i = 0; i < samples; ++i) s.w[static_cast<std::size_t>(i)] = s.h[static_cast<std::size_t>(samples - 1 - i)];
}

// Square system: the N moment rows plus k rows w^(j)(0) = 0, the latter
// scaled by lambda_max^-j.
std::vector<extended> solve_tapered(const std::vector<double>& exponents, const std::vector<double>& targets,
                                    double horizon, Precision precision, const Tolerances& tol, double& cond) {
  const auto M = static_cast<Eigen::Index>(exponents.size());
  const auto N = static_cast<Eigen::Index>(targets.size());
  const Matrix<extended> g = gram_matrix(exponents, horizon);
  Matrix<extended> a(M, M);
  Matrix<extended> rhs = Matrix<extended>::Zero(M, 1);
  const extended scale = extended(1) / extended(exponents.back());
  for (Eigen::Index i = 0; i < N; ++i) {
    a.row(i) = g.row(i);
    rhs(i, 0) = targets[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index m = 0; m < M; ++m) {
    extended p = 1;
    for (Eigen::Index j = N; j < M; ++j) {
      a(j, m) = p;
      p *= -extended(exponents[static_cast<std::size_t>(m)]) * scale;
    }
  }
  Matrix<extended> inv;
  if (precision == Precision::Extended) {
    const Eigen::FullPivLU<Matrix<extended>> lu(a);
    if (!lu.isInvertible()) throw ConditioningError("control synthesis: tapered system is singular", 1e300);
    inv = lu.inverse();
  } else {
    const Eigen::FullPivLU<Matrix<double>> lu(a.cast<double>());
    if (!lu.isInvertible()) throw ConditioningError("control synthesis: tapered system is singular", 1e300);
    inv = Matrix<double>(lu.inverse()).cast<extended>();
  }
  cond = static_cast<double>(norm1(a) * norm1(inv));
  const double ceiling = precision == Precision::Extended ? tol.gram_ceiling_extended : tol.gram_ceiling;
  if (!(cond <= ceiling)) {
    std::ostringstream os;
    os << "control synthesis: tapered system condition estimate " << std::setprecision(3) << cond
       << " exceeds the " << to_string(precision) << "-precision ceiling " << ceiling << "; reduce n_modes or taper";
    if (precision == Precision::Double) os << ", or use --precision extended";
    throw ConditioningError(os.str(), cond);
  }
  const Matrix<extended> alpha = inv * rhs;
  std::vector<extended> out(static_cast<std::size_t>(M));
  for (Eigen::Index m = 0; m < M; ++m) out[static_cast<std::size_t>(m)] = alpha(m, 0);
  return out;
}

}  // namespace

ControlSignal zero_control(double horizon, int samples) {
  ControlSignal s;
  s.horizon = horizon;
  sample(s, samples);
  return s;
}

ControlSignal synthesize_control(const MomentProblem& problem, const BiorthogonalFamily& family,
                                 const Tolerances& tol, int samples) {
  const std::size_t N = problem.exponents.size();
  if (family.size() != N || family.exponents != problem.exponents || family.horizon != problem.horizon) {
    throw ValidationError("control synthesis: biorthogonal family does not match the moment problem");
  }
  ControlSignal s;
  s.horizon = problem.horizon;
  s.variant = problem.variant;
  s.precision = family.precision;
  s.exponents = problem.exponents;
  s.targets = problem.targets;
  s.gram_condition = family.gram_condition;
  s.taper = static_cast<int>(problem.taper_exponents.size());
  if (s.taper == 0) {
    s.amplitudes.assign(N, extended(0));
    for (std::size_t n = 0; n < N; ++n) {
      const extended d = problem.targets[n];
      for (std::size_t m = 0; m < N; ++m) s.amplitudes[m] += d * family.coefficients[n * N + m];
    }
  } else {
    s.exponents.insert(s.exponents.end(), problem.taper_exponents.begin(), problem.taper_exponents.end());
    for (std::size_t i = 1; i < s.exponents.size(); ++i) {
      if (!(s.exponents[i] > s.exponents[i - 1])) {
        throw ValidationError("control synthesis: taper exponents must exceed the controlled ones");
      }
    }
    s.amplitudes = solve_tapered(s.exponents, problem.targets, problem.horizon, family.precision, tol,
                                 s.system_condition);
    for (int j = 0; j < s.taper; ++j) {
      extended acc = 0;
      for (std::size_t m = 0; m < s.exponents.size(); ++m) acc += s.amplitudes[m] * pow(-extended(s.exponents[m]), j);
      s.endpoint_derivatives.push_back(static_cast<double>(acc));
    }
  }
  // ||w||^2 = alpha^T G alpha
  const Matrix<extended> g = gram_matrix(s.exponents, s.horizon);
  extended nn = 0;
  for (std::size_t i = 0; i < s.exponents.size(); ++i) {
    for (std::size_t j = 0; j < s.exponents.size(); ++j) {
      nn += s.amplitudes[i] * g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * s.amplitudes[j];
    }
  }
  s.l2_norm = static_cast<double>(sqrt(abs(nn)));
  sample(s, samples);

  s.residual_scale = 1.0;
  for (double d : s.targets) s.residual_scale = std::max(s.residual_scale, std::abs(d));
  const auto w = [&s](double x) { return s.w_at(x); };
  for (std::size_t n = 0; n < N; ++n) {
    s.moment_residuals.push_back(exponential_moment(w, problem.exponents[n], problem.horizon) - problem.targets[n]);
    s.max_residual = std::max(s.max_residual, std::abs(s.moment_residuals.back()));
  }
  if (!(s.max_residual <= tol.moment_residual * s.residual_scale)) {
    std::ostringstream os;
    os << "control synthesis: moment residual " << std::setprecision(3) << s.max_residual << " exceeds "
       << tol.moment_residual * s.residual_scale << " (Gram condition " << family.gram_condition
       << ", precision " << to_string(family.precision) << ")";
    throw NumericalError(os.str());
  }
  return s;
}

void write_control_csv(const ControlSignal& s, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write control");
  os << "t,w,h\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.t.size(); ++i) os << s.t[i] << ',' << s.w[i] << ',' << s.h[i] << '\n';
}

void write_moments_json(const MomentProblem& p, const BiorthogonalFamily& f, const ControlSignal& s,
                        const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["variant"] = std::string(to_string(p.variant));
  j["horizon"] = p.horizon;
  j["precision"] = std::string(to_string(f.precision));
  j["exponents"] = p.exponents;
  j["initial_coefficients"] = p.initial_coefficients;
  j["input_coefficients"] = p.input_coefficients;
  j["targets"] = p.targets;
  j["residuals"] = s.moment_residuals;
  j["max_residual"] = s.max_residual;
  j["residual_scale"] = s.residual_scale;
  j["gram_condition"] = f.gram_condition;
  j["biorthogonality_residual"] = f.biorthogonality_residual;
  j["norms"] = f.norms;
  j["control_l2_norm"] = s.l2_norm;
  j["taper"] = s.taper;
  j["taper_exponents"] = p.taper_exponents;
  j["system_condition"] = s.system_condition;
  j["endpoint_derivatives"] = s.endpoint_derivatives;
  j["control_exponents"] = s.exponents;
  // the amplitudes cancel heavily; keep all digits
  std::vector<std::string> amps;
  for (const auto& a : s.amplitudes) amps.push_back(a.str(45, std::ios_base::scientific));
  j["amplitudes"] = amps;
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write moments report");
  os << std::setw(2) << j << '\n';
}

}  // namespace hybridheat
