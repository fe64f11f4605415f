#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <variant>

#include "hybridheat/config.hpp"
#include "hybridheat/corpus.hpp"
#include "hybridheat/errors.hpp"
#include "hybridheat/moments.hpp"
#include "hybridheat/simulator.hpp"
#include "hybridheat/spectrum.hpp"

namespace py = pybind11;
using namespace hybridheat;

namespace {

using CoefficientArg = std::variant<double, std::string, std::pair<std::vector<double>, std::vector<double>>>;

CoefficientFunction to_function(const CoefficientArg& a) {
  if (const auto* d = std::get_if<double>(&a)) return CoefficientFunction(*d);
  if (const auto* s = std::get_if<std::string>(&a)) return CoefficientFunction::parse(*s);
  const auto& t = std::get<2>(a);
  return CoefficientFunction(CoefficientTable{t.first, t.second});
}

py::dict report_dict(const SpectralReport& r) {
  py::dict d;
  d["variant"] = std::string(to_string(r.variant));
  d["gamma"] = py::make_tuple(r.travel.gamma1, r.travel.gamma2);
  d["eigenvalues"] = r.eigenvalues;
  d["regular_eigenvalues"] = r.regular_eigenvalues;
  d["mu"] = r.auxiliary.merged;
  d["coincidence"] = r.coincidence;
  d["gaps"] = r.gaps;
  d["min_gap"] = r.min_gap;
  d["interpolation_ok"] = r.interpolation_ok;
  d["asymptote_ratios"] = r.asymptote_ratios;
  d["certified"] = r.certified();
  return d;
}

py::dict eigenpair_dict(const Eigenpair& e) {
  py::dict d;
  d["index"] = e.index;
  d["lambda"] = e.lambda;
  d["x_left"] = e.x_left;
  d["u"] = e.u_part;
  d["x_right"] = e.x_right;
  d["v"] = e.v_part;
  d["z"] = e.z;
  d["trace_right"] = e.trace_right;
  d["in_coincidence_set"] = e.in_coincidence_set;
  d["flux_jump_residual"] = e.flux_jump_residual;
  return d;
}

struct Pipeline {
  std::vector<Eigenpair> eigs;
  ControlSignal control;
  MomentProblem problem;
};

Pipeline control_pipeline(const CoefficientSet& c, BcVariant v, const std::string& init, double horizon,
                          int n_modes, int taper, Precision precision) {
  const auto spec = parse_initial_spec(init);
  const int need = std::max(n_modes + taper, spec.highest_mode());
  Pipeline p;
  p.eigs = eigenpairs(c, v, need);
  const std::vector<Eigenpair> head(p.eigs.begin(), p.eigs.begin() + n_modes);
  const auto y0 = project_initial_data(c, build_initial_state(c, spec, p.eigs), head);
  p.problem = build_moment_problem(c, v, p.eigs, y0, horizon, taper);
  const auto family = build_biorthogonal(p.problem.exponents, horizon, precision);
  p.control = synthesize_control(p.problem, family);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral analysis and boundary null control of two rods joined by a point mass";
  m.attr("__version__") = HYBRIDHEAT_VERSION;

  auto base = py::register_exception<Error>(m, "HybridHeatError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  // later registrations are tried first
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConditioningError>(m, "ConditioningError", numerical.ptr());
  py::register_exception<CertificationError>(m, "CertificationError", base.ptr());

  py::class_<CoefficientSet>(m, "Coefficients")
      .def(py::init([](CoefficientArg rho1, CoefficientArg sigma1, CoefficientArg q1, CoefficientArg rho2,
                       CoefficientArg sigma2, CoefficientArg q2, double mass) {
             CoefficientSet c;
             c.rho1 = to_function(rho1);
             c.sigma1 = to_function(sigma1);
             c.q1 = to_function(q1);
             c.rho2 = to_function(rho2);
             c.sigma2 = to_function(sigma2);
             c.q2 = to_function(q2);
             c.mass = mass;
             validate(c);
             return c;
           }),
           py::kw_only(), py::arg("rho1") = 1.0, py::arg("sigma1") = 1.0, py::arg("q1") = 0.0,
           py::arg("rho2") = 1.0, py::arg("sigma2") = 1.0, py::arg("q2") = 0.0, py::arg("mass") = 1.0,
           "Each coefficient is a number, an expression in x, or an (x, values) table.")
      .def_readwrite("mass", &CoefficientSet::mass)
      .def("rho", [](const CoefficientSet& c, double x) { return x < 0 ? c.rho1(x) : c.rho2(x); })
      .def("sigma", [](const CoefficientSet& c, double x) { return x < 0 ? c.sigma1(x) : c.sigma2(x); })
      .def("q", [](const CoefficientSet& c, double x) { return x < 0 ? c.q1(x) : c.q2(x); })
      .def("validate", [](const CoefficientSet& c) { return validate(c); })
      .def("travel_times", [](const CoefficientSet& c) {
        const auto t = travel_times(c);
        return py::make_tuple(t.gamma1, t.gamma2);
      });

  py::class_<ProblemConfig>(m, "Config")
      .def_readonly("coefficients", &ProblemConfig::coefficients)
      .def_property_readonly("bc", [](const ProblemConfig& c) { return std::string(to_string(c.bc)); })
      .def_readonly("horizon", &ProblemConfig::horizon)
      .def_readonly("n_modes", &ProblemConfig::n_modes)
      .def_readonly("taper", &ProblemConfig::taper)
      .def("dump", [](const ProblemConfig& c) { return dump_config(c); });

  m.def("load_config", [](const std::filesystem::path& p) { return load_config(p).config; }, py::arg("path"));
  m.def("parse_config", [](const std::string& text) { return parse_config(text).config; }, py::arg("text"));

  auto variant = [](const std::string& s) { return parse_bc_variant(s); };

  m.def("characteristic_F",
        [variant](const CoefficientSet& c, double lam, const std::string& v) { return characteristic_F(c, lam, variant(v)); },
        py::arg("coefficients"), py::arg("lam"), py::arg("variant") = "dirichlet");
  m.def("characteristic_F_derivative",
        [variant](const CoefficientSet& c, double lam, const std::string& v) {
          return characteristic_F_derivative(c, lam, variant(v));
        },
        py::arg("coefficients"), py::arg("lam"), py::arg("variant") = "dirichlet");
  m.def("eigenvalues",
        [variant](const CoefficientSet& c, int n, const std::string& v) { return eigenvalues_main(c, variant(v), n); },
        py::arg("coefficients"), py::arg("n"), py::arg("variant") = "dirichlet");
  m.def("auxiliary_spectra",
        [variant](const CoefficientSet& c, int n, const std::string& v) {
          const auto a = auxiliary_spectra(c, variant(v), n);
          py::dict d;
          d["left"] = a.left;
          d["right"] = a.right;
          d["merged"] = a.merged;
          d["coincident"] = a.coincident;
          return d;
        },
        py::arg("coefficients"), py::arg("n"), py::arg("variant") = "dirichlet");
  m.def("spectral_report",
        [variant](const CoefficientSet& c, int n, const std::string& v) { return report_dict(spectral_report(c, variant(v), n)); },
        py::arg("coefficients"), py::arg("n_max"), py::arg("variant") = "dirichlet");
  m.def("eigenpairs",
        [variant](const CoefficientSet& c, int n, const std::string& v) {
          py::list out;
          for (const auto& e : eigenpairs(c, variant(v), n)) out.append(eigenpair_dict(e));
          return out;
        },
        py::arg("coefficients"), py::arg("n"), py::arg("variant") = "dirichlet");
  m.def("gram_matrix",
        [variant](const CoefficientSet& c, int n, const std::string& v) {
          const auto g = gram_matrix_H(c, eigenpairs(c, variant(v), n));
          std::vector<std::vector<double>> rows(n);
          for (int i = 0; i < n; ++i) rows[i].assign(g.begin() + i * n, g.begin() + (i + 1) * n);
          return rows;
        },
        py::arg("coefficients"), py::arg("n"), py::arg("variant") = "dirichlet");

  m.def("synthesize_control",
        [variant](const CoefficientSet& c, const std::string& init, const std::string& v, double horizon, int n_modes,
                  int taper, const std::string& precision) {
          const auto p = control_pipeline(c, variant(v), init, horizon, n_modes, taper, parse_precision(precision));
          py::dict d;
          d["t"] = p.control.t;
          d["w"] = p.control.w;
          d["h"] = p.control.h;
          d["exponents"] = p.problem.exponents;
          d["targets"] = p.problem.targets;
          d["initial_coefficients"] = p.problem.initial_coefficients;
          d["moment_residuals"] = p.control.moment_residuals;
          d["max_residual"] = p.control.max_residual;
          d["gram_condition"] = p.control.gram_condition;
          d["l2_norm"] = p.control.l2_norm;
          return d;
        },
        py::arg("coefficients"), py::arg("init") = "mode:1", py::arg("variant") = "dirichlet", py::arg("horizon") = 1.0,
        py::arg("n_modes") = 8, py::arg("taper") = 3, py::arg("precision") = "extended");

  m.def("simulate_free",
        [variant](const CoefficientSet& c, const std::string& init, const std::string& v, double horizon, int nx,
                  int nt) {
          const auto bc = variant(v);
          const auto spec = parse_initial_spec(init);
          const auto eigs = eigenpairs(c, bc, std::max(1, spec.highest_mode()));
          const auto r = simulate_fd(c, bc, build_initial_state(c, spec, eigs), {}, horizon, {nx, nt, 1});
          std::vector<double> t, e;
          for (const auto& p : r.trajectory) {
            t.push_back(p.t);
            e.push_back(p.energy_H);
          }
          return py::make_tuple(t, e);
        },
        py::arg("coefficients"), py::arg("init") = "mode:1", py::arg("variant") = "dirichlet", py::arg("horizon") = 1.0,
        py::arg("nx") = 128, py::arg("nt") = 1024,
        "Finite-difference run without input; returns (t, energy_H).");

  m.def("verify",
        [variant](const CoefficientSet& c, const std::string& init, const std::string& v, double horizon, int n_modes,
                  int taper, const std::string& precision) {
          VerifyOptions opt;
          opt.taper = taper;
          opt.precision = parse_precision(precision);
          const auto r = verify_null_control(c, variant(v), parse_initial_spec(init), horizon, n_modes, opt);
          py::dict d;
          d["pass"] = r.pass();
          d["initial_energy"] = r.initial_energy;
          d["modal_terminal_energy"] = r.modal_terminal_energy;
          d["fd_terminal_energy"] = r.fd_terminal_energy;
          d["tail_bound"] = r.tail_bound;
          d["baseline_terminal_energy"] = r.baseline_terminal_energy;
          d["baseline_ratio"] = r.baseline_ratio;
          d["max_moment_residual"] = r.max_moment_residual;
          d["gram_condition"] = r.gram_condition;
          return d;
        },
        py::arg("coefficients"), py::arg("init") = "mode:1", py::arg("variant") = "dirichlet", py::arg("horizon") = 1.0,
        py::arg("n_modes") = 8, py::arg("taper") = 3, py::arg("precision") = "extended");

  m.def("perturbed_corpus",
        [](const CoefficientSet& base, std::uint64_t seed, int count, double amplitude) {
          PerturbationOptions opt;
          opt.amplitude = amplitude;
          return perturbed_corpus(base, seed, count, opt);
        },
        py::arg("base"), py::arg("seed"), py::arg("count"), py::arg("amplitude") = 0.15);
}
