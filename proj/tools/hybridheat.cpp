#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "hybridheat/config.hpp"
#include "hybridheat/corpus.hpp"
#include "hybridheat/errors.hpp"
#include "hybridheat/moments.hpp"
#include "hybridheat/simulator.hpp"
#include "hybridheat/spectrum.hpp"
#include "hybridheat/state.hpp"
#include "json.hpp"

#ifndef HYBRIDHEAT_VERSION
#define HYBRIDHEAT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hybridheat;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::string precision = "extended";
  std::string variant;  // empty: take bc from the config
};

using Clock = std::chrono::steady_clock;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write");
  os << std::setw(2) << j << '\n';
}

// Everything is written into a staging directory next to the requested one,
// which is swapped into place when the run ends.
class RunManifest {
 public:
  RunManifest(const GlobalOptions& g, std::string command, std::vector<std::string> argv)
      : target_(g.out), start_(Clock::now()) {
    staging_ = target_;
    staging_ += ".partial-" + std::to_string(::getpid());
    fs::remove_all(staging_);
    fs::create_directories(staging_);
    j_["tool"] = "hybridheat";
    j_["version"] = HYBRIDHEAT_VERSION;
    j_["command"] = std::move(command);
    j_["argv"] = std::move(argv);
    j_["config"] = g.config.empty() ? json(nullptr) : json(fs::absolute(g.config).string());
    j_["output_directory"] = fs::absolute(target_).string();
    j_["seed"] = g.seed;
    j_["precision"] = g.precision;
    j_["variant_override"] = g.variant.empty() ? json(nullptr) : json(g.variant);
    j_["started_utc"] = utc_now();
    j_["status"] = "running";
    j_["timings_s"] = json::object();
    j_["outputs"] = json::array();
    j_["warnings"] = json::array();
    flush();
  }

  fs::path dir() const { return staging_; }

  fs::path output(const std::string& name) {
    j_["outputs"].push_back(name);
    return staging_ / name;
  }

  void warn(const std::string& w) {
    std::cerr << "hybridheat: warning: " << w << '\n';
    j_["warnings"].push_back(w);
  }

  template <class F>
  auto timed(const std::string& stage, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      j_["timings_s"][stage] = std::chrono::duration<double>(Clock::now() - t0).count();
    } else {
      auto r = f();
      j_["timings_s"][stage] = std::chrono::duration<double>(Clock::now() - t0).count();
      return r;
    }
  }

  json& extra() { return j_; }

  void finalize(int exit_code, const std::optional<json>& error) {
    j_["status"] = exit_code == 0 ? "ok" : "failed";
    j_["exit_code"] = exit_code;
    j_["finished_utc"] = utc_now();
    j_["timings_s"]["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
    if (error) {
      write_json(*error, staging_ / "error.json");
      j_["outputs"].push_back("error.json");
    }
    flush();
    std::error_code ec;
    fs::remove_all(target_, ec);
    fs::rename(staging_, target_);
  }

 private:
  void flush() { write_json(j_, staging_ / "manifest.json"); }

  fs::path target_, staging_;
  Clock::time_point start_;
  json j_;
};

std::string kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Conditioning: return "numerical-conditioning";
    case ErrorKind::Certification: return "certification";
    case ErrorKind::Internal: break;
  }
  return "unexpected";
}

json error_record(ErrorKind kind, const std::string& message, const std::exception* e) {
  json j;
  j["kind"] = kind_name(kind);
  j["exit_code"] = exit_code(kind);
  j["message"] = message;
  if (const auto* ce = dynamic_cast<const ConditioningError*>(e)) {
    j["condition_estimate"] = ce->condition();
    j["advice"] = "reduce n_modes or taper, lengthen the horizon, or use --precision extended";
  }
  return j;
}

struct Context {
  GlobalOptions g;
  ProblemConfig cfg;
  Precision precision = Precision::Extended;
};

Context load_context(const GlobalOptions& g, RunManifest& m) {
  Context ctx;
  ctx.g = g;
  if (g.config.empty()) throw ValidationError("--config is required");
  LoadedConfig loaded = load_config(g.config);
  ctx.cfg = loaded.config;
  for (const auto& w : loaded.warnings) m.warn(w);
  if (!g.variant.empty()) ctx.cfg.bc = parse_bc_variant(g.variant);
  ctx.precision = parse_precision(g.precision);
  save_config(ctx.cfg, m.output("config.resolved.yaml"));
  return ctx;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  int n_max = 10;
  int eigenfunctions = 0;
};

int cmd_spectrum(const Context& ctx, const SpectrumArgs& a, RunManifest& m) {
  if (a.n_max < 1) throw ValidationError("--n-max must be positive");
  if (a.eigenfunctions < 0 || a.eigenfunctions > a.n_max) {
    throw ValidationError("--eigenfunctions must lie in [0, n-max]");
  }
  const auto& c = ctx.cfg.coefficients;
  const SpectralReport r = m.timed("spectrum", [&] {
    return spectral_report(c, ctx.cfg.bc, a.n_max, ctx.cfg.tolerances, a.eigenfunctions > 0);
  });
  write_spectrum_csv(r, m.output("spectrum.csv"));
  for (int k = 1; k <= a.eigenfunctions; ++k) {
    write_eigenfunction_csv(r.eigenpairs[static_cast<std::size_t>(k - 1)],
                            m.output("eigenfunction_" + std::to_string(k) + ".csv"));
  }
  json s;
  s["variant"] = std::string(to_string(r.variant));
  s["n_max"] = a.n_max;
  s["gamma1"] = r.travel.gamma1;
  s["gamma2"] = r.travel.gamma2;
  s["min_gap"] = r.min_gap;
  s["interpolation_ok"] = r.all_interpolation_ok();
  s["certified"] = r.certified();
  s["coincident_indices"] = r.auxiliary.coincident_indices;
  write_json(s, m.output("spectrum.json"));
  std::cout << "spectrum: " << r.eigenvalues.size() << " eigenvalues, min gap " << r.min_gap
            << ", interpolation " << (r.all_interpolation_ok() ? "ok" : "VIOLATED") << '\n';
  if (!r.certified()) throw CertificationError("spectrum: interpolation or gap certification failed");
  return 0;
}

// --------------------------------------------------------------- gap-report

struct GapArgs {
  int n_max = 30;
  int random = 0;
  double amplitude = 0.15;
};

int cmd_gap_report(const Context& ctx, const GapArgs& a, RunManifest& m) {
  if (a.n_max < 2) throw ValidationError("--n-max must be at least 2");
  if (a.random < 0) throw ValidationError("--random must be non-negative");
  std::vector<CoefficientSet> sets{ctx.cfg.coefficients};
  PerturbationOptions popt;
  popt.amplitude = a.amplitude;
  for (const auto& c : perturbed_corpus(ctx.cfg.coefficients, ctx.g.seed, a.random, popt)) sets.push_back(c);
  std::vector<BcVariant> variants;
  if (ctx.g.variant.empty()) {
    variants = {BcVariant::DirichletControl, BcVariant::NeumannControl};
  } else {
    variants = {ctx.cfg.bc};
  }

  std::ofstream csv(m.output("gap_report.csv"));
  csv << "set,variant,n,lambda,regular_lambda,mu,gap,coincidence,interpolation_ok,asymptote_ratio\n"
      << std::setprecision(17);
  json summary = json::array();
  bool ok = true;
  m.timed("gap_report", [&] {
    for (std::size_t k = 0; k < sets.size(); ++k) {
      for (BcVariant v : variants) {
        const SpectralReport r = spectral_report(sets[k], v, a.n_max, ctx.cfg.tolerances);
        int violations = 0;
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
          if (!r.interpolation_ok[i]) ++violations;
          if (i + 1 >= 20 && i + 1 <= 30) {
            lo = std::min(lo, r.asymptote_ratios[i]);
            hi = std::max(hi, r.asymptote_ratios[i]);
          }
          csv << k << ',' << to_string(v) << ',' << i + 1 << ',' << r.eigenvalues[i] << ','
              << r.regular_eigenvalues[i] << ',';
          if (i < r.auxiliary.merged.size()) csv << r.auxiliary.merged[i];
          csv << ',';
          if (i < r.gaps.size()) csv << r.gaps[i];
          csv << ',' << (r.coincidence[i] ? 1 : 0) << ',' << (r.interpolation_ok[i] ? 1 : 0) << ','
              << r.asymptote_ratios[i] << '\n';
        }
        json e;
        e["set"] = k;
        e["variant"] = std::string(to_string(v));
        e["mass"] = sets[k].mass;
        e["gamma1"] = r.travel.gamma1;
        e["gamma2"] = r.travel.gamma2;
        e["min_gap"] = r.min_gap;
        e["interpolation_violations"] = violations;
        e["coincident_indices"] = r.auxiliary.coincident_indices;
        if (std::isfinite(lo)) {
          e["asymptote_ratio_min_20_30"] = lo;
          e["asymptote_ratio_max_20_30"] = hi;
        }
        e["certified"] = r.certified();
        ok = ok && r.certified();
        summary.push_back(e);
        std::cout << "set " << k << ' ' << to_string(v) << ": min gap " << std::setprecision(10) << r.min_gap
                  << ", interpolation violations " << violations << '\n';
      }
    }
  });
  json j;
  j["seed"] = ctx.g.seed;
  j["random_sets"] = a.random;
  j["amplitude"] = a.amplitude;
  j["n_max"] = a.n_max;
  j["entries"] = summary;
  j["certified"] = ok;
  write_json(j, m.output("gap_report.json"));
  if (!ok) throw CertificationError("gap-report: at least one set failed gap or interpolation certification");
  return 0;
}

// ------------------------------------------------------------------ control

struct ControlArgs {
  std::string init = "mode:1";
  int n_modes = 0;  // 0: from config
  int taper = -1;   // -1: from config
};

int resolve_modes(const Context& ctx, int n) { return n > 0 ? n : ctx.cfg.n_modes; }
int resolve_taper(const Context& ctx, int k) { return k >= 0 ? k : ctx.cfg.taper; }

struct Synthesis {
  std::vector<Eigenpair> eigs;
  StateSnapshot y0;
  std::vector<double> coeffs;
  MomentProblem problem;
  BiorthogonalFamily family;
  ControlSignal control;
};

Synthesis synthesize(const Context& ctx, const InitialDataSpec& spec, int n_modes, int taper, int extra,
                     RunManifest& m) {
  Synthesis s;
  const auto& c = ctx.cfg.coefficients;
  const int total = std::max({n_modes + taper, n_modes + extra, spec.highest_mode()});
  s.eigs = m.timed("eigenpairs", [&] { return eigenpairs(c, ctx.cfg.bc, total, ctx.cfg.tolerances); });
  s.y0 = build_initial_state(c, spec, s.eigs);
  s.coeffs = project_initial_data(c, s.y0, s.eigs);
  const std::vector<double> controlled(s.coeffs.begin(), s.coeffs.begin() + n_modes);
  s.problem = build_moment_problem(c, ctx.cfg.bc, s.eigs, controlled, ctx.cfg.horizon, taper);
  s.family = m.timed("biorthogonal", [&] {
    return build_biorthogonal(s.problem.exponents, ctx.cfg.horizon, ctx.precision, ctx.cfg.tolerances);
  });
  s.control = m.timed("synthesis", [&] { return synthesize_control(s.problem, s.family, ctx.cfg.tolerances); });
  return s;
}

int cmd_control(const Context& ctx, const ControlArgs& a, RunManifest& m) {
  const InitialDataSpec spec = parse_initial_spec(a.init);
  const int n = resolve_modes(ctx, a.n_modes);
  const int taper = resolve_taper(ctx, a.taper);
  ControlSignal control;
  if (spec.kind == InitialDataSpec::Kind::Zero) {
    control = zero_control(ctx.cfg.horizon);
    write_control_csv(control, m.output("control.csv"));
    std::cout << "control: zero initial data, h = 0\n";
    return 0;
  }
  const Synthesis s = synthesize(ctx, spec, n, taper, 0, m);
  write_control_csv(s.control, m.output("control.csv"));
  write_moments_json(s.problem, s.family, s.control, m.output("moments.json"));
  std::cout << "control: N=" << n << " taper=" << taper << " max residual " << s.control.max_residual
            << ", Gram condition " << s.family.gram_condition << ", ||h|| " << s.control.l2_norm << '\n';
  return 0;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string init = "mode:1";
  std::string control = "synth";
  std::string method = "both";
  int n_modes = 0;
  int taper = -1;
  int galerkin_modes = 0;  // 0: n_modes + 24
  int steps = 4000;
  int nx = 256;
  int nt = 4096;
  int store_every = 16;
};

int cmd_simulate(const Context& ctx, const SimulateArgs& a, RunManifest& m) {
  if (a.control != "synth" && a.control != "none") throw ValidationError("--control must be synth or none");
  if (a.method != "galerkin" && a.method != "fd" && a.method != "both") {
    throw ValidationError("--method must be galerkin, fd or both");
  }
  const auto& c = ctx.cfg.coefficients;
  const InitialDataSpec spec = parse_initial_spec(a.init);
  const int n = resolve_modes(ctx, a.n_modes);
  const int taper = resolve_taper(ctx, a.taper);
  const int n_gal = a.galerkin_modes > 0 ? a.galerkin_modes : n + 24;
  if (n_gal < n + taper) throw ValidationError("--galerkin-modes must be at least n_modes + taper");

  Synthesis s;
  InputSignal h;
  if (a.control == "synth" && spec.kind != InitialDataSpec::Kind::Zero) {
    s = synthesize(ctx, spec, n, taper, n_gal - n, m);
    h = input_from(s.control);
    write_control_csv(s.control, m.output("control.csv"));
  } else {
    const int total = std::max(n_gal, spec.highest_mode());
    s.eigs = m.timed("eigenpairs", [&] { return eigenpairs(c, ctx.cfg.bc, total, ctx.cfg.tolerances); });
    s.y0 = build_initial_state(c, spec, s.eigs);
    s.coeffs = project_initial_data(c, s.y0, s.eigs);
  }

  json j;
  j["variant"] = std::string(to_string(ctx.cfg.bc));
  j["horizon"] = ctx.cfg.horizon;
  j["control"] = a.control;
  j["initial_energy"] = s.y0.energy_H;
  const std::vector<Eigenpair> tracked(s.eigs.begin(), s.eigs.begin() + std::min<std::size_t>(s.eigs.size(), n));
  if (a.method != "fd") {
    GalerkinOptions opt{a.steps, a.store_every};
    const SimulationResult r = m.timed("galerkin", [&] {
      return simulate_galerkin(c, s.eigs, s.coeffs, h, ctx.cfg.horizon, opt);
    });
    write_trajectory_csv(r, m.output("trajectory.csv"));
    if (a.method == "galerkin") write_state_csv(r.terminal, m.output("terminal.csv"));
    j["galerkin"] = {{"modes", s.eigs.size()},
                     {"steps", r.steps},
                     {"terminal_energy", r.terminal.energy_H},
                     {"terminal_z", r.terminal.z}};
  }
  if (a.method != "galerkin") {
    FdOptions opt{a.nx, a.nt, a.store_every};
    const SimulationResult r = m.timed("fd", [&] {
      return simulate_fd(c, ctx.cfg.bc, s.y0, h, ctx.cfg.horizon, opt, tracked);
    });
    for (const auto& w : r.warnings) m.warn(w);
    write_trajectory_csv(r, m.output("trajectory_fd.csv"));
    write_state_csv(r.terminal, m.output("terminal.csv"));
    j["fd"] = {{"nx", a.nx},
               {"nt", a.nt},
               {"terminal_energy", r.terminal.energy_H},
               {"terminal_z", r.terminal.z},
               {"tail_energy", r.tail_energy},
               {"interface_residual", r.interface_residual}};
  }
  write_json(j, m.output("simulation.json"));
  std::cout << "simulate: " << j.dump() << '\n';
  return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string init = "mode:1";
  int n_modes = 0;
  int taper = -1;
  int nx = 256;
  int nt = 4096;
  int steps = 4000;
};

int cmd_verify(const Context& ctx, const VerifyArgs& a, RunManifest& m) {
  const InitialDataSpec spec = parse_initial_spec(a.init);
  VerifyOptions opt;
  opt.precision = ctx.precision;
  opt.taper = resolve_taper(ctx, a.taper);
  opt.fd.nx = a.nx;
  opt.fd.nt = a.nt;
  opt.galerkin.steps = a.steps;
  const int n = resolve_modes(ctx, a.n_modes);
  const VerificationReport r = m.timed("verify", [&] {
    return verify_null_control(ctx.cfg.coefficients, ctx.cfg.bc, spec, ctx.cfg.horizon, n, opt, ctx.cfg.tolerances);
  });
  json j;
  j["variant"] = std::string(to_string(r.variant));
  j["horizon"] = r.horizon;
  j["n_modes"] = r.n_modes;
  j["taper"] = opt.taper;
  j["n_galerkin"] = r.n_galerkin;
  j["initial_energy"] = r.initial_energy;
  j["modal_terminal_energy"] = r.modal_terminal_energy;
  j["modal_terminal_energy_fd"] = r.modal_terminal_energy_fd;
  j["galerkin_tail_energy"] = r.galerkin_tail_energy;
  j["initial_tail_energy"] = r.initial_tail_energy;
  j["tail_bound"] = r.tail_bound;
  j["fd_terminal_energy"] = r.fd_terminal_energy;
  j["baseline_terminal_energy"] = r.baseline_terminal_energy;
  j["baseline_ratio"] = r.baseline_ratio;
  j["max_moment_residual"] = r.max_moment_residual;
  j["gram_condition"] = r.gram_condition;
  j["control_l2_norm"] = r.control_l2_norm;
  j["modal_pass"] = r.modal_pass;
  j["fd_pass"] = r.fd_pass;
  j["pass"] = r.pass();
  write_json(j, m.output("verification.json"));
  std::cout << "verify: " << (r.pass() ? "PASS" : "FAIL") << " modal " << r.modal_terminal_energy << " fd "
            << r.fd_terminal_energy << " (bound " << 10.0 * r.tail_bound << ") baseline ratio " << r.baseline_ratio
            << '\n';
  if (!r.pass()) throw CertificationError("verify: null-control verification failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybridheat: spectral analysis and boundary null control of two rods joined by a point mass"};
  app.set_version_flag("--version", std::string(HYBRIDHEAT_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "problem configuration (YAML)");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomised suites")->capture_default_str();
  app.add_option("--precision", g.precision, "moment-problem arithmetic")
      ->check(CLI::IsMember({"double", "extended"}))
      ->capture_default_str();
  app.add_option("--variant", g.variant, "boundary control variant, overrides the config")
      ->check(CLI::IsMember({"dirichlet", "neumann"}));

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, auxiliary spectra and certification");
  spectrum->add_option("--n-max", sa.n_max, "number of eigenvalues")->capture_default_str();
  spectrum->add_option("--eigenfunctions", sa.eigenfunctions, "write the first K eigenfunctions")
      ->capture_default_str();

  GapArgs ga;
  auto* gap = app.add_subcommand("gap-report", "gap and interpolation certificates, optionally over a random corpus");
  gap->add_option("--n-max", ga.n_max, "highest index checked")->capture_default_str();
  gap->add_option("--random", ga.random, "additional randomly perturbed coefficient sets")->capture_default_str();
  gap->add_option("--amplitude", ga.amplitude, "relative perturbation size")->capture_default_str();

  ControlArgs ca;
  auto* control = app.add_subcommand("control", "synthesise the truncated null control");
  control->add_option("--init", ca.init, "initial data: zero | mode:K | modes:K1,K2 | expr:U;V;Z | file:PATH")
      ->capture_default_str();
  control->add_option("--n-modes", ca.n_modes, "controlled modes (default: config)");
  control->add_option("--taper", ca.taper, "endpoint conditions on the control (default: config)");

  SimulateArgs ma;
  auto* simulate = app.add_subcommand("simulate", "evolve the system with or without the synthesised control");
  simulate->add_option("--init", ma.init, "initial data spec")->capture_default_str();
  simulate->add_option("--control", ma.control, "synth | none")->capture_default_str();
  simulate->add_option("--method", ma.method, "galerkin | fd | both")->capture_default_str();
  simulate->add_option("--n-modes", ma.n_modes, "controlled modes (default: config)");
  simulate->add_option("--taper", ma.taper, "endpoint conditions on the control (default: config)");
  simulate->add_option("--galerkin-modes", ma.galerkin_modes, "modes carried by the Galerkin run");
  simulate->add_option("--steps", ma.steps, "Galerkin time steps")->capture_default_str();
  simulate->add_option("--nx", ma.nx, "finite-difference cells per rod")->capture_default_str();
  simulate->add_option("--nt", ma.nt, "finite-difference time steps")->capture_default_str();
  simulate->add_option("--store-every", ma.store_every, "trajectory stride")->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "synthesise, simulate and check the null-control claim");
  verify->add_option("--init", va.init, "initial data spec")->capture_default_str();
  verify->add_option("--n-modes", va.n_modes, "controlled modes (default: config)");
  verify->add_option("--taper", va.taper, "endpoint conditions on the control (default: config)");
  verify->add_option("--nx", va.nx, "finite-difference cells per rod")->capture_default_str();
  verify->add_option("--nt", va.nt, "finite-difference time steps")->capture_default_str();
  verify->add_option("--steps", va.steps, "Galerkin time steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::vector<std::string> args(argv, argv + argc);
  std::optional<RunManifest> manifest;
  try {
    manifest.emplace(g, sub->get_name(), args);
  } catch (const std::exception& e) {
    std::cerr << "hybridheat: error: cannot create output directory: " << e.what() << '\n';
    return 2;
  }

  int code = 0;
  std::optional<json> error;
  try {
    const Context ctx = load_context(g, *manifest);
    if (sub == spectrum) code = cmd_spectrum(ctx, sa, *manifest);
    else if (sub == gap) code = cmd_gap_report(ctx, ga, *manifest);
    else if (sub == control) code = cmd_control(ctx, ca, *manifest);
    else if (sub == simulate) code = cmd_simulate(ctx, ma, *manifest);
    else code = cmd_verify(ctx, va, *manifest);
  } catch (const Error& e) {
    code = exit_code(e.kind());
    error = error_record(e.kind(), e.what(), &e);
    std::cerr << "hybridheat: " << kind_name(e.kind()) << " error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    code = 1;
    error = error_record(ErrorKind::Internal, e.what(), &e);
    std::cerr << "hybridheat: unexpected error: " << e.what() << '\n';
  }
  try {
    manifest->finalize(code, error);
  } catch (const std::exception& e) {
    std::cerr << "hybridheat: error: cannot finalise output directory: " << e.what() << '\n';
    if (code == 0) code = 1;
  }
  return code;
}
