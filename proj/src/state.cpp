#include "hybridheat/state.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "hybridheat/expression.hpp"
#include "hybridheat/quadrature.hpp"
#include "hybridheat/spline.hpp"

namespace hybridheat {

std::vector<double> uniform_rod_grid(Side side, int points) {
  if (points < 2) throw ValidationError("grid needs at least two points");
  const Interval iv = rod_interval(side);
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = iv.lo + (iv.hi - iv.lo) * i / (points - 1);
  g.back() = iv.hi;
  return g;
}

namespace {

double integrate_samples(const std::vector<double>& f, double h) {
  return f.size() % 2 == 1 ? simpson(f, h) : trapezoid(f, h);
}

double rod_energy(const CoefficientFunction& rho, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
  std::vector<double> f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = rho(x[i]) * y[i] * y[i];
  return integrate_samples(f, (x.back() - x.front()) / static_cast<double>(x.size() - 1));
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1) {
    throw ValidationError("initial data: invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

double energy_H(const CoefficientSet& c, const StateSnapshot& s) {
  return rod_energy(c.rho1, s.x_left, s.u) + rod_energy(c.rho2, s.x_right, s.v) + c.mass * s.z * s.z;
}

StateSnapshot zero_state(int grid_points) {
  StateSnapshot s;
  s.x_left = uniform_rod_grid(Side::Left, grid_points);
  s.x_right = uniform_rod_grid(Side::Right, grid_points);
  s.u.assign(s.x_left.size(), 0.0);
  s.v.assign(s.x_right.size(), 0.0);
  return s;
}

StateSnapshot state_from_eigenpair(const Eigenpair& e) {
  StateSnapshot s;
  s.x_left = e.x_left;
  s.u = e.u_part;
  s.x_right = e.x_right;
  s.v = e.v_part;
  s.z = e.z;
  s.energy_H = e.norm_H * e.norm_H;
  return s;
}

int InitialDataSpec::highest_mode() const {
  int m = 0;
  for (int k : modes) m = std::max(m, k);
  return m;
}

InitialDataSpec parse_initial_spec(std::string_view spec) {
  InitialDataSpec out;
  if (spec == "zero") return out;
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("initial data: expected zero, mode:K, modes:K1,K2,..., expr:U;V;Z or file:PATH");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);
  if (kind == "mode") {
    out.kind = InitialDataSpec::Kind::Modes;
    out.modes.push_back(parse_int(rest, "mode index"));
  } else if (kind == "modes") {
    out.kind = InitialDataSpec::Kind::Modes;
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto tok = rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      out.modes.push_back(parse_int(tok, "mode index"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  } else if (kind == "expr") {
    out.kind = InitialDataSpec::Kind::Expressions;
    const auto a = rest.find(';');
    const auto b = a == std::string_view::npos ? a : rest.find(';', a + 1);
    if (b == std::string_view::npos) throw ValidationError("initial data: expr needs three ';'-separated parts");
    out.u_expr = std::string(rest.substr(0, a));
    out.v_expr = std::string(rest.substr(a + 1, b - a - 1));
    const Expression z = Expression::parse(rest.substr(b + 1));
    if (!z.is_constant()) throw ValidationError("initial data: mass value must be a constant");
    out.z = z(0.0);
    Expression::parse(out.u_expr);
    Expression::parse(out.v_expr);
  } else if (kind == "file") {
    out.kind = InitialDataSpec::Kind::File;
    out.path = std::string(rest);
  } else {
    throw ValidationError("initial data: unknown kind '" + std::string(kind) + "'");
  }
  return out;
}

std::vector<double> resample(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& at) {
  if (x.size() != y.size() || x.size() < 3) throw ValidationError("resample: mismatched or too short samples");
  const std::size_t n = x.size() - 1;
  const std::size_t m = at.size() - 1;
  // Uniform grids whose nodes nest: copy exactly.
  if (m > 0 && n % m == 0 && at.front() == x.front() && at.back() == x.back()) {
    const std::size_t stride = n / m;
    std::vector<double> out(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) out[i] = y[i * stride];
    return out;
  }
  const NaturalCubicSpline s(x, y);
  std::vector<double> out(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) out[i] = s(at[i]);
  return out;
}

StateSnapshot build_initial_state(const CoefficientSet& c, const InitialDataSpec& spec,
                                  const std::vector<Eigenpair>& eigs, int grid_points) {
  StateSnapshot s = zero_state(grid_points);
  switch (spec.kind) {
    case InitialDataSpec::Kind::Zero:
      break;
    case InitialDataSpec::Kind::Modes: {
      for (int k : spec.modes) {
        if (k > static_cast<int>(eigs.size())) {
          throw ValidationError("initial data: mode " + std::to_string(k) + " exceeds the computed eigenpairs");
        }
        const Eigenpair& e = eigs[static_cast<std::size_t>(k - 1)];
        const auto u = resample(e.x_left, e.u_part, s.x_left);
        const auto v = resample(e.x_right, e.v_part, s.x_right);
        for (std::size_t i = 0; i < u.size(); ++i) s.u[i] += u[i];
        for (std::size_t i = 0; i < v.size(); ++i) s.v[i] += v[i];
        s.z += e.z;
      }
      const double norm = std::sqrt(energy_H(c, s));
      if (spec.modes.size() > 1 && norm > 0.0) {
        for (double& y : s.u) y /= norm;
        for (double& y : s.v) y /= norm;
        s.z /= norm;
      }
      break;
    }
    case InitialDataSpec::Kind::Expressions: {
      const Expression u = Expression::parse(spec.u_expr);
      const Expression v = Expression::parse(spec.v_expr);
      for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = u(s.x_left[i]);
      for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = v(s.x_right[i]);
      s.z = spec.z;
      break;
    }
    case InitialDataSpec::Kind::File: {
      std::ifstream in(spec.path);
      if (!in) throw ValidationError(spec.path + ": cannot open initial data file");
      std::string line;
      std::getline(in, line);
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pieces;
      int lineno = 1;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string xs, vs, piece;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, vs, ',') || !std::getline(ss, piece)) {
          throw ValidationError(spec.path + ":" + std::to_string(lineno) + ": expected x,value,piece");
        }
        try {
          pieces[piece].first.push_back(std::stod(xs));
          pieces[piece].second.push_back(std::stod(vs));
        } catch (const std::exception&) {
          throw ValidationError(spec.path + ":" + std::to_string(lineno) + ": malformed number");
        }
      }
      if (!pieces.count("u") || !pieces.count("v")) throw ValidationError(spec.path + ": needs u and v pieces");
      s.u = resample(pieces["u"].first, pieces["u"].second, s.x_left);
      s.v = resample(pieces["v"].first, pieces["v"].second, s.x_right);
      s.z = pieces.count("z") ? pieces["z"].second.front() : s.u.back();
      break;
    }
  }
  s.energy_H = energy_H(c, s);
  return s;
}

void write_state_csv(const StateSnapshot& s, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write state");
  os << "x,value,piece\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.x_left.size(); ++i) os << s.x_left[i] << ',' << s.u[i] << ",u\n";
  for (std::size_t i = 0; i < s.x_right.size(); ++i) os << s.x_right[i] << ',' << s.v[i] << ",v\n";
  os << 0.0 << ',' << s.z << ",z\n";
}

}  // namespace hybridheat
