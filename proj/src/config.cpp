#include "hybridheat/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "hybridheat/errors.hpp"

namespace hybridheat {

std::string_view to_string(BcVariant v) {
  return v == BcVariant::DirichletControl ? "dirichlet" : "neumann";
}

BcVariant parse_bc_variant(std::string_view s) {
  if (s == "dirichlet") return BcVariant::DirichletControl;
  if (s == "neumann") return BcVariant::NeumannControl;
  throw ValidationError("bc: expected 'dirichlet' or 'neumann', got '" + std::string(s) + "'");
}

namespace {

constexpr std::size_t kMinTablePoints = 64;

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (node.IsDefined() && !node.Mark().is_null()) {
      os << ":" << node.Mark().line + 1 << ":" << node.Mark().column + 1;
    }
    os << ": " << field << ": " << msg;
    throw ValidationError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
  }

  void reject_unknown(const YAML::Node& node, const std::string& field,
                      std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
  }

  YAML::Node child(const YAML::Node& node, const char* key, const std::string& field) const {
    YAML::Node c = node[key];
    if (!c) fail(node, field, "missing field");
    return c;
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    double v = 0.0;
    if (node.Tag() == "!" || !YAML::convert<double>::decode(node, v)) {
      fail(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
    if (!std::isfinite(v)) fail(node, field, "expected a finite number");
    return v;
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail(node, field, "expected a sequence of numbers");
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
      out.push_back(number(node[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  CoefficientFunction coefficient(const YAML::Node& node, const std::string& field, Side side) const {
    if (node.IsScalar()) {
      double v = 0.0;
      if (node.Tag() != "!" && YAML::convert<double>::decode(node, v)) {
        if (!std::isfinite(v)) fail(node, field, "expected a finite number");
        return CoefficientFunction(v);
      }
      try {
        return CoefficientFunction::parse(node.Scalar());
      } catch (const ValidationError& e) {
        fail(node, field, e.what());
      }
    }
    if (node.IsMap()) {
      reject_unknown(node, field, {"x", "values"});
      CoefficientTable t;
      t.x = numbers(child(node, "x", field + ".x"), field + ".x");
      t.values = numbers(child(node, "values", field + ".values"), field + ".values");
      if (t.x.size() != t.values.size()) fail(node, field, "x and values differ in length");
      if (t.x.size() < kMinTablePoints) {
        fail(node, field, "sampled table needs at least " + std::to_string(kMinTablePoints) + " points");
      }
      const Interval iv = rod_interval(side);
      if (std::abs(t.x.front() - iv.lo) > 1e-12 || std::abs(t.x.back() - iv.hi) > 1e-12) {
        std::ostringstream os;
        os << "table must span [" << iv.lo << ", " << iv.hi << "]";
        fail(node, field, os.str());
      }
      try {
        return CoefficientFunction(std::move(t));
      } catch (const ValidationError& e) {
        fail(node, field, e.what());
      }
    }
    fail(node, field, "expected a number, an expression string, or a {x, values} table");
  }

 private:
  std::string origin_;
};

}  // namespace

LoadedConfig parse_config(std::string_view text, std::string_view origin) {
  Reader r{std::string(origin)};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": parse error: " << e.msg;
    throw ValidationError(os.str());
  }
  r.require_map(root, "<root>");
  r.reject_unknown(root, "", {"rods", "mass", "bc", "horizon", "n_modes", "taper", "tolerances"});

  ProblemConfig cfg;
  const YAML::Node rods = r.child(root, "rods", "rods");
  r.require_map(rods, "rods");
  r.reject_unknown(rods, "rods", {"left", "right"});
  for (Side side : {Side::Left, Side::Right}) {
    const char* name = side == Side::Left ? "left" : "right";
    const std::string base = std::string("rods.") + name;
    const YAML::Node rod = r.child(rods, name, base);
    r.require_map(rod, base);
    r.reject_unknown(rod, base, {"rho", "sigma", "q"});
    auto rho = r.coefficient(r.child(rod, "rho", base + ".rho"), base + ".rho", side);
    auto sigma = r.coefficient(r.child(rod, "sigma", base + ".sigma"), base + ".sigma", side);
    auto q = r.coefficient(r.child(rod, "q", base + ".q"), base + ".q", side);
    if (side == Side::Left) {
      cfg.coefficients.rho1 = rho;
      cfg.coefficients.sigma1 = sigma;
      cfg.coefficients.q1 = q;
    } else {
      cfg.coefficients.rho2 = rho;
      cfg.coefficients.sigma2 = sigma;
      cfg.coefficients.q2 = q;
    }
  }
  cfg.coefficients.mass = r.number(r.child(root, "mass", "mass"), "mass");

  const YAML::Node bc = r.child(root, "bc", "bc");
  try {
    cfg.bc = parse_bc_variant(bc.as<std::string>());
  } catch (const std::exception& e) {
    r.fail(bc, "bc", "expected 'dirichlet' or 'neumann'");
  }

  const YAML::Node horizon = r.child(root, "horizon", "horizon");
  cfg.horizon = r.number(horizon, "horizon");
  if (!(cfg.horizon > 0.0)) r.fail(horizon, "horizon", "must be positive");

  const YAML::Node modes = r.child(root, "n_modes", "n_modes");
  const double n = r.number(modes, "n_modes");
  if (n != std::floor(n) || n < 1 || n > 1e6) r.fail(modes, "n_modes", "must be a positive integer");
  cfg.n_modes = static_cast<int>(n);

  if (const YAML::Node taper = root["taper"]) {
    const double k = r.number(taper, "taper");
    if (k != std::floor(k) || k < 0 || k > 8) r.fail(taper, "taper", "must be an integer in [0, 8]");
    cfg.taper = static_cast<int>(k);
  }

  if (const YAML::Node tol = root["tolerances"]) {
    r.require_map(tol, "tolerances");
    r.reject_unknown(tol, "tolerances",
                     {"ode_abs", "ode_rel", "root_rel", "coincidence", "pole", "gram_ceiling",
                      "gram_ceiling_extended", "biorthogonal_residual", "moment_residual"});
    auto read = [&](const char* key, double& slot) {
      if (const YAML::Node v = tol[key]) {
        const std::string field = std::string("tolerances.") + key;
        slot = r.number(v, field);
        if (!(slot > 0.0)) r.fail(v, field, "must be positive");
      }
    };
    Tolerances& t = cfg.tolerances;
    read("ode_abs", t.ode_abs);
    read("ode_rel", t.ode_rel);
    read("root_rel", t.root_rel);
    read("coincidence", t.coincidence);
    read("pole", t.pole);
    read("gram_ceiling", t.gram_ceiling);
    read("gram_ceiling_extended", t.gram_ceiling_extended);
    read("biorthogonal_residual", t.biorthogonal_residual);
    read("moment_residual", t.moment_residual);
  }

  LoadedConfig out{cfg, {}};
  try {
    out.warnings = validate(out.config.coefficients);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

void emit_coefficient(YAML::Emitter& out, const CoefficientFunction& f) {
  if (f.is_table()) {
    out << YAML::BeginMap;
    out << YAML::Key << "x" << YAML::Value << YAML::Flow << f.table().x;
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << f.table().values;
    out << YAML::EndMap;
  } else if (f.is_expression()) {
    out << YAML::DoubleQuoted << f.expression_source();
  } else {
    out << f.constant();
  }
}

}  // namespace

std::string dump_config(const ProblemConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  const CoefficientSet& c = cfg.coefficients;
  out << YAML::BeginMap;
  out << YAML::Key << "rods" << YAML::Value << YAML::BeginMap;
  for (Side side : {Side::Left, Side::Right}) {
    out << YAML::Key << (side == Side::Left ? "left" : "right") << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "rho" << YAML::Value;
    emit_coefficient(out, c.rho(side));
    out << YAML::Key << "sigma" << YAML::Value;
    emit_coefficient(out, c.sigma(side));
    out << YAML::Key << "q" << YAML::Value;
    emit_coefficient(out, c.q(side));
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "mass" << YAML::Value << c.mass;
  out << YAML::Key << "bc" << YAML::Value << std::string(to_string(cfg.bc));
  out << YAML::Key << "horizon" << YAML::Value << cfg.horizon;
  out << YAML::Key << "n_modes" << YAML::Value << cfg.n_modes;
  out << YAML::Key << "taper" << YAML::Value << cfg.taper;
  const Tolerances& t = cfg.tolerances;
  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "ode_abs" << YAML::Value << t.ode_abs;
  out << YAML::Key << "ode_rel" << YAML::Value << t.ode_rel;
  out << YAML::Key << "root_rel" << YAML::Value << t.root_rel;
  out << YAML::Key << "coincidence" << YAML::Value << t.coincidence;
  out << YAML::Key << "pole" << YAML::Value << t.pole;
  out << YAML::Key << "gram_ceiling" << YAML::Value << t.gram_ceiling;
  out << YAML::Key << "gram_ceiling_extended" << YAML::Value << t.gram_ceiling_extended;
  out << YAML::Key << "biorthogonal_residual" << YAML::Value << t.biorthogonal_residual;
  out << YAML::Key << "moment_residual" << YAML::Value << t.moment_residual;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_config(const ProblemConfig& cfg, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError(path.string() + ": cannot write config file");
  os << dump_config(cfg);
}

}  // namespace hybridheat
