#include "prolong/config.hpp"

#include "prolong/exceptions.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace prolong {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double positive(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!(v > 0)) throw ConfigError(where + ": must be positive");
  return v;
}

Eigen::VectorXd parse_point(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(where + ": expected an array of length " + std::to_string(n));
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    x[i] = j[i].get<double>();
  }
  return x;
}

MultiPoly parse_poly(const json& j, int n, int degree, const std::string& where) {
  const int expected = static_cast<int>(MonomialBasis::count(n, degree));
  if (!j.is_array() || static_cast<int>(j.size()) != expected)
    throw ConfigError(where + ": expected " + std::to_string(expected) +
                      " dense coefficients (graded order, lexicographically descending "
                      "within each degree)");
  Eigen::VectorXd c(expected);
  for (int i = 0; i < expected; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    c[i] = j[i].get<double>();
  }
  return MultiPoly(n, degree, c);
}

} // namespace

int RunConfig::derived_oracle_degree() const {
  if (oracle_degree >= 0) return oracle_degree;
  if (chart.family == MetricChart::Family::Flat &&
      module.family == ModuleSpec::Family::Scalar)
    return 2 * (module.r - 1);
  return 2;
}

RunConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"algebra", "module", "metric", "lower_order", "run", "oracle", "output"});

  RunConfig cfg;

  // algebra
  if (!root.contains("algebra")) throw ConfigError("config: missing 'algebra'");
  reject_unknown(root["algebra"], "algebra", {"n"});
  if (!root["algebra"].contains("n") || !root["algebra"]["n"].is_number_integer())
    throw ConfigError("algebra.n: expected an integer");
  cfg.n = root["algebra"]["n"].get<int>();
  if (cfg.n < 2) throw ConfigError("algebra.n: must be >= 2");

  // module
  if (!root.contains("module")) throw ConfigError("config: missing 'module'");
  reject_unknown(root["module"], "module", {"family", "r"});
  const std::string fam = root["module"].value("family", "scalar");
  if (fam == "scalar") {
    const int r = root["module"].value("r", 2);
    if (r < 1) throw ConfigError("module.r: must be >= 1");
    cfg.module = ModuleSpec::scalar(r);
  } else if (fam == "adjoint") {
    if (root["module"].contains("r") && root["module"]["r"].get<int>() != 1)
      throw ConfigError("module.r: the adjoint family has r = 1");
    cfg.module = ModuleSpec::adjoint();
    if (cfg.n < 3) throw ConfigError("module: the adjoint family needs n >= 3");
  } else {
    throw ConfigError("module.family: expected 'scalar' or 'adjoint'");
  }

  // metric
  if (!root.contains("metric")) throw ConfigError("config: missing 'metric'");
  reject_unknown(root["metric"], "metric", {"family", "params", "domain"});
  const std::string mfam = root["metric"].value("family", "flat");
  json params = root["metric"].value("params", json::object());
  double domain_radius = 0.0;
  if (root["metric"].contains("domain")) {
    reject_unknown(root["metric"]["domain"], "metric.domain", {"radius"});
    domain_radius = positive(root["metric"]["domain"]["radius"], "metric.domain.radius");
  }
  if (mfam == "flat") {
    reject_unknown(params, "metric.params", {});
    cfg.chart = flat_chart(cfg.n);
    if (domain_radius > 0) cfg.chart.domain_radius = domain_radius;
  } else if (mfam == "sphere" || mfam == "hyperbolic") {
    reject_unknown(params, "metric.params", {"radius"});
    const double rho = params.contains("radius")
                           ? positive(params["radius"], "metric.params.radius")
                           : 1.0;
    cfg.chart = mfam == "sphere" ? sphere_chart(cfg.n, rho) : hyperbolic_chart(cfg.n, rho);
    if (domain_radius > 0) cfg.chart.domain_radius = std::min(cfg.chart.domain_radius,
                                                              domain_radius);
  } else if (mfam == "conformal_poly") {
    reject_unknown(params, "metric.params", {"degree", "coefficients"});
    if (!params.contains("degree") || !params.contains("coefficients"))
      throw ConfigError("metric.params: conformal_poly needs 'degree' and 'coefficients'");
    const int deg = params["degree"].get<int>();
    if (deg < 0) throw ConfigError("metric.params.degree: must be >= 0");
    MultiPoly phi = parse_poly(params["coefficients"], cfg.n, deg, "metric.params.coefficients");
    cfg.chart = conformal_poly_chart(cfg.n, phi, domain_radius > 0 ? domain_radius : 10.0);
  } else {
    throw ConfigError("metric.family: expected flat, conformal_poly, sphere, or hyperbolic");
  }

  if (cfg.chart.family != MetricChart::Family::Flat &&
      !(cfg.module.family == ModuleSpec::Family::Scalar && cfg.module.r == 2))
    throw ConfigError("config: curved metrics require the scalar r = 2 module");

  // lower_order (optional)
  cfg.lower_order = LowerOrderTensor::zero(cfg.n);
  if (root.contains("lower_order")) {
    reject_unknown(root["lower_order"], "lower_order", {"degree", "components", "tracefree"});
    const json& lo = root["lower_order"];
    if (!lo.contains("degree") || !lo.contains("components"))
      throw ConfigError("lower_order: needs 'degree' and 'components'");
    const int deg = lo["degree"].get<int>();
    const json& comps = lo["components"];
    const int expected = cfg.n * (cfg.n + 1) / 2;
    if (!comps.is_array() || static_cast<int>(comps.size()) != expected)
      throw ConfigError("lower_order.components: expected " + std::to_string(expected) +
                        " upper-triangle polynomial coefficient arrays");
    std::vector<MultiPoly> upper;
    for (int i = 0; i < expected; ++i)
      upper.push_back(parse_poly(comps[i], cfg.n, deg, "lower_order.components"));
    cfg.lower_order =
        LowerOrderTensor::from_components(cfg.n, upper, lo.value("tracefree", false));
    cfg.has_lower_order = true;
  }

  // run
  cfg.basepoint = Eigen::VectorXd::Zero(cfg.n);
  cfg.grid_center = Eigen::VectorXd::Zero(cfg.n);
  if (root.contains("run")) {
    reject_unknown(root["run"], "run",
                   {"basepoint", "grid", "loops", "integrator_step", "seed", "tolerances"});
    const json& run = root["run"];
    if (run.contains("basepoint"))
      cfg.basepoint = parse_point(run["basepoint"], cfg.n, "run.basepoint");
    if (run.contains("grid")) {
      reject_unknown(run["grid"], "run.grid", {"center", "spacing", "points_per_axis"});
      if (run["grid"].contains("center"))
        cfg.grid_center = parse_point(run["grid"]["center"], cfg.n, "run.grid.center");
      if (run["grid"].contains("spacing"))
        cfg.grid_spacing = positive(run["grid"]["spacing"], "run.grid.spacing");
      if (run["grid"].contains("points_per_axis")) {
        cfg.grid_points = run["grid"]["points_per_axis"].get<int>();
        if (cfg.grid_points < 1 || cfg.grid_points % 2 == 0)
          throw ConfigError("run.grid.points_per_axis: must be odd and positive");
      }
    }
    if (run.contains("loops")) {
      reject_unknown(run["loops"], "run.loops", {"sides"});
      if (run["loops"].contains("sides")) {
        cfg.loop_sides.clear();
        for (const auto& s : run["loops"]["sides"])
          cfg.loop_sides.push_back(positive(s, "run.loops.sides"));
        if (cfg.loop_sides.empty()) throw ConfigError("run.loops.sides: must be nonempty");
      }
    }
    if (run.contains("integrator_step"))
      cfg.integrator_step = positive(run["integrator_step"], "run.integrator_step");
    if (run.contains("seed")) cfg.seed = run["seed"].get<std::uint64_t>();
    if (run.contains("tolerances")) {
      reject_unknown(run["tolerances"], "run.tolerances",
                     {"rank_rel", "holonomy_svd", "oracle_svd_rel", "oracle_gap", "residual",
                      "subspace", "einstein_residual"});
      const json& t = run["tolerances"];
      if (t.contains("rank_rel")) cfg.tol.rank_rel = positive(t["rank_rel"], "tolerances.rank_rel");
      if (t.contains("holonomy_svd"))
        cfg.tol.holonomy_svd = positive(t["holonomy_svd"], "tolerances.holonomy_svd");
      if (t.contains("oracle_svd_rel"))
        cfg.tol.oracle_svd_rel = positive(t["oracle_svd_rel"], "tolerances.oracle_svd_rel");
      if (t.contains("oracle_gap"))
        cfg.tol.oracle_gap = positive(t["oracle_gap"], "tolerances.oracle_gap");
      if (t.contains("residual")) cfg.tol.residual = positive(t["residual"], "tolerances.residual");
      if (t.contains("subspace")) cfg.tol.subspace = positive(t["subspace"], "tolerances.subspace");
      if (t.contains("einstein_residual"))
        cfg.tol.einstein_residual =
            positive(t["einstein_residual"], "tolerances.einstein_residual");
    }
  }

  // oracle
  if (root.contains("oracle")) {
    reject_unknown(root["oracle"], "oracle", {"degree", "samples"});
    if (root["oracle"].contains("degree")) {
      cfg.oracle_degree = root["oracle"]["degree"].get<int>();
      if (cfg.oracle_degree < 0) throw ConfigError("oracle.degree: must be >= 0");
    }
    if (root["oracle"].contains("samples")) {
      cfg.oracle_samples = root["oracle"]["samples"].get<int>();
      if (cfg.oracle_samples < 0) throw ConfigError("oracle.samples: must be >= 0");
    }
  }

  // output
  if (root.contains("output")) {
    reject_unknown(root["output"], "output", {"directory", "formats"});
    if (root["output"].contains("directory"))
      cfg.out_dir = root["output"]["directory"].get<std::string>();
    if (root["output"].contains("formats")) {
      cfg.formats.clear();
      for (const auto& f : root["output"]["formats"]) {
        const std::string s = f.get<std::string>();
        if (s != "json" && s != "csv")
          throw ConfigError("output.formats: expected 'json' or 'csv'");
        cfg.formats.push_back(s);
      }
    }
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  RunConfig cfg = parse_config_text(ss.str());
  apply_env_overrides(cfg);
  return cfg;
}

void apply_env_overrides(RunConfig& config) {
  auto apply = [](const char* name, double& target) {
    if (const char* v = std::getenv(name)) {
      char* end = nullptr;
      const double parsed = std::strtod(v, &end);
      if (end == v || !(parsed > 0))
        throw ConfigError(std::string("environment override ") + name +
                          ": expected a positive number");
      target = parsed;
    }
  };
  apply("PROLONG_TOL_RANK_REL", config.tol.rank_rel);
  apply("PROLONG_TOL_HOLONOMY_SVD", config.tol.holonomy_svd);
  apply("PROLONG_TOL_ORACLE_SVD_REL", config.tol.oracle_svd_rel);
  apply("PROLONG_TOL_ORACLE_GAP", config.tol.oracle_gap);
  apply("PROLONG_TOL_RESIDUAL", config.tol.residual);
  apply("PROLONG_TOL_SUBSPACE", config.tol.subspace);
  apply("PROLONG_TOL_EINSTEIN_RESIDUAL", config.tol.einstein_residual);
}

Json config_to_json(const RunConfig& c) {
  Json algebra = Json::object();
  algebra.set("n", Json::integer(c.n));

  Json module = Json::object();
  module.set("family",
             Json::text(c.module.family == ModuleSpec::Family::Scalar ? "scalar" : "adjoint"));
  module.set("r", Json::integer(c.module.r));

  Json metric = Json::object();
  metric.set("family", Json::text(c.chart.family_name()));
  Json params = Json::object();
  if (c.chart.family == MetricChart::Family::Sphere ||
      c.chart.family == MetricChart::Family::Hyperbolic)
    params.set("radius", Json::number(c.chart.radius));
  if (c.chart.family == MetricChart::Family::ConformalPoly) {
    params.set("degree", Json::integer(c.chart.phi_poly.degree()));
    params.set("coefficients", Json::vector(c.chart.phi_poly.coeffs()));
  }
  metric.set("params", std::move(params));
  if (c.chart.domain_radius > 0)
    metric.set("domain", Json::object().set("radius", Json::number(c.chart.domain_radius)));

  Json tolerances = Json::object();
  tolerances.set("rank_rel", Json::number(c.tol.rank_rel));
  tolerances.set("holonomy_svd", Json::number(c.tol.holonomy_svd));
  tolerances.set("oracle_svd_rel", Json::number(c.tol.oracle_svd_rel));
  tolerances.set("oracle_gap", Json::number(c.tol.oracle_gap));
  tolerances.set("residual", Json::number(c.tol.residual));
  tolerances.set("subspace", Json::number(c.tol.subspace));
  tolerances.set("einstein_residual", Json::number(c.tol.einstein_residual));

  Json loops = Json::object();
  Json sides = Json::array();
  for (double s : c.loop_sides) sides.push(Json::number(s));
  loops.set("sides", std::move(sides));

  Json grid = Json::object();
  grid.set("center", Json::vector(c.grid_center));
  grid.set("spacing", Json::number(c.grid_spacing));
  grid.set("points_per_axis", Json::integer(c.grid_points));

  Json run = Json::object();
  run.set("basepoint", Json::vector(c.basepoint));
  run.set("grid", std::move(grid));
  run.set("loops", std::move(loops));
  run.set("integrator_step", Json::number(c.integrator_step));
  run.set("seed", Json::integer(static_cast<long long>(c.seed)));
  run.set("tolerances", std::move(tolerances));

  Json oracle = Json::object();
  oracle.set("degree", Json::integer(c.derived_oracle_degree()));
  oracle.set("samples", Json::integer(c.oracle_samples));

  Json output = Json::object();
  output.set("directory", Json::text(c.out_dir));
  output.set("formats", Json::strings(c.formats));

  Json j = Json::object();
  j.set("algebra", std::move(algebra));
  j.set("module", std::move(module));
  j.set("metric", std::move(metric));
  if (c.has_lower_order) {
    Json lo = Json::object();
    lo.set("degree", Json::integer(c.lower_order.comps[0].degree()));
    Json comps = Json::array();
    for (const auto& p : c.lower_order.comps) comps.push(Json::vector(p.coeffs()));
    lo.set("components", std::move(comps));
    lo.set("projected_on_load", Json::boolean(c.lower_order.projected_on_load));
    j.set("lower_order", std::move(lo));
  }
  j.set("run", std::move(run));
  j.set("oracle", std::move(oracle));
  j.set("output", std::move(output));
  return j;
}

} // namespace prolong
