#include "prolong/cli.hpp"

#include "prolong/algebra.hpp"
#include "prolong/dimensions.hpp"
#include "prolong/exceptions.hpp"
#include "prolong/forms.hpp"
#include "prolong/hodge.hpp"
#include "prolong/linsolve.hpp"
#include "prolong/oracle.hpp"
#include "prolong/prolongation.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace prolong {

namespace {

OperatorTag tag_for_config(const RunConfig& cfg) {
  if (cfg.chart.family == MetricChart::Family::Flat) {
    if (cfg.module.family == ModuleSpec::Family::Adjoint)
      return OperatorTag::flat_conformal_killing(cfg.n);
    if (cfg.has_lower_order && !cfg.lower_order.is_zero() && cfg.module.r == 2)
      return OperatorTag::hessian_plus_a(cfg.chart, cfg.lower_order);
    return OperatorTag::flat_scalar_power(cfg.n, cfg.module.r);
  }
  return OperatorTag::hessian_plus_a(cfg.chart, cfg.lower_order);
}

ClosedSystem system_for_config(const RunConfig& cfg, const GradedModule& mod) {
  const bool a_zero = !cfg.has_lower_order || cfg.lower_order.is_zero();
  if (cfg.chart.family == MetricChart::Family::Flat && a_zero)
    return build_closed_system_flat(cfg.chart, mod);
  return build_closed_system_einstein(cfg.chart, mod, cfg.lower_order);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

} // namespace

Json convention_record() {
  Json c = Json::object();
  c.set("riemann",
        Json::text("R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_ke Gamma^e_lj - "
                   "Gamma^i_le Gamma^e_kj; Ric_jl = R^k_jkl; the round sphere has positive "
                   "scalar curvature n(n-1)/rho^2"));
  c.set("closed_system_top_row",
        Json::text("nabla_a h = (Ric_a^c phi_c + f div A_a + phi^c A_ac) / (n-1), fixed by "
                   "transport consistency of the sphere solutions"));
  c.set("frame", Json::text("section components taken in the conformal orthonormal frame "
                            "e_a = exp(-phi) d/dx_a; scalar components are frame independent"));
  c.set("monomial_order",
        Json::text("polynomial coefficients are dense over monomials ordered by total degree, "
                   "lexicographically descending within each degree"));
  c.set("module_coordinates",
        Json::text("module coordinates group the grading components in ascending eigenvalue "
                   "order, W_0 first; the standard module reads [f, phi_1..phi_n, h]"));
  return c;
}

Json cmd_algebra(const RunConfig& cfg, const std::string& out_dir) {
  const GradedLieAlgebra alg = build_algebra(cfg.n);
  const GradedModule mod = build_module(alg, cfg.module);

  Json report = Json::object();
  report.set("command", Json::text("algebra"));
  report.set("config", config_to_json(cfg));
  report.set("conventions", convention_record());

  Json bracket = Json::object();
  bracket.set("passed", Json::boolean(true));
  bracket.set("note", Json::text("grading, antisymmetry, and bracket relations verified at "
                                 "construction; failures raise invariant errors"));
  report.set("bracket_checks", std::move(bracket));

  Json dims = Json::object();
  dims.set("g_minus1", Json::integer(alg.dim_minus1()));
  dims.set("g_0", Json::integer(alg.dim_0()));
  dims.set("g_1", Json::integer(alg.dim_1()));
  dims.set("total", Json::integer(alg.total_dim()));
  report.set("algebra_dims", std::move(dims));

  report.set("dim_W", Json::integer(mod.dim));
  report.set("N", Json::integer(mod.N));
  Json comp_dims = Json::array();
  for (int d : mod.comp_dim) comp_dims.push(Json::integer(d));
  report.set("component_dims", std::move(comp_dims));

  Json hodge = Json::array();
  for (int k = 0; k <= 2; ++k) {
    const HodgeDecomposition dec = hodge_decompose(mod, k, cfg.tol.rank_rel);
    Json entry = Json::object();
    entry.set("k", Json::integer(k));
    entry.set("im_d", Json::integer(dec.im_d.cols()));
    entry.set("harmonic", Json::integer(dec.harmonic.cols()));
    entry.set("im_dstar", Json::integer(dec.im_dstar.cols()));
    entry.set("total", Json::integer(form_dim(mod, k)));
    hodge.push(std::move(entry));
  }
  report.set("hodge", std::move(hodge));

  report.set("H0_dim", Json::integer(hodge_decompose(mod, 0, cfg.tol.rank_rel).harmonic.cols()));
  report.set("H1_dim", Json::integer(hodge_decompose(mod, 1, cfg.tol.rank_rel).harmonic.cols()));

  Json mats = Json::object();
  mats.set("partial_0", Json::matrix(lie_differential(mod, 0)));
  mats.set("partial_1", Json::matrix(lie_differential(mod, 1)));
  mats.set("delta_star_1", Json::matrix(delta_star(mod, 1, cfg.tol.rank_rel)));
  mats.set("delta_star_2", Json::matrix(delta_star(mod, 2, cfg.tol.rank_rel)));
  report.set("matrices", std::move(mats));

  Json phi_ranks = Json::array();
  for (int i = 0; i <= mod.N; ++i)
    phi_ranks.push(Json::integer(numerical_rank(phi_map(mod, i), cfg.tol.rank_rel)));
  report.set("phi_ranks", std::move(phi_ranks));

  report.set("cartan_rank", Json::integer(cartan_product_projection(mod).rank));

  Json dim_table = Json::object();
  dim_table.set("constructed", Json::integer(mod.dim));
  dim_table.set("binomial_count",
                Json::raw_number(module_dimension(cfg.module, cfg.n).str()));
  if (cfg.module.family == ModuleSpec::Family::Scalar) {
    const BigInt factored = scalar_module_dimension_factored(cfg.n, cfg.module.r);
    dim_table.set("factored_formula", Json::raw_number(factored.str()));
    const bool agrees = factored == module_dimension(cfg.module, cfg.n);
    dim_table.set("factored_formula_agrees", Json::boolean(agrees));
    if (!agrees)
      dim_table.set("note", Json::text("the factored closed form disagrees with the direct "
                                        "count (known from r = 3 on); the count is "
                                        "authoritative and matches the constructed module"));
  } else {
    dim_table.set("killing_tensor_dimension",
                  Json::raw_number(killing_tensor_dimension(cfg.n, 1).str()));
  }
  report.set("dimension_table", std::move(dim_table));

  Json killing = Json::array();
  for (int n = 3; n <= 8; ++n) {
    Json row = Json::object();
    row.set("n", Json::integer(n));
    row.set("k", Json::integer(1));
    row.set("value", Json::raw_number(killing_tensor_dimension(n, 1).str()));
    row.set("expected", Json::integer((n + 1) * (n + 2) / 2));
    killing.push(std::move(row));
  }
  report.set("killing_dimension_audit", std::move(killing));

  write_text_file(join_path(out_dir, "algebra.json"), report.dump());
  return report;
}

Json cmd_prolong(const RunConfig& cfg, const std::string& out_dir) {
  const GradedLieAlgebra alg = build_algebra(cfg.n);
  const GradedModule mod = build_module(alg, cfg.module);
  const ClosedSystem system = system_for_config(cfg, mod);
  const OperatorTag tag = tag_for_config(cfg);

  TransportOptions opts;
  opts.step = cfg.integrator_step;

  const auto loops = coordinate_rectangle_loops(cfg.basepoint, cfg.loop_sides);
  const SolutionSpace space = solution_space(system, loops, opts, cfg.tol.holonomy_svd);

  // Step-halving error estimate on the first loop.
  TransportOptions est = opts;
  est.estimate_error = true;
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(mod.dim);
  probe[0] = 1.0;
  Polyline closed = loops.front();
  closed.push_back(closed.front());
  const TransportResult probe_res = transport(system, probe, closed, est);

  Json report = Json::object();
  report.set("command", Json::text("prolong"));
  report.set("config", config_to_json(cfg));
  report.set("conventions", convention_record());
  report.set("system", Json::text(system.provenance == ClosedSystem::Provenance::FlatZero
                                      ? "flat_zero"
                                      : "explicit_einstein"));
  report.set("dim_W", Json::integer(mod.dim));
  report.set("solution_dim", Json::integer(space.dim));
  report.set("holonomy_singular_values", Json::vector(space.singular_values));
  report.set("holonomy_threshold", Json::number(space.threshold));
  report.set("condition_warning", Json::boolean(space.condition_warning));
  report.set("loop_count", Json::integer(static_cast<long long>(loops.size())));
  report.set("transport_error_estimate", Json::number(probe_res.error_estimate));

  Json basis = Json::array();
  for (int c = 0; c < space.basis.cols(); ++c) basis.push(Json::vector(space.basis.col(c)));
  report.set("basis_initial_values", std::move(basis));

  // Reconstruct the first basis solution over the grid and tabulate the
  // finite-difference residual of the equivalent higher-order operator.
  if (space.dim > 0) {
    const Grid grid(cfg.grid_center, cfg.grid_spacing, cfg.grid_points);
    const ReconstructResult rec =
        reconstruct_and_check(system, space.basis.col(0), cfg.basepoint, grid, tag, opts);
    report.set("residual_max", Json::number(rec.max_residual));
    report.set("residual_nodes", Json::integer(rec.residual_nodes));

    bool want_csv = false;
    for (const auto& f : cfg.formats) want_csv |= (f == "csv");
    if (want_csv) {
      std::vector<std::string> header;
      for (int a = 0; a < cfg.n; ++a) header.push_back("x" + std::to_string(a + 1));
      header.push_back("residual");
      for (int j = 0; j <= mod.N; ++j) header.push_back("comp_norm_" + std::to_string(j));
      std::vector<std::vector<double>> rows;
      const int margin = fd_margin(tag);
      for (long f = 0; f < grid.total_nodes(); ++f) {
        const std::vector<int> idx = grid.unflatten(f);
        if (!grid.has_margin(idx, margin)) continue;
        std::vector<double> row;
        const Eigen::VectorXd x = grid.node(idx);
        for (int a = 0; a < cfg.n; ++a) row.push_back(x[a]);
        row.push_back(fd_residual_at(tag, grid, rec.bottom, idx));
        const Eigen::VectorXd sigma = rec.section.row(f).transpose();
        for (int j = 0; j <= mod.N; ++j) row.push_back(mod.component(sigma, j).norm());
        rows.push_back(std::move(row));
      }
      write_csv(join_path(out_dir, "residuals.csv"), header, rows);
      report.set("residual_csv", Json::text("residuals.csv"));
    }
  }

  write_text_file(join_path(out_dir, "prolong.json"), report.dump());
  if (space.condition_warning)
    throw NumericError("cmd_prolong: holonomy singular values fall near the rank threshold; "
                       "report written to " + join_path(out_dir, "prolong.json"));
  return report;
}

Json cmd_oracle(const RunConfig& cfg, const std::string& out_dir) {
  const OperatorTag tag = tag_for_config(cfg);
  CollocationOptions opts;
  opts.samples = cfg.oracle_samples;
  opts.seed = cfg.seed;
  opts.svd_rel_tol = cfg.tol.oracle_svd_rel;
  opts.min_gap = cfg.tol.oracle_gap;
  const CollocationResult res =
      collocation_nullspace_audited(tag, cfg.derived_oracle_degree(), opts);

  Json report = Json::object();
  report.set("command", Json::text("oracle"));
  report.set("config", config_to_json(cfg));
  report.set("conventions", convention_record());
  report.set("trial_degree", Json::integer(cfg.derived_oracle_degree()));
  report.set("trial_dim", Json::integer(res.trial_dim));
  report.set("dimension", Json::integer(res.dimension));
  report.set("singular_values", Json::vector(res.singular_values));
  Json basis = Json::array();
  for (int c = 0; c < res.basis.cols(); ++c) basis.push(Json::vector(res.basis.col(c)));
  report.set("basis_coefficients", std::move(basis));

  write_text_file(join_path(out_dir, "oracle.json"), report.dump());
  return report;
}

Json cmd_verify(const RunConfig& cfg, const std::string& out_dir) {
  // Load the prior prolong report.
  const std::string prolong_path = join_path(out_dir, "prolong.json");
  std::ifstream f(prolong_path);
  if (!f) throw ConfigError("cmd_verify: missing prolong report at " + prolong_path +
                            " (run the prolong command first)");
  nlohmann::json prior;
  try {
    f >> prior;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cmd_verify: cannot parse prolong report: ") + e.what());
  }
  const int prolong_dim = prior.at("solution_dim").get<int>();
  const GradedLieAlgebra alg = build_algebra(cfg.n);
  const GradedModule mod = build_module(alg, cfg.module);
  Eigen::MatrixXd prolong_basis(mod.dim, prolong_dim);
  {
    const auto& b = prior.at("basis_initial_values");
    if (static_cast<int>(b.size()) != prolong_dim)
      throw ConfigError("cmd_verify: basis size disagrees with solution_dim in the report");
    for (int c = 0; c < prolong_dim; ++c)
      for (int i = 0; i < mod.dim; ++i) prolong_basis(i, c) = b[c][i].get<double>();
  }

  const OperatorTag tag = tag_for_config(cfg);
  CollocationOptions copts;
  copts.samples = cfg.oracle_samples;
  copts.seed = cfg.seed;
  copts.svd_rel_tol = cfg.tol.oracle_svd_rel;
  copts.min_gap = cfg.tol.oracle_gap;
  const int degree = cfg.derived_oracle_degree();

  Json report = Json::object();
  report.set("command", Json::text("verify"));
  report.set("config", config_to_json(cfg));
  report.set("conventions", convention_record());
  report.set("prolong_dim", Json::integer(prolong_dim));

  bool ok = true;
  double subspace_residual_max = 0.0;

  if (cfg.chart.family == MetricChart::Family::Flat ||
      cfg.chart.family == MetricChart::Family::Sphere) {
    const CollocationResult oracle = collocation_nullspace_audited(tag, degree, copts);
    report.set("oracle_dim", Json::integer(oracle.dimension));
    const bool dims_match = oracle.dimension == prolong_dim;
    report.set("dims_match", Json::boolean(dims_match));
    ok = ok && dims_match;

    if (cfg.chart.family == MetricChart::Family::Flat) {
      // Convert each oracle polynomial into an initial value and test it
      // against the holonomy fixed space; their span must have full rank.
      Eigen::MatrixXd oracle_inits(mod.dim, oracle.dimension);
      for (int c = 0; c < oracle.dimension; ++c) {
        BottomField bf{collocation_polynomials(tag, degree, oracle.basis.col(c))};
        oracle_inits.col(c) =
            splitting_operator(cfg.chart, mod, bf, cfg.basepoint).value;
        const double nrm = oracle_inits.col(c).norm();
        if (nrm > 0)
          subspace_residual_max =
              std::max(subspace_residual_max,
                       projection_residual(oracle_inits.col(c) / nrm, prolong_basis));
      }
      const int span = numerical_rank(oracle_inits, cfg.tol.rank_rel);
      report.set("oracle_initial_value_rank", Json::integer(span));
      report.set("subspace_residual_max", Json::number(subspace_residual_max));
      const bool sub_ok = subspace_residual_max <= cfg.tol.subspace &&
                          span == oracle.dimension;
      report.set("subspace_match", Json::boolean(sub_ok));
      ok = ok && sub_ok;
    }
  }

  if (cfg.chart.family == MetricChart::Family::Sphere) {
    // Reconstruct three deterministic solutions with positive f and check the
    // rescaled metrics are Einstein.
    const ClosedSystem system = system_for_config(cfg, mod);
    TransportOptions topts;
    topts.step = cfg.integrator_step;
    const auto loops = coordinate_rectangle_loops(cfg.basepoint, cfg.loop_sides);
    const SolutionSpace space = solution_space(system, loops, topts, cfg.tol.holonomy_svd);

    std::vector<BottomField> seeds;
    seeds.push_back(BottomField::scalar(MultiPoly::constant(cfg.n, 1, 1.0)));
    {
      MultiPoly p = MultiPoly::constant(cfg.n, 1, 1.0) +
                    MultiPoly::variable(cfg.n, 1, 0) * 0.3;
      seeds.push_back(BottomField::scalar(p));
      MultiPoly q = MultiPoly::constant(cfg.n, 1, 1.0) -
                    MultiPoly::variable(cfg.n, 1, 1) * 0.3;
      seeds.push_back(BottomField::scalar(q));
    }
    Eigen::MatrixXd inits(mod.dim, static_cast<int>(seeds.size()));
    for (size_t s = 0; s < seeds.size(); ++s) {
      Eigen::VectorXd v = splitting_operator(cfg.chart, mod, seeds[s], cfg.basepoint).value;
      // Project onto the computed solution space.
      inits.col(static_cast<int>(s)) = space.basis * (space.basis.transpose() * v);
    }
    const Grid grid(cfg.grid_center, cfg.grid_spacing, cfg.grid_points);
    const auto recs = reconstruct_many(system, inits, cfg.basepoint, grid, tag, topts);

    double worst = 0.0;
    for (const auto& rec : recs) {
      GridScalarField gf(grid, rec.bottom.col(0));
      std::vector<Eigen::VectorXd> region;
      for (long idx = 0; idx < grid.total_nodes(); ++idx) {
        const auto mi = grid.unflatten(idx);
        if (grid.has_margin(mi, 2)) region.push_back(grid.node(mi));
      }
      worst = std::max(worst,
                       einstein_residual_of_rescaling(cfg.chart, gf.as_field(), region));
    }
    report.set("einstein_solutions_checked", Json::integer(static_cast<long long>(recs.size())));
    report.set("einstein_residual_max", Json::number(worst));
    const bool einstein_ok = worst <= cfg.tol.einstein_residual;
    report.set("einstein_ok", Json::boolean(einstein_ok));
    ok = ok && einstein_ok;
  }

  report.set("ok", Json::boolean(ok));
  write_text_file(join_path(out_dir, "verify.json"), report.dump());
  if (!ok)
    throw InvariantError("cmd_verify: verification failed; see " +
                         join_path(out_dir, "verify.json"));
  return report;
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_override) {
  try {
    RunConfig cfg = load_config(config_path);
    const std::string out = out_override.empty() ? cfg.out_dir : out_override;
    if (command == "algebra")
      cmd_algebra(cfg, out);
    else if (command == "prolong")
      cmd_prolong(cfg, out);
    else if (command == "oracle")
      cmd_oracle(cfg, out);
    else if (command == "verify")
      cmd_verify(cfg, out);
    else
      throw ConfigError("unknown command: " + command);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const NumericError& e) {
    std::cerr << "numerical instability: " << e.what() << "\n";
    return kExitNumeric;
  }
}

} // namespace prolong
