#include "prolong/prolongation.hpp"

#include "prolong/exceptions.hpp"
#include "prolong/linsolve.hpp"
#include "prolong/oracle.hpp"

#include <cmath>

namespace prolong {

TractorSection::TractorSection(const GradedModule& mod, const Eigen::VectorXd& v)
    : module(&mod), value(v) {
  if (v.size() != mod.dim)
    throw ConfigError("TractorSection: value length does not match dim W");
}

BottomField BottomField::zero(const GradedModule& mod, int nvars, int degree) {
  BottomField f;
  f.comps.assign(mod.comp_dim[0], MultiPoly(nvars, degree));
  return f;
}

ChartJets chart_jets(const MetricChart& chart, const Eigen::VectorXd& x0, int order) {
  ChartJets cj;
  cj.n = chart.n;
  cj.order = order;
  cj.x0 = x0;
  cj.phi = phi_jet(chart, x0, order);
  for (int a = 0; a < chart.n; ++a) cj.dphi.push_back(cj.phi.derivative(a));
  cj.exp_phi = MultiPoly::exp(cj.phi);
  cj.exp_minus_phi = MultiPoly::exp(cj.phi * -1.0);
  return cj;
}

Eigen::VectorXd JetSection::value_at_center() const {
  Eigen::VectorXd v(static_cast<int>(comps.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = comps[i].constant_term();
  return v;
}

namespace {

JetSection apply_matrix(const GradedModule& mod, const Eigen::MatrixXd& m, const JetSection& f) {
  JetSection out;
  out.module = &mod;
  const int nvars = f.comps[0].nvars();
  const int deg = f.comps[0].degree();
  out.comps.assign(m.rows(), MultiPoly(nvars, deg));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out.comps[i] += f.comps[j] * m(i, j);
  return out;
}

JetSection scale(const JetSection& f, const MultiPoly& s) {
  JetSection out = f;
  for (auto& c : out.comps) c = c * s;
  return out;
}

// d_c F + rho(omega_c) F, the coordinate-direction covariant derivative in
// the orthonormal gauge; omega_c(a,b) = dphi_b delta_{ac} - dphi_a delta_{bc}.
JetSection coordinate_covariant(const ChartJets& cj, const JetSection& f, int c) {
  const GradedModule& mod = *f.module;
  JetSection out;
  out.module = &mod;
  out.comps.reserve(f.comps.size());
  for (const auto& comp : f.comps) out.comps.push_back(comp.derivative(c));

  for (int b = 0; b < cj.n; ++b) {
    if (b == c) continue;
    // omega_c(a, e) = dphi_e delta_{ac} - dphi_a delta_{ec}; the pair {c, b}
    // picks up coefficient +dphi_b on M_{cb} (so -dphi_b on M_{bc}).
    const double sign = (c < b) ? 1.0 : -1.0;
    const Eigen::MatrixXd& rot = mod.rotation_generator(std::min(b, c), std::max(b, c));
    JetSection rotated = apply_matrix(mod, rot, f);
    for (size_t i = 0; i < out.comps.size(); ++i)
      out.comps[i] += rotated.comps[i] * cj.dphi[b] * sign;
  }
  return out;
}

} // namespace

JetSection covariant_derivative_jet(const ChartJets& cj, const JetSection& f, int c) {
  JetSection out = coordinate_covariant(cj, f, c);
  return scale(out, cj.exp_minus_phi);
}

JetSection modified_derivative_jet(const ChartJets& cj, const JetSection& f, int c) {
  JetSection out = covariant_derivative_jet(cj, f, c);
  JetSection alg = apply_matrix(*f.module, f.module->action_minus1[c], f);
  for (size_t i = 0; i < out.comps.size(); ++i) out.comps[i] += alg.comps[i];
  return out;
}

Eigen::VectorXd modified_connection_apply(const MetricChart& chart, const GradedModule& mod,
                                          const std::vector<MultiPoly>& section,
                                          const Eigen::VectorXd& x, const Eigen::VectorXd& xi) {
  if (static_cast<int>(section.size()) != mod.dim)
    throw ConfigError("modified_connection_apply: section has the wrong component count");
  ChartJets cj = chart_jets(chart, x, 1);
  JetSection f;
  f.module = &mod;
  for (const auto& p : section) f.comps.push_back(p.truncated(std::max(1, p.degree())).shifted(x).truncated(1));

  Eigen::VectorXd out = Eigen::VectorXd::Zero(mod.dim);
  const double ephi = std::exp(phi_value(chart, x));
  for (int c = 0; c < chart.n; ++c) {
    if (xi[c] == 0.0) continue;
    JetSection cov = coordinate_covariant(cj, f, c);
    out += xi[c] * cov.value_at_center();
    out += ephi * xi[c] * (mod.action_minus1[c] * f.value_at_center());
  }
  return out;
}

JetSection splitting_jet(const MetricChart& chart, const GradedModule& mod,
                         const BottomField& f, const Eigen::VectorXd& x0, int order) {
  if (f.dim() != mod.comp_dim[0])
    throw ConfigError("splitting_jet: bottom field has the wrong component count");
  if (order < mod.N)
    throw ConfigError("splitting_jet: jet order must be at least N");
  require_in_domain(chart, x0);

  const int n = chart.n;
  ChartJets cj = chart_jets(chart, x0, order);
  const Eigen::MatrixXd ds1 = delta_star(mod, 1);

  JetSection total;
  total.module = &mod;
  total.comps.assign(mod.dim, MultiPoly(n, order));
  JetSection current = total;
  for (int b = 0; b < f.dim(); ++b) {
    MultiPoly jet = f.comps[b].truncated(std::max(order, f.comps[b].degree()))
                        .shifted(x0)
                        .truncated(order);
    current.comps[mod.comp_offset[0] + b] = jet;
    total.comps[mod.comp_offset[0] + b] = jet;
  }

  for (int i = 0; i < mod.N; ++i) {
    // Sigma_{i+1} = -delta* (nabla Sigma_i), landing in component i+1.
    std::vector<JetSection> grad;
    grad.reserve(n);
    for (int c = 0; c < n; ++c) grad.push_back(covariant_derivative_jet(cj, current, c));

    JetSection next;
    next.module = &mod;
    next.comps.assign(mod.dim, MultiPoly(n, order));
    for (int row = 0; row < mod.dim; ++row) {
      for (int c = 0; c < n; ++c)
        for (int col = 0; col < mod.dim; ++col) {
          const double w = ds1(row, c * mod.dim + col);
          if (w != 0.0) next.comps[row] -= grad[c].comps[col] * w;
        }
    }
    // Keep only the expected graded block; the rest is exact-zero noise.
    JetSection clean;
    clean.module = &mod;
    clean.comps.assign(mod.dim, MultiPoly(n, order));
    for (int b = 0; b < mod.comp_dim[i + 1]; ++b) {
      const int idx = mod.comp_offset[i + 1] + b;
      clean.comps[idx] = next.comps[idx];
      total.comps[idx] += next.comps[idx];
    }
    current = clean;
  }
  return total;
}

TractorSection splitting_operator(const MetricChart& chart, const GradedModule& mod,
                                  const BottomField& f, const Eigen::VectorXd& x) {
  JetSection jet = splitting_jet(chart, mod, f, x, mod.N);
  return TractorSection(mod, jet.value_at_center());
}

double splitting_defect(const MetricChart& chart, const GradedModule& mod,
                        const BottomField& f, const Eigen::VectorXd& x) {
  const int order = mod.N + 1;
  ChartJets cj = chart_jets(chart, x, order);
  JetSection l = splitting_jet(chart, mod, f, x, order);
  const Eigen::MatrixXd ds1 = delta_star(mod, 1);

  Eigen::VectorXd lambda(chart.n * mod.dim);
  for (int c = 0; c < chart.n; ++c) {
    JetSection d = modified_derivative_jet(cj, l, c);
    lambda.segment(c * mod.dim, mod.dim) = d.value_at_center();
  }
  return (ds1 * lambda).norm();
}

bool jet_dependence_check(const MetricChart& chart, const GradedModule& mod,
                          const BottomField& f, const BottomField& perturbation, int ell,
                          const Eigen::VectorXd& x0, double tol) {
  if (ell < 0 || ell > mod.N)
    throw ConfigError("jet_dependence_check: component index out of range");
  BottomField sum = f;
  for (int b = 0; b < f.dim(); ++b) {
    const int deg = std::max(sum.comps[b].degree(), perturbation.comps[b].degree());
    sum.comps[b] = sum.comps[b].truncated(deg) + perturbation.comps[b].truncated(deg);
  }
  TractorSection a = splitting_operator(chart, mod, f, x0);
  TractorSection b = splitting_operator(chart, mod, sum, x0);
  return (a.component(ell) - b.component(ell)).norm() <= tol;
}

// ---------------------------------------------------------------------------
// Closed systems
// ---------------------------------------------------------------------------

namespace {

// Ricci in orthonormal components for the einstein system's top row, from
// the closed conformal formula (avoids the full Riemann assembly in the
// transport inner loop).
Eigen::MatrixXd ricci_orthonormal(const MetricChart& chart, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& dphi) {
  const int n = chart.n;
  const Eigen::MatrixXd ric =
      ricci_from_conformal_factor(n, dphi, phi_hess(chart, x));
  return std::exp(-2.0 * phi_value(chart, x)) * ric;
}

} // namespace

std::vector<Eigen::MatrixXd> ClosedSystem::c_matrices(const Eigen::VectorXd& x) const {
  const int n = chart.n;
  std::vector<Eigen::MatrixXd> cs(n, Eigen::MatrixXd::Zero(module.dim, module.dim));
  if (provenance == Provenance::FlatZero) return cs;

  // Standard module layout: [f | phi_1..phi_n | h].
  const int f_col = 0;
  const int phi0 = 1;
  const int h_row = module.dim - 1;
  const double e2 = std::exp(-2.0 * phi_value(chart, x));
  const double e3 = std::exp(-3.0 * phi_value(chart, x));

  const Eigen::MatrixXd ric_orth = ricci_orthonormal(chart, x, phi_grad(chart, x));
  const Eigen::MatrixXd a_orth = e2 * lower_order.value(x);
  const auto cov_a = lower_order.covariant(chart, x);
  Eigen::VectorXd div_a = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) div_a[a] += cov_a[c](c, a);
  div_a *= e3;

  const double s = 1.0 / (n - 1);
  for (int c = 0; c < n; ++c) {
    // top row: -(1/(n-1)) (Ric_c^e phi_e + f divA_c + phi^e A_ce)
    for (int e = 0; e < n; ++e)
      cs[c](h_row, phi0 + e) = -s * (ric_orth(c, e) + a_orth(c, e));
    cs[c](h_row, f_col) = -s * div_a[c];
    // middle rows: + f A_cb
    for (int b = 0; b < n; ++b) cs[c](phi0 + b, f_col) = a_orth(c, b);
    // bottom row stays zero.
  }
  return cs;
}

Eigen::MatrixXd ClosedSystem::transport_generator(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& xdot) const {
  const int n = chart.n;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(module.dim, module.dim);

  const Eigen::VectorXd dphi = phi_grad(chart, x);
  // Frame rotation omega(xdot)_{ab} = dphi_b xdot_a - dphi_a xdot_b.
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double w = dphi[b] * xdot[a] - dphi[a] * xdot[b];
      if (w != 0.0) k.noalias() += w * module.rotation_generator(a, b);
    }

  const double ephi = std::exp(phi_value(chart, x));
  for (int a = 0; a < n; ++a)
    if (xdot[a] != 0.0) k.noalias() += (ephi * xdot[a]) * module.action_minus1[a];

  if (provenance == Provenance::ExplicitEinstein) {
    const int f_col = 0;
    const int phi0 = 1;
    const int h_row = module.dim - 1;
    const double s = 1.0 / (n - 1);
    const Eigen::MatrixXd ric_orth = ricci_orthonormal(chart, x, dphi);
    // Orthonormal velocity components u_c = e^phi xdot_c contract the
    // one-form slot of C.
    const Eigen::VectorXd u = ephi * xdot;
    for (int e = 0; e < n; ++e) k(h_row, phi0 + e) -= s * ric_orth.col(e).dot(u);

    if (!lower_order.is_zero()) {
      const double e2 = ephi > 0 ? 1.0 / (ephi * ephi) : 0.0;
      const Eigen::MatrixXd a_orth = e2 * lower_order.value(x);
      const auto cov_a = lower_order.covariant(chart, x);
      Eigen::VectorXd div_a = Eigen::VectorXd::Zero(n);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) div_a[a] += cov_a[c](c, a);
      div_a *= e2 / ephi;
      for (int e = 0; e < n; ++e) k(h_row, phi0 + e) -= s * a_orth.col(e).dot(u);
      k(h_row, f_col) -= s * div_a.dot(u);
      for (int b = 0; b < n; ++b) k(phi0 + b, f_col) += a_orth.col(b).dot(u);
    }
  }
  return k;
}

ClosedSystem build_closed_system_einstein(const MetricChart& chart, const GradedModule& mod,
                                          const LowerOrderTensor& a_coeff) {
  if (mod.spec.family != ModuleSpec::Family::Scalar || mod.spec.r != 2)
    throw ConfigError("build_closed_system_einstein: requires the standard module "
                      "(scalar family, r = 2)");
  if (mod.n != chart.n)
    throw ConfigError("build_closed_system_einstein: module and chart dimensions differ");
  if (a_coeff.n != chart.n)
    throw ConfigError("build_closed_system_einstein: lower-order tensor dimension mismatch");
  ClosedSystem sys;
  sys.chart = chart;
  sys.module = mod;
  sys.provenance = ClosedSystem::Provenance::ExplicitEinstein;
  sys.lower_order = a_coeff;
  return sys;
}

ClosedSystem build_closed_system_flat(const MetricChart& chart, const GradedModule& mod) {
  if (chart.family != MetricChart::Family::Flat)
    throw ConfigError("build_closed_system_flat: chart must be flat");
  if (mod.n != chart.n)
    throw ConfigError("build_closed_system_flat: module and chart dimensions differ");
  ClosedSystem sys;
  sys.chart = chart;
  sys.module = mod;
  sys.provenance = ClosedSystem::Provenance::FlatZero;
  sys.lower_order = LowerOrderTensor::zero(chart.n);
  return sys;
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

namespace {

// Classical RK4 with fixed step for dM/dt = -K(gamma(t)) M over one straight
// segment, applied to a matrix of states.
void rk4_segment(const ClosedSystem& sys, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                 double step, Eigen::MatrixXd& state) {
  const double len = (q - p).norm();
  if (len == 0.0) return;
  const Eigen::VectorXd v = q - p; // velocity for t in [0, 1]
  const int nsteps = std::max(1, static_cast<int>(std::ceil(len / step)));
  const double h = 1.0 / nsteps;
  if (h <= 0.0 || !(h > 1e-12))
    throw NumericError("transport: step size underflow");

  // The flat system's generator is constant along a straight segment.
  const bool constant_k = sys.provenance == ClosedSystem::Provenance::FlatZero;
  Eigen::MatrixXd k_cached;
  if (constant_k) {
    require_in_domain(sys.chart, p);
    require_in_domain(sys.chart, q);
    k_cached = sys.transport_generator(p, v);
  }
  auto rhs = [&](double t, const Eigen::MatrixXd& m) {
    if (constant_k) return Eigen::MatrixXd(-k_cached * m);
    const Eigen::VectorXd x = p + t * v;
    require_in_domain(sys.chart, x);
    return Eigen::MatrixXd(-sys.transport_generator(x, v) * m);
  };
  double t = 0.0;
  for (int i = 0; i < nsteps; ++i) {
    const Eigen::MatrixXd k1 = rhs(t, state);
    const Eigen::MatrixXd k2 = rhs(t + h / 2, state + (h / 2) * k1);
    const Eigen::MatrixXd k3 = rhs(t + h / 2, state + (h / 2) * k2);
    const Eigen::MatrixXd k4 = rhs(t + h, state + h * k3);
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
}

Eigen::MatrixXd run_path(const ClosedSystem& sys, const Polyline& path, double step,
                         const Eigen::MatrixXd& initial) {
  if (path.size() < 2) return initial;
  Eigen::MatrixXd state = initial;
  for (size_t s = 0; s + 1 < path.size(); ++s)
    rk4_segment(sys, path[s], path[s + 1], step, state);
  return state;
}

} // namespace

TransportResult transport(const ClosedSystem& system, const Eigen::VectorXd& sigma0,
                          const Polyline& path, const TransportOptions& opts) {
  if (sigma0.size() != system.module.dim)
    throw ConfigError("transport: initial value has the wrong dimension");
  TransportResult res;
  res.value = run_path(system, path, opts.step, sigma0);
  if (opts.estimate_error) {
    Eigen::MatrixXd half = run_path(system, path, opts.step / 2.0, sigma0);
    res.error_estimate = (half - res.value).norm();
  }
  return res;
}

Eigen::MatrixXd transport_matrix(const ClosedSystem& system, const Polyline& path,
                                 const TransportOptions& opts) {
  return run_path(system, path, opts.step,
                  Eigen::MatrixXd::Identity(system.module.dim, system.module.dim));
}

Eigen::MatrixXd holonomy(const ClosedSystem& system, const Polyline& loop,
                         const TransportOptions& opts) {
  Polyline closed = loop;
  if (closed.size() < 2) throw ConfigError("holonomy: loop needs at least two points");
  if ((closed.front() - closed.back()).norm() > 0)
    closed.push_back(closed.front());
  return transport_matrix(system, closed, opts);
}

std::vector<Polyline> coordinate_rectangle_loops(const Eigen::VectorXd& basepoint,
                                                 const std::vector<double>& sides) {
  const int n = static_cast<int>(basepoint.size());
  std::vector<Polyline> loops;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double s : sides) {
        Polyline loop;
        Eigen::VectorXd p = basepoint;
        loop.push_back(p);
        p[i] += s;
        loop.push_back(p);
        p[j] += s;
        loop.push_back(p);
        p[i] -= s;
        loop.push_back(p);
        p[j] -= s;
        loop.push_back(p);
        loops.push_back(loop);
      }
  return loops;
}

SolutionSpace solution_space(const ClosedSystem& system, const std::vector<Polyline>& loops,
                             const TransportOptions& opts, double svd_abs_tol) {
  const int dim = system.module.dim;
  if (loops.empty()) throw ConfigError("solution_space: need at least one loop");
  Eigen::MatrixXd stacked(static_cast<int>(loops.size()) * dim, dim);
  for (size_t i = 0; i < loops.size(); ++i)
    stacked.middleRows(static_cast<int>(i) * dim, dim) =
        holonomy(system, loops[i], opts) - Eigen::MatrixXd::Identity(dim, dim);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  SolutionSpace out;
  out.singular_values = svd.singularValues();
  out.threshold = svd_abs_tol;
  int rank = 0;
  while (rank < out.singular_values.size() && out.singular_values[rank] > svd_abs_tol) ++rank;
  out.dim = dim - rank;
  out.basis = svd.matrixV().rightCols(out.dim);
  for (int i = 0; i < out.singular_values.size(); ++i) {
    const double s = out.singular_values[i];
    if (s > svd_abs_tol / 10.0 && s < svd_abs_tol * 10.0) out.condition_warning = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

ReconstructResult reconstruct_and_check(const ClosedSystem& system,
                                        const Eigen::VectorXd& sigma0,
                                        const Eigen::VectorXd& basepoint, const Grid& grid,
                                        const OperatorTag& tag, const TransportOptions& opts) {
  return reconstruct_many(system, sigma0, basepoint, grid, tag, opts).front();
}

std::vector<ReconstructResult> reconstruct_many(const ClosedSystem& system,
                                                const Eigen::MatrixXd& initial_values,
                                                const Eigen::VectorXd& basepoint,
                                                const Grid& grid, const OperatorTag& tag,
                                                const TransportOptions& opts) {
  const GradedModule& mod = system.module;
  const int w0 = mod.comp_dim[0];
  const int ncols = static_cast<int>(initial_values.cols());
  if (initial_values.rows() != mod.dim)
    throw ConfigError("reconstruct: initial values have the wrong dimension");

  std::vector<ReconstructResult> out(ncols);
  for (auto& r : out) {
    r.grid = grid;
    r.bottom.resize(grid.total_nodes(), w0);
    r.section.resize(grid.total_nodes(), mod.dim);
  }

  for (long fidx = 0; fidx < grid.total_nodes(); ++fidx) {
    const Eigen::VectorXd target = grid.node(grid.unflatten(fidx));
    require_in_domain(system.chart, target);
    Polyline path = {basepoint, target};
    Eigen::MatrixXd state = initial_values;
    if (path.size() >= 2)
      for (size_t s = 0; s + 1 < path.size(); ++s)
        rk4_segment(system, path[s], path[s + 1], opts.step, state);
    for (int c = 0; c < ncols; ++c) {
      out[c].section.row(fidx) = state.col(c).transpose();
      out[c].bottom.row(fidx) = mod.component(state.col(c), 0).transpose();
    }
  }

  for (auto& r : out)
    r.max_residual = fd_residual(tag, grid, r.bottom, &r.residual_nodes);
  return out;
}

} // namespace prolong
