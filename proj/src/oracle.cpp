#include "prolong/oracle.hpp"

#include "prolong/exceptions.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

namespace prolong {

OperatorTag OperatorTag::flat_scalar_power(int n, int r) {
  if (r < 1) throw ConfigError("OperatorTag: r >= 1 required");
  OperatorTag t;
  t.kind_ = Kind::FlatScalarPower;
  t.n_ = n;
  t.r_ = r;
  t.chart_ = flat_chart(n);
  t.a_ = LowerOrderTensor::zero(n);
  return t;
}

OperatorTag OperatorTag::flat_conformal_killing(int n) {
  OperatorTag t;
  t.kind_ = Kind::FlatConformalKilling;
  t.n_ = n;
  t.r_ = 1;
  t.chart_ = flat_chart(n);
  t.a_ = LowerOrderTensor::zero(n);
  return t;
}

OperatorTag OperatorTag::hessian_plus_a(const MetricChart& chart, const LowerOrderTensor& a) {
  if (a.n != chart.n) throw ConfigError("OperatorTag: lower-order tensor dimension mismatch");
  OperatorTag t;
  t.kind_ = Kind::HessianPlusA;
  t.n_ = chart.n;
  t.r_ = 2;
  t.chart_ = chart;
  t.a_ = a;
  return t;
}

namespace {

// Tracefree projection of a symmetric degree-r coefficient vector over the
// homogeneous monomial basis: subtract |x|^2 * (L M)^{-1} L, the classical
// harmonic decomposition. Kept local so the verifier has no code in common
// with the algebraic pipeline.
Eigen::MatrixXd harmonic_projection(int n, int r) {
  const MonomialBasis full(n, r, true);
  if (r < 2) return Eigen::MatrixXd::Identity(full.size(), full.size());
  const MonomialBasis lower(n, r - 2, true);

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(lower.size(), full.size());
  Eigen::MatrixXd mul = Eigen::MatrixXd::Zero(full.size(), lower.size());
  for (int i = 0; i < full.size(); ++i) {
    const auto& alpha = full.exponent(i);
    for (int p = 0; p < n; ++p) {
      if (alpha[p] < 2) continue;
      std::vector<int> beta = alpha;
      beta[p] -= 2;
      lap(lower.index_of(beta), i) += alpha[p] * (alpha[p] - 1);
    }
  }
  for (int i = 0; i < lower.size(); ++i) {
    const auto& alpha = lower.exponent(i);
    for (int p = 0; p < n; ++p) {
      std::vector<int> beta = alpha;
      beta[p] += 2;
      mul(full.index_of(beta), i) += 1.0;
    }
  }
  return Eigen::MatrixXd::Identity(full.size(), full.size()) -
         mul * (lap * mul).partialPivLu().solve(lap);
}

// Tracefree projection acting on symmetric-tensor VALUES indexed by degree-r
// monomials. Tensor values and polynomial coefficients differ by the
// multinomial weights (T corresponds to p = sum mult(alpha) T_alpha x^alpha),
// so the harmonic projection has to be conjugated by that diagonal.
Eigen::MatrixXd tensor_tracefree_projection(int n, int r) {
  const MonomialBasis full(n, r, true);
  Eigen::VectorXd mult(full.size());
  for (int i = 0; i < full.size(); ++i) {
    const auto& alpha = full.exponent(i);
    double m = 1.0;
    int total = 0;
    for (int v = 0; v < n; ++v)
      for (int e = 1; e <= alpha[v]; ++e) m *= static_cast<double>(++total) / e;
    mult[i] = m;
  }
  const Eigen::MatrixXd pi = harmonic_projection(n, r);
  return mult.cwiseInverse().asDiagonal() * pi * mult.asDiagonal();
}

const Eigen::MatrixXd& cached_tensor_projection(int n, int r) {
  static std::map<std::pair<int, int>, Eigen::MatrixXd> cache;
  auto key = std::make_pair(n, r);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, tensor_tracefree_projection(n, r)).first;
  return it->second;
}

// Symmetrized r-th partial derivative of p at x over the degree-r monomial
// index (derivative tensors of smooth functions are already symmetric).
Eigen::VectorXd symmetric_derivative(const MultiPoly& p, int r, const Eigen::VectorXd& x) {
  const int n = p.nvars();
  const MonomialBasis idx(n, r, true);
  Eigen::VectorXd out(idx.size());
  for (int i = 0; i < idx.size(); ++i) {
    MultiPoly q = p;
    const auto& alpha = idx.exponent(i);
    for (int v = 0; v < n; ++v)
      for (int e = 0; e < alpha[v]; ++e) q = q.derivative(v);
    out[i] = q.eval(x);
  }
  return out;
}

// Trial function for the HessianPlusA tag: plain monomial on flat and
// conformal_poly charts, monomial weighted by the stereographic factor
// rho^2 / (rho^2 + |x|^2) on the sphere. Returns a jet of order 2 at x.
MultiPoly trial_jet(const OperatorTag& tag, const std::vector<int>& alpha,
                    const Eigen::VectorXd& x, int order) {
  const int n = tag.n();
  MultiPoly m = MultiPoly::constant(n, order, 1.0);
  for (int v = 0; v < n; ++v)
    for (int e = 0; e < alpha[v]; ++e) {
      MultiPoly xa = MultiPoly::variable(n, order, v);
      xa.coeffs()[0] += x[v];
      m = m * xa;
    }
  if (tag.chart().family == MetricChart::Family::Sphere) {
    const double r2 = tag.chart().radius * tag.chart().radius;
    MultiPoly u = MultiPoly::constant(n, order, r2);
    for (int v = 0; v < n; ++v) {
      MultiPoly xa = MultiPoly::variable(n, order, v);
      xa.coeffs()[0] += x[v];
      u += xa * xa;
    }
    m = m * MultiPoly::reciprocal(u) * r2;
  }
  return m;
}

// Covariant tracefree Hessian plus f A from a jet of order >= 2 at x.
Eigen::VectorXd hessian_rows(const OperatorTag& tag, const MultiPoly& jet,
                             const Eigen::VectorXd& x) {
  const int n = tag.n();
  const auto gamma = christoffel(tag.chart(), x);
  Eigen::VectorXd grad(n);
  for (int a = 0; a < n; ++a) grad[a] = jet.derivative(a).constant_term();
  Eigen::MatrixXd hess(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      hess(a, b) = hess(b, a) = jet.derivative(a).derivative(b).constant_term();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) hess(a, b) -= gamma[c](a, b) * grad[c];
  hess += jet.constant_term() * tag.lower_order().value(x);
  // Tracefree with respect to g: coordinate trace on the conformal catalog.
  hess -= hess.trace() / n * Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd rows(n * (n + 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) rows[k++] = hess(a, b);
  return rows;
}

Eigen::VectorXd killing_rows(int n, const std::vector<MultiPoly>& v, const Eigen::VectorXd& x) {
  Eigen::MatrixXd jac(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) jac(a, b) = v[b].derivative(a).eval(x);
  Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
  sym -= sym.trace() / n * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rows(n * (n + 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) rows[k++] = sym(a, b);
  return rows;
}

double default_sample_radius(const OperatorTag& tag) {
  switch (tag.chart().family) {
    case MetricChart::Family::Sphere: return 0.8 * tag.chart().radius;
    case MetricChart::Family::Hyperbolic: return 0.5 * tag.chart().radius;
    default: return 1.0;
  }
}

} // namespace

Eigen::VectorXd operator_value(const OperatorTag& tag, const std::vector<MultiPoly>& bottom,
                               const Eigen::VectorXd& x) {
  switch (tag.kind()) {
    case OperatorTag::Kind::FlatScalarPower:
      return cached_tensor_projection(tag.n(), tag.r()) *
             symmetric_derivative(bottom[0], tag.r(), x);
    case OperatorTag::Kind::FlatConformalKilling:
      return killing_rows(tag.n(), bottom, x);
    case OperatorTag::Kind::HessianPlusA: {
      const int order = std::max(2, bottom[0].degree());
      MultiPoly jet = bottom[0].truncated(order).shifted(x).truncated(2);
      return hessian_rows(tag, jet, x);
    }
  }
  throw ConfigError("operator_value: unknown tag");
}

std::vector<MultiPoly> collocation_polynomials(const OperatorTag& tag, int degree,
                                               const Eigen::VectorXd& coeffs) {
  const int n = tag.n();
  const MonomialBasis trial(n, degree);
  const int bdim = tag.bottom_dim();
  if (coeffs.size() != trial.size() * bdim)
    throw ConfigError("collocation_polynomials: coefficient length mismatch");
  std::vector<MultiPoly> out;
  for (int c = 0; c < bdim; ++c)
    out.emplace_back(n, degree, coeffs.segment(c * trial.size(), trial.size()));
  return out;
}

CollocationResult collocation_nullspace(const OperatorTag& tag, int degree,
                                        const CollocationOptions& opts) {
  const int n = tag.n();
  const MonomialBasis trial(n, degree);
  const int bdim = tag.bottom_dim();
  const int ncols = trial.size() * bdim;
  const int nsamples = opts.samples > 0 ? opts.samples : 3 * ncols;
  if (nsamples < 3 * ncols)
    throw ConfigError("collocation_nullspace: sample set must be at least 3x the trial "
                      "dimension");
  const double radius = opts.sample_radius > 0 ? opts.sample_radius
                                               : default_sample_radius(tag);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  std::vector<Eigen::VectorXd> samples;
  while (static_cast<int>(samples.size()) < nsamples) {
    Eigen::VectorXd x(n);
    for (int a = 0; a < n; ++a) x[a] = unif(rng);
    if (x.norm() <= radius && in_domain(tag.chart(), x)) samples.push_back(x);
  }

  const int rows_per = static_cast<int>(operator_value(
      tag, collocation_polynomials(tag, degree, Eigen::VectorXd::Zero(ncols)), samples[0])
      .size());
  Eigen::MatrixXd system(nsamples * rows_per, ncols);

  if (tag.kind() == OperatorTag::Kind::HessianPlusA) {
    // Column-wise assembly through exact jets of the (possibly weighted)
    // trial functions.
    for (int j = 0; j < trial.size(); ++j)
      for (int s = 0; s < nsamples; ++s) {
        MultiPoly jet = trial_jet(tag, trial.exponent(j), samples[s], 2);
        system.block(s * rows_per, j, rows_per, 1) = hessian_rows(tag, jet, samples[s]);
      }
  } else {
    for (int c = 0; c < bdim; ++c)
      for (int j = 0; j < trial.size(); ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(ncols);
        e[c * trial.size() + j] = 1.0;
        auto polys = collocation_polynomials(tag, degree, e);
        for (int s = 0; s < nsamples; ++s)
          system.block(s * rows_per, c * trial.size() + j, rows_per, 1) =
              operator_value(tag, polys, samples[s]);
      }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = opts.svd_rel_tol * sv[0];
  int rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  if (rank < sv.size() && rank > 0) {
    const double gap = sv[rank - 1] / std::max(sv[rank], 1e-300);
    if (gap < opts.min_gap)
      throw NumericError("collocation_nullspace: rank decision unstable (gap " +
                         std::to_string(gap) + " < required " +
                         std::to_string(opts.min_gap) + "); add samples");
  }

  CollocationResult res;
  res.trial_dim = ncols;
  res.dimension = ncols - rank;
  res.basis = svd.matrixV().rightCols(res.dimension);
  res.singular_values = sv;
  return res;
}

CollocationResult collocation_nullspace_audited(const OperatorTag& tag, int degree,
                                                const CollocationOptions& opts) {
  CollocationResult base = collocation_nullspace(tag, degree, opts);
  CollocationResult above = collocation_nullspace(tag, degree + 1, opts);
  if (above.dimension != base.dimension)
    throw InvariantError("collocation_nullspace_audited: raising the trial degree changed "
                         "the solution count (" + std::to_string(base.dimension) + " -> " +
                         std::to_string(above.dimension) + ")");
  return base;
}

// ---------------------------------------------------------------------------
// Finite-difference residuals on grids
// ---------------------------------------------------------------------------

int fd_margin(const OperatorTag& tag) {
  switch (tag.kind()) {
    case OperatorTag::Kind::FlatScalarPower: return tag.r() >= 3 ? 6 : 2;
    case OperatorTag::Kind::FlatConformalKilling: return 2;
    case OperatorTag::Kind::HessianPlusA: return 2;
  }
  return 2;
}

double fd_residual_at(const OperatorTag& tag, const Grid& grid, const Eigen::MatrixXd& bottom,
                      const std::vector<int>& idx) {
  const int n = tag.n();
  const Eigen::VectorXd x = grid.node(idx);

  switch (tag.kind()) {
    case OperatorTag::Kind::FlatScalarPower: {
      GridScalarField f(grid, bottom.col(0));
      if (tag.r() == 1) {
        return f.gradient(idx).norm();
      }
      if (tag.r() == 2) {
        Eigen::MatrixXd h = f.hessian(idx);
        h -= h.trace() / n * Eigen::MatrixXd::Identity(n, n);
        return h.norm();
      }
      if (tag.r() == 3) {
        const MonomialBasis idx3(n, 3, true);
        const std::vector<double> thirds = f.third_derivatives(idx);
        // Repack (a<=b<=c) values into the monomial index and project.
        Eigen::VectorXd t(idx3.size());
        int k = 0;
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c) {
              std::vector<int> alpha(n, 0);
              alpha[a]++;
              alpha[b]++;
              alpha[c]++;
              t[idx3.index_of(alpha)] = thirds[k++];
            }
        return (cached_tensor_projection(n, 3) * t).lpNorm<Eigen::Infinity>();
      }
      throw ConfigError("fd_residual: flat scalar operator supports r <= 3");
    }
    case OperatorTag::Kind::FlatConformalKilling: {
      Eigen::MatrixXd jac(n, n);
      for (int b = 0; b < n; ++b) {
        GridScalarField comp(grid, bottom.col(b));
        jac.col(b) = comp.gradient(idx);
      }
      Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
      sym -= sym.trace() / n * Eigen::MatrixXd::Identity(n, n);
      return sym.norm();
    }
    case OperatorTag::Kind::HessianPlusA: {
      GridScalarField f(grid, bottom.col(0));
      Eigen::MatrixXd hess = f.hessian(idx);
      const Eigen::VectorXd grad = f.gradient(idx);
      const auto gamma = christoffel(tag.chart(), x);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) hess(a, b) -= gamma[c](a, b) * grad[c];
      hess += f.value(idx) * tag.lower_order().value(x);
      hess -= hess.trace() / n * Eigen::MatrixXd::Identity(n, n);
      return hess.norm();
    }
  }
  throw ConfigError("fd_residual: unknown tag");
}

double fd_residual(const OperatorTag& tag, const Grid& grid, const Eigen::MatrixXd& bottom,
                   long* nodes_evaluated) {
  if (bottom.rows() != grid.total_nodes() || bottom.cols() != tag.bottom_dim())
    throw ConfigError("fd_residual: bottom sample shape does not match the grid");
  const int margin = fd_margin(tag);
  if (grid.points_per_axis <= 2 * margin)
    throw NumericError("fd_residual: grid too small for the stencil margin");

  double worst = 0.0;
  long count = 0;
  for (long f = 0; f < grid.total_nodes(); ++f) {
    const std::vector<int> idx = grid.unflatten(f);
    if (!grid.has_margin(idx, margin)) continue;
    worst = std::max(worst, fd_residual_at(tag, grid, bottom, idx));
    ++count;
  }
  if (nodes_evaluated) *nodes_evaluated = count;
  return worst;
}

} // namespace prolong
