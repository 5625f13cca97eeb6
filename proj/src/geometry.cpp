#include "prolong/geometry.hpp"

#include "prolong/exceptions.hpp"

#include <cmath>

namespace prolong {

std::string MetricChart::family_name() const {
  switch (family) {
    case Family::Flat: return "flat";
    case Family::ConformalPoly: return "conformal_poly";
    case Family::Sphere: return "sphere";
    case Family::Hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

MetricChart flat_chart(int n) {
  if (n < 2) throw ConfigError("flat_chart: n >= 2 required");
  MetricChart c;
  c.n = n;
  c.family = MetricChart::Family::Flat;
  return c;
}

MetricChart sphere_chart(int n, double radius) {
  if (n < 2) throw ConfigError("sphere_chart: n >= 2 required");
  if (radius <= 0) throw ConfigError("sphere_chart: radius must be positive");
  MetricChart c;
  c.n = n;
  c.family = MetricChart::Family::Sphere;
  c.radius = radius;
  c.domain_radius = 3.0 * radius;
  return c;
}

MetricChart hyperbolic_chart(int n, double radius) {
  if (n < 2) throw ConfigError("hyperbolic_chart: n >= 2 required");
  if (radius <= 0) throw ConfigError("hyperbolic_chart: radius must be positive");
  MetricChart c;
  c.n = n;
  c.family = MetricChart::Family::Hyperbolic;
  c.radius = radius;
  c.domain_radius = 0.9 * radius;
  return c;
}

MetricChart conformal_poly_chart(int n, const MultiPoly& phi, double domain_radius) {
  if (n < 2) throw ConfigError("conformal_poly_chart: n >= 2 required");
  if (phi.nvars() != n) throw ConfigError("conformal_poly_chart: phi has the wrong variable count");
  MetricChart c;
  c.n = n;
  c.family = MetricChart::Family::ConformalPoly;
  c.phi_poly = phi;
  c.domain_radius = domain_radius;
  return c;
}

bool in_domain(const MetricChart& chart, const Eigen::VectorXd& x) {
  if (x.size() != chart.n) return false;
  if (chart.domain_radius <= 0) return true;
  return x.norm() <= chart.domain_radius;
}

void require_in_domain(const MetricChart& chart, const Eigen::VectorXd& x) {
  if (!in_domain(chart, x))
    throw ConfigError("point outside the declared domain of the " + chart.family_name() +
                      " chart");
}

namespace {

// Signed quadratic rho^2 + s |x|^2 entering the sphere (+1) and hyperbolic
// (-1) conformal factors.
double cone_arg(const MetricChart& chart, const Eigen::VectorXd& x, double sign) {
  return chart.radius * chart.radius + sign * x.squaredNorm();
}

} // namespace

double phi_value(const MetricChart& chart, const Eigen::VectorXd& x) {
  require_in_domain(chart, x);
  const double r2 = chart.radius * chart.radius;
  switch (chart.family) {
    case MetricChart::Family::Flat: return 0.0;
    case MetricChart::Family::ConformalPoly: return chart.phi_poly.eval(x);
    case MetricChart::Family::Sphere: return std::log(2.0 * r2 / cone_arg(chart, x, +1.0));
    case MetricChart::Family::Hyperbolic: return std::log(2.0 * r2 / cone_arg(chart, x, -1.0));
  }
  return 0.0;
}

Eigen::VectorXd phi_grad(const MetricChart& chart, const Eigen::VectorXd& x) {
  require_in_domain(chart, x);
  const int n = chart.n;
  switch (chart.family) {
    case MetricChart::Family::Flat: return Eigen::VectorXd::Zero(n);
    case MetricChart::Family::ConformalPoly: {
      Eigen::VectorXd g(n);
      for (int a = 0; a < n; ++a) g[a] = chart.phi_poly.derivative(a).eval(x);
      return g;
    }
    case MetricChart::Family::Sphere: return -2.0 / cone_arg(chart, x, +1.0) * x;
    case MetricChart::Family::Hyperbolic: return 2.0 / cone_arg(chart, x, -1.0) * x;
  }
  return Eigen::VectorXd::Zero(n);
}

Eigen::MatrixXd phi_hess(const MetricChart& chart, const Eigen::VectorXd& x) {
  require_in_domain(chart, x);
  const int n = chart.n;
  switch (chart.family) {
    case MetricChart::Family::Flat: return Eigen::MatrixXd::Zero(n, n);
    case MetricChart::Family::ConformalPoly: {
      Eigen::MatrixXd h(n, n);
      for (int a = 0; a < n; ++a) {
        MultiPoly da = chart.phi_poly.derivative(a);
        for (int b = a; b < n; ++b) h(a, b) = h(b, a) = da.derivative(b).eval(x);
      }
      return h;
    }
    case MetricChart::Family::Sphere: {
      const double u = cone_arg(chart, x, +1.0);
      return -2.0 / u * Eigen::MatrixXd::Identity(n, n) + 4.0 / (u * u) * x * x.transpose();
    }
    case MetricChart::Family::Hyperbolic: {
      const double u = cone_arg(chart, x, -1.0);
      return 2.0 / u * Eigen::MatrixXd::Identity(n, n) + 4.0 / (u * u) * x * x.transpose();
    }
  }
  return Eigen::MatrixXd::Zero(n, n);
}

MultiPoly phi_jet(const MetricChart& chart, const Eigen::VectorXd& x0, int order) {
  require_in_domain(chart, x0);
  const int n = chart.n;
  const double r2 = chart.radius * chart.radius;
  switch (chart.family) {
    case MetricChart::Family::Flat: return MultiPoly(n, order);
    case MetricChart::Family::ConformalPoly: {
      const int d = std::max(order, chart.phi_poly.degree());
      return chart.phi_poly.truncated(d).shifted(x0).truncated(order);
    }
    case MetricChart::Family::Sphere:
    case MetricChart::Family::Hyperbolic: {
      const double sign = chart.family == MetricChart::Family::Sphere ? 1.0 : -1.0;
      MultiPoly u = MultiPoly::constant(n, order, r2);
      for (int a = 0; a < n; ++a) {
        MultiPoly xa = MultiPoly::variable(n, order, a);
        xa.coeffs()[0] = x0[a];
        u += sign * (xa * xa);
      }
      return MultiPoly::constant(n, order, std::log(2.0 * r2)) - MultiPoly::log(u);
    }
  }
  return MultiPoly(n, order);
}

Eigen::MatrixXd metric(const MetricChart& chart, const Eigen::VectorXd& x) {
  return std::exp(2.0 * phi_value(chart, x)) * Eigen::MatrixXd::Identity(chart.n, chart.n);
}

Eigen::MatrixXd metric_inverse(const MetricChart& chart, const Eigen::VectorXd& x) {
  return std::exp(-2.0 * phi_value(chart, x)) * Eigen::MatrixXd::Identity(chart.n, chart.n);
}

std::vector<Eigen::MatrixXd> christoffel(const MetricChart& chart, const Eigen::VectorXd& x) {
  const int n = chart.n;
  const Eigen::VectorXd p = phi_grad(chart, x);
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = 0.0;
        if (a == b) v += p[c];
        if (a == c) v += p[b];
        if (b == c) v -= p[a];
        gamma[a](b, c) = v;
      }
  return gamma;
}

std::vector<std::vector<Eigen::MatrixXd>> christoffel_derivative(const MetricChart& chart,
                                                                 const Eigen::VectorXd& x) {
  const int n = chart.n;
  const Eigen::MatrixXd h = phi_hess(chart, x);
  std::vector<std::vector<Eigen::MatrixXd>> dgamma(
      n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = 0.0;
          if (a == b) v += h(c, d);
          if (a == c) v += h(b, d);
          if (b == c) v -= h(a, d);
          dgamma[a][d](b, c) = v;
        }
  return dgamma;
}

std::vector<std::vector<Eigen::MatrixXd>> riemann(const MetricChart& chart,
                                                  const Eigen::VectorXd& x) {
  const int n = chart.n;
  const auto gamma = christoffel(chart, x);
  const auto dgamma = christoffel_derivative(chart, x);
  std::vector<std::vector<Eigen::MatrixXd>> riem(
      n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = dgamma[i][k](l, j) - dgamma[i][l](k, j);
          for (int e = 0; e < n; ++e)
            v += gamma[i](k, e) * gamma[e](l, j) - gamma[i](l, e) * gamma[e](k, j);
          riem[i][j](k, l) = v;
        }
  return riem;
}

Eigen::MatrixXd ricci(const MetricChart& chart, const Eigen::VectorXd& x) {
  const int n = chart.n;
  const auto riem = riemann(chart, x);
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k) ric(j, l) += riem[k][j](k, l);
  return ric;
}

double scalar_curvature(const MetricChart& chart, const Eigen::VectorXd& x) {
  return std::exp(-2.0 * phi_value(chart, x)) * ricci(chart, x).trace();
}

Eigen::MatrixXd tracefree_ricci(const MetricChart& chart, const Eigen::VectorXd& x) {
  const int n = chart.n;
  const Eigen::MatrixXd ric = ricci(chart, x);
  // (R/n) g equals (tr Ric / n) delta in coordinates for conformally flat g.
  return ric - ric.trace() / n * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd ricci_from_conformal_factor(int n, const Eigen::VectorXd& u_grad,
                                            const Eigen::MatrixXd& u_hess) {
  const double lap = u_hess.trace();
  const double grad2 = u_grad.squaredNorm();
  return -(n - 2) * (u_hess - u_grad * u_grad.transpose()) -
         (lap + (n - 2) * grad2) * Eigen::MatrixXd::Identity(n, n);
}

ScalarField ScalarField::from_poly(const MultiPoly& p) {
  const int n = p.nvars();
  ScalarField f;
  f.value = [p](const Eigen::VectorXd& x) { return p.eval(x); };
  f.grad = [p, n](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(n);
    for (int a = 0; a < n; ++a) g[a] = p.derivative(a).eval(x);
    return g;
  };
  f.hess = [p, n](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h(n, n);
    for (int a = 0; a < n; ++a) {
      MultiPoly da = p.derivative(a);
      for (int b = a; b < n; ++b) h(a, b) = h(b, a) = da.derivative(b).eval(x);
    }
    return h;
  };
  return f;
}

ScalarField ScalarField::constant(int n, double c) {
  ScalarField f;
  f.value = [c](const Eigen::VectorXd&) { return c; };
  f.grad = [n](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(n); };
  f.hess = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(n, n); };
  return f;
}

Eigen::VectorXd cov_deriv_scalar(const MetricChart&, const Eigen::VectorXd&,
                                 const Eigen::VectorXd& grad) {
  return grad;
}

Eigen::MatrixXd cov_deriv_oneform(const MetricChart& chart, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& omega, const Eigen::MatrixXd& jac) {
  const int n = chart.n;
  const auto gamma = christoffel(chart, x);
  Eigen::MatrixXd out = jac;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) out(a, b) -= gamma[c](a, b) * omega[c];
  return out;
}

std::vector<Eigen::MatrixXd> cov_deriv_twotensor(const MetricChart& chart,
                                                 const Eigen::VectorXd& x,
                                                 const Eigen::MatrixXd& t,
                                                 const std::vector<Eigen::MatrixXd>& dt) {
  const int n = chart.n;
  const auto gamma = christoffel(chart, x);
  std::vector<Eigen::MatrixXd> out(n);
  for (int c = 0; c < n; ++c) {
    out[c] = dt[c];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d)
          out[c](a, b) -= gamma[d](c, a) * t(d, b) + gamma[d](c, b) * t(a, d);
  }
  return out;
}

Eigen::MatrixXd covariant_hessian(const MetricChart& chart, const Eigen::VectorXd& x,
                                  const ScalarField& f) {
  return cov_deriv_oneform(chart, x, f.grad(x), f.hess(x));
}

// ---------------------------------------------------------------------------
// LowerOrderTensor
// ---------------------------------------------------------------------------

LowerOrderTensor LowerOrderTensor::zero(int n) {
  LowerOrderTensor a;
  a.n = n;
  a.comps.assign(n * (n + 1) / 2, MultiPoly(n, 0));
  return a;
}

const MultiPoly& LowerOrderTensor::comp(int a, int b) const {
  if (a > b) std::swap(a, b);
  return comps[a * n - a * (a - 1) / 2 + (b - a)];
}

LowerOrderTensor LowerOrderTensor::from_components(int n, const std::vector<MultiPoly>& upper,
                                                   bool declare_tracefree) {
  if (static_cast<int>(upper.size()) != n * (n + 1) / 2)
    throw ConfigError("LowerOrderTensor: expected n(n+1)/2 upper-triangle components");
  LowerOrderTensor a;
  a.n = n;
  a.comps = upper;

  // Coordinate trace; vanishing coordinate trace is equivalent to vanishing
  // g-trace on the conformally flat catalog.
  const int deg = upper[0].degree();
  MultiPoly trace(n, deg);
  for (int d = 0; d < n; ++d) trace += a.comp(d, d);

  if (declare_tracefree) {
    if (trace.norm_inf() > 1e-12)
      throw ConfigError("LowerOrderTensor: components declared tracefree but the trace "
                        "exceeds the tolerance");
    return a;
  }
  for (int d = 0; d < n; ++d) {
    MultiPoly& diag = a.comps[d * n - d * (d - 1) / 2];
    diag -= trace * (1.0 / n);
  }
  a.projected_on_load = true;
  return a;
}

bool LowerOrderTensor::is_zero() const {
  for (const auto& p : comps)
    if (p.norm_inf() != 0.0) return false;
  return true;
}

Eigen::MatrixXd LowerOrderTensor::value(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) out(a, b) = out(b, a) = comp(a, b).eval(x);
  return out;
}

std::vector<Eigen::MatrixXd> LowerOrderTensor::partials(const Eigen::VectorXd& x) const {
  std::vector<Eigen::MatrixXd> out(n, Eigen::MatrixXd(n, n));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        out[c](a, b) = out[c](b, a) = comp(a, b).derivative(c).eval(x);
  return out;
}

std::vector<Eigen::MatrixXd> LowerOrderTensor::covariant(const MetricChart& chart,
                                                         const Eigen::VectorXd& x) const {
  return cov_deriv_twotensor(chart, x, value(x), partials(x));
}

// ---------------------------------------------------------------------------
// Conformal rescaling
// ---------------------------------------------------------------------------

double einstein_residual_of_rescaling(const MetricChart& chart, const ScalarField& f,
                                      const std::vector<Eigen::VectorXd>& region, double eps) {
  if (region.empty()) throw ConfigError("einstein_residual_of_rescaling: empty region");
  const int n = chart.n;
  if (n < 3)
    throw ConfigError("einstein_residual_of_rescaling: needs n >= 3");

  if (eps < 0) {
    double fmax = 0.0;
    for (const auto& x : region) fmax = std::max(fmax, std::abs(f.value(x)));
    eps = 0.3 * fmax;
  }

  double worst = 0.0;
  for (const auto& x : region) {
    require_in_domain(chart, x);
    const double fv = f.value(x);
    if (fv <= eps)
      throw ConfigError("einstein_residual_of_rescaling: f drops below the positivity "
                        "threshold on the region");
    const Eigen::VectorXd fg = f.grad(x);
    const Eigen::MatrixXd fh = f.hess(x);

    // ghat = f^{-2} g = e^{2 phihat} delta with phihat = phi - log f.
    const Eigen::VectorXd pg = phi_grad(chart, x) - fg / fv;
    const Eigen::MatrixXd ph =
        phi_hess(chart, x) - fh / fv + fg * fg.transpose() / (fv * fv);

    const Eigen::MatrixXd ric = ricci_from_conformal_factor(n, pg, ph);
    const Eigen::MatrixXd ric0 =
        ric - ric.trace() / n * Eigen::MatrixXd::Identity(n, n);
    const double phihat = phi_value(chart, x) - std::log(fv);
    worst = std::max(worst, (std::exp(-2.0 * phihat) * ric0).norm());
  }
  return worst;
}

} // namespace prolong
