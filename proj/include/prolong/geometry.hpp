#pragma once

#include "prolong/multipoly.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace prolong {

/// Catalog of analytic Riemannian metrics on chart domains. Every entry is
/// conformally flat, g_ab = e^{2 phi} delta_ab, with phi and its first two
/// derivative tensors available in closed form:
///   flat            phi = 0
///   conformal_poly  phi a polynomial in chart coordinates
///   sphere(rho)     phi = log(2 rho^2 / (rho^2 + |x|^2)),   |x| <= 3 rho
///   hyperbolic(rho) phi = log(2 rho^2 / (rho^2 - |x|^2)),   |x| <= 0.9 rho
struct MetricChart {
  enum class Family { Flat, ConformalPoly, Sphere, Hyperbolic };
  int n = 0;
  Family family = Family::Flat;
  double radius = 1.0;      // sphere / hyperbolic
  MultiPoly phi_poly;       // conformal_poly
  double domain_radius = 0; // admissible |x|; 0 means unbounded

  std::string family_name() const;
};

MetricChart flat_chart(int n);
MetricChart sphere_chart(int n, double radius);
MetricChart hyperbolic_chart(int n, double radius);
MetricChart conformal_poly_chart(int n, const MultiPoly& phi, double domain_radius = 10.0);

bool in_domain(const MetricChart& chart, const Eigen::VectorXd& x);
void require_in_domain(const MetricChart& chart, const Eigen::VectorXd& x);

double phi_value(const MetricChart& chart, const Eigen::VectorXd& x);
Eigen::VectorXd phi_grad(const MetricChart& chart, const Eigen::VectorXd& x);
Eigen::MatrixXd phi_hess(const MetricChart& chart, const Eigen::VectorXd& x);
/// Taylor expansion of phi in offset variables h = x - x0, truncated at the
/// requested order; exact for every catalog family.
MultiPoly phi_jet(const MetricChart& chart, const Eigen::VectorXd& x0, int order);

Eigen::MatrixXd metric(const MetricChart& chart, const Eigen::VectorXd& x);
Eigen::MatrixXd metric_inverse(const MetricChart& chart, const Eigen::VectorXd& x);

/// Gamma[a](b,c) = delta_ab phi_c + delta_ac phi_b - delta_bc phi_a.
std::vector<Eigen::MatrixXd> christoffel(const MetricChart& chart, const Eigen::VectorXd& x);
/// dGamma[a][d](b,c) = d_d Gamma^a_bc (exact).
std::vector<std::vector<Eigen::MatrixXd>> christoffel_derivative(const MetricChart& chart,
                                                                 const Eigen::VectorXd& x);

/// Riemann tensor R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
/// + Gamma^i_{ke} Gamma^e_{lj} - Gamma^i_{le} Gamma^e_{kj}; the round sphere
/// then carries positive sectional and scalar curvature. Returned as
/// riem[i][j](k,l).
std::vector<std::vector<Eigen::MatrixXd>> riemann(const MetricChart& chart,
                                                  const Eigen::VectorXd& x);

/// Ric_{jl} = R^k_{jkl}; scalar curvature R = g^{jl} Ric_{jl};
/// tracefree part Ric - (R/n) g. All coordinate components.
Eigen::MatrixXd ricci(const MetricChart& chart, const Eigen::VectorXd& x);
double scalar_curvature(const MetricChart& chart, const Eigen::VectorXd& x);
Eigen::MatrixXd tracefree_ricci(const MetricChart& chart, const Eigen::VectorXd& x);

/// Ricci of e^{2u} delta from the gradient and Hessian of u (n >= 3):
///   Ric_ab = -(n-2)(u_ab - u_a u_b) - (Lap u + (n-2)|grad u|^2) delta_ab.
Eigen::MatrixXd ricci_from_conformal_factor(int n, const Eigen::VectorXd& u_grad,
                                            const Eigen::MatrixXd& u_hess);

// ---------------------------------------------------------------------------
// Component fields on the chart (coordinate components).
// ---------------------------------------------------------------------------

/// A scalar field with value, gradient and Hessian evaluators. Exact for
/// polynomial data; grid-backed fields use order-4 central stencils.
struct ScalarField {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess;

  static ScalarField from_poly(const MultiPoly& p);
  static ScalarField constant(int n, double c);
};

/// Covariant derivatives of component fields from exact partials.
Eigen::VectorXd cov_deriv_scalar(const MetricChart& chart, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& grad);
/// in: omega_b and jac(a,b) = d_a omega_b; out(a,b) = nabla_a omega_b.
Eigen::MatrixXd cov_deriv_oneform(const MetricChart& chart, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& omega, const Eigen::MatrixXd& jac);
/// in: T(a,b) and dT[c](a,b) = d_c T_ab; out[c](a,b) = nabla_c T_ab.
std::vector<Eigen::MatrixXd> cov_deriv_twotensor(const MetricChart& chart,
                                                 const Eigen::VectorXd& x,
                                                 const Eigen::MatrixXd& t,
                                                 const std::vector<Eigen::MatrixXd>& dt);

/// Covariant Hessian nabla_a nabla_b f of a scalar field.
Eigen::MatrixXd covariant_hessian(const MetricChart& chart, const Eigen::VectorXd& x,
                                  const ScalarField& f);

// ---------------------------------------------------------------------------
// Symmetric tracefree lower-order coefficient A_ab.
// ---------------------------------------------------------------------------

/// Symmetric 2-tensor field with polynomial coordinate components, projected
/// to its (conformally flat charts: coordinate) tracefree part on load.
struct LowerOrderTensor {
  int n = 0;
  std::vector<MultiPoly> comps; // upper triangle row-major: (0,0),(0,1),..,(n-1,n-1)
  bool projected_on_load = false;

  static LowerOrderTensor zero(int n);
  /// components: full upper triangle of A_ab. If declare_tracefree is set the
  /// trace must already vanish (checked); otherwise the tracefree projection
  /// A - (tr A / n) delta is applied.
  static LowerOrderTensor from_components(int n, const std::vector<MultiPoly>& upper,
                                          bool declare_tracefree);

  bool is_zero() const;
  Eigen::MatrixXd value(const Eigen::VectorXd& x) const;
  std::vector<Eigen::MatrixXd> partials(const Eigen::VectorXd& x) const; // d_c A_ab
  /// nabla_c A_ab in coordinate components.
  std::vector<Eigen::MatrixXd> covariant(const MetricChart& chart,
                                         const Eigen::VectorXd& x) const;

private:
  const MultiPoly& comp(int a, int b) const;
};

// ---------------------------------------------------------------------------
// Conformal rescaling check.
// ---------------------------------------------------------------------------

/// Max over the region of |Ric0(ghat)| in ghat-orthonormal components for
/// ghat = f^{-2} g. Requires f > eps on the region (eps defaults to
/// 0.3 * max |f|); throws ConfigError when violated.
double einstein_residual_of_rescaling(const MetricChart& chart, const ScalarField& f,
                                      const std::vector<Eigen::VectorXd>& region,
                                      double eps = -1.0);

} // namespace prolong
