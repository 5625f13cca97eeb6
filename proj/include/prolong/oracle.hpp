#pragma once

#include "prolong/geometry.hpp"
#include "prolong/grid.hpp"
#include "prolong/multipoly.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace prolong {

/// Trial space for collocation: monomials of total degree <= d in n
/// variables, in the graded ordering of MonomialBasis; dim = C(n+d, d).
using PolynomialSpace = MonomialBasis;

/// Which differential operator a residual or collocation run refers to.
class OperatorTag {
public:
  enum class Kind {
    FlatScalarPower,      // tracefree symmetrized r-th partial derivative
    FlatConformalKilling, // tracefree symmetrized gradient on vector fields
    HessianPlusA          // nabla_(a nabla_b)0 f + f A_ab on a catalog chart
  };

  static OperatorTag flat_scalar_power(int n, int r);
  static OperatorTag flat_conformal_killing(int n);
  static OperatorTag hessian_plus_a(const MetricChart& chart, const LowerOrderTensor& a);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int r() const { return r_; }
  const MetricChart& chart() const { return chart_; }
  const LowerOrderTensor& lower_order() const { return a_; }
  /// Components of the bottom field the operator acts on (1 or n).
  int bottom_dim() const { return kind_ == Kind::FlatConformalKilling ? n_ : 1; }

private:
  Kind kind_ = Kind::FlatScalarPower;
  int n_ = 0;
  int r_ = 2;
  MetricChart chart_;
  LowerOrderTensor a_;
};

struct CollocationResult {
  int dimension = 0;
  Eigen::MatrixXd basis;           // coefficient columns over the trial basis
  Eigen::VectorXd singular_values; // all, descending
  int trial_dim = 0;
};

struct CollocationOptions {
  int samples = 0;        // 0: 3x trial dimension
  std::uint64_t seed = 20240915;
  double svd_rel_tol = 1e-8;
  double min_gap = 10.0;  // retained/discarded singular value ratio
  double sample_radius = 0.0; // 0: chart-dependent default
};

/// Assembles D(p)(x_s) = 0 over the trial coefficients and returns the
/// numerical nullspace. On the sphere chart the scalar trial functions are
/// monomials weighted by the stereographic factor 1/(1 + |x|^2 / rho^2),
/// which is the natural polynomial-sized space on that chart. Throws
/// NumericError when the singular-value gap at the cut is below min_gap.
CollocationResult collocation_nullspace(const OperatorTag& tag, int degree,
                                        const CollocationOptions& opts = {});

/// Runs the nullspace at degree d and d+1 and checks the dimension does not
/// grow (empirical completeness of the degree bound).
CollocationResult collocation_nullspace_audited(const OperatorTag& tag, int degree,
                                                const CollocationOptions& opts = {});

/// Evaluates the operator for a polynomial bottom field exactly (used for
/// collocation rows and by tests).
Eigen::VectorXd operator_value(const OperatorTag& tag, const std::vector<MultiPoly>& bottom,
                               const Eigen::VectorXd& x);

/// Converts a coefficient column of a collocation basis into the polynomial
/// bottom field it represents.
std::vector<MultiPoly> collocation_polynomials(const OperatorTag& tag, int degree,
                                               const Eigen::VectorXd& coeffs);

/// Max residual of the operator over interior grid nodes, evaluated with
/// order-4 stencils from grid samples of the bottom field (nodes x
/// bottom_dim). Exact polynomial solutions on the flat chart come out at
/// roundoff level. Throws NumericError when the grid lacks stencil margin.
double fd_residual(const OperatorTag& tag, const Grid& grid, const Eigen::MatrixXd& bottom,
                   long* nodes_evaluated = nullptr);

/// FD residual at a single interior node (exposed for per-node reports).
double fd_residual_at(const OperatorTag& tag, const Grid& grid, const Eigen::MatrixXd& bottom,
                      const std::vector<int>& idx);

/// Stencil margin (nodes per axis) the tag's FD evaluation needs.
int fd_margin(const OperatorTag& tag);

} // namespace prolong
