#pragma once

#include "prolong/geometry.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace prolong {

/// Uniform cube grid with an odd number of nodes per axis, centered at
/// `center`. Node multi-indices run 0..points_per_axis-1 per axis.
struct Grid {
  int n = 0;
  Eigen::VectorXd center;
  double spacing = 0.0;
  int points_per_axis = 0;

  Grid() = default;
  Grid(const Eigen::VectorXd& center_, double spacing_, int points_per_axis_);

  long total_nodes() const;
  Eigen::VectorXd node(const std::vector<int>& idx) const;
  long flat_index(const std::vector<int>& idx) const;
  std::vector<int> unflatten(long flat) const;
  /// True when idx stays >= margin away from every face.
  bool has_margin(const std::vector<int>& idx, int margin) const;
};

/// Order-4 central finite-difference stencils. First derivative uses offsets
/// -2..2 with weights (1, -8, 0, 8, -1)/12h; the pure second derivative uses
/// (-1, 16, -30, 16, -1)/12h^2. Mixed partials compose first-derivative
/// stencils. sample(offset along axis tuple) supplies values.
double fd_first(const std::function<double(int)>& sample_axis_offset, double h);
double fd_second(const std::function<double(int)>& sample_axis_offset, double h);

/// Scalar samples on a grid with order-4 stencil derivatives; throws
/// NumericError when a requested node lacks the stencil margin.
struct GridScalarField {
  Grid grid;
  Eigen::VectorXd values;

  GridScalarField() = default;
  GridScalarField(const Grid& g, Eigen::VectorXd vals);
  static GridScalarField sample(const Grid& g,
                                const std::function<double(const Eigen::VectorXd&)>& f);

  double value(const std::vector<int>& idx) const;
  Eigen::VectorXd gradient(const std::vector<int>& idx) const;
  Eigen::MatrixXd hessian(const std::vector<int>& idx) const;
  /// All third partials d_a d_b d_c (a <= b <= c), margin 6 per axis in the
  /// worst case. Returned in lexicographic (a,b,c) order.
  std::vector<double> third_derivatives(const std::vector<int>& idx) const;

  /// Exact-evaluator view of this grid for the rescaling check (derivatives
  /// by stencils at nodes only).
  ScalarField as_field() const;
};

/// Enumerates all node multi-indices of a grid in row-major order.
std::vector<std::vector<int>> all_nodes(const Grid& g);

} // namespace prolong
