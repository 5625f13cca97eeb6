#pragma once

#include <Eigen/Dense>
#include <vector>

namespace prolong {

/// Matrix model of o(n+1,1) adapted to the light-cone bilinear form
///   <x,y> = x_0 y_{n+1} + x_{n+1} y_0 + sum_{i=1..n} x_i y_i
/// on R^{n+2} (coordinates numbered 0..n+1). The grading element
/// E = diag(1, 0, ..., 0, -1) splits the algebra into
/// g_{-1} + g_0 + g_1, with g_{-1} the lower-left block, g_1 the
/// upper-right block, and g_0 the o(n) rotations together with E.
struct GradedLieAlgebra {
  int n = 0;             // chart dimension
  Eigen::MatrixXd J;     // (n+2)x(n+2) bilinear form, signature (n+1,1)
  Eigen::MatrixXd E;     // grading element
  std::vector<Eigen::MatrixXd> basis_minus1; // X_a, a = 1..n
  std::vector<Eigen::MatrixXd> basis_0;      // rotations M_{ab} (a<b, lex), then E
  std::vector<Eigen::MatrixXd> basis_1;      // Z_a, a = 1..n

  int dim_minus1() const { return static_cast<int>(basis_minus1.size()); }
  int dim_0() const { return static_cast<int>(basis_0.size()); }
  int dim_1() const { return static_cast<int>(basis_1.size()); }
  int total_dim() const { return dim_minus1() + dim_0() + dim_1(); }

  /// Index of the rotation generator M_{ab} (0 <= a < b < n) inside basis_0.
  int rotation_index(int a, int b) const;

  /// Arbitrary elements of the graded pieces.
  Eigen::MatrixXd element_minus1(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd element_1(const Eigen::VectorXd& z) const;
  /// Embeds an antisymmetric n x n matrix into the o(n) block of g_0.
  Eigen::MatrixXd element_rotation(const Eigen::MatrixXd& omega) const;
};

Eigen::MatrixXd bracket(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Builds the algebra for chart dimension n >= 2 and verifies the grading
/// relations, antisymmetry with respect to J, and the dimension counts.
GradedLieAlgebra build_algebra(int n);

} // namespace prolong
