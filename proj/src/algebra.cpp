#include "prolong/algebra.hpp"

#include "prolong/exceptions.hpp"

#include <string>

namespace prolong {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw InvariantError("build_algebra: " + what);
}

} // namespace

Eigen::MatrixXd bracket(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return x * y - y * x;
}

int GradedLieAlgebra::rotation_index(int a, int b) const {
  // M_{ab} with 0 <= a < b < n, lexicographic in (a, b).
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

Eigen::MatrixXd GradedLieAlgebra::element_minus1(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 2, n + 2);
  for (int a = 0; a < n; ++a) m += x[a] * basis_minus1[a];
  return m;
}

Eigen::MatrixXd GradedLieAlgebra::element_1(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 2, n + 2);
  for (int a = 0; a < n; ++a) m += z[a] * basis_1[a];
  return m;
}

Eigen::MatrixXd GradedLieAlgebra::element_rotation(const Eigen::MatrixXd& omega) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 2, n + 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) m += omega(a, b) * basis_0[rotation_index(a, b)];
  return m;
}

GradedLieAlgebra build_algebra(int n) {
  if (n < 2) throw ConfigError("build_algebra: chart dimension must be >= 2");

  const int d = n + 2;
  GradedLieAlgebra alg;
  alg.n = n;

  alg.J = Eigen::MatrixXd::Zero(d, d);
  alg.J(0, n + 1) = 1.0;
  alg.J(n + 1, 0) = 1.0;
  for (int i = 1; i <= n; ++i) alg.J(i, i) = 1.0;

  alg.E = Eigen::MatrixXd::Zero(d, d);
  alg.E(0, 0) = 1.0;
  alg.E(n + 1, n + 1) = -1.0;

  // g_{-1}: X in the (1..n, 0) block with -X^t in row n+1.
  for (int a = 1; a <= n; ++a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    m(a, 0) = 1.0;
    m(n + 1, a) = -1.0;
    alg.basis_minus1.push_back(m);
  }

  // g_0: o(n) rotations of the middle block, then the grading element.
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
      m(a, b) = 1.0;
      m(b, a) = -1.0;
      alg.basis_0.push_back(m);
    }
  alg.basis_0.push_back(alg.E);

  // g_1: Z in row 0 with -Z^t in the (1..n, n+1) block.
  for (int a = 1; a <= n; ++a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    m(0, a) = 1.0;
    m(a, n + 1) = -1.0;
    alg.basis_1.push_back(m);
  }

  check(alg.dim_minus1() == n && alg.dim_1() == n, "graded piece dimension is off");
  check(alg.dim_0() == n * (n - 1) / 2 + 1, "g_0 dimension is off");
  check(alg.total_dim() == (n + 2) * (n + 1) / 2, "total dimension is off");

  const double tol = 1e-13;
  auto grade_of = [&](int which) {
    return which == 0 ? alg.basis_minus1 : (which == 1 ? alg.basis_0 : alg.basis_1);
  };
  const int grade_value[3] = {-1, 0, 1};

  for (int gi = 0; gi < 3; ++gi) {
    for (const auto& m : grade_of(gi)) {
      check((m.transpose() * alg.J + alg.J * m).norm() < tol,
            "basis element is not antisymmetric for J");
      check((bracket(alg.E, m) - grade_value[gi] * m).norm() < tol,
            "grading eigenvalue mismatch");
    }
  }

  // [g_i, g_j] lands in g_{i+j} (zero when out of range). Eigenvalue under
  // ad(E) identifies the target piece.
  for (int gi = 0; gi < 3; ++gi)
    for (int gj = 0; gj < 3; ++gj)
      for (const auto& x : grade_of(gi))
        for (const auto& y : grade_of(gj)) {
          Eigen::MatrixXd br = bracket(x, y);
          const int sum = grade_value[gi] + grade_value[gj];
          if (sum < -1 || sum > 1) {
            check(br.norm() < tol, "bracket should vanish outside the grading range");
          } else {
            check((bracket(alg.E, br) - sum * br).norm() < tol,
                  "bracket lands in the wrong graded piece");
          }
        }

  for (const auto& x : alg.basis_1)
    for (const auto& y : alg.basis_1)
      check(bracket(x, y).norm() < tol, "g_1 must be abelian");

  return alg;
}

} // namespace prolong
