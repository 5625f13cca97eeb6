#include "prolong/linsolve.hpp"

#include <Eigen/SVD>

namespace prolong {

namespace {

int rank_from_singular_values(const Eigen::VectorXd& sv, double rel_tol) {
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * sv[0];
  int r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  return r;
}

} // namespace

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return rank_from_singular_values(svd.singularValues(), rel_tol);
}

Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.cols() == 0) return Eigen::MatrixXd(0, 0);
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

Eigen::MatrixXd subspace_intersection(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                      double rel_tol) {
  if (a.cols() == 0 || b.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::MatrixXd stacked(a.rows(), a.cols() + b.cols());
  stacked << a, -b;
  Eigen::MatrixXd ker = null_space(stacked, rel_tol);
  if (ker.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::MatrixXd vectors = a * ker.topRows(a.cols());
  return column_space(vectors, rel_tol);
}

double projection_residual(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis,
                           double rel_tol) {
  if (basis.cols() == 0) return v.norm();
  Eigen::MatrixXd q = column_space(basis, rel_tol);
  return (v - q * (q.transpose() * v)).norm();
}

bool subspace_contained(const Eigen::MatrixXd& sub, const Eigen::MatrixXd& big, double tol) {
  for (int j = 0; j < sub.cols(); ++j) {
    Eigen::VectorXd v = sub.col(j);
    const double nv = v.norm();
    if (nv == 0.0) continue;
    if (projection_residual(v / nv, big) > tol) return false;
  }
  return true;
}

} // namespace prolong
