#pragma once

#include <Eigen/Dense>

namespace prolong {

/// SVD-based rank and subspace utilities. Ranks are decided by relative
/// singular-value thresholding; the default 1e-10 keeps the decision far
/// from both the exact small-rational matrix entries handled here and
/// double roundoff.
inline constexpr double kRankRelTol = 1e-10;

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = kRankRelTol);

/// Orthonormal basis of the column space (thin SVD, retained left vectors).
Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, double rel_tol = kRankRelTol);

/// Orthonormal basis of the kernel (right singular vectors for discarded
/// values). A matrix with zero rows has full kernel.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol = kRankRelTol);

/// Orthonormal basis of span(a) intersected with span(b); columns of a and b
/// span the subspaces.
Eigen::MatrixXd subspace_intersection(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                      double rel_tol = kRankRelTol);

/// || v - P_span(basis) v ||, with basis orthonormalized internally.
double projection_residual(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis,
                           double rel_tol = kRankRelTol);

/// True when every column of sub lies in span(big) within tol (absolute,
/// columns normalized first).
bool subspace_contained(const Eigen::MatrixXd& sub, const Eigen::MatrixXd& big, double tol);

} // namespace prolong
