#pragma once

#include "prolong/forms.hpp"
#include "prolong/module.hpp"

#include <Eigen/Dense>

namespace prolong {

/// The three summands of Lambda^k g_1 tensor W = im(d) + (ker d cap ker d*)
/// + im(d*), each as an orthonormal column basis over the form coordinates.
struct HodgeDecomposition {
  int k = 0;
  Eigen::MatrixXd im_d;      // image of d from degree k-1 (empty at k = 0)
  Eigen::MatrixXd harmonic;  // ker d cap ker d*
  Eigen::MatrixXd im_dstar;  // image of d* from degree k+1
};

/// Computes the decomposition at degree 0 <= k <= 2 and verifies that the
/// three dimensions sum to C(n,k) dim W; throws InvariantError otherwise.
HodgeDecomposition hodge_decompose(const GradedModule& mod, int k, double rel_tol = 1e-10);

/// The homogeneity-preserving partial inverse of d: vanishes on ker(d*) and
/// inverts d on im(d), mapping Lambda^k to Lambda^{k-1} for k in {1, 2}.
/// Built from the splitting Lambda^k = im(d) + ker(d*); throws NumericError
/// if d restricted to im(d*) fails to be injective.
Eigen::MatrixXd delta_star(const GradedModule& mod, int k, double rel_tol = 1e-10);

/// phi_i: W_i -> tensor^i g_1 tensor W_0, the iterated g_{-1} action
/// (id tensor ... tensor d) o ... o d; phi_0 is the identity on W_0.
/// Matrix is (n^i * dim W_0) x dim W_i over the adapted component basis,
/// row index = (a_1..a_i row-major, W_0 coordinate minor).
Eigen::MatrixXd phi_map(const GradedModule& mod, int i);

/// Cartan product projection data for S^r g_1 tensor W_0.
/// Scalar family: the tracefree (harmonic) projection of degree-r symmetric
/// tensors over the Euclidean form of g_1, idempotent by construction, with
/// coordinates over the homogeneous monomial basis of degree r.
/// Adjoint family (r = 1): the orthogonal projection of g_1 tensor W_0 onto
/// the harmonic subspace H_1 extracted from hodge_decompose.
struct CartanProduct {
  int rank = 0;
  Eigen::MatrixXd projection;   // square, idempotent, identity on the image
  Eigen::MatrixXd image_basis;  // orthonormal columns spanning H_1
  Eigen::MatrixXd kernel_basis; // orthonormal columns spanning ker K
};

CartanProduct cartan_product_projection(const GradedModule& mod);

/// Basis matrix of the symmetric subspace S^i g_1 inside tensor^i g_1
/// (columns indexed by degree-i monomials in n symbols, rows by row-major
/// tensor multi-indices; entries are 0/1 over the orbit of each monomial).
Eigen::MatrixXd symmetric_embedding(int n, int i);

} // namespace prolong
