#include "prolong/hodge.hpp"

#include "prolong/exceptions.hpp"
#include "prolong/linsolve.hpp"
#include "prolong/multipoly.hpp"

#include <Eigen/SVD>

namespace prolong {

namespace {

// Euclidean Laplacian S^d -> S^{d-2} over homogeneous monomial coefficients
// in n symbols.
Eigen::MatrixXd sym_laplacian(int n, int d) {
  const MonomialBasis from(n, d, true);
  const MonomialBasis to(n, d - 2, true);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(to.size(), from.size());
  for (int i = 0; i < from.size(); ++i) {
    const auto& alpha = from.exponent(i);
    for (int p = 0; p < n; ++p) {
      if (alpha[p] < 2) continue;
      std::vector<int> beta = alpha;
      beta[p] -= 2;
      out(to.index_of(beta), i) += alpha[p] * (alpha[p] - 1);
    }
  }
  return out;
}

// Multiplication by |x|^2: S^{d-2} -> S^d.
Eigen::MatrixXd sym_radius2(int n, int d) {
  const MonomialBasis from(n, d - 2, true);
  const MonomialBasis to(n, d, true);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(to.size(), from.size());
  for (int i = 0; i < from.size(); ++i) {
    const auto& alpha = from.exponent(i);
    for (int p = 0; p < n; ++p) {
      std::vector<int> beta = alpha;
      beta[p] += 2;
      out(to.index_of(beta), i) += 1.0;
    }
  }
  return out;
}

} // namespace

HodgeDecomposition hodge_decompose(const GradedModule& mod, int k, double rel_tol) {
  if (k < 0 || k > 2)
    throw ConfigError("hodge_decompose: degree must be in 0..2");
  const int total = form_dim(mod, k);

  HodgeDecomposition dec;
  dec.k = k;

  dec.im_d = k == 0 ? Eigen::MatrixXd(total, 0)
                    : column_space(detail::lie_differential_any(mod, k - 1), rel_tol);
  dec.im_dstar = k == mod.n ? Eigen::MatrixXd(total, 0)
                            : column_space(detail::codifferential_any(mod, k + 1), rel_tol);

  const Eigen::MatrixXd d_here = k == mod.n
                                     ? Eigen::MatrixXd(0, total)
                                     : detail::lie_differential_any(mod, k);
  const Eigen::MatrixXd dstar_here =
      k == 0 ? Eigen::MatrixXd(0, total) : detail::codifferential_any(mod, k);
  Eigen::MatrixXd stacked(d_here.rows() + dstar_here.rows(), total);
  stacked << d_here, dstar_here;
  dec.harmonic = null_space(stacked, rel_tol);

  const int sum = static_cast<int>(dec.im_d.cols() + dec.harmonic.cols() + dec.im_dstar.cols());
  if (sum != total)
    throw InvariantError("hodge_decompose: subspace dimensions do not sum to the total (got " +
                         std::to_string(sum) + ", expected " + std::to_string(total) + ")");
  return dec;
}

Eigen::MatrixXd delta_star(const GradedModule& mod, int k, double rel_tol) {
  if (k < 1 || k > 2)
    throw ConfigError("delta_star: degree must be 1 or 2");

  const int total = form_dim(mod, k);
  const int lower = form_dim(mod, k - 1);

  // Lambda^k = im(d) + ker(d*); project onto im(d) along ker(d*), then apply
  // the inverse of d restricted to im(d*) at degree k-1.
  const Eigen::MatrixXd p = column_space(detail::codifferential_any(mod, k), rel_tol);
  const Eigen::MatrixXd kker = null_space(detail::codifferential_any(mod, k), rel_tol);
  const Eigen::MatrixXd d_low = detail::lie_differential_any(mod, k - 1);
  const Eigen::MatrixXd dp = d_low * p;

  if (p.cols() == 0) return Eigen::MatrixXd::Zero(lower, total);

  if (numerical_rank(dp, rel_tol) != dp.cols())
    throw NumericError("delta_star: d restricted to im(d*) is not injective");

  Eigen::MatrixXd basis(total, dp.cols() + kker.cols());
  basis << dp, kker;
  if (basis.cols() != total || numerical_rank(basis, rel_tol) != total)
    throw NumericError("delta_star: im(d) + ker(d*) does not split Lambda^k");

  // delta* = P [I 0] basis^{-1}: coordinates of the im(d)-part pulled back
  // through d.
  Eigen::MatrixXd coeffs = basis.partialPivLu().solve(Eigen::MatrixXd::Identity(total, total));
  return p * coeffs.topRows(p.cols());
}

Eigen::MatrixXd phi_map(const GradedModule& mod, int i) {
  if (i < 0 || i > mod.N)
    throw ConfigError("phi_map: component index out of 0..N");
  const int w0 = mod.comp_dim[0];
  if (i == 0) return Eigen::MatrixXd::Identity(w0, w0);

  const int wi = mod.comp_dim[i];
  int rows = w0;
  for (int s = 0; s < i; ++s) rows *= mod.n;
  Eigen::MatrixXd out(rows, wi);

  // Column = iterated action rho(X_{a_i}) ... rho(X_{a_1}) w projected to
  // W_0; the actions commute so any bracketing of the recursion agrees.
  std::vector<int> tuple(i, 0);
  for (int col = 0; col < wi; ++col) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(mod.dim);
    w[mod.comp_offset[i] + col] = 1.0;
    std::fill(tuple.begin(), tuple.end(), 0);
    bool done = false;
    while (!done) {
      Eigen::VectorXd v = w;
      int flat = 0;
      for (int s = 0; s < i; ++s) {
        v = mod.action_minus1[tuple[s]] * v;
        flat = flat * mod.n + tuple[s];
      }
      out.block(flat * w0, col, w0, 1) = mod.component(v, 0);
      for (int s = i - 1; s >= 0; --s) {
        if (++tuple[s] < mod.n) break;
        tuple[s] = 0;
        if (s == 0) done = true;
      }
    }
  }
  return out;
}

Eigen::MatrixXd symmetric_embedding(int n, int i) {
  const MonomialBasis monos(n, i, true);
  int rows = 1;
  for (int s = 0; s < i; ++s) rows *= n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, monos.size());
  if (i == 0) return Eigen::MatrixXd::Ones(1, 1);

  // Column alpha is the symmetric tensor with T(v..v) = v^alpha: the orbit
  // indicator scaled by 1/multinomial(alpha), so polynomial-coefficient data
  // maps onto genuine tensor coordinates.
  Eigen::VectorXd inv_mult(monos.size());
  for (int m = 0; m < monos.size(); ++m) {
    const auto& alpha = monos.exponent(m);
    double mult = 1.0;
    int total = 0;
    for (int v = 0; v < n; ++v)
      for (int e = 1; e <= alpha[v]; ++e) mult *= static_cast<double>(++total) / e;
    inv_mult[m] = 1.0 / mult;
  }

  std::vector<int> tuple(i, 0);
  bool done = false;
  while (!done) {
    std::vector<int> alpha(n, 0);
    int flat = 0;
    for (int s = 0; s < i; ++s) {
      alpha[tuple[s]] += 1;
      flat = flat * n + tuple[s];
    }
    const int m = monos.index_of(alpha);
    out(flat, m) = inv_mult[m];
    for (int s = i - 1; s >= 0; --s) {
      if (++tuple[s] < n) break;
      tuple[s] = 0;
      if (s == 0) done = true;
    }
  }
  return out;
}

CartanProduct cartan_product_projection(const GradedModule& mod) {
  CartanProduct cp;
  if (mod.spec.family == ModuleSpec::Family::Scalar) {
    const int n = mod.n;
    const int r = mod.spec.r;
    const MonomialBasis monos(n, r, true);
    const int dim = monos.size();
    if (r < 2) {
      cp.projection = Eigen::MatrixXd::Identity(dim, dim);
      cp.image_basis = Eigen::MatrixXd::Identity(dim, dim);
      cp.kernel_basis = Eigen::MatrixXd(dim, 0);
      cp.rank = dim;
      return cp;
    }
    // Tracefree projection along |x|^2 S^{r-2}: P = I - M (L M)^{-1} L with
    // L the Laplacian and M multiplication by |x|^2.
    const Eigen::MatrixXd lap = sym_laplacian(n, r);
    const Eigen::MatrixXd mul = sym_radius2(n, r);
    const Eigen::MatrixXd lm = lap * mul;
    cp.projection = Eigen::MatrixXd::Identity(dim, dim) -
                    mul * lm.partialPivLu().solve(lap);
    cp.image_basis = column_space(cp.projection);
    cp.kernel_basis = column_space(mul);
    cp.rank = static_cast<int>(cp.image_basis.cols());
    return cp;
  }

  // Adjoint family (r = 1): H_1 inside g_1 tensor W_0, read off from the
  // degree-one Hodge decomposition restricted to homogeneity 1.
  const HodgeDecomposition dec = hodge_decompose(mod, 1);
  const int w0 = mod.comp_dim[0];
  const int sub = mod.n * w0;
  Eigen::MatrixXd h1(sub, dec.harmonic.cols());
  for (int c = 0; c < dec.harmonic.cols(); ++c) {
    Eigen::VectorXd v = dec.harmonic.col(c);
    double off_block = 0.0;
    for (int a = 0; a < mod.n; ++a) {
      h1.block(a * w0, c, w0, 1) = v.segment(a * mod.dim + mod.comp_offset[0], w0);
      Eigen::VectorXd rest = v.segment(a * mod.dim, mod.dim);
      rest.segment(mod.comp_offset[0], w0).setZero();
      off_block += rest.squaredNorm();
    }
    if (off_block > 1e-20)
      throw InvariantError(
          "cartan_product_projection: harmonic degree-one space is not "
          "concentrated in homogeneity one");
  }
  cp.image_basis = column_space(h1);
  cp.projection = cp.image_basis * cp.image_basis.transpose();
  cp.kernel_basis = null_space(cp.image_basis.transpose());
  cp.rank = static_cast<int>(cp.image_basis.cols());
  return cp;
}

} // namespace prolong
