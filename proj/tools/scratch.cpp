#include "prolong/algebra.hpp"
#include "prolong/hodge.hpp"
#include "prolong/linsolve.hpp"
#include "prolong/module.hpp"
#include <iostream>
using namespace prolong;
int main() {
  for (int n : {2, 3}) {
    auto alg = build_algebra(n);
    for (int r : {2, 3}) {
      auto mod = build_module(alg, ModuleSpec::scalar(r));
      auto cartan = cartan_product_projection(mod);
      for (int i = 1; i <= mod.N; ++i) {
        Eigen::MatrixXd phi = phi_map(mod, i);
        Eigen::MatrixXd sym = symmetric_embedding(n, i);
        Eigen::MatrixXd expected;
        if (i < r) expected = column_space(sym);
        else {
          Eigen::MatrixXd symr = symmetric_embedding(n, r);
          Eigen::MatrixXd k_tensor = symr * cartan.kernel_basis;
          int outer = 1; for (int s = 0; s < i - r; ++s) outer *= n;
          Eigen::MatrixXd lifted(outer * k_tensor.rows(), outer * k_tensor.cols());
          lifted.setZero();
          for (int b = 0; b < outer; ++b)
            lifted.block(b * k_tensor.rows(), b * k_tensor.cols(), k_tensor.rows(), k_tensor.cols()) = k_tensor;
          expected = subspace_intersection(column_space(sym), column_space(lifted));
        }
        double worst_fwd = 0, worst_bwd = 0;
        for (int c = 0; c < phi.cols(); ++c) {
          Eigen::VectorXd v = phi.col(c); if (v.norm() > 0) v /= v.norm();
          worst_fwd = std::max(worst_fwd, projection_residual(v, expected));
        }
        for (int c = 0; c < expected.cols(); ++c)
          worst_bwd = std::max(worst_bwd, projection_residual(expected.col(c), phi));
        std::cout << "n=" << n << " r=" << r << " i=" << i
                  << " rank_phi=" << numerical_rank(phi) << " dimWi=" << mod.comp_dim[i]
                  << " rank_expected=" << numerical_rank(expected)
                  << " cols_expected=" << expected.cols()
                  << " fwd=" << worst_fwd << " bwd=" << worst_bwd << "\n";
      }
    }
  }
  return 0;
}
