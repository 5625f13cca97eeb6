#pragma once

#include "prolong/module.hpp"

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace prolong {

/// Lexicographic list of ascending k-element subsets of {0..n-1}; the
/// coordinate basis of Lambda^k g_1 tensor W is (combination major, module
/// coordinate minor).
const std::vector<std::vector<int>>& form_combinations(int n, int k);
int form_dim(const GradedModule& mod, int k);
int form_coord(const GradedModule& mod, int k, int combo_index, int module_coord);

/// Homogeneity of a basis element: module component index + k.
int form_homogeneity(const GradedModule& mod, int k, int coord);

/// A coordinate vector in Lambda^k g_1 tensor W with homogeneity
/// bookkeeping. Splitting by homogeneity is a direct sum decomposition.
struct FormBlock {
  int k = 0;
  const GradedModule* module = nullptr;
  Eigen::VectorXd coords;

  FormBlock() = default;
  FormBlock(int k_, const GradedModule& mod, const Eigen::VectorXd& coords_);

  std::map<int, Eigen::VectorXd> split_by_homogeneity() const;
  static FormBlock from_homogeneity_parts(int k, const GradedModule& mod,
                                          const std::map<int, Eigen::VectorXd>& parts);
};

/// Matrix of the Lie algebra differential d: Lambda^k -> Lambda^{k+1},
///   (d a)(X_0..X_k) = sum_i (-1)^i X_i . a(..omit i..).
/// Public degrees 0 and 1; d_{k+1} d_k = 0 because g_{-1} is abelian.
Eigen::MatrixXd lie_differential(const GradedModule& mod, int k);

/// Matrix of the codifferential d*: Lambda^k -> Lambda^{k-1},
///   d*(Z_1^..^Z_k tensor w) = sum_i (-1)^i Z_1^..omit..^Z_k tensor Z_i . w.
/// Public degrees 1 and 2; d*_{k-1} d*_k = 0 because g_1 is abelian.
Eigen::MatrixXd codifferential(const GradedModule& mod, int k);

namespace detail {
/// Same constructions without the public degree restriction (the Hodge
/// decomposition at top degree needs one extra step on each side).
Eigen::MatrixXd lie_differential_any(const GradedModule& mod, int k);
Eigen::MatrixXd codifferential_any(const GradedModule& mod, int k);
} // namespace detail

} // namespace prolong
