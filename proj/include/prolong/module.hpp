#pragma once

#include "prolong/algebra.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace prolong {

/// Which irreducible representation of o(n+1,1) to realize.
///  - scalar family, parameter r >= 1: tracefree symmetric (r-1)-tensors on
///    R^{n+2} (r = 1 trivial, r = 2 the standard representation).
///  - adjoint family: the algebra itself, realized as Lambda^2 R^{n+2};
///    requires n >= 3.
struct ModuleSpec {
  enum class Family { Scalar, Adjoint };
  Family family = Family::Scalar;
  int r = 2;

  static ModuleSpec scalar(int r) { return ModuleSpec{Family::Scalar, r}; }
  static ModuleSpec adjoint() { return ModuleSpec{Family::Adjoint, 1}; }
  std::string name() const;
};

/// A concrete module with the eigenspace decomposition of the grading
/// element. The basis is adapted: component j occupies the contiguous
/// coordinate block [comp_offset[j], comp_offset[j] + comp_dim[j]), ordered
/// by ascending E-eigenvalue, so component 0 is the bottom W_0.
struct GradedModule {
  ModuleSpec spec;
  int n = 0;
  int dim = 0;
  int N = 0;                  // top component index; eigenvalues run lowest..lowest+N
  int lowest_eigenvalue = 0;
  std::vector<int> comp_offset;
  std::vector<int> comp_dim;

  std::vector<Eigen::MatrixXd> action_minus1; // per basis_minus1 element
  std::vector<Eigen::MatrixXd> action_0;      // per basis_0 element (E last)
  std::vector<Eigen::MatrixXd> action_1;      // per basis_1 element

  const Eigen::MatrixXd& action_E() const { return action_0.back(); }

  int component_of_coord(int coord) const;
  Eigen::VectorXd component(const Eigen::VectorXd& value, int j) const;
  Eigen::VectorXd embed_component(const Eigen::VectorXd& block, int j) const;

  /// Action of an antisymmetric n x n matrix through the o(n) block of g_0.
  Eigen::MatrixXd rotation_action(const Eigen::MatrixXd& omega) const;

  /// rho(M_{ab}) for the rotation generator with 0 <= a < b < n.
  const Eigen::MatrixXd& rotation_generator(int a, int b) const;
};

/// Constructs the module and verifies the homomorphism property, the
/// eigenvalue ladder, and the component mapping g_i . W_j in W_{i+j}.
GradedModule build_module(const GradedLieAlgebra& alg, const ModuleSpec& spec);

} // namespace prolong
