#include "prolong/module.hpp"

#include "prolong/exceptions.hpp"
#include "prolong/linsolve.hpp"
#include "prolong/multipoly.hpp"

#include <algorithm>
#include <map>

namespace prolong {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw InvariantError("build_module: " + what);
}

// ---------------------------------------------------------------------------
// Scalar family: S^{r-1} R^{n+2} modeled as homogeneous polynomials of degree
// r-1 in commuting symbols t_0..t_{n+1}; an algebra matrix M acts by the
// derivation sum_{jk} M_{kj} t_k d/dt_j. The tracefree subspace is the kernel
// of the J-Laplacian sum_{pq} (J^{-1})^{pq} d^2/dt_p dt_q.
// ---------------------------------------------------------------------------

struct SymSpace {
  MonomialBasis basis; // homogeneous of fixed degree in n+2 symbols
  SymSpace(int nsym, int degree) : basis(nsym, degree, /*homogeneous_only=*/true) {}
};

Eigen::MatrixXd derivation_matrix(const SymSpace& space, const Eigen::MatrixXd& m) {
  const int dim = space.basis.size();
  const int nsym = space.basis.nvars();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto& alpha = space.basis.exponent(i);
    for (int j = 0; j < nsym; ++j) {
      if (alpha[j] == 0) continue;
      for (int k = 0; k < nsym; ++k) {
        if (m(k, j) == 0.0) continue;
        std::vector<int> beta = alpha;
        beta[j] -= 1;
        beta[k] += 1;
        out(space.basis.index_of(beta), i) += alpha[j] * m(k, j);
      }
    }
  }
  return out;
}

// Contraction S^d -> S^{d-2} with J^{-1} (here J^{-1} = J), as the constant
// coefficient operator sum J^{pq} d^2/dt_p dt_q on coefficient vectors.
Eigen::MatrixXd j_laplacian(const SymSpace& from, const SymSpace& to, const Eigen::MatrixXd& j_inv) {
  const int nsym = from.basis.nvars();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(to.basis.size(), from.basis.size());
  for (int i = 0; i < from.basis.size(); ++i) {
    const auto& alpha = from.basis.exponent(i);
    for (int p = 0; p < nsym; ++p)
      for (int q = 0; q < nsym; ++q) {
        if (j_inv(p, q) == 0.0) continue;
        std::vector<int> beta = alpha;
        if (beta[p] == 0) continue;
        beta[p] -= 1;
        if (beta[q] == 0) continue;
        double scale = alpha[p] * beta[q];
        beta[q] -= 1;
        out(to.basis.index_of(beta), i) += j_inv(p, q) * scale;
      }
  }
  return out;
}

int monomial_eigenvalue(const std::vector<int>& alpha) {
  // t_0 carries E-eigenvalue +1, t_{n+1} carries -1, middles 0.
  return alpha.front() - alpha.back();
}

GradedModule build_scalar(const GradedLieAlgebra& alg, int r) {
  if (r < 1) throw ConfigError("build_module: scalar family needs r >= 1");
  const int n = alg.n;
  const int deg = r - 1;
  SymSpace space(n + 2, deg);

  // Basis of the tracefree subspace, grouped by E-eigenvalue. The kernel is
  // computed blockwise so every basis vector is an exact eigenvector.
  std::map<int, std::vector<int>> monos_by_eig;
  for (int i = 0; i < space.basis.size(); ++i)
    monos_by_eig[monomial_eigenvalue(space.basis.exponent(i))].push_back(i);

  Eigen::MatrixXd trace;
  std::map<int, std::vector<int>> target_by_eig;
  if (deg >= 2) {
    SymSpace target(n + 2, deg - 2);
    trace = j_laplacian(space, target, alg.J); // J^{-1} = J for the light-cone form
    for (int i = 0; i < target.basis.size(); ++i)
      target_by_eig[monomial_eigenvalue(target.basis.exponent(i))].push_back(i);
  }

  GradedModule mod;
  mod.spec = ModuleSpec::scalar(r);
  mod.n = n;
  mod.N = 2 * (r - 1);
  mod.lowest_eigenvalue = -(r - 1);

  std::vector<Eigen::VectorXd> columns; // tracefree basis over monomial coords
  for (int eig = mod.lowest_eigenvalue; eig <= r - 1; ++eig) {
    const auto& rows = monos_by_eig[eig];
    Eigen::MatrixXd block;
    if (deg < 2) {
      block = Eigen::MatrixXd::Identity(static_cast<int>(rows.size()),
                                        static_cast<int>(rows.size()));
    } else {
      const auto& targets = target_by_eig[eig];
      Eigen::MatrixXd sub(static_cast<int>(targets.size()), static_cast<int>(rows.size()));
      for (int a = 0; a < sub.rows(); ++a)
        for (int b = 0; b < sub.cols(); ++b) sub(a, b) = trace(targets[a], rows[b]);
      block = sub.rows() == 0
                  ? Eigen::MatrixXd::Identity(sub.cols(), sub.cols())
                  : null_space(sub);
    }
    mod.comp_offset.push_back(static_cast<int>(columns.size()));
    mod.comp_dim.push_back(static_cast<int>(block.cols()));
    for (int c = 0; c < block.cols(); ++c) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(space.basis.size());
      for (int a = 0; a < block.rows(); ++a) full[rows[a]] = block(a, c);
      columns.push_back(full);
    }
  }
  mod.dim = static_cast<int>(columns.size());

  Eigen::MatrixXd basis_mat(space.basis.size(), mod.dim);
  for (int c = 0; c < mod.dim; ++c) basis_mat.col(c) = columns[c];

  // Restrict the symmetric-power action to the invariant tracefree subspace;
  // the basis is orthonormal, so coefficients are plain projections.
  auto restrict = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd big = derivation_matrix(space, m);
    return Eigen::MatrixXd(basis_mat.transpose() * big * basis_mat);
  };
  for (const auto& m : alg.basis_minus1) mod.action_minus1.push_back(restrict(m));
  for (const auto& m : alg.basis_0) mod.action_0.push_back(restrict(m));
  for (const auto& m : alg.basis_1) mod.action_1.push_back(restrict(m));
  return mod;
}

// ---------------------------------------------------------------------------
// Adjoint family: Lambda^2 R^{n+2} with the wedge basis reordered so the
// E-eigenvalue blocks are contiguous and ascending.
// ---------------------------------------------------------------------------

GradedModule build_adjoint(const GradedLieAlgebra& alg) {
  const int n = alg.n;
  if (n < 3)
    throw ConfigError(
        "build_module: the adjoint family needs n >= 3 (two-dimensional "
        "conformal Killing solution spaces are infinite dimensional)");
  const int d = n + 2;

  // Wedge pairs (i < j) grouped by eigenvalue lambda_i + lambda_j with
  // lambda_0 = +1, lambda_{n+1} = -1, middles 0.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= n; ++i) pairs.emplace_back(i, n + 1);          // eigenvalue -1
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);        // eigenvalue 0
  pairs.emplace_back(0, n + 1);                                       // eigenvalue 0
  for (int i = 1; i <= n; ++i) pairs.emplace_back(0, i);              // eigenvalue +1

  GradedModule mod;
  mod.spec = ModuleSpec::adjoint();
  mod.n = n;
  mod.dim = static_cast<int>(pairs.size());
  mod.N = 2;
  mod.lowest_eigenvalue = -1;
  mod.comp_offset = {0, n, n + n * (n - 1) / 2 + 1};
  mod.comp_dim = {n, n * (n - 1) / 2 + 1, n};

  std::map<std::pair<int, int>, int> index;
  for (int k = 0; k < mod.dim; ++k) index[pairs[k]] = k;
  auto wedge_coord = [&](int i, int j, double v, Eigen::VectorXd& out) {
    if (i == j) return;
    if (i < j)
      out[index[{i, j}]] += v;
    else
      out[index[{j, i}]] -= v;
  };

  auto wedge_action = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mod.dim, mod.dim);
    for (int k = 0; k < mod.dim; ++k) {
      auto [i, j] = pairs[k];
      Eigen::VectorXd col = Eigen::VectorXd::Zero(mod.dim);
      for (int p = 0; p < d; ++p) {
        if (m(p, i) != 0.0) wedge_coord(p, j, m(p, i), col);
        if (m(p, j) != 0.0) wedge_coord(i, p, m(p, j), col);
      }
      out.col(k) = col;
    }
    return out;
  };

  for (const auto& m : alg.basis_minus1) mod.action_minus1.push_back(wedge_action(m));
  for (const auto& m : alg.basis_0) mod.action_0.push_back(wedge_action(m));
  for (const auto& m : alg.basis_1) mod.action_1.push_back(wedge_action(m));
  return mod;
}

void verify_module(const GradedLieAlgebra& alg, const GradedModule& mod) {
  const double tol = 1e-11;

  check(static_cast<int>(mod.comp_dim.size()) == mod.N + 1, "component count is off");
  int total = 0;
  for (int j = 0; j <= mod.N; ++j) {
    check(mod.comp_offset[j] == total, "component offsets are not contiguous");
    total += mod.comp_dim[j];
  }
  check(total == mod.dim, "component dims do not sum to the total");

  // rho(E) is diagonal on the adapted basis with an unbroken integer ladder.
  const Eigen::MatrixXd& e = mod.action_E();
  for (int j = 0; j <= mod.N; ++j) {
    check(mod.comp_dim[j] > 0, "empty eigenvalue block breaks the ladder");
    for (int c = mod.comp_offset[j]; c < mod.comp_offset[j] + mod.comp_dim[j]; ++c) {
      Eigen::VectorXd col = e.col(c);
      const double eig = mod.lowest_eigenvalue + j;
      col[c] -= eig;
      check(col.norm() < tol, "rho(E) is not diagonal with the expected eigenvalue");
    }
  }

  // Homomorphism on all basis pairs.
  std::vector<const std::vector<Eigen::MatrixXd>*> alg_parts = {
      &alg.basis_minus1, &alg.basis_0, &alg.basis_1};
  std::vector<const std::vector<Eigen::MatrixXd>*> mod_parts = {
      &mod.action_minus1, &mod.action_0, &mod.action_1};
  std::vector<Eigen::MatrixXd> flat_alg, flat_mod;
  for (int p = 0; p < 3; ++p)
    for (size_t i = 0; i < alg_parts[p]->size(); ++i) {
      flat_alg.push_back((*alg_parts[p])[i]);
      flat_mod.push_back((*mod_parts[p])[i]);
    }
  const int nbasis = static_cast<int>(flat_alg.size());
  const int sq = (alg.n + 2) * (alg.n + 2);
  Eigen::MatrixXd basis_cols(sq, nbasis);
  for (int k = 0; k < nbasis; ++k)
    basis_cols.col(k) = Eigen::Map<const Eigen::VectorXd>(flat_alg[k].data(), sq);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis_cols);
  for (int i = 0; i < nbasis; ++i)
    for (int j = 0; j < nbasis; ++j) {
      Eigen::MatrixXd br = bracket(flat_alg[i], flat_alg[j]);
      // Expand [X_i, X_j] over the algebra basis (the basis matrices have
      // disjoint supports, so the least-squares solve is exact).
      Eigen::VectorXd coords = qr.solve(Eigen::Map<const Eigen::VectorXd>(br.data(), sq));
      Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(mod.dim, mod.dim);
      for (int k = 0; k < nbasis; ++k)
        if (std::abs(coords[k]) > 1e-13) expected += coords[k] * flat_mod[k];
      check((bracket(flat_mod[i], flat_mod[j]) - expected).norm() < tol,
            "action is not a Lie algebra homomorphism");
    }

  // Graded mapping property rho(g_i) W_j in W_{i+j}.
  auto check_shift = [&](const std::vector<Eigen::MatrixXd>& actions, int shift) {
    for (const auto& m : actions)
      for (int j = 0; j <= mod.N; ++j) {
        for (int c = mod.comp_offset[j]; c < mod.comp_offset[j] + mod.comp_dim[j]; ++c) {
          Eigen::VectorXd img = m.col(c);
          const int tj = j + shift;
          for (int q = 0; q <= mod.N; ++q) {
            if (q == tj) continue;
            check(mod.component(img, q).norm() < tol,
                  "action does not shift components by the grading degree");
          }
        }
      }
  };
  check_shift(mod.action_minus1, -1);
  check_shift(mod.action_1, +1);
  check_shift(mod.action_0, 0);
}

} // namespace

std::string ModuleSpec::name() const {
  if (family == Family::Adjoint) return "adjoint";
  return "scalar_r" + std::to_string(r);
}

int GradedModule::component_of_coord(int coord) const {
  for (int j = 0; j <= N; ++j)
    if (coord < comp_offset[j] + comp_dim[j]) return j;
  throw InvariantError("component_of_coord: coordinate out of range");
}

Eigen::VectorXd GradedModule::component(const Eigen::VectorXd& value, int j) const {
  return value.segment(comp_offset[j], comp_dim[j]);
}

Eigen::VectorXd GradedModule::embed_component(const Eigen::VectorXd& block, int j) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  out.segment(comp_offset[j], comp_dim[j]) = block;
  return out;
}

const Eigen::MatrixXd& GradedModule::rotation_generator(int a, int b) const {
  return action_0[a * n - a * (a + 1) / 2 + (b - a - 1)];
}

Eigen::MatrixXd GradedModule::rotation_action(const Eigen::MatrixXd& omega) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  int idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (omega(a, b) != 0.0) out += omega(a, b) * action_0[idx];
      ++idx;
    }
  return out;
}

GradedModule build_module(const GradedLieAlgebra& alg, const ModuleSpec& spec) {
  GradedModule mod = spec.family == ModuleSpec::Family::Scalar
                         ? build_scalar(alg, spec.r)
                         : build_adjoint(alg);
  verify_module(alg, mod);
  return mod;
}

} // namespace prolong
