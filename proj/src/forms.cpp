#include "prolong/forms.hpp"

#include "prolong/exceptions.hpp"

#include <algorithm>
#include <mutex>

namespace prolong {

namespace {

void combos_rec(int n, int k, int start, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combos_rec(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

int combo_index(const std::vector<std::vector<int>>& combos, const std::vector<int>& c) {
  auto it = std::lower_bound(combos.begin(), combos.end(), c);
  return static_cast<int>(it - combos.begin());
}

} // namespace

const std::vector<std::vector<int>>& form_combinations(int n, int k) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<std::vector<int>> combos;
    std::vector<int> cur;
    if (k >= 0 && k <= n) combos_rec(n, k, 0, cur, combos);
    it = cache.emplace(key, std::move(combos)).first;
  }
  return it->second;
}

int form_dim(const GradedModule& mod, int k) {
  return static_cast<int>(form_combinations(mod.n, k).size()) * mod.dim;
}

int form_coord(const GradedModule& mod, int k, int combo_index, int module_coord) {
  (void)k;
  return combo_index * mod.dim + module_coord;
}

int form_homogeneity(const GradedModule& mod, int k, int coord) {
  return mod.component_of_coord(coord % mod.dim) + k;
}

FormBlock::FormBlock(int k_, const GradedModule& mod, const Eigen::VectorXd& coords_)
    : k(k_), module(&mod), coords(coords_) {
  if (coords.size() != form_dim(mod, k))
    throw ConfigError("FormBlock: coordinate length does not match C(n,k) * dim W");
}

std::map<int, Eigen::VectorXd> FormBlock::split_by_homogeneity() const {
  std::map<int, Eigen::VectorXd> parts;
  for (int h = k; h <= module->N + k; ++h)
    parts[h] = Eigen::VectorXd::Zero(coords.size());
  for (int i = 0; i < coords.size(); ++i)
    parts[form_homogeneity(*module, k, i)][i] = coords[i];
  return parts;
}

FormBlock FormBlock::from_homogeneity_parts(int k, const GradedModule& mod,
                                            const std::map<int, Eigen::VectorXd>& parts) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(form_dim(mod, k));
  for (const auto& [h, v] : parts) {
    if (v.size() != sum.size())
      throw ConfigError("FormBlock: homogeneity part has the wrong length");
    sum += v;
  }
  return FormBlock(k, mod, sum);
}

namespace detail {

Eigen::MatrixXd lie_differential_any(const GradedModule& mod, int k) {
  const auto& from = form_combinations(mod.n, k);
  const auto& to = form_combinations(mod.n, k + 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<int>(to.size()) * mod.dim,
                                              static_cast<int>(from.size()) * mod.dim);
  for (int j = 0; j < static_cast<int>(to.size()); ++j) {
    const auto& target = to[j];
    for (int i = 0; i <= k; ++i) {
      std::vector<int> source = target;
      const int a = source[i];
      source.erase(source.begin() + i);
      const int src = combo_index(from, source);
      const double sign = (i % 2) ? -1.0 : 1.0;
      out.block(j * mod.dim, src * mod.dim, mod.dim, mod.dim) +=
          sign * mod.action_minus1[a];
    }
  }
  return out;
}

Eigen::MatrixXd codifferential_any(const GradedModule& mod, int k) {
  const auto& from = form_combinations(mod.n, k);
  const auto& to = form_combinations(mod.n, k - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<int>(to.size()) * mod.dim,
                                              static_cast<int>(from.size()) * mod.dim);
  for (int j = 0; j < static_cast<int>(from.size()); ++j) {
    const auto& source = from[j];
    for (int i = 1; i <= k; ++i) {
      std::vector<int> target = source;
      const int a = target[i - 1];
      target.erase(target.begin() + (i - 1));
      const int dst = combo_index(to, target);
      const double sign = (i % 2) ? -1.0 : 1.0;
      out.block(dst * mod.dim, j * mod.dim, mod.dim, mod.dim) += sign * mod.action_1[a];
    }
  }
  return out;
}

} // namespace detail

Eigen::MatrixXd lie_differential(const GradedModule& mod, int k) {
  if (k < 0 || k > 1)
    throw ConfigError("lie_differential: degree must be 0 or 1");
  return detail::lie_differential_any(mod, k);
}

Eigen::MatrixXd codifferential(const GradedModule& mod, int k) {
  if (k < 1 || k > 2)
    throw ConfigError("codifferential: degree must be 1 or 2");
  return detail::codifferential_any(mod, k);
}

} // namespace prolong
