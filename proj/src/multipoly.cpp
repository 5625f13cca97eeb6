#include "prolong/multipoly.hpp"

#include "prolong/exceptions.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace prolong {

namespace {

void enumerate_degree(int nvars, int degree, std::vector<int>& partial,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(partial.size()) == nvars - 1) {
    partial.push_back(degree);
    out.push_back(partial);
    partial.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    partial.push_back(e);
    enumerate_degree(nvars, degree - e, partial, out);
    partial.pop_back();
  }
}

} // namespace

MonomialBasis::MonomialBasis(int nvars, int max_degree, bool homogeneous_only)
    : nvars_(nvars), max_degree_(max_degree) {
  if (nvars < 1) throw ConfigError("MonomialBasis: need at least one variable");
  if (max_degree < 0) throw ConfigError("MonomialBasis: negative degree");
  std::vector<int> partial;
  for (int g = homogeneous_only ? max_degree : 0; g <= max_degree; ++g)
    enumerate_degree(nvars, g, partial, exponents_);
  for (int i = 0; i < static_cast<int>(exponents_.size()); ++i)
    index_[exponents_[i]] = i;
}

int MonomialBasis::index_of(const std::vector<int>& alpha) const {
  auto it = index_.find(alpha);
  return it == index_.end() ? -1 : it->second;
}

std::int64_t MonomialBasis::count(int nvars, int max_degree) {
  std::int64_t c = 1;
  for (int i = 1; i <= nvars; ++i) c = c * (max_degree + i) / i;
  return c;
}

const MonomialBasis& MultiPoly::basis(int nvars, int degree) {
  static std::map<std::pair<int, int>, MonomialBasis> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(nvars, degree);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, MonomialBasis(nvars, degree)).first;
  return it->second;
}

MultiPoly::MultiPoly(int nvars, int degree) : nvars_(nvars), degree_(degree) {
  coeffs_ = Eigen::VectorXd::Zero(basis(nvars, degree).size());
}

MultiPoly::MultiPoly(int nvars, int degree, const Eigen::VectorXd& coeffs)
    : nvars_(nvars), degree_(degree), coeffs_(coeffs) {
  if (coeffs_.size() != basis(nvars, degree).size())
    throw ConfigError("MultiPoly: coefficient vector length does not match the monomial count");
}

MultiPoly MultiPoly::constant(int nvars, int degree, double c) {
  MultiPoly p(nvars, degree);
  p.coeffs_[0] = c;
  return p;
}

MultiPoly MultiPoly::variable(int nvars, int degree, int var) {
  if (degree < 1) throw ConfigError("MultiPoly::variable: degree must be >= 1");
  MultiPoly p(nvars, degree);
  std::vector<int> alpha(nvars, 0);
  alpha[var] = 1;
  p.coeffs_[basis(nvars, degree).index_of(alpha)] = 1.0;
  return p;
}

double MultiPoly::eval(const Eigen::VectorXd& x) const {
  const MonomialBasis& b = basis(nvars_, degree_);
  double sum = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    double m = coeffs_[i];
    const auto& alpha = b.exponent(i);
    for (int v = 0; v < nvars_; ++v)
      for (int e = 0; e < alpha[v]; ++e) m *= x[v];
    sum += m;
  }
  return sum;
}

MultiPoly MultiPoly::derivative(int var) const {
  const MonomialBasis& b = basis(nvars_, degree_);
  MultiPoly out(nvars_, degree_);
  for (int i = 0; i < b.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    std::vector<int> alpha = b.exponent(i);
    if (alpha[var] == 0) continue;
    const double scale = alpha[var];
    alpha[var] -= 1;
    out.coeffs_[b.index_of(alpha)] += scale * coeffs_[i];
  }
  return out;
}

MultiPoly MultiPoly::truncated(int new_degree) const {
  const MonomialBasis& from = basis(nvars_, degree_);
  MultiPoly out(nvars_, new_degree);
  const MonomialBasis& to = basis(nvars_, new_degree);
  for (int i = 0; i < from.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    int j = to.index_of(from.exponent(i));
    if (j >= 0) out.coeffs_[j] = coeffs_[i];
  }
  return out;
}

MultiPoly MultiPoly::shifted(const Eigen::VectorXd& x0) const {
  const MonomialBasis& b = basis(nvars_, degree_);
  MultiPoly out(nvars_, degree_);
  for (int i = 0; i < b.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    MultiPoly term = constant(nvars_, degree_, coeffs_[i]);
    const auto& alpha = b.exponent(i);
    for (int v = 0; v < nvars_; ++v) {
      if (alpha[v] == 0) continue;
      MultiPoly factor = variable(nvars_, degree_, v);
      factor.coeffs_[0] = x0[v];
      for (int e = 0; e < alpha[v]; ++e) term = term * factor;
    }
    out += term;
  }
  return out;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  MultiPoly out = *this;
  out += o;
  return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  MultiPoly out = *this;
  out -= o;
  return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (nvars_ != o.nvars_ || degree_ != o.degree_)
    throw ConfigError("MultiPoly: shape mismatch in addition");
  coeffs_ += o.coeffs_;
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (nvars_ != o.nvars_ || degree_ != o.degree_)
    throw ConfigError("MultiPoly: shape mismatch in subtraction");
  coeffs_ -= o.coeffs_;
  return *this;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  if (nvars_ != o.nvars_ || degree_ != o.degree_)
    throw ConfigError("MultiPoly: shape mismatch in product");
  const MonomialBasis& b = basis(nvars_, degree_);
  MultiPoly out(nvars_, degree_);
  std::vector<int> sum(nvars_);
  for (int i = 0; i < b.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    const auto& a = b.exponent(i);
    for (int j = 0; j < b.size(); ++j) {
      if (o.coeffs_[j] == 0.0) continue;
      const auto& c = b.exponent(j);
      int total = 0;
      for (int v = 0; v < nvars_; ++v) {
        sum[v] = a[v] + c[v];
        total += sum[v];
      }
      if (total > degree_) continue;
      out.coeffs_[b.index_of(sum)] += coeffs_[i] * o.coeffs_[j];
    }
  }
  return out;
}

MultiPoly MultiPoly::operator*(double s) const {
  MultiPoly out = *this;
  out.coeffs_ *= s;
  return out;
}

MultiPoly operator*(double s, const MultiPoly& p) { return p * s; }

MultiPoly MultiPoly::reciprocal(const MultiPoly& u) {
  const double u0 = u.constant_term();
  if (u0 == 0.0) throw NumericError("MultiPoly::reciprocal: vanishing constant term");
  MultiPoly v = u * (1.0 / u0);
  v.coeffs_[0] = 0.0; // v = u/u0 - 1
  MultiPoly out = constant(u.nvars_, u.degree_, 1.0);
  MultiPoly power = constant(u.nvars_, u.degree_, 1.0);
  for (int m = 1; m <= u.degree_; ++m) {
    power = power * v;
    out += power * ((m % 2) ? -1.0 : 1.0);
  }
  return out * (1.0 / u0);
}

MultiPoly MultiPoly::log(const MultiPoly& u) {
  const double u0 = u.constant_term();
  if (u0 <= 0.0) throw NumericError("MultiPoly::log: non-positive constant term");
  MultiPoly v = u * (1.0 / u0);
  v.coeffs_[0] = 0.0;
  MultiPoly out = constant(u.nvars_, u.degree_, std::log(u0));
  MultiPoly power = constant(u.nvars_, u.degree_, 1.0);
  for (int m = 1; m <= u.degree_; ++m) {
    power = power * v;
    out += power * (((m + 1) % 2) ? -1.0 / m : 1.0 / m);
  }
  return out;
}

MultiPoly MultiPoly::exp(const MultiPoly& u) {
  MultiPoly v = u;
  v.coeffs_[0] = 0.0;
  MultiPoly out = constant(u.nvars_, u.degree_, 1.0);
  MultiPoly power = constant(u.nvars_, u.degree_, 1.0);
  double factorial = 1.0;
  for (int m = 1; m <= u.degree_; ++m) {
    power = power * v;
    factorial *= m;
    out += power * (1.0 / factorial);
  }
  return out * std::exp(u.constant_term());
}

} // namespace prolong
