#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

namespace prolong {

/// Enumeration of exponent tuples in n variables.
///
/// Ordering convention used throughout (config files, reports, trial bases):
/// graded by total degree ascending, and within one degree block tuples are
/// sorted lexicographically descending, so that for n=2, d=2 the order is
/// 1; x1, x2; x1^2, x1*x2, x2^2.
class MonomialBasis {
public:
  MonomialBasis(int nvars, int max_degree, bool homogeneous_only = false);

  int nvars() const { return nvars_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }

  const std::vector<int>& exponent(int i) const { return exponents_[i]; }
  /// -1 if the tuple is not in the basis (degree out of range).
  int index_of(const std::vector<int>& alpha) const;

  static std::int64_t count(int nvars, int max_degree); // C(n+d, d)

private:
  int nvars_;
  int max_degree_;
  std::vector<std::vector<int>> exponents_;
  std::map<std::vector<int>, int> index_;
};

/// Dense multivariate polynomial over the MonomialBasis ordering. Doubles
/// as a truncated Taylor expansion (jet) when combined with the truncating
/// product: all operations keep only monomials of total degree <= degree().
class MultiPoly {
public:
  MultiPoly() = default;
  MultiPoly(int nvars, int degree);
  MultiPoly(int nvars, int degree, const Eigen::VectorXd& coeffs);

  static MultiPoly constant(int nvars, int degree, double c);
  static MultiPoly variable(int nvars, int degree, int var);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double eval(const Eigen::VectorXd& x) const;
  double constant_term() const { return coeffs_.size() ? coeffs_[0] : 0.0; }

  /// d/dx_var; result keeps the same truncation degree.
  MultiPoly derivative(int var) const;

  /// Rewrite in offset variables h = x - x0 (exact Taylor recentering as
  /// long as the truncation degree is >= the polynomial degree).
  MultiPoly shifted(const Eigen::VectorXd& x0) const;

  /// Change the truncation degree (drops or zero-pads coefficients).
  MultiPoly truncated(int new_degree) const;

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const; // truncating product
  MultiPoly operator*(double s) const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);

  double norm_inf() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

  /// Jet transcendentals about the constant term (which must make the
  /// operation well defined: u(0) != 0 for reciprocal, > 0 for log).
  static MultiPoly reciprocal(const MultiPoly& u);
  static MultiPoly log(const MultiPoly& u);
  static MultiPoly exp(const MultiPoly& u);

  /// Shared basis cache so independent polynomials of equal shape agree on
  /// index layout.
  static const MonomialBasis& basis(int nvars, int degree);

private:
  int nvars_ = 0;
  int degree_ = 0;
  Eigen::VectorXd coeffs_;
};

MultiPoly operator*(double s, const MultiPoly& p);

} // namespace prolong
