#include "prolong/dimensions.hpp"

#include "prolong/exceptions.hpp"

namespace prolong {

namespace {

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

} // namespace

BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= (n - k + i);
    c /= i;
  }
  return c;
}

BigInt module_dimension(const ModuleSpec& spec, int n) {
  if (spec.family == ModuleSpec::Family::Adjoint) {
    if (n < 3) throw ConfigError("module_dimension: adjoint family needs n >= 3");
    return BigInt(n + 1) * (n + 2) / 2;
  }
  const int r = spec.r;
  if (r < 1) throw ConfigError("module_dimension: scalar family needs r >= 1");
  return binomial(n + r, r - 1) - binomial(n + r - 2, r - 3);
}

BigInt scalar_module_dimension_factored(int n, int r) {
  if (r < 1) throw ConfigError("scalar_module_dimension_factored: r >= 1 required");
  return BigInt(n + 2 * r - 2) * factorial(n + 2 * r - 2) / (factorial(n) * factorial(r - 1));
}

BigInt killing_tensor_dimension(int n, int k) {
  if (n < 3) throw ConfigError("killing_tensor_dimension: needs n >= 3");
  if (k < 1) throw ConfigError("killing_tensor_dimension: needs k >= 1");
  BigInt num = factorial(n + k - 3) * factorial(n + k - 2) * factorial(n + 2 * k);
  BigInt den = factorial(k) * factorial(k + 1) * factorial(n - 2) * factorial(n) *
               factorial(n + 2 * k - 3);
  if (num % den != 0)
    throw InvariantError("killing_tensor_dimension: formula did not produce an integer");
  return num / den;
}

} // namespace prolong
