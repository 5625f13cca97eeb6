#pragma once

#include "prolong/module.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace prolong {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(int n, int k);

/// Dimension of the module for a given spec on chart dimension n.
/// Scalar family: C(n+r, r-1) - C(n+r-2, r-3), the count of tracefree
/// symmetric (r-1)-tensors on R^{n+2}. Adjoint family: (n+1)(n+2)/2.
BigInt module_dimension(const ModuleSpec& spec, int n);

/// The factored closed form (n+2r-2) * (n+2r-2)! / (n! (r-1)!) for the scalar
/// family. Known to disagree with the direct count from r = 3 on; it is
/// reported alongside the count and never asserted.
BigInt scalar_module_dimension_factored(int n, int r);

/// Maximal solution-space dimension of the conformal Killing equation on
/// tracefree symmetric k-tensors in dimension n >= 3:
///   (n+k-3)! (n+k-2)! (n+2k)! / ( k! (k+1)! (n-2)! n! (n+2k-3)! ).
BigInt killing_tensor_dimension(int n, int k);

} // namespace prolong
