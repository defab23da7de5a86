#ifndef MPCMP_SPLINE_HPP
#define MPCMP_SPLINE_HPP

#include <cstddef>
#include <vector>

namespace mpcmp {

// Clamped B-spline basis: boundary knots repeated degree+1 times, so the
// basis sums to 1 on [lo, hi] and the endpoint bases hit exactly 1.
struct SplineSpec {
  int degree = 3;
  std::vector<double> internal_knots;  // non-decreasing, strictly inside (lo, hi)
  double lo = 0.0;
  double hi = 1.0;

  std::size_t dim() const { return internal_knots.size() + degree + 1; }
  std::vector<double> full_knots() const;
  void validate() const;
};

// Cox-de Boor evaluation of all basis functions at x. Points outside
// [lo, hi] are clamped to the boundary before evaluation.
std::vector<double> bspline_basis(const SplineSpec& spec, double x);

}  // namespace mpcmp

#endif
