#include "mpcmp/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpcmp {

void SplineSpec::validate() const {
  if (degree < 1) throw std::invalid_argument("SplineSpec: degree must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("SplineSpec: boundary knots must satisfy lo < hi");
  double prev = lo;
  for (double k : internal_knots) {
    if (!(k > lo) || !(k < hi))
      throw std::invalid_argument("SplineSpec: internal knots must lie strictly inside the boundary");
    if (k < prev) throw std::invalid_argument("SplineSpec: internal knots must be non-decreasing");
    prev = k;
  }
}

std::vector<double> SplineSpec::full_knots() const {
  std::vector<double> u;
  u.reserve(internal_knots.size() + 2 * (degree + 1));
  for (int i = 0; i <= degree; ++i) u.push_back(lo);
  u.insert(u.end(), internal_knots.begin(), internal_knots.end());
  for (int i = 0; i <= degree; ++i) u.push_back(hi);
  return u;
}

std::vector<double> bspline_basis(const SplineSpec& spec, double x) {
  spec.validate();
  const int p = spec.degree;
  const std::vector<double> u = spec.full_knots();
  const int n = static_cast<int>(spec.dim()) - 1;  // highest basis index

  x = std::clamp(x, spec.lo, spec.hi);

  // Knot span i with u[i] <= x < u[i+1]; the right endpoint maps to the
  // last nonempty span so the final basis function evaluates to 1 there.
  int span;
  if (x >= spec.hi) {
    span = n;
  } else {
    span = static_cast<int>(std::upper_bound(u.begin() + p, u.begin() + n + 1, x) - u.begin()) - 1;
  }

  // Piegl & Tiller basis-function recursion over the p+1 nonzero entries.
  std::vector<double> nz(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> left(static_cast<std::size_t>(p) + 1), right(static_cast<std::size_t>(p) + 1);
  nz[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - u[span + 1 - j];
    right[j] = u[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = nz[r] / (right[r + 1] + left[j - r]);
      nz[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    nz[j] = saved;
  }

  std::vector<double> basis(spec.dim(), 0.0);
  for (int r = 0; r <= p; ++r) basis[span - p + r] = nz[r];
  return basis;
}

}  // namespace mpcmp
