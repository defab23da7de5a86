#ifndef MPCMP_MATHUTIL_HPP
#define MPCMP_MATHUTIL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mpcmp {

inline double log_sum_exp(const std::vector<double>& vals) {
  double m = -HUGE_VAL;
  for (double v : vals)
    if (v > m) m = v;
  if (m == -HUGE_VAL) return -HUGE_VAL;
  double s = 0.0;
  for (double v : vals) s += std::exp(v - m);
  return m + std::log(s);
}

// log density of N(mean, sd^2)
inline double normal_logpdf(double x, double mean, double sd) {
  static const double log_sqrt_2pi = 0.9189385332046727;
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - log_sqrt_2pi;
}

// Inverse standard normal CDF (Acklam's rational approximation with one
// Halley refinement; relative error well below 1e-12 over (0,1)).
double inv_normal_cdf(double p);

// Type-7 sample quantile (linear interpolation) of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p);

double sample_mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

// Lower-triangular Cholesky factor of a dense symmetric matrix stored
// row-major. Throws std::runtime_error if the matrix is not positive
// definite.
std::vector<double> cholesky_lower(const std::vector<double>& a, std::size_t n);

// Spearman rank correlation.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mpcmp

#endif
