#ifndef MPCMP_CMP_HPP
#define MPCMP_CMP_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace mpcmp {

// Truncated Conway-Maxwell-Poisson with support {0, ..., t_max}.
// Weights w_r = lambda^r / (r!)^nu; the finite normalizer
// G_T = sum_r w_r makes the pmf proper.
struct TruncCmpParams {
  double lambda;  // rate, >= 0 (0 is the point mass at zero)
  double nu;      // dispersion, > 0; nu = 1 recovers the truncated Poisson
  int t_max = 10;

  void validate() const;
};

// Mean parameterisation: mu in (0, t_max) plus the dispersion.
struct MeanParams {
  double mu;
  double nu;
  int t_max = 10;
};

// log G_T(lambda, nu), computed by log-sum-exp over the T+1 terms.
double log_normalizer(const TruncCmpParams& p);

// log Pr(X = x); throws std::domain_error for x outside {0..T}.
double log_pmf(int x, const TruncCmpParams& p);

double cmp_mean(const TruncCmpParams& p);
double cmp_variance(const TruncCmpParams& p);

// Unique lambda > 0 with cmp_mean(lambda, nu, T) = mu, to |mean - mu| <= 1e-10.
// Safeguarded Newton on log lambda; the derivative of the mean with respect
// to log lambda is the variance, which is strictly positive. Throws
// std::domain_error for mu outside (0, T) and std::runtime_error if
// log lambda would exceed 700 (overflow guard for mu pushed against T).
double solve_lambda(const MeanParams& m);

// Same solve exposed on the log scale with a warm start, for callers that
// evaluate the likelihood record by record. Returns log lambda.
double solve_log_lambda(double mu, double nu, int t_max, double init_log_lambda);

// Variant taking precomputed dispersion factors fac[r] = exp(-nu log r!),
// so per-player factors can be cached across many solves.
double solve_log_lambda_fac(double mu, double nu, const double* fac, int t_max,
                            double init_log_lambda);

// Inverse-CDF draw over the T+1 support points.
int cmp_sample(const TruncCmpParams& p, std::mt19937_64& rng);

// Full pmf as a vector of length T+1 (probabilities, summing to 1).
std::vector<double> cmp_pmf(const TruncCmpParams& p);

// Per-support-point mean/variance given precomputed dispersion factors
// f_r = exp(-nu * log r!). Used on the sampler hot path; t = log lambda.
// Results are written to *mean_out and *var_out.
void cmp_moments_with_factors(double t, const double* fac, double nu, int t_max,
                              double* mean_out, double* var_out);

// log G_T given the same factors.
double log_normalizer_with_factors(double t, const double* fac, double nu, int t_max);

// log r! for r = 0..t_max, by running sum.
std::vector<double> log_factorials(int t_max);

}  // namespace mpcmp

#endif
