#include "mpcmp/cmp.hpp"

#include <cmath>
#include <stdexcept>

#include "mpcmp/mathutil.hpp"

namespace mpcmp {

std::vector<double> log_factorials(int t_max) {
  std::vector<double> lf(static_cast<std::size_t>(t_max) + 1, 0.0);
  for (int r = 2; r <= t_max; ++r) lf[r] = lf[r - 1] + std::log(static_cast<double>(r));
  return lf;
}

namespace {
// log r! for the default truncation; extended on demand for larger t_max.
const std::vector<double>& lfact_table(int t_max) {
  static thread_local std::vector<double> table = log_factorials(64);
  if (t_max >= static_cast<int>(table.size()))
    table = log_factorials(2 * t_max);
  return table;
}
}  // namespace

void TruncCmpParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("TruncCmpParams: lambda must be >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("TruncCmpParams: nu must be > 0");
  if (t_max < 1) throw std::invalid_argument("TruncCmpParams: t_max must be >= 1");
}

double log_normalizer(const TruncCmpParams& p) {
  p.validate();
  if (p.lambda == 0.0) return 0.0;  // only the r = 0 term survives
  const auto& lf = lfact_table(p.t_max);
  const double t = std::log(p.lambda);
  std::vector<double> terms(static_cast<std::size_t>(p.t_max) + 1);
  for (int r = 0; r <= p.t_max; ++r) terms[r] = r * t - p.nu * lf[r];
  return log_sum_exp(terms);
}

double log_pmf(int x, const TruncCmpParams& p) {
  p.validate();
  if (x < 0 || x > p.t_max) throw std::domain_error("log_pmf: x outside support");
  if (p.lambda == 0.0) return x == 0 ? 0.0 : -HUGE_VAL;
  const auto& lf = lfact_table(p.t_max);
  return x * std::log(p.lambda) - p.nu * lf[x] - log_normalizer(p);
}

namespace {
// Normalized moments via shifted weights; robust for any (lambda, nu) with
// finite log-terms.
void moments_logspace(double t, double nu, int t_max, double* mean_out, double* var_out) {
  const auto& lf = lfact_table(t_max);
  double mx = -HUGE_VAL;
  for (int r = 0; r <= t_max; ++r) mx = std::max(mx, r * t - nu * lf[r]);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int r = 0; r <= t_max; ++r) {
    const double w = std::exp(r * t - nu * lf[r] - mx);
    s0 += w;
    s1 += r * w;
    s2 += static_cast<double>(r) * r * w;
  }
  const double m = s1 / s0;
  *mean_out = m;
  *var_out = s2 / s0 - m * m;
}
}  // namespace

void cmp_moments_with_factors(double t, const double* fac, double nu, int t_max,
                              double* mean_out, double* var_out) {
  // Direct products are fine while lambda^t_max stays well inside double
  // range; otherwise fall back to the shifted log-space sums.
  if (t * t_max < 600.0 && nu * lfact_table(t_max)[t_max] < 600.0) {
    const double lambda = std::exp(t);
    double pw = 1.0, s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int r = 0; r <= t_max; ++r) {
      const double w = pw * fac[r];
      s0 += w;
      s1 += r * w;
      s2 += static_cast<double>(r) * r * w;
      pw *= lambda;
    }
    const double m = s1 / s0;
    *mean_out = m;
    *var_out = s2 / s0 - m * m;
    return;
  }
  moments_logspace(t, nu, t_max, mean_out, var_out);
}

double log_normalizer_with_factors(double t, const double* fac, double nu, int t_max) {
  if (t * t_max < 600.0 && nu * lfact_table(t_max)[t_max] < 600.0) {
    const double lambda = std::exp(t);
    double pw = 1.0, s0 = 0.0;
    for (int r = 0; r <= t_max; ++r) {
      s0 += pw * fac[r];
      pw *= lambda;
    }
    return std::log(s0);
  }
  const auto& lf = lfact_table(t_max);
  std::vector<double> terms(static_cast<std::size_t>(t_max) + 1);
  for (int r = 0; r <= t_max; ++r) terms[r] = r * t - nu * lf[r];
  return log_sum_exp(terms);
}

double cmp_mean(const TruncCmpParams& p) {
  p.validate();
  if (p.lambda == 0.0) return 0.0;
  double m, v;
  moments_logspace(std::log(p.lambda), p.nu, p.t_max, &m, &v);
  return m;
}

double cmp_variance(const TruncCmpParams& p) {
  p.validate();
  if (p.lambda == 0.0) return 0.0;
  double m, v;
  moments_logspace(std::log(p.lambda), p.nu, p.t_max, &m, &v);
  return v;
}

double solve_log_lambda(double mu, double nu, int t_max, double init_log_lambda) {
  const auto& lf = lfact_table(t_max);
  std::vector<double> fac(static_cast<std::size_t>(t_max) + 1);
  for (int r = 0; r <= t_max; ++r) fac[r] = std::exp(-nu * lf[r]);
  return solve_log_lambda_fac(mu, nu, fac.data(), t_max, init_log_lambda);
}

double solve_log_lambda_fac(double mu, double nu, const double* fac, int t_max,
                            double init_log_lambda) {
  if (!(mu > 0.0) || !(mu < static_cast<double>(t_max)))
    throw std::domain_error("solve_lambda: mu must lie in (0, t_max)");
  if (!(nu > 0.0)) throw std::invalid_argument("solve_lambda: nu must be > 0");

  const double tol = 1e-10;
  double t = std::isfinite(init_log_lambda) ? init_log_lambda : std::log(mu);
  double t_lo = -HUGE_VAL, t_hi = HUGE_VAL;
  double expand = 4.0;

  for (int iter = 0; iter < 200; ++iter) {
    if (t > 700.0) throw std::runtime_error("solve_lambda: log lambda overflow guard (mu too close to t_max)");
    double m, v;
    cmp_moments_with_factors(t, fac, nu, t_max, &m, &v);
    const double err = m - mu;
    if (std::fabs(err) <= tol) return t;
    if (err < 0.0)
      t_lo = t;
    else
      t_hi = t;
    // The derivative of the mean in log lambda is the variance.
    double cand = t - err / std::max(v, 1e-300);
    if (!std::isfinite(cand) || cand <= t_lo || cand >= t_hi) {
      if (std::isfinite(t_lo) && std::isfinite(t_hi))
        cand = 0.5 * (t_lo + t_hi);
      else if (std::isfinite(t_lo)) {
        cand = t_lo + expand;
        expand *= 2.0;
      } else {
        cand = t_hi - expand;
        expand *= 2.0;
      }
    }
    t = cand;
  }
  throw std::runtime_error("solve_lambda: failed to converge (internal bug)");
}

double solve_lambda(const MeanParams& m) {
  return std::exp(solve_log_lambda(m.mu, m.nu, m.t_max, HUGE_VAL));
}

std::vector<double> cmp_pmf(const TruncCmpParams& p) {
  std::vector<double> pmf(static_cast<std::size_t>(p.t_max) + 1);
  for (int x = 0; x <= p.t_max; ++x) pmf[x] = std::exp(log_pmf(x, p));
  return pmf;
}

int cmp_sample(const TruncCmpParams& p, std::mt19937_64& rng) {
  const std::vector<double> pmf = cmp_pmf(p);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (int x = 0; x <= p.t_max; ++x) {
    acc += pmf[x];
    if (u < acc) return x;
  }
  return p.t_max;
}

}  // namespace mpcmp
