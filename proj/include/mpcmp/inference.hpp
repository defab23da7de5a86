#ifndef MPCMP_INFERENCE_HPP
#define MPCMP_INFERENCE_HPP

#include <map>
#include <random>
#include <string>
#include <vector>

#include "mpcmp/data.hpp"
#include "mpcmp/design.hpp"
#include "mpcmp/sampler.hpp"

namespace mpcmp {

struct Interval {
  double lo, hi;
};

// Shortest contiguous interval containing ceil(level * n) sorted samples;
// ties broken toward the smallest lower bound. Needs >= 100 samples.
Interval hdi(std::vector<double> samples, double level);

struct PlayerRow {
  int rank;
  int player_id;
  std::string name;
  int debut_year;
  std::size_t innings;
  double e_exp_theta;   // posterior mean of exp(theta)
  double sd_exp_theta;  // posterior sd of exp(theta)
  double e_nu;          // posterior mean of exp(eta)
};

// Ranked by E(exp(theta)) descending. Transformations are applied draw-wise
// before averaging.
std::vector<PlayerRow> player_table(const PosteriorDraws& draws, const Dataset& data);

struct EffectRow {
  std::string name;
  double mean, lo, hi;  // multiplicative scale
};

// Multiplicative innings 2-4, away and toss-first-innings effects with
// HDIs at the given level.
std::vector<EffectRow> game_effects_table(const PosteriorDraws& draws, double level = 0.95);

struct CurvePoint {
  double x;
  double mean, lo, hi;
};

// Posterior of exp(runs-spline contribution) on a grid of runs values,
// other effects at their reference levels.
std::vector<CurvePoint> runs_curve(const PosteriorDraws& draws, const DesignMatrices& d,
                                   int runs_lo = 1, int runs_hi = 300, double level = 0.95);

// Posterior of exp(opposition-spline contribution) per opposition over its
// observed year span.
std::map<int, std::vector<CurvePoint>> opposition_curves(const PosteriorDraws& draws,
                                                         const DesignMatrices& d,
                                                         double level = 0.95);

struct PpcTable {
  std::vector<double> observed;  // observed proportion per count 0..T
  std::vector<double> expected;  // posterior predictive probability per count
  std::vector<double> mc_se;     // Monte Carlo se of the expected column
  std::size_t n_records = 0;
  std::size_t n_draws_used = 0;
};

// Average over a random subsample of posterior draws of each record's
// truncated-MPCMP pmf, against observed frequencies.
PpcTable posterior_predictive_check(const PosteriorDraws& draws, const DesignMatrices& d,
                                    const std::vector<int>& wickets, std::mt19937_64& rng,
                                    std::size_t n_subsample = 1000, int t_max = 10);

}  // namespace mpcmp

#endif
