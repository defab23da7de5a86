#ifndef MPCMP_MODEL_HPP
#define MPCMP_MODEL_HPP

#include <array>
#include <cmath>
#include <vector>

#include "mpcmp/cmp.hpp"
#include "mpcmp/design.hpp"

namespace mpcmp {

// Full model state. theta carries a sum-to-zero constraint maintained by
// the sampler's pairwise moves; omega is stored in free coordinates (the
// reference-opposition pivot is implicit, see DesignMatrices).
struct ParamVector {
  std::vector<double> beta;                 // runs-spline coefficients
  std::vector<std::vector<double>> omega;   // per opposition, free coords
  std::vector<double> theta;                // per player, sums to zero
  double zeta2 = 0.0;                       // away effect (home = reference)
  std::array<double, 3> xi{};               // innings 2..4 (first = reference)
  double gamma = 0.0;                       // toss won x first innings
  std::vector<double> eta;                  // log dispersion per player

  static ParamVector zeros(const DesignMatrices& d);
};

struct PriorSpec {
  double sd_effects = 0.5 * std::log(2.0);  // zeta, xi, gamma, theta
  double sd_spline = 1.0;                   // beta and free omega coords
  double sd_eta = 0.5 * std::log(3.0);      // log dispersion
};

class Model {
 public:
  Model(const DesignMatrices* design, std::vector<int> wickets, int t_max = 10,
        PriorSpec prior = {});
  Model(const DesignMatrices* design, const Dataset& data, int t_max = 10,
        PriorSpec prior = {});

  double linear_predictor(const ParamVector& p, int rec) const;

  // Sum of truncated-MPCMP log pmfs; -inf when any mu >= t_max or the
  // rate solve overflows (such proposals are rejected upstream).
  double log_likelihood(const ParamVector& p) const;
  double log_prior(const ParamVector& p) const;
  double log_posterior(const ParamVector& p) const;

  const DesignMatrices& design() const { return *design_; }
  const std::vector<int>& wickets() const { return wickets_; }
  int t_max() const { return t_max_; }
  const PriorSpec& prior() const { return prior_; }
  const std::vector<double>& log_fact() const { return lfact_; }

 private:
  const DesignMatrices* design_;
  std::vector<int> wickets_;
  int t_max_;
  PriorSpec prior_;
  std::vector<double> lfact_;
};

// Incremental likelihood evaluator: caches per-record log mu, solved
// log lambda and log-pmf contribution, plus per-player dispersion factors,
// so single-parameter moves only touch the records they affect.
// Usage: propose_* stages a move and returns the change in log posterior
// (-inf for rejected-by-construction proposals); then accept() or reject().
class Evaluator {
 public:
  Evaluator(const Model& model, ParamVector init);

  const ParamVector& params() const { return params_; }
  double total_loglik() const { return total_ll_; }
  double total_logprior() const { return total_lp_; }
  double log_posterior() const { return total_ll_ + total_lp_; }

  double propose_zeta(double delta);
  double propose_xi(int k, double delta);  // k in 0..2
  double propose_gamma(double delta);
  double propose_theta_pair(int i, int j, double delta);
  double propose_eta(int player, double delta);
  double propose_omega(int opp, int coord, double delta);
  double propose_beta(const std::vector<double>& delta);
  // Level move: beta += delta on every component, every non-reference
  // omega coordinate -= delta. Only reference-opposition records change
  // (partition of unity cancels the shift elsewhere).
  double propose_level(double delta);

  void accept();
  void reject();

  // Rebuild every cached quantity from params_; returns the fresh total
  // log likelihood. Used for periodic consistency checks.
  double recompute_full();

  // Exact re-centering of theta (subtracts the mean residual); a no-op to
  // the distribution, kills float drift. Rebuilds the cache.
  void rezero_theta();

 private:
  struct RecordPatch {
    int rec;
    double log_mu, log_lambda, ll;
  };
  enum class Move { None, Zeta, Xi, Gamma, ThetaPair, Eta, Omega, Beta, Level };

  double eval_record(int rec, double log_mu, const double* fac, double nu,
                     double warm_log_lambda, double* log_lambda_out) const;
  double stage_shift(const std::vector<int>& recs, double shift);
  double stage_shift_weighted(const std::vector<int>& recs,
                              const std::vector<std::vector<double>>& rows, int coord,
                              double delta);
  void refresh_player_factors(int player, double nu, std::array<double, 16>& out) const;

  const Model& model_;
  ParamVector params_;
  std::vector<int> away_recs_, gamma_recs_;
  std::array<std::vector<int>, 3> innings_recs_;
  std::vector<double> log_mu_, log_lambda_, ll_;
  std::vector<std::array<double, 16>> nu_fac_;  // per player: exp(-nu log r!)
  std::vector<double> nu_;                      // per player
  double total_ll_ = 0.0, total_lp_ = 0.0;

  // staged move
  Move move_ = Move::None;
  std::vector<RecordPatch> patches_;
  double staged_ll_delta_ = 0.0, staged_lp_delta_ = 0.0;
  int move_i_ = 0, move_j_ = 0;
  double move_delta_ = 0.0;
  std::vector<double> move_vec_;
  std::array<double, 16> staged_fac_{};
  double staged_nu_ = 0.0;
};

}  // namespace mpcmp

#endif
