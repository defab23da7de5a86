#include "mpcmp/model.hpp"

#include <stdexcept>

#include "mpcmp/mathutil.hpp"

namespace mpcmp {

ParamVector ParamVector::zeros(const DesignMatrices& d) {
  ParamVector p;
  p.beta.assign(d.runs_spec.dim(), 0.0);
  p.omega.resize(d.n_opps);
  for (int o = 0; o < d.n_opps; ++o) p.omega[o].assign(d.free_dim[o], 0.0);
  p.theta.assign(d.n_players, 0.0);
  p.eta.assign(d.n_players, 0.0);
  return p;
}

Model::Model(const DesignMatrices* design, std::vector<int> wickets, int t_max, PriorSpec prior)
    : design_(design), wickets_(std::move(wickets)), t_max_(t_max), prior_(prior),
      lfact_(log_factorials(t_max)) {
  if (wickets_.size() != design_->n_records())
    throw std::invalid_argument("Model: wickets/design size mismatch");
  for (int x : wickets_)
    if (x < 0 || x > t_max_) throw std::invalid_argument("Model: wicket count outside support");
}

Model::Model(const DesignMatrices* design, const Dataset& data, int t_max, PriorSpec prior)
    : Model(design,
            [&] {
              std::vector<int> w;
              w.reserve(data.records.size());
              for (const auto& r : data.records) w.push_back(r.wickets);
              return w;
            }(),
            t_max, prior) {}

double Model::linear_predictor(const ParamVector& p, int rec) const {
  const DesignMatrices& d = *design_;
  double lp = 0.0;
  const auto& rb = d.runs_basis[rec];
  for (std::size_t c = 0; c < rb.size(); ++c) lp += rb[c] * p.beta[c];
  const int o = d.opp_of[rec];
  const auto& orow = d.opp_rows[rec];
  for (std::size_t c = 0; c < orow.size(); ++c) lp += orow[c] * p.omega[o][c];
  lp += p.theta[d.player_of[rec]];
  if (d.is_away[rec]) lp += p.zeta2;
  if (d.innings_idx[rec] > 0) lp += p.xi[d.innings_idx[rec] - 1];
  if (d.toss_won[rec] && d.innings_idx[rec] == 0) lp += p.gamma;
  return lp;
}

namespace {

// Single-record log pmf given log mu; -inf when mu >= t_max or the rate
// solve trips its overflow guard. Extremely small mu degenerates to the
// point mass at zero.
double eval_record_ll(double log_mu, int x, const double* fac, double nu, int t_max,
                      const std::vector<double>& lfact, double warm, double* log_lambda_out) {
  if (!(log_mu < std::log(static_cast<double>(t_max)))) return -HUGE_VAL;
  if (log_mu < -700.0) {
    *log_lambda_out = log_mu;
    return x == 0 ? 0.0 : -HUGE_VAL;
  }
  const double mu = std::exp(log_mu);
  double t;
  try {
    t = solve_log_lambda_fac(mu, nu, fac, t_max, warm);
  } catch (const std::runtime_error&) {
    return -HUGE_VAL;
  }
  *log_lambda_out = t;
  return x * t - nu * lfact[x] - log_normalizer_with_factors(t, fac, nu, t_max);
}

}  // namespace

double Model::log_likelihood(const ParamVector& p) const {
  const DesignMatrices& d = *design_;
  std::vector<std::array<double, 16>> fac(d.n_players);
  for (int i = 0; i < d.n_players; ++i) {
    const double nu = std::exp(p.eta[i]);
    for (int r = 0; r <= t_max_; ++r) fac[i][r] = std::exp(-nu * lfact_[r]);
  }
  double total = 0.0;
  double ll_scratch;
  for (std::size_t rec = 0; rec < d.n_records(); ++rec) {
    const int pl = d.player_of[rec];
    const double v = eval_record_ll(linear_predictor(p, static_cast<int>(rec)), wickets_[rec],
                                    fac[pl].data(), std::exp(p.eta[pl]), t_max_, lfact_,
                                    HUGE_VAL, &ll_scratch);
    if (v == -HUGE_VAL) return -HUGE_VAL;
    total += v;
  }
  return total;
}

double Model::log_prior(const ParamVector& p) const {
  double lp = 0.0;
  lp += normal_logpdf(p.zeta2, 0.0, prior_.sd_effects);
  for (double x : p.xi) lp += normal_logpdf(x, 0.0, prior_.sd_effects);
  lp += normal_logpdf(p.gamma, 0.0, prior_.sd_effects);
  for (double t : p.theta) lp += normal_logpdf(t, 0.0, prior_.sd_effects);
  for (double b : p.beta) lp += normal_logpdf(b, 0.0, prior_.sd_spline);
  for (const auto& w : p.omega)
    for (double c : w) lp += normal_logpdf(c, 0.0, prior_.sd_spline);
  for (double e : p.eta) lp += normal_logpdf(e, 0.0, prior_.sd_eta);
  return lp;
}

double Model::log_posterior(const ParamVector& p) const {
  const double ll = log_likelihood(p);
  if (ll == -HUGE_VAL) return -HUGE_VAL;
  return ll + log_prior(p);
}

// ---------------------------------------------------------------------------

Evaluator::Evaluator(const Model& model, ParamVector init)
    : model_(model), params_(std::move(init)) {
  const DesignMatrices& d = model_.design();
  log_mu_.assign(d.n_records(), 0.0);
  log_lambda_.assign(d.n_records(), HUGE_VAL);
  ll_.assign(d.n_records(), 0.0);
  nu_.assign(d.n_players, 1.0);
  nu_fac_.resize(d.n_players);
  for (int i = 0; i < d.n_players; ++i) {
    nu_[i] = std::exp(params_.eta[i]);
    refresh_player_factors(i, nu_[i], nu_fac_[i]);
  }
  for (std::size_t r = 0; r < d.n_records(); ++r) {
    if (d.is_away[r]) away_recs_.push_back(static_cast<int>(r));
    if (d.innings_idx[r] > 0) innings_recs_[d.innings_idx[r] - 1].push_back(static_cast<int>(r));
    if (d.toss_won[r] && d.innings_idx[r] == 0) gamma_recs_.push_back(static_cast<int>(r));
  }
  recompute_full();
  total_lp_ = model_.log_prior(params_);
}

void Evaluator::refresh_player_factors(int, double nu, std::array<double, 16>& out) const {
  const auto& lf = model_.log_fact();
  for (int r = 0; r <= model_.t_max(); ++r) out[r] = std::exp(-nu * lf[r]);
}

double Evaluator::eval_record(int rec, double log_mu, const double* fac, double nu,
                              double warm_log_lambda, double* log_lambda_out) const {
  return eval_record_ll(log_mu, model_.wickets()[rec], fac, nu, model_.t_max(),
                        model_.log_fact(), warm_log_lambda, log_lambda_out);
}

double Evaluator::recompute_full() {
  const DesignMatrices& d = model_.design();
  double total = 0.0;
  for (std::size_t rec = 0; rec < d.n_records(); ++rec) {
    const int pl = d.player_of[rec];
    log_mu_[rec] = model_.linear_predictor(params_, static_cast<int>(rec));
    const double v = eval_record(static_cast<int>(rec), log_mu_[rec], nu_fac_[pl].data(),
                                 nu_[pl], log_lambda_[rec], &log_lambda_[rec]);
    if (v == -HUGE_VAL) throw std::runtime_error("Evaluator: state has zero likelihood");
    ll_[rec] = v;
    total += v;
  }
  total_ll_ = total;
  total_lp_ = model_.log_prior(params_);
  return total;
}

void Evaluator::rezero_theta() {
  double mean = 0.0;
  for (double t : params_.theta) mean += t;
  mean /= static_cast<double>(params_.theta.size());
  for (double& t : params_.theta) t -= mean;
  recompute_full();
}

double Evaluator::stage_shift(const std::vector<int>& recs, double shift) {
  const DesignMatrices& d = model_.design();
  double delta = 0.0;
  for (int rec : recs) {
    const int pl = d.player_of[rec];
    RecordPatch p;
    p.rec = rec;
    p.log_mu = log_mu_[rec] + shift;
    const double v = eval_record(rec, p.log_mu, nu_fac_[pl].data(), nu_[pl],
                                 log_lambda_[rec], &p.log_lambda);
    if (v == -HUGE_VAL) return -HUGE_VAL;
    p.ll = v;
    delta += v - ll_[rec];
    patches_.push_back(p);
  }
  return delta;
}

double Evaluator::stage_shift_weighted(const std::vector<int>& recs,
                                       const std::vector<std::vector<double>>& rows, int coord,
                                       double delta_coef) {
  const DesignMatrices& d = model_.design();
  double delta = 0.0;
  for (int rec : recs) {
    const int pl = d.player_of[rec];
    RecordPatch p;
    p.rec = rec;
    p.log_mu = log_mu_[rec] + delta_coef * rows[rec][coord];
    const double v = eval_record(rec, p.log_mu, nu_fac_[pl].data(), nu_[pl],
                                 log_lambda_[rec], &p.log_lambda);
    if (v == -HUGE_VAL) return -HUGE_VAL;
    p.ll = v;
    delta += v - ll_[rec];
    patches_.push_back(p);
  }
  return delta;
}

namespace {
double prior_delta(double old_v, double new_v, double sd) {
  return -(new_v * new_v - old_v * old_v) / (2.0 * sd * sd);
}
}  // namespace

double Evaluator::propose_zeta(double delta) {
  move_ = Move::Zeta;
  move_delta_ = delta;
  patches_.clear();
  staged_ll_delta_ = stage_shift(away_recs_, delta);
  if (staged_ll_delta_ == -HUGE_VAL) return -HUGE_VAL;
  staged_lp_delta_ = prior_delta(params_.zeta2, params_.zeta2 + delta, model_.prior().sd_effects);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_xi(int k, double delta) {
  move_ = Move::Xi;
  move_i_ = k;
  move_delta_ = delta;
  patches_.clear();
  staged_ll_delta_ = stage_shift(innings_recs_[k], delta);
  if (staged_ll_delta_ == -HUGE_VAL) return -HUGE_VAL;
  staged_lp_delta_ = prior_delta(params_.xi[k], params_.xi[k] + delta, model_.prior().sd_effects);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_gamma(double delta) {
  move_ = Move::Gamma;
  move_delta_ = delta;
  patches_.clear();
  staged_ll_delta_ = stage_shift(gamma_recs_, delta);
  if (staged_ll_delta_ == -HUGE_VAL) return -HUGE_VAL;
  staged_lp_delta_ = prior_delta(params_.gamma, params_.gamma + delta, model_.prior().sd_effects);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_theta_pair(int i, int j, double delta) {
  move_ = Move::ThetaPair;
  move_i_ = i;
  move_j_ = j;
  move_delta_ = delta;
  patches_.clear();
  const DesignMatrices& d = model_.design();
  staged_ll_delta_ = stage_shift(d.records_of_player[i], delta);
  if (staged_ll_delta_ == -HUGE_VAL) return -HUGE_VAL;
  const double part2 = stage_shift(d.records_of_player[j], -delta);
  if (part2 == -HUGE_VAL) {
    staged_ll_delta_ = -HUGE_VAL;
    return -HUGE_VAL;
  }
  staged_ll_delta_ += part2;
  const double sd = model_.prior().sd_effects;
  staged_lp_delta_ = prior_delta(params_.theta[i], params_.theta[i] + delta, sd) +
                     prior_delta(params_.theta[j], params_.theta[j] - delta, sd);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_eta(int player, double delta) {
  move_ = Move::Eta;
  move_i_ = player;
  move_delta_ = delta;
  patches_.clear();
  staged_nu_ = std::exp(params_.eta[player] + delta);
  refresh_player_factors(player, staged_nu_, staged_fac_);
  const DesignMatrices& d = model_.design();
  double ll_delta = 0.0;
  for (int rec : d.records_of_player[player]) {
    RecordPatch p;
    p.rec = rec;
    p.log_mu = log_mu_[rec];
    const double v = eval_record(rec, p.log_mu, staged_fac_.data(), staged_nu_,
                                 log_lambda_[rec], &p.log_lambda);
    if (v == -HUGE_VAL) {
      staged_ll_delta_ = -HUGE_VAL;
      return -HUGE_VAL;
    }
    p.ll = v;
    ll_delta += v - ll_[rec];
    patches_.push_back(p);
  }
  staged_ll_delta_ = ll_delta;
  staged_lp_delta_ =
      prior_delta(params_.eta[player], params_.eta[player] + delta, model_.prior().sd_eta);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_omega(int opp, int coord, double delta) {
  move_ = Move::Omega;
  move_i_ = opp;
  move_j_ = coord;
  move_delta_ = delta;
  patches_.clear();
  const DesignMatrices& d = model_.design();
  staged_ll_delta_ = stage_shift_weighted(d.records_of_opp[opp], d.opp_rows, coord, delta);
  if (staged_ll_delta_ == -HUGE_VAL) return -HUGE_VAL;
  staged_lp_delta_ = prior_delta(params_.omega[opp][coord], params_.omega[opp][coord] + delta,
                                 model_.prior().sd_spline);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_beta(const std::vector<double>& delta) {
  move_ = Move::Beta;
  move_vec_ = delta;
  patches_.clear();
  const DesignMatrices& d = model_.design();
  double ll_delta = 0.0;
  for (std::size_t rec = 0; rec < d.n_records(); ++rec) {
    const auto& rb = d.runs_basis[rec];
    double shift = 0.0;
    for (std::size_t c = 0; c < rb.size(); ++c) shift += rb[c] * delta[c];
    const int pl = d.player_of[rec];
    RecordPatch p;
    p.rec = static_cast<int>(rec);
    p.log_mu = log_mu_[rec] + shift;
    const double v = eval_record(p.rec, p.log_mu, nu_fac_[pl].data(), nu_[pl],
                                 log_lambda_[rec], &p.log_lambda);
    if (v == -HUGE_VAL) {
      staged_ll_delta_ = -HUGE_VAL;
      return -HUGE_VAL;
    }
    p.ll = v;
    ll_delta += v - ll_[rec];
    patches_.push_back(p);
  }
  staged_ll_delta_ = ll_delta;
  staged_lp_delta_ = 0.0;
  const double sd = model_.prior().sd_spline;
  for (std::size_t c = 0; c < delta.size(); ++c)
    staged_lp_delta_ += prior_delta(params_.beta[c], params_.beta[c] + delta[c], sd);
  return staged_ll_delta_ + staged_lp_delta_;
}

double Evaluator::propose_level(double delta) {
  move_ = Move::Level;
  move_delta_ = delta;
  patches_.clear();
  const DesignMatrices& d = model_.design();
  staged_ll_delta_ = stage_shift(d.records_of_opp[d.ref_opp], delta);
  if (staged_ll_delta_ == -HUGE_VAL) return -HUGE_VAL;
  staged_lp_delta_ = 0.0;
  for (double b : params_.beta)
    staged_lp_delta_ += prior_delta(b, b + delta, model_.prior().sd_spline);
  for (int o = 0; o < d.n_opps; ++o) {
    if (o == d.ref_opp) continue;
    for (double w : params_.omega[o])
      staged_lp_delta_ += prior_delta(w, w - delta, model_.prior().sd_spline);
  }
  return staged_ll_delta_ + staged_lp_delta_;
}

void Evaluator::accept() {
  if (staged_ll_delta_ == -HUGE_VAL)
    throw std::logic_error("Evaluator::accept on an impossible proposal");
  switch (move_) {
    case Move::Zeta:
      params_.zeta2 += move_delta_;
      break;
    case Move::Xi:
      params_.xi[move_i_] += move_delta_;
      break;
    case Move::Gamma:
      params_.gamma += move_delta_;
      break;
    case Move::ThetaPair:
      params_.theta[move_i_] += move_delta_;
      params_.theta[move_j_] -= move_delta_;
      break;
    case Move::Eta:
      params_.eta[move_i_] += move_delta_;
      nu_[move_i_] = staged_nu_;
      nu_fac_[move_i_] = staged_fac_;
      break;
    case Move::Omega:
      params_.omega[move_i_][move_j_] += move_delta_;
      break;
    case Move::Beta:
      for (std::size_t c = 0; c < move_vec_.size(); ++c) params_.beta[c] += move_vec_[c];
      break;
    case Move::Level: {
      for (double& b : params_.beta) b += move_delta_;
      const DesignMatrices& d = model_.design();
      for (int o = 0; o < d.n_opps; ++o) {
        if (o == d.ref_opp) continue;
        for (double& w : params_.omega[o]) w -= move_delta_;
      }
      break;
    }
    case Move::None:
      throw std::logic_error("Evaluator::accept with no staged move");
  }
  for (const RecordPatch& p : patches_) {
    log_mu_[p.rec] = p.log_mu;
    log_lambda_[p.rec] = p.log_lambda;
    ll_[p.rec] = p.ll;
  }
  total_ll_ += staged_ll_delta_;
  total_lp_ += staged_lp_delta_;
  patches_.clear();
  move_ = Move::None;
}

void Evaluator::reject() {
  patches_.clear();
  move_ = Move::None;
  staged_ll_delta_ = 0.0;
  staged_lp_delta_ = 0.0;
}

}  // namespace mpcmp
