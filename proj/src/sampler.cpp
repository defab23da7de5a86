#include "mpcmp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mpcmp/mathutil.hpp"

namespace mpcmp {

void SamplerConfig::validate() const {
  if (n_chains < 1 || n_warmup < 1 || n_iter < 1 || thin < 1)
    throw std::invalid_argument("SamplerConfig: counts must be positive");
  if (!(target_scalar > 0.0 && target_scalar < 1.0) ||
      !(target_block > 0.0 && target_block < 1.0))
    throw std::invalid_argument("SamplerConfig: target acceptance outside (0,1)");
  if (!(init_step > 0.0) || !(init_beta_step > 0.0))
    throw std::invalid_argument("SamplerConfig: step sizes must be positive");
}

std::size_t PosteriorDraws::n_draws_total() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.size();
  return n;
}

int PosteriorDraws::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("PosteriorDraws: no parameter " + name);
  return static_cast<int>(it - names.begin());
}

std::vector<double> PosteriorDraws::pooled(std::size_t param) const {
  std::vector<double> out;
  out.reserve(n_draws_total());
  for (const auto& c : chains)
    for (const auto& row : c) out.push_back(row[param]);
  return out;
}

std::vector<std::vector<double>> PosteriorDraws::per_chain(std::size_t param) const {
  std::vector<std::vector<double>> out(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    out[c].reserve(chains[c].size());
    for (const auto& row : chains[c]) out[c].push_back(row[param]);
  }
  return out;
}

std::vector<std::string> param_names(const DesignMatrices& d) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < d.runs_spec.dim(); ++c)
    names.push_back("beta[" + std::to_string(c + 1) + "]");
  for (int o = 0; o < d.n_opps; ++o)
    for (int c = 0; c < d.free_dim[o]; ++c)
      names.push_back("omega[" + std::to_string(o) + "][" + std::to_string(c + 1) + "]");
  names.push_back("zeta2");
  names.push_back("xi[2]");
  names.push_back("xi[3]");
  names.push_back("xi[4]");
  names.push_back("gamma");
  for (int i = 0; i < d.n_players; ++i) names.push_back("theta[" + std::to_string(i) + "]");
  for (int i = 0; i < d.n_players; ++i) names.push_back("eta[" + std::to_string(i) + "]");
  return names;
}

std::vector<double> flatten(const ParamVector& p) {
  std::vector<double> out;
  out.insert(out.end(), p.beta.begin(), p.beta.end());
  for (const auto& w : p.omega) out.insert(out.end(), w.begin(), w.end());
  out.push_back(p.zeta2);
  out.insert(out.end(), p.xi.begin(), p.xi.end());
  out.push_back(p.gamma);
  out.insert(out.end(), p.theta.begin(), p.theta.end());
  out.insert(out.end(), p.eta.begin(), p.eta.end());
  return out;
}

ParamVector unflatten(const DesignMatrices& d, const std::vector<double>& flat) {
  ParamVector p = ParamVector::zeros(d);
  std::size_t k = 0;
  for (double& b : p.beta) b = flat.at(k++);
  for (auto& w : p.omega)
    for (double& c : w) c = flat.at(k++);
  p.zeta2 = flat.at(k++);
  for (double& x : p.xi) x = flat.at(k++);
  p.gamma = flat.at(k++);
  for (double& t : p.theta) t = flat.at(k++);
  for (double& e : p.eta) e = flat.at(k++);
  if (k != flat.size()) throw std::invalid_argument("unflatten: length mismatch");
  return p;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kStepMin = 1e-8, kStepMax = 50.0;

double adapt_rate(long t) { return 3.0 * std::pow(static_cast<double>(t) + 10.0, -0.6); }

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(chain + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

struct ChainRunner::Impl {
  const Model& model;
  SamplerConfig cfg;
  int chain_index;
  Evaluator eval;
  std::mt19937_64 rng;
  long sweep = 0;
  int effective_thin = 1;

  double step_zeta, step_xi[3], step_gamma, step_level;
  std::vector<double> step_theta, step_eta;
  std::vector<std::vector<double>> step_omega;
  double beta_scale = 1.0;
  std::vector<double> beta_chol;  // row-major lower factor; empty = diagonal proposal
  std::vector<std::vector<double>> warmup_beta;

  std::vector<std::vector<double>> draws;
  std::map<std::string, std::pair<long, long>> acc;

  std::normal_distribution<double> std_normal{0.0, 1.0};
  std::uniform_real_distribution<double> unif{0.0, 1.0};

  Impl(const Model& m, const SamplerConfig& c, int chain, ParamVector init)
      : model(m), cfg(c), chain_index(chain), eval(m, std::move(init)),
        rng(chain_seed(c.seed, chain)) {
    const DesignMatrices& d = m.design();
    step_zeta = step_xi[0] = step_xi[1] = step_xi[2] = step_gamma = step_level = cfg.init_step;
    step_theta.assign(d.n_players, cfg.init_step);
    step_eta.assign(d.n_players, cfg.init_step);
    step_omega.resize(d.n_opps);
    for (int o = 0; o < d.n_opps; ++o) step_omega[o].assign(d.free_dim[o], cfg.init_step);
    const std::size_t per_draw = flatten(eval.params()).size();
    const std::size_t total = per_draw * static_cast<std::size_t>(cfg.n_chains) *
                              static_cast<std::size_t>(cfg.n_iter);
    effective_thin = cfg.thin > 1 ? cfg.thin : (total > cfg.thin_guard_doubles ? 5 : 1);
  }

  static ParamVector initial_params(const Model& m, const SamplerConfig& c, int chain) {
    // All zeros except theta and eta, drawn from their priors (theta then
    // centered) with a dedicated rng so the sweep stream is untouched.
    const DesignMatrices& d = m.design();
    ParamVector p = ParamVector::zeros(d);
    std::mt19937_64 r(chain_seed(c.seed ^ 0x5151515151515151ULL, chain));
    std::normal_distribution<double> n01(0.0, 1.0);
    for (double& t : p.theta) t = m.prior().sd_effects * n01(r);
    double mean = std::accumulate(p.theta.begin(), p.theta.end(), 0.0) /
                  static_cast<double>(p.theta.size());
    for (double& t : p.theta) t -= mean;
    for (double& e : p.eta) e = m.prior().sd_eta * n01(r);
    return p;
  }

  bool in_warmup() const { return sweep < cfg.n_warmup; }

  void count(const char* block, bool accepted) {
    auto& c = acc[block];
    c.first += accepted ? 1 : 0;
    c.second += 1;
  }

  template <class Propose>
  void scalar_update(double& step, const char* block, Propose&& propose) {
    const double delta = std_normal(rng) * step;
    const double a = propose(delta);
    const double alpha = a >= 0.0 ? 1.0 : std::exp(a);
    const bool ok = unif(rng) < alpha || alpha >= 1.0;
    if (ok)
      eval.accept();
    else
      eval.reject();
    count(block, ok);
    if (in_warmup())
      step = std::clamp(step * std::exp(adapt_rate(sweep + 1) * (alpha - cfg.target_scalar)),
                        kStepMin, kStepMax);
  }

  void beta_update() {
    const std::size_t B = eval.params().beta.size();
    std::vector<double> z(B), delta(B, 0.0);
    for (double& v : z) v = std_normal(rng);
    if (beta_chol.empty()) {
      for (std::size_t c = 0; c < B; ++c) delta[c] = cfg.init_beta_step * beta_scale * z[c];
    } else {
      for (std::size_t i = 0; i < B; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += beta_chol[i * B + j] * z[j];
        delta[i] = beta_scale * s;
      }
    }
    const double a = eval.propose_beta(delta);
    const double alpha = a >= 0.0 ? 1.0 : std::exp(a);
    const bool ok = unif(rng) < alpha || alpha >= 1.0;
    if (ok)
      eval.accept();
    else
      eval.reject();
    count("beta", ok);
    if (in_warmup()) {
      beta_scale = std::clamp(
          beta_scale * std::exp(adapt_rate(sweep + 1) * (alpha - cfg.target_block)), 1e-6, 1e3);
      warmup_beta.push_back(eval.params().beta);
    }
  }

  // Empirical covariance of the second half of the warm-up beta draws,
  // scaled by 2.38^2/dim and regularized; diagonal fallback if the factor
  // fails.
  void refresh_beta_covariance() {
    const std::size_t B = eval.params().beta.size();
    const std::size_t m = warmup_beta.size();
    if (m < 50) return;
    const std::size_t from = m / 2;
    const std::size_t n = m - from;
    std::vector<double> mean(B, 0.0);
    for (std::size_t i = from; i < m; ++i)
      for (std::size_t c = 0; c < B; ++c) mean[c] += warmup_beta[i][c];
    for (double& v : mean) v /= static_cast<double>(n);
    std::vector<double> cov(B * B, 0.0);
    for (std::size_t i = from; i < m; ++i)
      for (std::size_t a = 0; a < B; ++a)
        for (std::size_t b = 0; b <= a; ++b)
          cov[a * B + b] += (warmup_beta[i][a] - mean[a]) * (warmup_beta[i][b] - mean[b]);
    const double scale = 2.38 * 2.38 / static_cast<double>(B) / static_cast<double>(n - 1);
    for (std::size_t a = 0; a < B; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        cov[a * B + b] *= scale;
        cov[b * B + a] = cov[a * B + b];
      }
    for (std::size_t a = 0; a < B; ++a) cov[a * B + a] += 1e-6;
    try {
      beta_chol = cholesky_lower(cov, B);
    } catch (const std::runtime_error&) {
      std::cerr << "[sampler] warning: beta proposal covariance not positive definite; "
                   "falling back to its diagonal\n";
      std::vector<double> diag(B * B, 0.0);
      for (std::size_t a = 0; a < B; ++a) diag[a * B + a] = std::sqrt(cov[a * B + a]);
      beta_chol = diag;
    }
    beta_scale = 1.0;
  }

  void theta_pass() {
    const DesignMatrices& d = model.design();
    const int n = d.n_players;
    if (n < 2) return;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int k = 0; k + 1 < n; ++k) {
      const int i = perm[k], j = perm[k + 1];
      scalar_update(step_theta[i], "theta",
                    [&](double delta) { return eval.propose_theta_pair(i, j, delta); });
    }
  }

  void one_sweep() {
    const DesignMatrices& d = model.design();
    std::vector<int> order = {0, 1, 2, 3, 4, 5};
    if (cfg.random_scan) std::shuffle(order.begin(), order.end(), rng);
    for (int block : order) {
      switch (block) {
        case 0:  // scalar game effects
          scalar_update(step_zeta, "zeta", [&](double dl) { return eval.propose_zeta(dl); });
          for (int k = 0; k < 3; ++k)
            scalar_update(step_xi[k], "xi", [&](double dl) { return eval.propose_xi(k, dl); });
          scalar_update(step_gamma, "gamma", [&](double dl) { return eval.propose_gamma(dl); });
          break;
        case 1:
          theta_pass();
          break;
        case 2:
          for (int i = 0; i < d.n_players; ++i)
            scalar_update(step_eta[i], "eta", [&](double dl) { return eval.propose_eta(i, dl); });
          break;
        case 3:
          for (int o = 0; o < d.n_opps; ++o)
            for (int c = 0; c < d.free_dim[o]; ++c)
              scalar_update(step_omega[o][c], "omega",
                            [&](double dl) { return eval.propose_omega(o, c, dl); });
          break;
        case 4:
          beta_update();
          break;
        case 5:  // common-level move along the beta/omega ridge
          scalar_update(step_level, "level", [&](double dl) { return eval.propose_level(dl); });
          break;
      }
    }
    ++sweep;

    if (in_warmup()) {
      if (sweep % 250 == 0) refresh_beta_covariance();
    }
    if (sweep == cfg.n_warmup) {
      refresh_beta_covariance();
      warmup_beta.clear();
    }
    if (cfg.rezero_every > 0 && sweep % cfg.rezero_every == 0) eval.rezero_theta();
    if (cfg.check_every > 0 && sweep % cfg.check_every == 0) {
      const double cached = eval.total_loglik();
      const double fresh = eval.recompute_full();
      if (std::fabs(cached - fresh) > 1e-6)
        throw std::runtime_error("sampler: cached-posterior consistency failure (|delta| = " +
                                 std::to_string(std::fabs(cached - fresh)) + ")");
    }
    if (sweep > cfg.n_warmup) {
      const long post = sweep - cfg.n_warmup;
      if (post % effective_thin == 0) draws.push_back(flatten(eval.params()));
    }
  }
};

ChainRunner::ChainRunner(const Model& model, const SamplerConfig& cfg, int chain_index)
    : impl_(std::make_unique<Impl>(model, cfg, chain_index,
                                   Impl::initial_params(model, cfg, chain_index))) {}

ChainRunner::ChainRunner(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ChainRunner::~ChainRunner() = default;
ChainRunner::ChainRunner(ChainRunner&&) noexcept = default;

void ChainRunner::run_sweeps(int n) {
  for (int i = 0; i < n; ++i) impl_->one_sweep();
}
long ChainRunner::sweeps_done() const { return impl_->sweep; }
const ParamVector& ChainRunner::current() const { return impl_->eval.params(); }
const std::vector<std::vector<double>>& ChainRunner::draws() const { return impl_->draws; }
std::map<std::string, std::pair<long, long>> ChainRunner::accept_counts() const {
  return impl_->acc;
}

std::string ChainRunner::serialize() const {
  nlohmann::json j;
  j["format"] = "mpcmp-chain-checkpoint";
  j["version"] = 1;
  j["chain_index"] = impl_->chain_index;
  j["sweep"] = impl_->sweep;
  j["effective_thin"] = impl_->effective_thin;
  std::ostringstream rs;
  rs << impl_->rng;
  j["rng"] = rs.str();
  j["params"] = flatten(impl_->eval.params());
  j["step_zeta"] = impl_->step_zeta;
  j["step_xi"] = std::vector<double>(impl_->step_xi, impl_->step_xi + 3);
  j["step_gamma"] = impl_->step_gamma;
  j["step_level"] = impl_->step_level;
  j["step_theta"] = impl_->step_theta;
  j["step_eta"] = impl_->step_eta;
  j["step_omega"] = impl_->step_omega;
  j["beta_scale"] = impl_->beta_scale;
  j["beta_chol"] = impl_->beta_chol;
  j["warmup_beta"] = impl_->warmup_beta;
  nlohmann::json ja;
  for (const auto& [k, v] : impl_->acc) ja[k] = {v.first, v.second};
  j["accept"] = ja;
  return j.dump();
}

ChainRunner ChainRunner::deserialize(const Model& model, const SamplerConfig& cfg,
                                     const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("format") != "mpcmp-chain-checkpoint" || j.at("version") != 1)
    throw std::runtime_error("checkpoint: unrecognized format/version");
  const int chain = j.at("chain_index").get<int>();
  ParamVector p = unflatten(model.design(), j.at("params").get<std::vector<double>>());
  auto impl = std::make_unique<Impl>(model, cfg, chain, std::move(p));
  impl->sweep = j.at("sweep").get<long>();
  impl->effective_thin = j.at("effective_thin").get<int>();
  std::istringstream rs(j.at("rng").get<std::string>());
  rs >> impl->rng;
  impl->step_zeta = j.at("step_zeta").get<double>();
  const auto sx = j.at("step_xi").get<std::vector<double>>();
  std::copy(sx.begin(), sx.end(), impl->step_xi);
  impl->step_gamma = j.at("step_gamma").get<double>();
  impl->step_level = j.at("step_level").get<double>();
  impl->step_theta = j.at("step_theta").get<std::vector<double>>();
  impl->step_eta = j.at("step_eta").get<std::vector<double>>();
  impl->step_omega = j.at("step_omega").get<std::vector<std::vector<double>>>();
  impl->beta_scale = j.at("beta_scale").get<double>();
  impl->beta_chol = j.at("beta_chol").get<std::vector<double>>();
  impl->warmup_beta = j.at("warmup_beta").get<std::vector<std::vector<double>>>();
  for (const auto& [k, v] : j.at("accept").items())
    impl->acc[k] = {v[0].get<long>(), v[1].get<long>()};
  return ChainRunner(std::move(impl));
}

PosteriorDraws run_sampler(const SamplerConfig& cfg, const Model& model) {
  cfg.validate();
  PosteriorDraws out;
  out.names = param_names(model.design());
  std::map<std::string, std::pair<long, long>> acc;
  const int total = cfg.n_warmup + cfg.n_iter;
  for (int c = 0; c < cfg.n_chains; ++c) {
    ChainRunner runner(model, cfg, c);
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_prefix.empty()) {
      int done = 0;
      while (done < total) {
        const int step = std::min(cfg.checkpoint_every, total - done);
        runner.run_sweeps(step);
        done += step;
        std::ofstream f(cfg.checkpoint_prefix + ".chain" + std::to_string(c) + ".ckpt.json");
        f << runner.serialize();
      }
    } else {
      runner.run_sweeps(total);
    }
    out.chains.push_back(runner.draws());
    for (const auto& [k, v] : runner.accept_counts()) {
      acc[k].first += v.first;
      acc[k].second += v.second;
    }
  }
  for (const auto& [k, v] : acc)
    out.accept_rate[k] =
        v.second > 0 ? static_cast<double>(v.first) / static_cast<double>(v.second) : 0.0;
  return out;
}

// --- diagnostics ----------------------------------------------------------

namespace {

std::vector<std::vector<double>> split_halves(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> out;
  for (const auto& c : chains) {
    const std::size_t n = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + n);
    out.emplace_back(c.begin() + n, c.begin() + 2 * n);
  }
  return out;
}

// Pooled rank-normalization (fractional offset 3/8) across all sequences.
std::vector<std::vector<double>> rank_normalize(const std::vector<std::vector<double>>& seqs) {
  std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> all;
  std::size_t total = 0;
  for (std::size_t s = 0; s < seqs.size(); ++s)
    for (std::size_t i = 0; i < seqs[s].size(); ++i) all.push_back({seqs[s][i], {s, i}});
  total = all.size();
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<double>> out(seqs.size());
  for (std::size_t s = 0; s < seqs.size(); ++s) out[s].resize(seqs[s].size());
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = i;
    while (j + 1 < total && all[j + 1].first == all[i].first) ++j;
    const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    const double z = inv_normal_cdf((rank - 0.375) / (static_cast<double>(total) + 0.25));
    for (std::size_t k = i; k <= j; ++k) out[all[k].second.first][all[k].second.second] = z;
    i = j + 1;
  }
  return out;
}

struct BW {
  double w, var_plus;
  std::vector<double> means, vars;
  std::size_t n;
};

BW between_within(const std::vector<std::vector<double>>& seqs) {
  BW r;
  r.n = seqs.front().size();
  for (const auto& s : seqs) {
    r.means.push_back(sample_mean(s));
    const double sd = sample_sd(s);
    r.vars.push_back(sd * sd);
  }
  r.w = sample_mean(r.vars);
  const double sdm = sample_sd(r.means);
  const double b = static_cast<double>(r.n) * sdm * sdm;
  r.var_plus = (static_cast<double>(r.n) - 1.0) / static_cast<double>(r.n) * r.w +
               b / static_cast<double>(r.n);
  return r;
}

double autocov(const std::vector<double>& x, double mean, std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i) s += (x[i] - mean) * (x[i + lag] - mean);
  return s / static_cast<double>(x.size());
}

}  // namespace

double split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("split_rhat: need >= 2 chains");
  for (const auto& c : chains)
    if (c.size() < 4) throw std::invalid_argument("split_rhat: chains too short");
  const auto seqs = rank_normalize(split_halves(chains));
  const BW bw = between_within(seqs);
  if (bw.w <= 0.0) return 1.0;
  return std::sqrt(bw.var_plus / bw.w);
}

double ess_bulk(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("ess_bulk: need >= 2 chains");
  const auto seqs = rank_normalize(split_halves(chains));
  const BW bw = between_within(seqs);
  const std::size_t m = seqs.size(), n = bw.n;
  if (bw.var_plus <= 0.0) return static_cast<double>(m * n);
  const std::size_t max_lag = std::min(n - 1, static_cast<std::size_t>(1000));

  // Combined autocorrelations with Geyer initial-monotone pairing.
  const auto mean_acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) s += autocov(seqs[c], bw.means[c], lag);
    return s / static_cast<double>(m);
  };
  const auto rho = [&](std::size_t lag) {
    return 1.0 - (bw.w - mean_acov(lag)) / bw.var_plus;
  };

  double tau = 0.0;
  double prev_pair = HUGE_VAL;
  for (std::size_t t = 0; t + 1 <= max_lag; t += 2) {
    const double r_even = t == 0 ? 1.0 : rho(t);
    const double r_odd = rho(t + 1);
    double pair = r_even + r_odd;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
    if (t > 0 && pair < 1e-12) break;
  }
  tau -= 1.0;
  tau = std::max(tau, 1.0 / static_cast<double>(m * n));
  return static_cast<double>(m * n) / tau;
}

Diagnostics diagnostics(const PosteriorDraws& draws) {
  if (draws.chains.size() < 2)
    throw std::invalid_argument("diagnostics: need >= 2 chains");
  Diagnostics d;
  d.names = draws.names;
  for (std::size_t p = 0; p < draws.n_params(); ++p) {
    const auto per = draws.per_chain(p);
    d.rhat.push_back(split_rhat(per));
    d.ess.push_back(ess_bulk(per));
    d.max_rhat = std::max(d.max_rhat, d.rhat.back());
  }
  return d;
}

// --- generic kernels ------------------------------------------------------

std::vector<std::vector<double>> run_rw_scalar(const LogDensity& logpdf,
                                               std::vector<double> init, int n_warmup,
                                               int n_iter, std::uint64_t seed,
                                               double init_step, double target) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t dim = init.size();
  std::vector<double> x = std::move(init);
  std::vector<double> step(dim, init_step);
  double lp = logpdf(x);
  std::vector<std::vector<double>> out;
  out.reserve(n_iter);
  for (int t = 1; t <= n_warmup + n_iter; ++t) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double old = x[c];
      x[c] = old + step[c] * n01(rng);
      const double lp_new = logpdf(x);
      const double a = lp_new - lp;
      const double alpha = a >= 0.0 ? 1.0 : std::exp(a);
      if (unif(rng) < alpha || alpha >= 1.0) {
        lp = lp_new;
      } else {
        x[c] = old;
      }
      if (t <= n_warmup)
        step[c] = std::clamp(step[c] * std::exp(adapt_rate(t) * (alpha - target)), kStepMin,
                             kStepMax);
    }
    if (t > n_warmup) out.push_back(x);
  }
  return out;
}

std::vector<std::vector<double>> run_rw_block(const LogDensity& logpdf,
                                              std::vector<double> init, int n_warmup,
                                              int n_iter, std::uint64_t seed,
                                              double init_step, double target) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t dim = init.size();
  std::vector<double> x = std::move(init);
  double scale = 1.0;
  std::vector<double> chol;  // empty = diagonal init_step
  std::vector<std::vector<double>> history;
  double lp = logpdf(x);
  std::vector<std::vector<double>> out;
  out.reserve(n_iter);

  const auto refresh = [&]() {
    const std::size_t mlen = history.size();
    if (mlen < 50) return;
    const std::size_t from = mlen / 2, cnt = mlen - from;
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = from; i < mlen; ++i)
      for (std::size_t c = 0; c < dim; ++c) mean[c] += history[i][c];
    for (double& v : mean) v /= static_cast<double>(cnt);
    std::vector<double> cov(dim * dim, 0.0);
    for (std::size_t i = from; i < mlen; ++i)
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b <= a; ++b)
          cov[a * dim + b] += (history[i][a] - mean[a]) * (history[i][b] - mean[b]);
    const double s = 2.38 * 2.38 / static_cast<double>(dim) / static_cast<double>(cnt - 1);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        cov[a * dim + b] *= s;
        cov[b * dim + a] = cov[a * dim + b];
      }
    for (std::size_t a = 0; a < dim; ++a) cov[a * dim + a] += 1e-6;
    try {
      chol = cholesky_lower(cov, dim);
      scale = 1.0;
    } catch (const std::runtime_error&) {
      // keep the previous proposal
    }
  };

  for (int t = 1; t <= n_warmup + n_iter; ++t) {
    std::vector<double> z(dim), prop(dim);
    for (double& v : z) v = n01(rng);
    for (std::size_t i = 0; i < dim; ++i) {
      if (chol.empty()) {
        prop[i] = x[i] + init_step * scale * z[i];
      } else {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += chol[i * dim + j] * z[j];
        prop[i] = x[i] + scale * s;
      }
    }
    const double lp_new = logpdf(prop);
    const double a = lp_new - lp;
    const double alpha = a >= 0.0 ? 1.0 : std::exp(a);
    if (unif(rng) < alpha || alpha >= 1.0) {
      x = prop;
      lp = lp_new;
    }
    if (t <= n_warmup) {
      scale = std::clamp(scale * std::exp(adapt_rate(t) * (alpha - target)), 1e-6, 1e3);
      history.push_back(x);
      if (t % 250 == 0 || t == n_warmup) refresh();
    }
    if (t > n_warmup) out.push_back(x);
  }
  return out;
}

}  // namespace mpcmp
