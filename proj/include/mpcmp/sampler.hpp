#ifndef MPCMP_SAMPLER_HPP
#define MPCMP_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mpcmp/model.hpp"

namespace mpcmp {

struct SamplerConfig {
  int n_chains = 4;
  int n_warmup = 1000;
  int n_iter = 5000;
  std::uint64_t seed = 1;
  double init_step = 0.1;        // scalar random-walk step
  double init_beta_step = 0.02;  // pre-adaptation per-component beta step
  double target_scalar = 0.44;
  double target_block = 0.234;
  int thin = 1;
  // Memory guard: when chains * iters * params exceeds this many stored
  // doubles, thinning switches to 5 unless thin was set explicitly (> 1).
  std::size_t thin_guard_doubles = 200000000;
  int check_every = 500;    // cached-posterior consistency interval (sweeps)
  int rezero_every = 1000;  // exact theta re-centering interval
  int checkpoint_every = 0; // 0 = no checkpoints
  std::string checkpoint_prefix;
  bool random_scan = false; // shuffle block order within a sweep

  void validate() const;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  // chains[c][draw] is a flattened parameter vector.
  std::vector<std::vector<std::vector<double>>> chains;
  std::map<std::string, double> accept_rate;

  std::size_t n_params() const { return names.size(); }
  std::size_t n_draws_total() const;
  int index_of(const std::string& name) const;
  std::vector<double> pooled(std::size_t param) const;
  std::vector<std::vector<double>> per_chain(std::size_t param) const;
};

// Flattened layout: beta, omega (opposition-major), zeta2, xi2..xi4, gamma,
// theta, eta.
std::vector<std::string> param_names(const DesignMatrices& d);
std::vector<double> flatten(const ParamVector& p);
ParamVector unflatten(const DesignMatrices& d, const std::vector<double>& flat);

// One MCMC chain with stepwise control; used directly for checkpoint and
// resume, and by run_sampler for the whole schedule.
class ChainRunner {
 public:
  ChainRunner(const Model& model, const SamplerConfig& cfg, int chain_index);
  ~ChainRunner();
  ChainRunner(ChainRunner&&) noexcept;

  void run_sweeps(int n);
  long sweeps_done() const;
  const ParamVector& current() const;
  const std::vector<std::vector<double>>& draws() const;
  std::map<std::string, std::pair<long, long>> accept_counts() const;  // block -> (acc, tries)

  // Versioned JSON snapshot of the full chain state (parameters, step
  // sizes, proposal covariance, rng state, counters). Stored draws are not
  // included; resume continues the chain from the snapshot point.
  std::string serialize() const;
  static ChainRunner deserialize(const Model& model, const SamplerConfig& cfg,
                                 const std::string& json_text);

 private:
  struct Impl;
  explicit ChainRunner(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

PosteriorDraws run_sampler(const SamplerConfig& cfg, const Model& model);

// --- diagnostics ---------------------------------------------------------

struct Diagnostics {
  std::vector<std::string> names;
  std::vector<double> rhat;
  std::vector<double> ess;
  double max_rhat = 0.0;
};

// Rank-normalized split R-hat for one parameter; needs >= 2 chains.
double split_rhat(const std::vector<std::vector<double>>& chains);
// Bulk effective sample size (rank-normalized, Geyer initial-monotone).
double ess_bulk(const std::vector<std::vector<double>>& chains);

Diagnostics diagnostics(const PosteriorDraws& draws);

// --- generic kernels against arbitrary targets ---------------------------
// The same random-walk machinery exercised on analytically known densities.

using LogDensity = std::function<double(const std::vector<double>&)>;

// Component-wise adaptive random walk; returns post-warm-up draws.
std::vector<std::vector<double>> run_rw_scalar(const LogDensity& logpdf,
                                               std::vector<double> init, int n_warmup,
                                               int n_iter, std::uint64_t seed,
                                               double init_step = 0.1,
                                               double target = 0.44);

// Joint random walk with warm-up empirical-covariance adaptation.
std::vector<std::vector<double>> run_rw_block(const LogDensity& logpdf,
                                              std::vector<double> init, int n_warmup,
                                              int n_iter, std::uint64_t seed,
                                              double init_step = 0.1,
                                              double target = 0.234);

}  // namespace mpcmp

#endif
