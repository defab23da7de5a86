#include "mpcmp/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "mpcmp/cmp.hpp"

namespace mpcmp {

SynthResult generate_synthetic(const SynthLayout& layout, std::uint64_t seed) {
  if (layout.n_players < 1 || layout.innings_per_player < 1 || layout.n_opps < 1)
    throw std::invalid_argument("generate_synthetic: layout counts must be positive");
  if (layout.year_hi < layout.year_lo)
    throw std::invalid_argument("generate_synthetic: bad year span");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_int_distribution<int> year_d(layout.year_lo, layout.year_hi);
  std::uniform_int_distribution<int> opp_d(0, layout.n_opps - 1);
  std::uniform_int_distribution<int> inn_d(1, 4);
  std::uniform_int_distribution<int> two_d(1, 2);

  SynthResult out;
  Dataset& data = out.data;
  char buf[32];
  for (int i = 0; i < layout.n_players; ++i) {
    std::snprintf(buf, sizeof(buf), "P%04d", i + 1);
    data.player_names.push_back(buf);
  }
  data.opposition_names.push_back("Australia");
  for (int o = 1; o < layout.n_opps; ++o) {
    std::snprintf(buf, sizeof(buf), "OPP%02d", o + 1);
    data.opposition_names.push_back(buf);
  }
  data.source = "synthetic";

  for (int i = 0; i < layout.n_players; ++i) {
    for (int k = 0; k < layout.innings_per_player; ++k) {
      InningsRecord r;
      r.player_id = i;
      const double lr = layout.runs_meanlog + layout.runs_sdlog * n01(rng);
      r.runs = std::min(std::max(static_cast<int>(std::lround(std::exp(lr))), 1),
                        layout.runs_max);
      r.year = year_d(rng);
      r.opposition = opp_d(rng);
      r.match_innings = inn_d(rng);
      r.home_away = two_d(rng);
      r.toss = two_d(rng) == 1 ? 1 : 2;
      std::snprintf(buf, sizeof(buf), "%04d-06-15", r.year);
      r.date = buf;
      r.wickets = 0;
      data.records.push_back(std::move(r));
    }
  }
  data.source_rows = data.records.size();

  out.design = build_design(data);
  const DesignMatrices& d = out.design;

  ParamVector& t = out.truth;
  PriorSpec prior;
  std::vector<int> dummy(d.n_records(), 0);
  const Model probe(&d, dummy);

  // Draw a truth vector; redraw (continuing the rng stream, so still
  // deterministic in the seed) when it pushes any record's mean to the
  // truncation point.
  bool ok = false;
  for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
    t = ParamVector::zeros(d);
    for (double& b : t.beta) b = layout.spline_truth_sd * n01(rng);
    for (auto& w : t.omega)
      for (double& c : w) c = layout.spline_truth_sd * n01(rng);
    t.zeta2 = prior.sd_effects * n01(rng);
    for (double& x : t.xi) x = prior.sd_effects * n01(rng);
    t.gamma = prior.sd_effects * n01(rng);
    double theta_sum = 0.0;
    for (double& th : t.theta) {
      th = prior.sd_effects * n01(rng);
      theta_sum += th;
    }
    for (double& th : t.theta) th -= theta_sum / static_cast<double>(t.theta.size());
    if (layout.nu_truth.empty()) {
      for (double& e : t.eta) e = prior.sd_eta * n01(rng);
    } else {
      for (int i = 0; i < layout.n_players; ++i)
        t.eta[i] = std::log(layout.nu_truth[i % layout.nu_truth.size()]);
    }
    ok = true;
    for (std::size_t rec = 0; rec < d.n_records() && ok; ++rec)
      ok = probe.linear_predictor(t, static_cast<int>(rec)) < std::log(10.0);
  }
  if (!ok)
    throw std::runtime_error(
        "generate_synthetic: could not draw a truth with all means below 10");

  // Wickets from the truth model.
  for (std::size_t rec = 0; rec < d.n_records(); ++rec) {
    const double mu = std::exp(probe.linear_predictor(t, static_cast<int>(rec)));
    const double nu = std::exp(t.eta[d.player_of[rec]]);
    const double lambda = solve_lambda({mu, nu, 10});
    data.records[rec].wickets = cmp_sample({lambda, nu, 10}, rng);
  }
  return out;
}

}  // namespace mpcmp
