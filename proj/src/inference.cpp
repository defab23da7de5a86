#include "mpcmp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpcmp/cmp.hpp"
#include "mpcmp/mathutil.hpp"

namespace mpcmp {

Interval hdi(std::vector<double> samples, double level) {
  if (samples.size() < 100) throw std::invalid_argument("hdi: need at least 100 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("hdi: level outside (0,1)");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  std::size_t m = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  m = std::min(std::max<std::size_t>(m, 1), n);
  std::size_t best = 0;
  double best_width = HUGE_VAL;
  for (std::size_t i = 0; i + m <= n; ++i) {
    const double w = samples[i + m - 1] - samples[i];
    if (w < best_width) {
      best_width = w;
      best = i;
    }
  }
  return {samples[best], samples[best + m - 1]};
}

namespace {
std::vector<double> transformed_pooled(const PosteriorDraws& draws, std::size_t param,
                                       double (*f)(double)) {
  std::vector<double> v = draws.pooled(param);
  for (double& x : v) x = f(x);
  return v;
}
}  // namespace

std::vector<PlayerRow> player_table(const PosteriorDraws& draws, const Dataset& data) {
  if (draws.n_draws_total() == 0) throw std::invalid_argument("player_table: no draws");
  const int n_players = static_cast<int>(data.n_players());
  std::vector<PlayerRow> rows;
  rows.reserve(n_players);
  for (int i = 0; i < n_players; ++i) {
    const std::size_t ti = draws.index_of("theta[" + std::to_string(i) + "]");
    const std::size_t ei = draws.index_of("eta[" + std::to_string(i) + "]");
    const std::vector<double> et = transformed_pooled(draws, ti, [](double x) { return std::exp(x); });
    const std::vector<double> nv = transformed_pooled(draws, ei, [](double x) { return std::exp(x); });
    PlayerRow r;
    r.rank = 0;
    r.player_id = i;
    r.name = data.player_names[i];
    r.debut_year = data.debut_year(i);
    r.innings = data.innings_count(i);
    r.e_exp_theta = sample_mean(et);
    r.sd_exp_theta = sample_sd(et);
    r.e_nu = sample_mean(nv);
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const PlayerRow& a, const PlayerRow& b) {
    return a.e_exp_theta > b.e_exp_theta;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i + 1);
  return rows;
}

std::vector<EffectRow> game_effects_table(const PosteriorDraws& draws, double level) {
  if (draws.n_draws_total() == 0) throw std::invalid_argument("game_effects_table: no draws");
  const std::pair<const char*, const char*> items[] = {
      {"innings2", "xi[2]"}, {"innings3", "xi[3]"}, {"innings4", "xi[4]"},
      {"away", "zeta2"},     {"toss_first_innings", "gamma"}};
  std::vector<EffectRow> out;
  for (const auto& [label, pname] : items) {
    const std::vector<double> v =
        transformed_pooled(draws, draws.index_of(pname), [](double x) { return std::exp(x); });
    EffectRow r;
    r.name = label;
    r.mean = sample_mean(v);
    if (sample_sd(v) == 0.0) {
      r.lo = r.hi = v.front();
    } else {
      const Interval h = hdi(v, level);
      r.lo = h.lo;
      r.hi = h.hi;
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {
CurvePoint summarize_point(double x, std::vector<double>& vals, double level) {
  CurvePoint p;
  p.x = x;
  p.mean = sample_mean(vals);
  if (sample_sd(vals) == 0.0) {
    p.lo = p.hi = vals.front();
  } else {
    const Interval h = hdi(vals, level);
    p.lo = h.lo;
    p.hi = h.hi;
  }
  return p;
}
}  // namespace

std::vector<CurvePoint> runs_curve(const PosteriorDraws& draws, const DesignMatrices& d,
                                   int runs_lo, int runs_hi, double level) {
  const std::size_t nb = d.runs_spec.dim();
  const std::size_t b0 = draws.index_of("beta[1]");
  std::vector<CurvePoint> out;
  std::vector<double> vals;
  for (int r = runs_lo; r <= runs_hi; ++r) {
    const std::vector<double> basis =
        bspline_basis(d.runs_spec, std::log(static_cast<double>(std::max(r, 1))));
    vals.clear();
    for (const auto& chain : draws.chains)
      for (const auto& row : chain) {
        double s = 0.0;
        for (std::size_t c = 0; c < nb; ++c) s += basis[c] * row[b0 + c];
        vals.push_back(std::exp(s));
      }
    out.push_back(summarize_point(r, vals, level));
  }
  return out;
}

std::map<int, std::vector<CurvePoint>> opposition_curves(const PosteriorDraws& draws,
                                                         const DesignMatrices& d,
                                                         double level) {
  std::map<int, std::vector<CurvePoint>> out;
  for (const auto& [opp, spec] : d.opp_specs) {
    const std::size_t w0 = draws.index_of("omega[" + std::to_string(opp) + "][1]");
    const int fd = d.free_dim[opp];
    std::vector<CurvePoint> curve;
    std::vector<double> vals;
    for (int y = static_cast<int>(std::ceil(spec.lo)); y <= static_cast<int>(std::floor(spec.hi));
         ++y) {
      const std::vector<double> basis = bspline_basis(spec, y);
      vals.clear();
      for (const auto& chain : draws.chains)
        for (const auto& row : chain) {
          std::vector<double> free_coords(row.begin() + w0, row.begin() + w0 + fd);
          const std::vector<double> full = d.full_omega(opp, free_coords);
          double s = 0.0;
          for (std::size_t c = 0; c < full.size(); ++c) s += basis[c] * full[c];
          vals.push_back(std::exp(s));
        }
      curve.push_back(summarize_point(y, vals, level));
    }
    out.emplace(opp, std::move(curve));
  }
  return out;
}

PpcTable posterior_predictive_check(const PosteriorDraws& draws, const DesignMatrices& d,
                                    const std::vector<int>& wickets, std::mt19937_64& rng,
                                    std::size_t n_subsample, int t_max) {
  if (draws.n_draws_total() == 0)
    throw std::invalid_argument("posterior_predictive_check: no draws");
  if (wickets.size() != d.n_records())
    throw std::invalid_argument("posterior_predictive_check: wickets/design size mismatch");

  // Flatten chain/draw addressing for subsampling.
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t c = 0; c < draws.chains.size(); ++c)
    for (std::size_t i = 0; i < draws.chains[c].size(); ++i) index.push_back({c, i});
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  if (index.size() <= n_subsample) {
    chosen = index;
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, index.size() - 1);
    for (std::size_t k = 0; k < n_subsample; ++k) chosen.push_back(index[pick(rng)]);
  }

  PpcTable out;
  out.n_records = d.n_records();
  out.n_draws_used = chosen.size();
  out.observed.assign(t_max + 1, 0.0);
  out.expected.assign(t_max + 1, 0.0);
  out.mc_se.assign(t_max + 1, 0.0);
  for (int x : wickets) out.observed[x] += 1.0 / static_cast<double>(wickets.size());

  const std::vector<double> lfact = log_factorials(t_max);
  std::vector<std::vector<double>> per_draw(chosen.size(),
                                            std::vector<double>(t_max + 1, 0.0));
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const std::vector<double>& row = draws.chains[chosen[k].first][chosen[k].second];
    const ParamVector p = unflatten(d, row);
    // Per-player dispersion factors for this draw.
    std::vector<std::vector<double>> fac(d.n_players, std::vector<double>(t_max + 1));
    std::vector<double> nu(d.n_players);
    for (int i = 0; i < d.n_players; ++i) {
      nu[i] = std::exp(p.eta[i]);
      for (int r = 0; r <= t_max; ++r) fac[i][r] = std::exp(-nu[i] * lfact[r]);
    }
    for (std::size_t rec = 0; rec < d.n_records(); ++rec) {
      double lp = 0.0;
      const auto& rb = d.runs_basis[rec];
      for (std::size_t c = 0; c < rb.size(); ++c) lp += rb[c] * p.beta[c];
      const int o = d.opp_of[rec];
      const auto& orow = d.opp_rows[rec];
      for (std::size_t c = 0; c < orow.size(); ++c) lp += orow[c] * p.omega[o][c];
      const int pl = d.player_of[rec];
      lp += p.theta[pl];
      if (d.is_away[rec]) lp += p.zeta2;
      if (d.innings_idx[rec] > 0) lp += p.xi[d.innings_idx[rec] - 1];
      if (d.toss_won[rec] && d.innings_idx[rec] == 0) lp += p.gamma;
      const double mu = std::exp(lp);
      const double t = solve_log_lambda_fac(mu, nu[pl], fac[pl].data(), t_max, std::log(mu));
      const double logG = log_normalizer_with_factors(t, fac[pl].data(), nu[pl], t_max);
      for (int x = 0; x <= t_max; ++x)
        per_draw[k][x] += std::exp(x * t - nu[pl] * lfact[x] - logG);
    }
    for (int x = 0; x <= t_max; ++x) per_draw[k][x] /= static_cast<double>(d.n_records());
  }
  for (int x = 0; x <= t_max; ++x) {
    std::vector<double> col(chosen.size());
    for (std::size_t k = 0; k < chosen.size(); ++k) col[k] = per_draw[k][x];
    out.expected[x] = sample_mean(col);
    out.mc_se[x] = sample_sd(col) / std::sqrt(static_cast<double>(col.size()));
  }
  return out;
}

}  // namespace mpcmp
