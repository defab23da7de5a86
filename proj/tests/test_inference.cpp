#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mpcmp/inference.hpp"
#include "oracles.hpp"

using namespace mpcmp;

namespace {

InningsRecord rec(int player, int opp, int year, int runs, int wickets,
                  int home_away = 1, int match_innings = 1, int toss = 2) {
  InningsRecord r;
  r.player_id = player;
  r.opposition = opp;
  r.year = year;
  r.runs = runs;
  r.wickets = wickets;
  r.home_away = home_away;
  r.match_innings = match_innings;
  r.toss = toss;
  return r;
}

Dataset tiny_dataset() {
  Dataset d;
  d.player_names = {"alpha", "bravo", "charlie"};
  d.opposition_names = {"Australia", "England"};
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> runs(1, 120), opp(0, 1);
  std::uniform_int_distribution<int> year(2000, 2019), inn(1, 4), bit(1, 2), w(0, 5);
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 30 + 10 * p; ++i)
      d.records.push_back(rec(p, opp(rng), year(rng), runs(rng), w(rng),
                              bit(rng), inn(rng), bit(rng)));
  return d;
}

// Build draws by perturbing a base flattened vector with per-draw noise.
template <class Fn>
PosteriorDraws make_draws(const DesignMatrices& m, int n_draws, unsigned seed, Fn edit) {
  PosteriorDraws out;
  out.names = param_names(m);
  out.chains.assign(1, {});
  std::mt19937_64 rng(seed);
  for (int t = 0; t < n_draws; ++t) {
    std::vector<double> flat(out.names.size(), 0.0);
    edit(flat, out.names, rng, t);
    out.chains[0].push_back(std::move(flat));
  }
  return out;
}

int name_index(const std::vector<std::string>& names, const std::string& want) {
  return (int)(std::find(names.begin(), names.end(), want) - names.begin());
}

}  // namespace

TEST_CASE("hdi: exact tie case resolves to the smallest lower bound") {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 1.0);  // 1..100
  std::shuffle(s.begin(), s.end(), std::mt19937_64(1));
  const Interval h = hdi(s, 0.9);
  CHECK(h.lo == 1.0);
  CHECK(h.hi == 90.0);
}

TEST_CASE("hdi: normal quantiles, zero width, shortest-interval asymmetry") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> s(100000);
  for (auto& v : s) v = g(rng);
  const Interval h = hdi(s, 0.95);
  CHECK(h.lo == doctest::Approx(-1.96).epsilon(0.03));
  CHECK(h.hi == doctest::Approx(1.96).epsilon(0.03));

  const Interval z = hdi(std::vector<double>(200, 3.5), 0.95);
  CHECK(z.lo == 3.5);
  CHECK(z.hi == 3.5);

  // exponential(1): the shortest 50% interval hugs zero, ending near log 2
  std::exponential_distribution<double> e(1.0);
  std::vector<double> t(100000);
  for (auto& v : t) v = e(rng);
  const Interval he = hdi(t, 0.5);
  CHECK(he.lo < 0.01);
  CHECK(he.hi == doctest::Approx(std::log(2.0)).epsilon(0.05));
}

TEST_CASE("hdi: input guards") {
  std::vector<double> s(99, 0.0);
  CHECK_THROWS_AS(hdi(s, 0.95), std::invalid_argument);
  std::vector<double> ok(100, 0.0);
  CHECK_THROWS_AS(hdi(ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hdi(ok, 1.5), std::invalid_argument);
}

TEST_CASE("player table: draw-wise transform, ordering, shift response") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  const int i0 = -1;  // silence unused warnings in lambdas below
  (void)i0;

  // theta[p] ~ N(mu_p, 0.3) with mu = {0.4, 0.0, -0.4}; eta fixed.
  const PosteriorDraws draws = make_draws(
      m, 400, 10, [&](std::vector<double>& flat, const std::vector<std::string>& names,
                      std::mt19937_64& rng, int) {
        std::normal_distribution<double> g(0.0, 0.3);
        const double mu[3] = {0.4, 0.0, -0.4};
        double s = 0.0;
        double th[3];
        for (int p = 0; p < 3; ++p) {
          th[p] = mu[p] + g(rng);
          s += th[p];
        }
        for (int p = 0; p < 3; ++p)
          flat[name_index(names, "theta[" + std::to_string(p) + "]")] = th[p] - s / 3.0;
        flat[name_index(names, "eta[0]")] = 0.25;
        flat[name_index(names, "eta[1]")] = 0.0;
        flat[name_index(names, "eta[2]")] = -0.25;
      });

  const auto table = player_table(draws, d);
  REQUIRE(table.size() == 3);
  CHECK(table[0].rank == 1);
  CHECK(table[0].name == "alpha");
  CHECK(table[2].name == "charlie");
  CHECK(table[0].e_exp_theta > table[1].e_exp_theta);
  CHECK(table[1].e_exp_theta > table[2].e_exp_theta);
  for (const auto& row : table) {
    CHECK(row.sd_exp_theta > 0.0);
    CHECK(row.innings == d.innings_count(row.player_id));
    CHECK(row.debut_year == d.debut_year(row.player_id));
  }
  // Jensen: E exp(theta) > exp(E theta) under sampling noise
  const auto th1 = draws.pooled(name_index(draws.names, "theta[1]"));
  double me = 0.0, mee = 0.0;
  for (double v : th1) {
    me += v;
    mee += std::exp(v);
  }
  me /= th1.size();
  mee /= th1.size();
  const auto& mid = *std::find_if(table.begin(), table.end(),
                                  [](const PlayerRow& r) { return r.name == "bravo"; });
  CHECK(mid.e_exp_theta == doctest::Approx(mee).epsilon(1e-12));
  CHECK(mee > std::exp(me));
  CHECK(mid.e_nu == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("game effects table: names, transform and interval order") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  const PosteriorDraws draws = make_draws(
      m, 500, 20, [&](std::vector<double>& flat, const std::vector<std::string>& names,
                      std::mt19937_64& rng, int) {
        std::normal_distribution<double> g(0.0, 0.05);
        flat[name_index(names, "xi[2]")] = 0.07 + g(rng);
        flat[name_index(names, "xi[3]")] = 0.03 + g(rng);
        flat[name_index(names, "xi[4]")] = -0.08 + g(rng);
        flat[name_index(names, "zeta2")] = 0.11 + g(rng);
        flat[name_index(names, "gamma")] = -0.02 + g(rng);
      });
  const auto rows = game_effects_table(draws);
  REQUIRE(rows.size() == 5);
  const auto find = [&](const std::string& n) {
    return *std::find_if(rows.begin(), rows.end(),
                         [&](const EffectRow& r) { return r.name == n; });
  };
  CHECK(find("innings2").mean == doctest::Approx(std::exp(0.07)).epsilon(0.02));
  CHECK(find("innings4").mean == doctest::Approx(std::exp(-0.08)).epsilon(0.02));
  CHECK(find("away").mean == doctest::Approx(std::exp(0.11)).epsilon(0.02));
  CHECK(find("toss_first_innings").mean == doctest::Approx(std::exp(-0.02)).epsilon(0.02));
  for (const auto& r : rows) {
    CHECK(r.lo < r.mean);
    CHECK(r.mean < r.hi);
    CHECK(r.lo > 0.0);
  }
}

TEST_CASE("runs curve: constant beta gives a flat curve at exp(c)") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  const PosteriorDraws draws = make_draws(
      m, 150, 30, [&](std::vector<double>& flat, const std::vector<std::string>&,
                      std::mt19937_64&, int) {
        for (std::size_t c = 0; c < m.runs_spec.dim(); ++c) flat[c] = 0.3;
      });
  const auto curve = runs_curve(draws, m, 1, 300);
  REQUIRE(curve.size() == 300);
  CHECK(curve.front().x == 1.0);
  CHECK(curve.back().x == 300.0);
  for (const auto& pt : curve) {
    CHECK(pt.mean == doctest::Approx(std::exp(0.3)).epsilon(1e-10));
    CHECK(pt.lo == doctest::Approx(std::exp(0.3)).epsilon(1e-10));
    CHECK(pt.hi == doctest::Approx(std::exp(0.3)).epsilon(1e-10));
  }
}

TEST_CASE("opposition curves: pinned at the reference year, exp(c) elsewhere") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  const int other = m.ref_opp == 0 ? 1 : 0;
  const PosteriorDraws draws = make_draws(
      m, 150, 40, [&](std::vector<double>& flat, const std::vector<std::string>& names,
                      std::mt19937_64& rng, int) {
        std::normal_distribution<double> g(0.0, 0.4);
        for (int o = 0; o < m.n_opps; ++o)
          for (int c = 0; c < m.free_dim[o]; ++c) {
            const std::string nm =
                "omega[" + std::to_string(o) + "][" + std::to_string(c + 1) + "]";
            flat[name_index(names, nm)] = (o == other) ? 0.2 : g(rng);
          }
      });
  const auto curves = opposition_curves(draws, m);
  REQUIRE(curves.size() == (std::size_t)m.n_opps);

  // reference curve is exactly 1 at the reference year in every draw
  const auto& ref = curves.at(m.ref_opp);
  bool saw_ref_year = false;
  for (const auto& pt : ref)
    if (pt.x == m.ref_year) {
      saw_ref_year = true;
      CHECK(pt.mean == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(pt.lo == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(pt.hi == doctest::Approx(1.0).epsilon(1e-10));
    }
  CHECK(saw_ref_year);

  // constant free coefficients on an unconstrained opposition: flat exp(0.2)
  for (const auto& pt : curves.at(other))
    CHECK(pt.mean == doctest::Approx(std::exp(0.2)).epsilon(1e-10));
}

TEST_CASE("posterior predictive check: rows are probability vectors") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  std::vector<int> wickets;
  for (const auto& r : d.records) wickets.push_back(r.wickets);

  const PosteriorDraws draws = make_draws(
      m, 200, 50, [&](std::vector<double>& flat, const std::vector<std::string>& names,
                      std::mt19937_64& rng, int) {
        std::normal_distribution<double> g(0.0, 0.1);
        double s = 0.0;
        double th[3];
        for (int p = 0; p < 3; ++p) s += th[p] = 0.8 + g(rng);
        for (int p = 0; p < 3; ++p)
          flat[name_index(names, "theta[" + std::to_string(p) + "]")] = th[p] - s / 3.0;
        flat[name_index(names, "zeta2")] = 0.5;  // lift mu off the tiny default
      });
  std::mt19937_64 rng(60);
  const PpcTable t = posterior_predictive_check(draws, m, wickets, rng, 50);
  REQUIRE(t.observed.size() == 11);
  REQUIRE(t.expected.size() == 11);
  REQUIRE(t.mc_se.size() == 11);
  CHECK(t.n_records == d.records.size());
  CHECK(t.n_draws_used == 50);

  double so = 0.0, se = 0.0;
  for (int x = 0; x <= 10; ++x) {
    so += t.observed[x];
    se += t.expected[x];
    CHECK(t.expected[x] >= 0.0);
    CHECK(t.mc_se[x] >= 0.0);
  }
  CHECK(so == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(se == doctest::Approx(1.0).epsilon(1e-10));

  const auto hist = d.wicket_histogram();
  for (int x = 0; x <= 10; ++x)
    CHECK(t.observed[x] == doctest::Approx((double)hist[x] / d.records.size()).epsilon(1e-12));
}

TEST_CASE("posterior predictive check: point mass when mu collapses") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  std::vector<int> wickets(d.records.size(), 0);
  const PosteriorDraws draws = make_draws(
      m, 120, 70, [&](std::vector<double>& flat, const std::vector<std::string>& names,
                      std::mt19937_64&, int) {
        for (int p = 0; p < 3; ++p)
          flat[name_index(names, "eta[" + std::to_string(p) + "]")] = 0.0;
        flat[name_index(names, "zeta2")] = -40.0;
        flat[name_index(names, "gamma")] = -40.0;
        for (int k = 2; k <= 4; ++k)
          flat[name_index(names, "xi[" + std::to_string(k) + "]")] = -40.0;
        // push everything down through the player effect too
        // (theta sums to zero, so use the innings/away channels only)
      });
  // force mu tiny for every record regardless of channel: innings 1 home
  // toss-lost records keep mu = exp(0) = 1, so instead check via direct
  // construction below.
  std::mt19937_64 rng(80);
  const PpcTable t = posterior_predictive_check(draws, m, wickets, rng, 40);
  // every record with an active channel is near a point mass at zero, the
  // rest follow mu ~= 1; the zero cell therefore dominates
  CHECK(t.expected[0] > 0.5);
  double se = 0.0;
  for (double v : t.expected) se += v;
  CHECK(se == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pooled and per_chain agree with the raw draw storage") {
  const Dataset d = tiny_dataset();
  const DesignMatrices m = build_design(d);
  PosteriorDraws draws = make_draws(
      m, 50, 90, [&](std::vector<double>& flat, const std::vector<std::string>&,
                     std::mt19937_64& rng, int) {
        std::normal_distribution<double> g(0.0, 1.0);
        flat[0] = g(rng);
      });
  // add a second chain
  draws.chains.push_back(draws.chains[0]);
  for (auto& dr : draws.chains[1]) dr[0] += 1.0;

  CHECK(draws.n_draws_total() == 100);
  const auto pooled = draws.pooled(0);
  REQUIRE(pooled.size() == 100);
  const auto per = draws.per_chain(0);
  REQUIRE(per.size() == 2);
  for (int t = 0; t < 50; ++t) {
    CHECK(pooled[t] == draws.chains[0][t][0]);
    CHECK(pooled[50 + t] == draws.chains[1][t][0]);
    CHECK(per[1][t] == per[0][t] + 1.0);
  }
  CHECK(draws.index_of("zeta2") == name_index(draws.names, "zeta2"));
  CHECK_THROWS(draws.index_of("no_such_parameter"));
}
