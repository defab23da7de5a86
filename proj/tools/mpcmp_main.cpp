// Command-line front end: data validation, synthetic data generation,
// model fitting and posterior summarization.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpcmp/design.hpp"
#include "mpcmp/inference.hpp"
#include "mpcmp/model.hpp"
#include "mpcmp/sampler.hpp"
#include "mpcmp/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

struct FitConfig {
  mpcmp::SamplerConfig sampler;
  mpcmp::PriorSpec prior;
  // Optional knot overrides for the runs spline (log scale). Empty = derive
  // from the data by the quintile rule.
  std::vector<double> runs_internal_knots;
  std::vector<double> runs_boundary_knots;
  std::size_t ppc_draws = 1000;
  double rhat_gate = 1.1;
  std::string out_dir;
};

FitConfig load_config(const std::string& path) {
  FitConfig c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  in >> j;
  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    if (s.contains("chains")) c.sampler.n_chains = s["chains"];
    if (s.contains("warmup")) c.sampler.n_warmup = s["warmup"];
    if (s.contains("iters")) c.sampler.n_iter = s["iters"];
    if (s.contains("seed")) c.sampler.seed = s["seed"];
    if (s.contains("thin")) c.sampler.thin = s["thin"];
    if (s.contains("init_step")) c.sampler.init_step = s["init_step"];
    if (s.contains("checkpoint_every")) c.sampler.checkpoint_every = s["checkpoint_every"];
    if (s.contains("random_scan")) c.sampler.random_scan = s["random_scan"];
  }
  if (j.contains("prior")) {
    const json& p = j["prior"];
    if (p.contains("sd_effects")) c.prior.sd_effects = p["sd_effects"];
    if (p.contains("sd_spline")) c.prior.sd_spline = p["sd_spline"];
    if (p.contains("sd_eta")) c.prior.sd_eta = p["sd_eta"];
  }
  if (j.contains("knots")) {
    const json& k = j["knots"];
    if (k.contains("runs_internal"))
      c.runs_internal_knots = k["runs_internal"].get<std::vector<double>>();
    if (k.contains("runs_boundary"))
      c.runs_boundary_knots = k["runs_boundary"].get<std::vector<double>>();
  }
  if (j.contains("ppc_draws")) c.ppc_draws = j["ppc_draws"];
  if (j.contains("rhat_gate")) c.rhat_gate = j["rhat_gate"];
  if (j.contains("out_dir")) c.out_dir = j["out_dir"];
  return c;
}

std::string fmt(double v, const char* f = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

void save_draws(const mpcmp::PosteriorDraws& draws, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "chain,draw";
  for (const auto& n : draws.names) out << "," << n;
  out << "\n";
  for (std::size_t c = 0; c < draws.chains.size(); ++c)
    for (std::size_t i = 0; i < draws.chains[c].size(); ++i) {
      out << c << "," << i;
      for (double v : draws.chains[c][i]) out << "," << fmt(v, "%.17g");
      out << "\n";
    }
}

mpcmp::PosteriorDraws load_draws(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty draws file " + path);
  mpcmp::PosteriorDraws d;
  {
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= 2) d.names.push_back(cell);
      ++col;
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const std::size_t chain = std::stoul(cell);
    std::getline(ss, cell, ',');
    std::vector<double> row;
    row.reserve(d.names.size());
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != d.names.size()) throw std::runtime_error("ragged draws file " + path);
    if (chain >= d.chains.size()) d.chains.resize(chain + 1);
    d.chains[chain].push_back(std::move(row));
  }
  return d;
}

mpcmp::DesignMatrices make_design(const mpcmp::Dataset& data, const FitConfig& cfg) {
  mpcmp::SplineSpec runs_spec;
  if (!cfg.runs_internal_knots.empty()) {
    if (cfg.runs_boundary_knots.size() != 2)
      throw std::runtime_error("knot override needs runs_boundary = [lo, hi]");
    runs_spec.degree = 3;
    runs_spec.internal_knots = cfg.runs_internal_knots;
    runs_spec.lo = cfg.runs_boundary_knots[0];
    runs_spec.hi = cfg.runs_boundary_knots[1];
  } else {
    runs_spec = mpcmp::runs_spline_spec(data.records);
  }
  return mpcmp::build_design(data, runs_spec,
                             mpcmp::opposition_spline_specs(data.records));
}

void write_player_table(const std::vector<mpcmp::PlayerRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "rank,player,debut,innings,e_exp_theta,sd_exp_theta,e_nu\n";
  for (const auto& r : rows)
    out << r.rank << "," << r.name << "," << r.debut_year << "," << r.innings << ","
        << fmt(r.e_exp_theta) << "," << fmt(r.sd_exp_theta) << "," << fmt(r.e_nu) << "\n";
}

void write_game_effects(const std::vector<mpcmp::EffectRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "effect,mean,hdi_lo,hdi_hi\n";
  for (const auto& r : rows)
    out << r.name << "," << fmt(r.mean) << "," << fmt(r.lo) << "," << fmt(r.hi) << "\n";
}

void write_curve(const std::vector<mpcmp::CurvePoint>& pts, const std::string& path,
                 const char* xname) {
  std::ofstream out(path);
  out << xname << ",mean,hdi_lo,hdi_hi\n";
  for (const auto& p : pts)
    out << fmt(p.x) << "," << fmt(p.mean) << "," << fmt(p.lo) << "," << fmt(p.hi) << "\n";
}

void write_opp_curves(const std::map<int, std::vector<mpcmp::CurvePoint>>& curves,
                      const mpcmp::Dataset& data, const std::string& path) {
  std::ofstream out(path);
  out << "opposition,year,mean,hdi_lo,hdi_hi\n";
  for (const auto& [opp, pts] : curves)
    for (const auto& p : pts)
      out << data.opposition_names[opp] << "," << fmt(p.x) << "," << fmt(p.mean) << ","
          << fmt(p.lo) << "," << fmt(p.hi) << "\n";
}

void write_ppc(const mpcmp::PpcTable& t, const std::string& path) {
  std::ofstream out(path);
  out << "wickets,observed,expected,mc_se\n";
  for (std::size_t x = 0; x < t.observed.size(); ++x)
    out << x << "," << fmt(t.observed[x]) << "," << fmt(t.expected[x]) << ","
        << fmt(t.mc_se[x]) << "\n";
}

void write_diagnostics(const mpcmp::Diagnostics& d,
                       const std::map<std::string, double>& accept,
                       const std::string& path) {
  std::ofstream out(path);
  out << "parameter,rhat,ess\n";
  for (std::size_t i = 0; i < d.names.size(); ++i)
    out << d.names[i] << "," << fmt(d.rhat[i]) << "," << fmt(d.ess[i]) << "\n";
  out << "\nblock,accept_rate\n";
  for (const auto& [k, v] : accept) out << k << "," << fmt(v) << "\n";
}

std::string default_out_dir(const std::string& flag_value, const FitConfig& cfg) {
  if (!flag_value.empty()) return flag_value;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("MPCMP_OUT_DIR")) return env;
  return "mpcmp_out";
}

json config_as_json(const FitConfig& c) {
  json j;
  j["sampler"] = {{"chains", c.sampler.n_chains}, {"warmup", c.sampler.n_warmup},
                  {"iters", c.sampler.n_iter},    {"seed", c.sampler.seed},
                  {"thin", c.sampler.thin},       {"init_step", c.sampler.init_step},
                  {"random_scan", c.sampler.random_scan}};
  j["prior"] = {{"sd_effects", c.prior.sd_effects},
                {"sd_spline", c.prior.sd_spline},
                {"sd_eta", c.prior.sd_eta}};
  j["ppc_draws"] = c.ppc_draws;
  j["rhat_gate"] = c.rhat_gate;
  return j;
}

int cmd_fit(const mpcmp::Dataset& data, FitConfig cfg, const std::string& out_flag) {
  const std::string out_dir = default_out_dir(out_flag, cfg);
  fs::create_directories(out_dir);

  const mpcmp::DesignMatrices design = make_design(data, cfg);
  const mpcmp::Model model(&design, data, 10, cfg.prior);

  if (cfg.sampler.checkpoint_every > 0 && cfg.sampler.checkpoint_prefix.empty())
    cfg.sampler.checkpoint_prefix = out_dir + "/checkpoint";

  const mpcmp::PosteriorDraws draws = mpcmp::run_sampler(cfg.sampler, model);
  save_draws(draws, out_dir + "/draws.csv");

  mpcmp::Diagnostics diag;
  bool gate_failed = false;
  if (cfg.sampler.n_chains >= 2) {
    diag = mpcmp::diagnostics(draws);
    write_diagnostics(diag, draws.accept_rate, out_dir + "/diagnostics.csv");
    gate_failed = diag.max_rhat > cfg.rhat_gate;
  }

  write_player_table(mpcmp::player_table(draws, data), out_dir + "/player_table.csv");
  write_game_effects(mpcmp::game_effects_table(draws), out_dir + "/game_effects.csv");
  write_curve(mpcmp::runs_curve(draws, design), out_dir + "/runs_curve.csv", "runs");
  write_opp_curves(mpcmp::opposition_curves(draws, design), data, out_dir + "/opp_curves.csv");
  {
    std::vector<int> wickets;
    for (const auto& r : data.records) wickets.push_back(r.wickets);
    std::mt19937_64 ppc_rng(cfg.sampler.seed ^ 0xABCDEF1234567890ULL);
    write_ppc(mpcmp::posterior_predictive_check(draws, design, wickets, ppc_rng, cfg.ppc_draws),
              out_dir + "/ppc.csv");
  }

  json manifest;
  manifest["tool"] = "mpcmp";
  manifest["version"] = 1;
  manifest["data"] = {{"source", data.source},
                      {"records", data.records.size()},
                      {"players", data.n_players()},
                      {"oppositions", data.n_oppositions()},
                      {"wicket_histogram", data.wicket_histogram()}};
  manifest["config"] = config_as_json(cfg);
  manifest["config_hash"] =
      fmt(static_cast<double>(std::hash<std::string>{}(config_as_json(cfg).dump())), "%.0f");
  manifest["runs_knots_log"] = {{"internal", design.runs_spec.internal_knots},
                                {"boundary", {design.runs_spec.lo, design.runs_spec.hi}}};
  if (cfg.sampler.n_chains >= 2) manifest["max_rhat"] = diag.max_rhat;
  std::ofstream(out_dir + "/manifest.json") << manifest.dump(2) << "\n";

  if (gate_failed) {
    std::cerr << "convergence gate failed: max R-hat " << diag.max_rhat << " > "
              << cfg.rhat_gate << " (see " << out_dir << "/diagnostics.csv)\n";
    return kExitConvergence;
  }
  std::cout << "fit complete; outputs in " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated mean-parameterised CMP count regression"};
  app.require_subcommand(1);

  std::string data_path, config_path, out_dir;
  bool scorecard = false;
  long seed = -1;
  int chains = -1, warmup = -1, iters = -1;
  long ppc_draws = -1;

  app.add_option("--config", config_path, "JSON config file")->capture_default_str();

  auto add_common = [&](CLI::App* sub, bool needs_data) {
    if (needs_data)
      sub->add_option("--data", data_path, "input data file")->required();
    sub->add_flag("--scorecard-format", scorecard,
                  "wickets/runs given as an overs-maidens-wickets-runs 'figures' column");
    sub->add_option("--seed", seed, "rng seed override");
    sub->add_option("--chains", chains, "number of chains");
    sub->add_option("--warmup", warmup, "warm-up sweeps per chain");
    sub->add_option("--iters", iters, "post-warm-up sweeps per chain");
    sub->add_option("--out", out_dir, "output directory (default $MPCMP_OUT_DIR)");
    sub->add_option("--ppc-draws", ppc_draws, "posterior draws used for the predictive check");
  };

  CLI::App* ingest_check = app.add_subcommand("ingest-check", "parse and validate a data file");
  add_common(ingest_check, true);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset with known truth");
  int sp_players = 50, sp_innings = 60, sp_opps = 4;
  synth->add_option("--players", sp_players, "number of players");
  synth->add_option("--innings", sp_innings, "innings per player");
  synth->add_option("--opps", sp_opps, "number of oppositions");
  add_common(synth, false);

  CLI::App* fit = app.add_subcommand("fit", "fit the model and write all artifacts");
  add_common(fit, true);

  CLI::App* summarize = app.add_subcommand("summarize", "recompute tables from a draws archive");
  std::string draws_path;
  summarize->add_option("--draws", draws_path, "draws.csv from a fit")->required();
  add_common(summarize, true);

  CLI::App* ppc = app.add_subcommand("ppc", "posterior predictive check from a draws archive");
  ppc->add_option("--draws", draws_path, "draws.csv from a fit")->required();
  add_common(ppc, true);

  CLI11_PARSE(app, argc, argv);

  try {
    FitConfig cfg = load_config(config_path);
    if (seed >= 0) cfg.sampler.seed = static_cast<std::uint64_t>(seed);
    if (chains > 0) cfg.sampler.n_chains = chains;
    if (warmup > 0) cfg.sampler.n_warmup = warmup;
    if (iters > 0) cfg.sampler.n_iter = iters;
    if (ppc_draws > 0) cfg.ppc_draws = static_cast<std::size_t>(ppc_draws);

    mpcmp::IngestOptions iopts;
    iopts.scorecard_format = scorecard;

    if (app.got_subcommand(ingest_check)) {
      mpcmp::Dataset d;
      try {
        d = mpcmp::ingest(data_path, iopts);
      } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
      }
      const auto h = d.wicket_histogram();
      std::cout << "records: " << d.records.size() << "\nplayers: " << d.n_players()
                << "\noppositions: " << d.n_oppositions() << "\nwicket histogram:";
      for (std::size_t x = 0; x < h.size(); ++x) std::cout << " " << h[x];
      std::cout << "\n";
      return 0;
    }

    if (app.got_subcommand(synth)) {
      const std::string dir = default_out_dir(out_dir, cfg);
      fs::create_directories(dir);
      mpcmp::SynthLayout layout;
      layout.n_players = sp_players;
      layout.innings_per_player = sp_innings;
      layout.n_opps = sp_opps;
      const std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : 1;
      const mpcmp::SynthResult res = mpcmp::generate_synthetic(layout, s);
      mpcmp::write_dataset(res.data, dir + "/synthetic.csv");
      json truth;
      truth["seed"] = s;
      truth["names"] = mpcmp::param_names(res.design);
      truth["values"] = mpcmp::flatten(res.truth);
      std::ofstream(dir + "/truth.json") << truth.dump(2) << "\n";
      std::cout << "wrote " << dir << "/synthetic.csv and truth.json\n";
      return 0;
    }

    mpcmp::Dataset data;
    try {
      data = mpcmp::ingest(data_path, iopts);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitValidation;
    }

    if (app.got_subcommand(fit)) return cmd_fit(data, cfg, out_dir);

    if (app.got_subcommand(summarize)) {
      const std::string dir = default_out_dir(out_dir, cfg);
      fs::create_directories(dir);
      const mpcmp::PosteriorDraws draws = load_draws(draws_path);
      const mpcmp::DesignMatrices design = make_design(data, cfg);
      write_player_table(mpcmp::player_table(draws, data), dir + "/player_table.csv");
      write_game_effects(mpcmp::game_effects_table(draws), dir + "/game_effects.csv");
      write_curve(mpcmp::runs_curve(draws, design), dir + "/runs_curve.csv", "runs");
      write_opp_curves(mpcmp::opposition_curves(draws, design), data, dir + "/opp_curves.csv");
      std::cout << "summaries written to " << dir << "\n";
      return 0;
    }

    if (app.got_subcommand(ppc)) {
      const std::string dir = default_out_dir(out_dir, cfg);
      fs::create_directories(dir);
      const mpcmp::PosteriorDraws draws = load_draws(draws_path);
      const mpcmp::DesignMatrices design = make_design(data, cfg);
      std::vector<int> wickets;
      for (const auto& r : data.records) wickets.push_back(r.wickets);
      std::mt19937_64 rng(cfg.sampler.seed ^ 0xABCDEF1234567890ULL);
      write_ppc(mpcmp::posterior_predictive_check(draws, design, wickets, rng, cfg.ppc_draws),
                dir + "/ppc.csv");
      std::cout << "ppc written to " << dir << "/ppc.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
