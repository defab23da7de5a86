#ifndef MPCMP_SYNTH_HPP
#define MPCMP_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "mpcmp/data.hpp"
#include "mpcmp/design.hpp"
#include "mpcmp/model.hpp"

namespace mpcmp {

struct SynthLayout {
  int n_players = 50;
  int innings_per_player = 60;
  int n_opps = 4;  // first opposition is named Australia (the reference)
  int year_lo = 2000;
  int year_hi = 2019;
  // Runs drawn from a lognormal rounded and clipped to [1, runs_max].
  double runs_meanlog = 3.4;
  double runs_sdlog = 0.9;
  int runs_max = 298;
  // Truth draw scales. theta/zeta/xi/gamma and eta use the model priors;
  // spline coefficients use this sd (kept below the N(0,1) prior so the
  // generated means stay inside (0, 10)).
  double spline_truth_sd = 0.5;
  // When nonempty, per-player dispersion is fixed by cycling this list
  // (eta = log nu); otherwise eta is drawn from its prior.
  std::vector<double> nu_truth;
};

struct SynthResult {
  Dataset data;
  DesignMatrices design;  // built from the generated covariates
  ParamVector truth;
};

// Simulates covariates, draws a truth parameter vector, computes each
// record's mean through the log-linear model and draws wickets from the
// truncated MPCMP. Truths implying mu >= 10 anywhere are redrawn (still
// deterministic in the seed); throws only if that keeps failing.
SynthResult generate_synthetic(const SynthLayout& layout, std::uint64_t seed);

}  // namespace mpcmp

#endif
