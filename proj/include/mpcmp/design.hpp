#ifndef MPCMP_DESIGN_HPP
#define MPCMP_DESIGN_HPP

#include <map>
#include <vector>

#include "mpcmp/data.hpp"
#include "mpcmp/spline.hpp"

namespace mpcmp {

// Cubic spline for log runs: internal knots at the empirical quintiles
// (type-7 percentiles at 20/40/60/80) of log runs, boundaries at the
// observed min/max. Runs of 0 are mapped to 1 before taking logs.
// Throws if the records carry fewer than 5 distinct runs values.
SplineSpec runs_spline_spec(const std::vector<InningsRecord>& records);

// Per-opposition cubic splines over calendar year: internal knots at the
// decade midpoints (years = 5 mod 10) strictly inside the opposition's
// observed span, boundaries at its first and last observed year. Short
// spans simply get fewer (or no) internal knots.
std::map<int, SplineSpec> opposition_spline_specs(const std::vector<InningsRecord>& records);

// Evaluated basis columns plus index maps, built once and shared.
// Opposition coefficients are stored in "free" coordinates: for the
// reference opposition one coefficient (the pivot) is a deterministic
// linear function of the others so that the opposition effect at the
// reference year is exactly zero; its basis rows are folded into the
// remaining columns accordingly.
struct DesignMatrices {
  SplineSpec runs_spec;
  std::map<int, SplineSpec> opp_specs;

  std::vector<std::vector<double>> runs_basis;  // per record, 8 columns
  std::vector<std::vector<double>> opp_rows;    // per record, free coords of its opposition

  int n_players = 0;
  int n_opps = 0;
  std::vector<int> free_dim;  // per opposition

  int ref_opp = -1;          // reference opposition (Australia when present)
  int ref_pivot = -1;        // folded coefficient index within the reference basis
  double ref_year = 0.0;     // year at which the reference effect is pinned to 0
  std::vector<double> ref_basis;  // basis of the reference spec at ref_year

  std::vector<int> player_of, opp_of;
  std::vector<unsigned char> is_away, innings_idx, toss_won;  // innings_idx 0..3

  std::vector<std::vector<int>> records_of_player;  // player -> record indices
  std::vector<std::vector<int>> records_of_opp;     // opposition -> record indices

  std::size_t n_records() const { return runs_basis.size(); }

  // Reconstruct a full-length coefficient vector for opposition o from its
  // free coordinates (identity except for the reference opposition).
  std::vector<double> full_omega(int o, const std::vector<double>& free_coords) const;
};

DesignMatrices build_design(const Dataset& data, const SplineSpec& runs_spec,
                            const std::map<int, SplineSpec>& opp_specs);

// Convenience: derive both specs from the data, then build.
DesignMatrices build_design(const Dataset& data);

}  // namespace mpcmp

#endif
