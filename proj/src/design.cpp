#include "mpcmp/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mpcmp/mathutil.hpp"

namespace mpcmp {

namespace {
double log_runs(int runs) { return std::log(static_cast<double>(std::max(runs, 1))); }
}  // namespace

SplineSpec runs_spline_spec(const std::vector<InningsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("runs_spline_spec: no records");
  std::set<int> distinct;
  std::vector<double> xs;
  xs.reserve(records.size());
  for (const auto& r : records) {
    distinct.insert(std::max(r.runs, 1));
    xs.push_back(log_runs(r.runs));
  }
  if (distinct.size() < 5)
    throw std::invalid_argument("runs_spline_spec: fewer than 5 distinct runs values");
  std::sort(xs.begin(), xs.end());

  SplineSpec spec;
  spec.degree = 3;
  spec.lo = xs.front();
  spec.hi = xs.back();
  for (double p : {0.2, 0.4, 0.6, 0.8}) {
    const double k = quantile_sorted(xs, p);
    if (!(k > spec.lo) || !(k < spec.hi))
      throw std::invalid_argument(
          "runs_spline_spec: a quintile knot coincides with a boundary (data too concentrated)");
    spec.internal_knots.push_back(k);
  }
  spec.validate();
  return spec;
}

std::map<int, SplineSpec> opposition_spline_specs(const std::vector<InningsRecord>& records) {
  std::map<int, std::pair<int, int>> span;  // opp -> (min year, max year)
  for (const auto& r : records) {
    auto it = span.find(r.opposition);
    if (it == span.end()) {
      span.emplace(r.opposition, std::make_pair(r.year, r.year));
    } else {
      it->second.first = std::min(it->second.first, r.year);
      it->second.second = std::max(it->second.second, r.year);
    }
  }
  std::map<int, SplineSpec> specs;
  for (const auto& [opp, yr] : span) {
    SplineSpec s;
    s.degree = 3;
    s.lo = yr.first;
    s.hi = yr.second;
    if (s.lo == s.hi) {  // single observed year: give the basis a width to live on
      s.lo -= 0.5;
      s.hi += 0.5;
    }
    // Decade midpoints (years = 5 mod 10) strictly inside the span.
    int y = (yr.first / 10) * 10 + 5;
    while (y <= yr.first) y += 10;
    for (; y < yr.second; y += 10) s.internal_knots.push_back(y);
    s.validate();
    specs.emplace(opp, std::move(s));
  }
  return specs;
}

std::vector<double> DesignMatrices::full_omega(int o, const std::vector<double>& free_coords) const {
  const std::size_t q = opp_specs.at(o).dim();
  if (o != ref_opp) {
    if (free_coords.size() != q) throw std::invalid_argument("full_omega: size mismatch");
    return free_coords;
  }
  if (free_coords.size() + 1 != q) throw std::invalid_argument("full_omega: size mismatch");
  std::vector<double> full(q, 0.0);
  double dot = 0.0;
  std::size_t j = 0;
  for (std::size_t c = 0; c < q; ++c) {
    if (static_cast<int>(c) == ref_pivot) continue;
    full[c] = free_coords[j++];
    dot += ref_basis[c] * full[c];
  }
  full[ref_pivot] = -dot / ref_basis[ref_pivot];
  return full;
}

DesignMatrices build_design(const Dataset& data, const SplineSpec& runs_spec,
                            const std::map<int, SplineSpec>& opp_specs) {
  DesignMatrices d;
  d.runs_spec = runs_spec;
  d.opp_specs = opp_specs;
  d.n_players = static_cast<int>(data.n_players());
  d.n_opps = static_cast<int>(data.n_oppositions());

  // Reference opposition: Australia when present, otherwise the first level.
  d.ref_opp = 0;
  for (int o = 0; o < d.n_opps; ++o)
    if (data.opposition_names[o] == "Australia") d.ref_opp = o;
  {
    const auto it = opp_specs.find(d.ref_opp);
    if (it == opp_specs.end())
      throw std::invalid_argument("build_design: no spline spec for the reference opposition");
    d.ref_year = it->second.hi;
    d.ref_basis = bspline_basis(it->second, d.ref_year);
    d.ref_pivot = 0;
    for (std::size_t c = 1; c < d.ref_basis.size(); ++c)
      if (std::fabs(d.ref_basis[c]) > std::fabs(d.ref_basis[d.ref_pivot]))
        d.ref_pivot = static_cast<int>(c);
  }

  d.free_dim.resize(d.n_opps, 0);
  for (int o = 0; o < d.n_opps; ++o) {
    const auto it = opp_specs.find(o);
    if (it == opp_specs.end()) continue;  // opposition without records
    d.free_dim[o] = static_cast<int>(it->second.dim()) - (o == d.ref_opp ? 1 : 0);
  }

  const std::size_t n = data.records.size();
  d.runs_basis.reserve(n);
  d.opp_rows.reserve(n);
  d.player_of.reserve(n);
  d.opp_of.reserve(n);
  d.is_away.reserve(n);
  d.innings_idx.reserve(n);
  d.toss_won.reserve(n);
  d.records_of_player.assign(d.n_players, {});
  d.records_of_opp.assign(d.n_opps, {});

  for (std::size_t i = 0; i < n; ++i) {
    const InningsRecord& r = data.records[i];
    r.validate();
    const auto it = opp_specs.find(r.opposition);
    if (it == opp_specs.end())
      throw std::runtime_error("build_design: record " + std::to_string(i) +
                               " references an opposition with no spline spec");
    d.runs_basis.push_back(bspline_basis(runs_spec, log_runs(r.runs)));
    std::vector<double> row = bspline_basis(it->second, r.year);
    if (r.opposition == d.ref_opp) {
      // Fold the pivot column into the free coordinates.
      std::vector<double> folded;
      folded.reserve(row.size() - 1);
      const double scale = row[d.ref_pivot] / d.ref_basis[d.ref_pivot];
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (static_cast<int>(c) == d.ref_pivot) continue;
        folded.push_back(row[c] - scale * d.ref_basis[c]);
      }
      row = std::move(folded);
    }
    d.opp_rows.push_back(std::move(row));
    d.player_of.push_back(r.player_id);
    d.opp_of.push_back(r.opposition);
    d.is_away.push_back(r.home_away == 2 ? 1 : 0);
    d.innings_idx.push_back(static_cast<unsigned char>(r.match_innings - 1));
    d.toss_won.push_back(r.toss == 1 ? 1 : 0);
    d.records_of_player[r.player_id].push_back(static_cast<int>(i));
    d.records_of_opp[r.opposition].push_back(static_cast<int>(i));
  }
  return d;
}

DesignMatrices build_design(const Dataset& data) {
  return build_design(data, runs_spline_spec(data.records),
                      opposition_spline_specs(data.records));
}

}  // namespace mpcmp
