#include "mpcmp/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpcmp {

void InningsRecord::validate() const {
  if (wickets < 0 || wickets > 10) throw std::invalid_argument("wickets outside 0..10");
  if (runs < 0) throw std::invalid_argument("runs negative");
  if (match_innings < 1 || match_innings > 4) throw std::invalid_argument("match_innings outside 1..4");
  if (home_away != 1 && home_away != 2) throw std::invalid_argument("home_away not in {1,2}");
  if (toss != 1 && toss != 2) throw std::invalid_argument("toss not in {1,2}");
  if (player_id < 0 || opposition < 0) throw std::invalid_argument("unresolved category id");
}

std::vector<std::size_t> Dataset::wicket_histogram() const {
  std::vector<std::size_t> h(11, 0);
  for (const auto& r : records) h[r.wickets]++;
  return h;
}

int Dataset::debut_year(int player_id) const {
  int debut = 0;
  bool found = false;
  for (const auto& r : records)
    if (r.player_id == player_id && (!found || r.year < debut)) {
      debut = r.year;
      found = true;
    }
  if (!found) throw std::out_of_range("debut_year: unknown player id");
  return debut;
}

std::size_t Dataset::innings_count(int player_id) const {
  std::size_t n = 0;
  for (const auto& r : records)
    if (r.player_id == player_id) ++n;
  return n;
}

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

int parse_int(const std::string& s, const char* what) {
  std::size_t pos = 0;
  int v;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument(std::string(what) + ": trailing junk: '" + s + "'");
  return v;
}

int intern(std::vector<std::string>& registry, std::map<std::string, int>& index,
           const std::string& name) {
  auto it = index.find(name);
  if (it != index.end()) return it->second;
  const int id = static_cast<int>(registry.size());
  registry.push_back(name);
  index.emplace(name, id);
  return id;
}

}  // namespace

Dataset ingest(const std::string& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest: cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("ingest: empty file " + path);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const char delim = header.find('\t') != std::string::npos ? '\t' : ',';

  std::map<std::string, int> col;
  {
    const auto cells = split(header, delim);
    for (std::size_t i = 0; i < cells.size(); ++i) col[trim(cells[i])] = static_cast<int>(i);
  }
  const auto need = [&](const char* name) {
    auto it = col.find(name);
    if (it == col.end()) throw std::runtime_error(std::string("ingest: missing column '") + name + "'");
    return it->second;
  };
  const auto maybe = [&](const char* name) {
    auto it = col.find(name);
    return it == col.end() ? -1 : it->second;
  };

  const int c_player = need("player");
  const int c_opp = need("opposition");
  const int c_ha = need("home_away");
  const int c_mi = need("match_innings");
  const int c_toss = need("toss");
  const int c_year = maybe("year");
  const int c_date = maybe("date");
  if (c_year < 0 && c_date < 0)
    throw std::runtime_error("ingest: need a 'year' or 'date' column");
  int c_runs = -1, c_wkts = -1, c_fig = -1;
  if (opts.scorecard_format) {
    c_fig = need("figures");
  } else {
    c_runs = need("runs");
    c_wkts = need("wickets");
  }

  Dataset d;
  d.source = path;
  std::map<std::string, int> player_index, opp_index;
  std::vector<std::string> errors;
  std::string line;
  std::size_t lineno = 1;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++d.source_rows;
    const auto cells = split(line, delim);
    try {
      const auto cell = [&](int c) -> std::string {
        if (c < 0 || c >= static_cast<int>(cells.size()))
          throw std::invalid_argument("row too short");
        return trim(cells[c]);
      };
      InningsRecord r;
      r.player_id = intern(d.player_names, player_index, cell(c_player));
      r.opposition = intern(d.opposition_names, opp_index, cell(c_opp));
      r.home_away = parse_int(cell(c_ha), "home_away");
      r.match_innings = parse_int(cell(c_mi), "match_innings");
      r.toss = parse_int(cell(c_toss), "toss");
      if (c_date >= 0) r.date = cell(c_date);
      if (c_year >= 0) {
        r.year = parse_int(cell(c_year), "year");
      } else {
        if (r.date.size() < 4) throw std::invalid_argument("date too short to carry a year");
        r.year = parse_int(r.date.substr(0, 4), "year from date");
      }
      if (opts.scorecard_format) {
        // overs-maidens-wickets-runs; the first two fields are discarded.
        const auto parts = split(cell(c_fig), '-');
        if (parts.size() != 4) throw std::invalid_argument("figures not in o-m-w-r form");
        r.wickets = parse_int(trim(parts[2]), "wickets");
        r.runs = parse_int(trim(parts[3]), "runs");
      } else {
        r.runs = parse_int(cell(c_runs), "runs");
        r.wickets = parse_int(cell(c_wkts), "wickets");
      }
      r.validate();
      d.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      if (errors.size() < 20)
        errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  if (!errors.empty()) {
    std::string msg = "ingest: " + std::to_string(errors.size()) + "+ invalid rows in " + path + "\n";
    for (const auto& e : errors) msg += "  " + e + "\n";
    throw std::runtime_error(msg);
  }
  return d;
}

void write_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
  out << "player,date,year,opposition,home_away,match_innings,toss,runs,wickets\n";
  char buf[512];
  for (const auto& r : d.records) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%s,%d,%d,%d,%d,%d\n",
                  d.player_names[r.player_id].c_str(), r.date.c_str(), r.year,
                  d.opposition_names[r.opposition].c_str(), r.home_away,
                  r.match_innings, r.toss, r.runs, r.wickets);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_dataset: write failed for " + path);
}

}  // namespace mpcmp
