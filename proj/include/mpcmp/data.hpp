#ifndef MPCMP_DATA_HPP
#define MPCMP_DATA_HPP

#include <map>
#include <string>
#include <vector>

namespace mpcmp {

// One bowling performance. Categorical codes follow the data convention:
// home_away 1=home 2=away; toss 1=won 2=lost; match_innings 1..4.
struct InningsRecord {
  int player_id = -1;
  int year = 0;
  int runs = 0;
  int wickets = 0;
  int opposition = -1;
  int home_away = 1;
  int match_innings = 1;
  int toss = 2;
  std::string date;  // metadata, not used by the model

  void validate() const;
};

struct Dataset {
  std::vector<InningsRecord> records;
  std::vector<std::string> player_names;       // id -> name, ids by first appearance
  std::vector<std::string> opposition_names;   // id -> name
  std::string source;
  std::size_t source_rows = 0;

  std::size_t n_players() const { return player_names.size(); }
  std::size_t n_oppositions() const { return opposition_names.size(); }

  // Wicket frequencies over counts 0..10.
  std::vector<std::size_t> wicket_histogram() const;
  int debut_year(int player_id) const;
  std::size_t innings_count(int player_id) const;
};

struct IngestOptions {
  // When set, a single "figures" column in scorecard form
  // overs-maidens-wickets-runs replaces the runs and wickets columns;
  // overs and maidens are discarded.
  bool scorecard_format = false;
};

// Parse a delimited text file (comma or tab, autodetected from the header).
// Required columns: player, opposition, home_away, match_innings, toss,
// plus runs+wickets (or figures under scorecard_format), plus year and/or
// date (year is taken from the date when absent). Any invalid rows fail
// the whole ingest; the error message lists the first 20 offenders with
// line numbers.
Dataset ingest(const std::string& path, const IngestOptions& opts = {});

// Canonical comma-separated form; ingest(write_dataset(d)) reproduces d.
void write_dataset(const Dataset& d, const std::string& path);

}  // namespace mpcmp

#endif
