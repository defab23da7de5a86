#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "mpcmp/data.hpp"

using namespace mpcmp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("mpcmp_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kGoodCsv =
    "player,opposition,year,home_away,match_innings,toss,runs,wickets\n"
    "Smith,Australia,2001,1,1,1,45,3\n"
    "Smith,Australia,2001,1,3,1,30,2\n"
    "Khan,England,2010,2,2,2,88,5\n"
    "Khan,Australia,2011,2,4,2,12,0\n"
    "Ngidi,England,2019,1,1,2,60,10\n";

}  // namespace

TEST_CASE("ingest: columns by name, ids by first appearance") {
  TempFile f("good.csv", kGoodCsv);
  const Dataset d = ingest(f.path);
  REQUIRE(d.records.size() == 5);
  CHECK(d.source_rows == 5);
  CHECK(d.player_names == std::vector<std::string>{"Smith", "Khan", "Ngidi"});
  CHECK(d.opposition_names == std::vector<std::string>{"Australia", "England"});
  CHECK(d.records[2].player_id == 1);
  CHECK(d.records[2].opposition == 1);
  CHECK(d.records[2].runs == 88);
  CHECK(d.records[2].wickets == 5);
  CHECK(d.records[2].home_away == 2);
  CHECK(d.records[2].match_innings == 2);
  CHECK(d.records[2].toss == 2);
  CHECK(d.records[4].wickets == 10);
  CHECK(d.debut_year(0) == 2001);
  CHECK(d.innings_count(0) == 2);
  CHECK(d.innings_count(1) == 2);
}

TEST_CASE("ingest: column order does not matter, tabs autodetected") {
  TempFile f("tabs.tsv",
             "wickets\truns\ttoss\tmatch_innings\thome_away\tyear\topposition\tplayer\n"
             "4\t51\t1\t2\t1\t1995\tIndia\tWarne\n");
  const Dataset d = ingest(f.path);
  REQUIRE(d.records.size() == 1);
  CHECK(d.records[0].wickets == 4);
  CHECK(d.records[0].runs == 51);
  CHECK(d.records[0].year == 1995);
  CHECK(d.player_names[0] == "Warne");
}

TEST_CASE("ingest: year taken from date when absent") {
  TempFile f("dated.csv",
             "player,opposition,date,home_away,match_innings,toss,runs,wickets\n"
             "Smith,Australia,2004-07-22,1,1,1,45,3\n");
  const Dataset d = ingest(f.path);
  REQUIRE(d.records.size() == 1);
  CHECK(d.records[0].year == 2004);
  CHECK(d.records[0].date == "2004-07-22");
}

TEST_CASE("ingest: scorecard figures replace runs and wickets") {
  TempFile f("figures.csv",
             "player,opposition,year,home_away,match_innings,toss,figures\n"
             "Smith,Australia,2001,1,1,1,24.3-6-5-67\n"
             "Khan,England,2010,2,2,2,12-0-0-41\n");
  IngestOptions o;
  o.scorecard_format = true;
  const Dataset d = ingest(f.path, o);
  REQUIRE(d.records.size() == 2);
  CHECK(d.records[0].wickets == 5);
  CHECK(d.records[0].runs == 67);
  CHECK(d.records[1].wickets == 0);
  CHECK(d.records[1].runs == 41);
}

TEST_CASE("ingest: invalid rows fail the whole file with line numbers") {
  TempFile f("bad.csv",
             "player,opposition,year,home_away,match_innings,toss,runs,wickets\n"
             "Smith,Australia,2001,1,1,1,45,3\n"
             "Khan,England,2010,2,2,2,88,11\n"   // wickets out of range
             "Khan,England,2010,2,5,2,88,4\n");  // bad innings
  try {
    ingest(f.path);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("wickets") != std::string::npos);
  }
}

TEST_CASE("ingest: structural failures") {
  CHECK_THROWS_AS(ingest("no_such_file_anywhere.csv"), std::runtime_error);
  TempFile f("nocol.csv", "player,opposition,year,home_away,match_innings,toss,runs\nx,y,1,1,1,1,2\n");
  CHECK_THROWS_AS(ingest(f.path), std::runtime_error);  // wickets column missing
  TempFile g("noyear.csv", "player,opposition,home_away,match_innings,toss,runs,wickets\n");
  CHECK_THROWS_AS(ingest(g.path), std::runtime_error);
}

TEST_CASE("write_dataset round trips through ingest") {
  TempFile f("rt_in.csv", kGoodCsv);
  const Dataset d = ingest(f.path);
  const std::string out = "mpcmp_test_rt_out.csv";
  write_dataset(d, out);
  const Dataset d2 = ingest(out);
  std::remove(out.c_str());

  REQUIRE(d2.records.size() == d.records.size());
  CHECK(d2.player_names == d.player_names);
  CHECK(d2.opposition_names == d.opposition_names);
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(d2.records[i].player_id == d.records[i].player_id);
    CHECK(d2.records[i].opposition == d.records[i].opposition);
    CHECK(d2.records[i].year == d.records[i].year);
    CHECK(d2.records[i].runs == d.records[i].runs);
    CHECK(d2.records[i].wickets == d.records[i].wickets);
    CHECK(d2.records[i].home_away == d.records[i].home_away);
    CHECK(d2.records[i].match_innings == d.records[i].match_innings);
    CHECK(d2.records[i].toss == d.records[i].toss);
  }
}

TEST_CASE("wicket_histogram counts every cell") {
  TempFile f("hist.csv", kGoodCsv);
  const Dataset d = ingest(f.path);
  const auto h = d.wicket_histogram();
  REQUIRE(h.size() == 11);
  CHECK(h[0] == 1);
  CHECK(h[2] == 1);
  CHECK(h[3] == 1);
  CHECK(h[5] == 1);
  CHECK(h[10] == 1);
  std::size_t total = 0;
  for (auto c : h) total += c;
  CHECK(total == d.records.size());
}

TEST_CASE("record validation catches each bad field") {
  InningsRecord r;
  r.player_id = 0;
  r.opposition = 0;
  r.validate();
  auto bad = r;
  bad.wickets = 11;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = r;
  bad.runs = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = r;
  bad.match_innings = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = r;
  bad.home_away = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = r;
  bad.toss = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = r;
  bad.player_id = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
