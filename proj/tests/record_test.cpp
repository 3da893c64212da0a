#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "phoenix/record.hpp"
#include "test_util.hpp"

using namespace phoenix;

namespace {

EventRecord sample_record() {
  EventRecord r;
  r.event_id = "20140615-000001";
  r.date = Date{2014, 6, 15};
  r.source_full = "USAGOV";
  r.source_entity = "USA";
  r.source_role = "GOV";
  r.source_attribute = "";
  r.target_full = "IMGMOSISI";
  r.target_entity = "IMG";
  r.target_role = "";
  r.target_attribute = "MOS";
  r.event_code = "111";
  r.event_root_code = "11";
  r.quad_class = 3;
  r.goldstein = -2.0;
  r.issues = "PROTEST:2;ENERGY:1";
  r.action_lat = 33.5138;
  r.action_lon = 36.2765;
  r.location_name = "Damascus";
  r.geo_country_name = "Syria";
  r.geo_state_name = "Damascus Governorate";
  r.sentence_id = 2;
  r.urls = {"http://example.com/a", "http://example.com/f"};
  r.news_sources = {"Examplewire", "Newsdesk"};
  r.story_id = "7fadbd6e96a526b0";
  return r;
}

}  // namespace

TEST_CASE("header names the 27 columns in output order") {
  CHECK(kRecordColumnCount == 27);
  CHECK(record_header() ==
        "EventID\tDate\tYear\tMonth\tDay\tSourceActorFull\tSourceActorEntity"
        "\tSourceActorRole\tSourceActorAttribute\tTargetActorFull"
        "\tTargetActorEntity\tTargetActorRole\tTargetActorAttribute"
        "\tEventCode\tEventRootCode\tQuadClass\tGoldsteinScore\tIssues"
        "\tActionLat\tActionLong\tLocationName\tGeoCountryName\tGeoStateName"
        "\tSentenceID\tURLs\tNewsSources\tStoryID");
}

TEST_CASE("a full record serializes exactly") {
  CHECK(to_tsv(sample_record()) ==
        "20140615-000001\t20140615\t2014\t6\t15\tUSAGOV\tUSA\tGOV\t"
        "\tIMGMOSISI\tIMG\t\tMOS\t111\t11\t3\t-2.0\tPROTEST:2;ENERGY:1"
        "\t33.5138\t36.2765\tDamascus\tSyria\tDamascus Governorate\t2"
        "\thttp://example.com/a;http://example.com/f"
        "\tExamplewire;Newsdesk\t7fadbd6e96a526b0");
}

TEST_CASE("absent optionals serialize as empty columns") {
  EventRecord r = sample_record();
  r.target_full = r.target_entity = r.target_role = r.target_attribute = "";
  r.action_lat.reset();
  r.action_lon.reset();
  r.location_name = r.geo_country_name = r.geo_state_name = "";
  r.issues = "";
  std::string line = to_tsv(r);
  CHECK(line.find("\t\t\t\t\t111\t") != std::string::npos);  // target block
  std::string tail = line.substr(line.find("\t-2.0\t"));
  CHECK(tail.rfind("\t-2.0\t\t\t\t\t\t\t2\t", 0) == 0);  // issues + geo block
}

TEST_CASE("number formatting is fixed-width decimal") {
  EventRecord r = sample_record();
  r.goldstein = 5.25;          // one decimal, rounded
  r.action_lat = -0.25;        // four decimals
  r.action_lon = 150.0;
  std::string line = to_tsv(r);
  CHECK(line.find("\t5.2\t") != std::string::npos);
  CHECK(line.find("\t-0.2500\t") != std::string::npos);
  CHECK(line.find("\t150.0000\t") != std::string::npos);
}

TEST_CASE("records round-trip through TSV") {
  EventRecord full = sample_record();
  CHECK(record_from_tsv(to_tsv(full)) == full);

  EventRecord sparse = sample_record();
  sparse.target_full = sparse.target_entity = "";
  sparse.target_role = sparse.target_attribute = "";
  sparse.action_lat.reset();
  sparse.action_lon.reset();
  sparse.location_name = sparse.geo_country_name = sparse.geo_state_name = "";
  sparse.issues = "";
  sparse.urls = {"http://example.com/a"};
  sparse.news_sources = {"Examplewire"};
  CHECK(record_from_tsv(to_tsv(sparse)) == sparse);
}

TEST_CASE("rows with the wrong column count are rejected") {
  std::string line = to_tsv(sample_record());
  CHECK_THROWS_AS(record_from_tsv(line + "\textra"), PipelineError);
  CHECK_THROWS_AS(record_from_tsv(line.substr(0, line.rfind('\t'))),
                  PipelineError);
  CHECK_THROWS_AS(record_from_tsv(""), PipelineError);
  try {
    record_from_tsv("just\tthree\tcolumns");
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.kind() == PipelineError::Kind::MalformedRecords);
    CHECK(std::string(e.what()).find("27") != std::string::npos);
  }
}

TEST_CASE("date fields must agree") {
  std::string line = to_tsv(sample_record());

  std::string bad_year = line;
  bad_year.replace(bad_year.find("\t2014\t"), 6, "\t2015\t");
  CHECK_THROWS_AS(record_from_tsv(bad_year), PipelineError);

  std::string bad_date = line;
  bad_date.replace(bad_date.find("20140615\t"), 9, "20141315\t");
  CHECK_THROWS_AS(record_from_tsv(bad_date), PipelineError);

  try {
    record_from_tsv(bad_year);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(std::string(e.what()).find("disagree") != std::string::npos);
  }
}

TEST_CASE("numeric fields must parse completely") {
  std::string line = to_tsv(sample_record());

  std::string bad_quad = line;
  bad_quad.replace(bad_quad.find("\t3\t-2.0"), 7, "\tx\t-2.0");
  CHECK_THROWS_AS(record_from_tsv(bad_quad), PipelineError);

  std::string bad_score = line;
  bad_score.replace(bad_score.find("\t-2.0\t"), 6, "\t-2.x\t");
  CHECK_THROWS_AS(record_from_tsv(bad_score), PipelineError);

  std::string bad_lat = line;
  bad_lat.replace(bad_lat.find("\t33.5138\t"), 9, "\tnorth\t");
  CHECK_THROWS_AS(record_from_tsv(bad_lat), PipelineError);
}

TEST_CASE("write_records emits header plus one LF-terminated line per row") {
  std::ostringstream out;
  EventRecord r = sample_record();
  write_records(out, {r, r});
  std::string text = out.str();
  CHECK(text == record_header() + "\n" + to_tsv(r) + "\n" + to_tsv(r) + "\n");
}

TEST_CASE("read_records round-trips a written file") {
  testutil::TempDir tmp("records");
  auto path = tmp.sub("events.tsv");

  EventRecord a = sample_record();
  EventRecord b = sample_record();
  b.event_id = "20140615-000002";
  b.target_full = "";
  b.target_entity = "";
  b.target_role = "";
  b.target_attribute = "";
  std::ostringstream out;
  write_records(out, {a, b});
  testutil::write_file(path, out.str());

  auto loaded = read_records(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == a);
  CHECK(loaded[1] == b);
}

TEST_CASE("read_records tolerates CRLF and trailing blank lines") {
  testutil::TempDir tmp("records");
  auto path = tmp.sub("events.tsv");
  std::string text =
      record_header() + "\r\n" + to_tsv(sample_record()) + "\r\n\n";
  testutil::write_file(path, text);
  auto loaded = read_records(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0] == sample_record());
}

TEST_CASE("read_records reports path and line number on errors") {
  testutil::TempDir tmp("records");
  auto path = tmp.sub("events.tsv");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_records(tmp.sub("absent.tsv")), PipelineError);
  }
  SUBCASE("empty file") {
    testutil::write_file(path, "");
    try {
      read_records(path);
      FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
      CHECK(std::string(e.what()).find("empty") != std::string::npos);
    }
  }
  SUBCASE("bad header") {
    testutil::write_file(path, "NotTheHeader\n");
    try {
      read_records(path);
      FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
      CHECK(e.kind() == PipelineError::Kind::MalformedRecords);
      CHECK(std::string(e.what()).find(path + ":1:") != std::string::npos);
    }
  }
  SUBCASE("bad row cites its 1-based line") {
    std::string text = record_header() + "\n" + to_tsv(sample_record()) +
                       "\n" + "short\trow\n";
    testutil::write_file(path, text);
    try {
      read_records(path);
      FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
      CHECK(std::string(e.what()).find(path + ":3:") != std::string::npos);
    }
  }
}

TEST_CASE("round-trip property over randomized records") {
  std::mt19937 rng(1234567u);
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const std::vector<std::string> actors = {"USAGOV", "RUS", "SYRREB",
                                           "IMGMOSISI", "VENGOV"};
  const std::vector<std::string> codes = {"01", "033", "111", "1384", "20"};

  for (int trial = 0; trial < 500; ++trial) {
    EventRecord r;
    r.date = Date{2014, pick(1, 12), pick(1, 28)};
    char seq[8];
    snprintf(seq, sizeof seq, "%06d", pick(1, 999999));
    r.event_id = r.date.yyyymmdd() + "-" + seq;
    r.source_full = actors[size_t(pick(0, int(actors.size()) - 1))];
    r.source_entity = r.source_full.substr(0, 3);
    if (pick(0, 1)) {
      r.target_full = actors[size_t(pick(0, int(actors.size()) - 1))];
      r.target_entity = r.target_full.substr(0, 3);
    }
    r.event_code = codes[size_t(pick(0, int(codes.size()) - 1))];
    r.event_root_code = r.event_code.substr(0, 2);
    r.quad_class = pick(0, 4);
    r.goldstein = pick(-100, 100) / 10.0;  // one-decimal values survive %.1f
    if (pick(0, 2) == 0) {
      r.action_lat = pick(-900000, 900000) / 10000.0;
      r.action_lon = pick(-1800000, 1800000) / 10000.0;
      r.location_name = "Place " + std::to_string(trial);
      r.geo_country_name = "Country";
      r.geo_state_name = pick(0, 1) ? "State" : "";
    }
    if (pick(0, 1)) r.issues = "PROTEST:" + std::to_string(pick(1, 9));
    r.sentence_id = pick(0, 40);
    int url_count = pick(1, 3);
    for (int u = 0; u < url_count; ++u) {
      r.urls.push_back("http://example.com/" + std::to_string(trial) + "/" +
                       std::to_string(u));
      r.news_sources.push_back("Source" + std::to_string(u));
    }
    r.story_id = "00000000deadbeef";

    EventRecord back = record_from_tsv(to_tsv(r));
    CHECK(back == r);
  }
}
