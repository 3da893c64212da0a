#include "phoenix/record.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace phoenix {

namespace {

const char* const kColumnNames[kRecordColumnCount] = {
    "EventID",          "Date",
    "Year",             "Month",
    "Day",              "SourceActorFull",
    "SourceActorEntity", "SourceActorRole",
    "SourceActorAttribute", "TargetActorFull",
    "TargetActorEntity", "TargetActorRole",
    "TargetActorAttribute", "EventCode",
    "EventRootCode",    "QuadClass",
    "GoldsteinScore",   "Issues",
    "ActionLat",        "ActionLong",
    "LocationName",     "GeoCountryName",
    "GeoStateName",     "SentenceID",
    "URLs",             "NewsSources",
    "StoryID"};

std::string format_fixed(double value, int decimals) {
  char buf[32];
  snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::vector<std::string> split_sep(const std::string& text, char sep) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  size_t start = 0;
  while (true) {
    size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void malformed(const std::string& where, const std::string& why) {
  throw PipelineError(PipelineError::Kind::MalformedRecords,
                      where + ": " + why);
}

int parse_int(const std::string& text, const std::string& where,
              const std::string& what) {
  try {
    size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    malformed(where, "bad " + what + " '" + text + "'");
  }
}

double parse_double(const std::string& text, const std::string& where,
                    const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    malformed(where, "bad " + what + " '" + text + "'");
  }
}

}  // namespace

const std::string& record_header() {
  static const std::string header = [] {
    std::string h;
    for (const char* name : kColumnNames) {
      if (!h.empty()) h += '\t';
      h += name;
    }
    return h;
  }();
  return header;
}

std::string to_tsv(const EventRecord& r) {
  std::vector<std::string> cols;
  cols.reserve(kRecordColumnCount);
  cols.push_back(r.event_id);
  cols.push_back(r.date.yyyymmdd());
  cols.push_back(std::to_string(r.date.year));
  cols.push_back(std::to_string(r.date.month));
  cols.push_back(std::to_string(r.date.day));
  cols.push_back(r.source_full);
  cols.push_back(r.source_entity);
  cols.push_back(r.source_role);
  cols.push_back(r.source_attribute);
  cols.push_back(r.target_full);
  cols.push_back(r.target_entity);
  cols.push_back(r.target_role);
  cols.push_back(r.target_attribute);
  cols.push_back(r.event_code);
  cols.push_back(r.event_root_code);
  cols.push_back(std::to_string(r.quad_class));
  cols.push_back(format_fixed(r.goldstein, 1));
  cols.push_back(r.issues);
  cols.push_back(r.action_lat ? format_fixed(*r.action_lat, 4) : "");
  cols.push_back(r.action_lon ? format_fixed(*r.action_lon, 4) : "");
  cols.push_back(r.location_name);
  cols.push_back(r.geo_country_name);
  cols.push_back(r.geo_state_name);
  cols.push_back(std::to_string(r.sentence_id));
  cols.push_back(join(r.urls, ';'));
  cols.push_back(join(r.news_sources, ';'));
  cols.push_back(r.story_id);
  return join(cols, '\t');
}

EventRecord record_from_tsv(const std::string& line) {
  std::vector<std::string> cols = split_sep(line, '\t');
  // A row of all-empty columns still has 27 fields; split_sep("") is the
  // degenerate empty case.
  if (line.empty() || int(cols.size()) != kRecordColumnCount)
    malformed("row", "expected " + std::to_string(kRecordColumnCount) +
                         " columns, found " + std::to_string(cols.size()));
  EventRecord r;
  r.event_id = cols[0];
  auto date = parse_date(cols[1]);
  if (!date) malformed("row", "bad Date '" + cols[1] + "'");
  r.date = *date;
  if (parse_int(cols[2], "row", "Year") != r.date.year ||
      parse_int(cols[3], "row", "Month") != r.date.month ||
      parse_int(cols[4], "row", "Day") != r.date.day)
    malformed("row", "Year/Month/Day disagree with Date " + cols[1]);
  r.source_full = cols[5];
  r.source_entity = cols[6];
  r.source_role = cols[7];
  r.source_attribute = cols[8];
  r.target_full = cols[9];
  r.target_entity = cols[10];
  r.target_role = cols[11];
  r.target_attribute = cols[12];
  r.event_code = cols[13];
  r.event_root_code = cols[14];
  r.quad_class = parse_int(cols[15], "row", "QuadClass");
  r.goldstein = parse_double(cols[16], "row", "GoldsteinScore");
  r.issues = cols[17];
  if (!cols[18].empty()) r.action_lat = parse_double(cols[18], "row", "ActionLat");
  if (!cols[19].empty()) r.action_lon = parse_double(cols[19], "row", "ActionLong");
  r.location_name = cols[20];
  r.geo_country_name = cols[21];
  r.geo_state_name = cols[22];
  r.sentence_id = parse_int(cols[23], "row", "SentenceID");
  r.urls = split_sep(cols[24], ';');
  r.news_sources = split_sep(cols[25], ';');
  r.story_id = cols[26];
  return r;
}

void write_records(std::ostream& out, const std::vector<EventRecord>& records) {
  out << record_header() << '\n';
  for (const EventRecord& r : records) out << to_tsv(r) << '\n';
}

std::vector<EventRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw PipelineError(PipelineError::Kind::MalformedRecords,
                        path + ": cannot open");
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw PipelineError(PipelineError::Kind::MalformedRecords,
                        path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != record_header())
    throw PipelineError(PipelineError::Kind::MalformedRecords,
                        path + ":1: bad header row");
  std::vector<EventRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(record_from_tsv(line));
    } catch (const PipelineError& e) {
      throw PipelineError(PipelineError::Kind::MalformedRecords,
                          path + ":" + std::to_string(line_no) + ": " +
                              e.what());
    }
  }
  return out;
}

}  // namespace phoenix
