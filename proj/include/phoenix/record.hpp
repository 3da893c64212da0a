#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phoenix/dates.hpp"
#include "phoenix/errors.hpp"

namespace phoenix {

// One output row. Fields appear in serialized files in exactly this order;
// absent values are empty strings.
struct EventRecord {
  std::string event_id;            // YYYYMMDD-NNNNNN
  Date date;                       // also serialized as Year, Month, Day
  std::string source_full;
  std::string source_entity;
  std::string source_role;
  std::string source_attribute;
  std::string target_full;
  std::string target_entity;
  std::string target_role;
  std::string target_attribute;
  std::string event_code;
  std::string event_root_code;
  int quad_class = 0;
  double goldstein = 0.0;
  std::string issues;              // "TAG:3;OTHER:1"
  std::optional<double> action_lat;
  std::optional<double> action_lon;
  std::string location_name;
  std::string geo_country_name;
  std::string geo_state_name;
  int sentence_id = 0;
  std::vector<std::string> urls;          // semicolon-joined on disk
  std::vector<std::string> news_sources;  // semicolon-joined on disk
  std::string story_id;

  bool operator==(const EventRecord&) const = default;
};

inline constexpr int kRecordColumnCount = 27;

// Tab-joined header row (no newline).
const std::string& record_header();

// One tab-joined row (no newline). Goldstein prints with one decimal,
// coordinates with four.
std::string to_tsv(const EventRecord& record);

// Parses one data row. Throws PipelineError{MalformedRecords} on wrong
// column count or unparseable numeric fields.
EventRecord record_from_tsv(const std::string& line);

// Header plus one line per record, LF endings.
void write_records(std::ostream& out, const std::vector<EventRecord>& records);

// Reads a records file (header validated). Errors mention `path` and the
// 1-based line number.
std::vector<EventRecord> read_records(const std::string& path);

}  // namespace phoenix
