#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phoenix/dates.hpp"
#include "phoenix/dictionaries.hpp"
#include "phoenix/enrich.hpp"
#include "phoenix/errors.hpp"
#include "phoenix/record.hpp"
#include "phoenix/store.hpp"

namespace phoenix {

struct DailyRunManifest {
  Date run_date;
  std::string dictionary_version;
  std::string software_version;
  int input_story_count = 0;
  int emitted_event_count = 0;
  Timestamp started_at{};
  Timestamp finished_at{};
};

// `key: value` lines in a fixed order, LF endings.
std::string to_text(const DailyRunManifest& manifest);

struct RunOptions {
  bool dedup = true;        // one-a-day filter
  std::string software_version = "0.1.0";
  std::optional<Timestamp> fixed_time;  // pins manifest timestamps
};

struct RunResult {
  std::string records_path;
  std::string manifest_path;
  DailyRunManifest manifest;
  std::vector<EventRecord> records;
};

// One reproducible daily run over already-ingested, already-parsed stories:
// loads the date's Parsed documents in canonical-URL order, codes and
// enriches them (geolocation happens when tables.gazetteer is set), assigns
// EventIDs YYYYMMDD-NNNNNN in processing order, applies the one-a-day filter
// (rows identical on source, target, code, and date merge; URLs and sources
// union; smallest EventID survives), and writes
//   <out_dir>/phoenix-events.YYYYMMDD.tsv
//   <out_dir>/phoenix-events.YYYYMMDD.manifest.txt
// sorted by (Date, EventID). Never touches the network and never mutates the
// store, so reruns are byte-identical. Throws PipelineError{NoInput} when
// the store has no Parsed documents for the date.
RunResult run_daily(const Date& date, const DocumentStore& store,
                    const EnrichTables& tables, const std::string& out_dir,
                    const RunOptions& options);

enum class ReportKind {
  DailyCounts,
  TopSources,
  TopActors,
  TopEntities,
  TopRoles,
  TopIssues,
  QuadHistogram,
  EntityFilter
};

// Parses the CLI spelling ("daily_counts", "top_sources", ...).
std::optional<ReportKind> parse_report_kind(const std::string& name);

// Deterministic aggregation over one or more records files. Top-N reports
// list `name<TAB>count` sorted by count desc then name asc; daily_counts is
// date-ascending; quad_histogram lists nonzero quad classes ascending;
// entity_filter re-emits full rows whose source or target entity equals
// `entity`. Throws PipelineError{MalformedRecords} with file and line info.
std::string report(const std::vector<std::string>& record_files,
                   ReportKind kind, int top_n = 10,
                   const std::string& entity = "");

// Stateless request handler behind the HTTP endpoint. Requests are JSON:
//   {"date": "2014-06-20", "trees": ["(ROOT ...)", ...]}
// Success is a 200 with the records as TSV (header + one row per event, no
// one-a-day filtering). Zero or malformed trees give a 400 whose JSON error
// names the failing tree index; an invalid date gives a 422. Unexpected
// failures give a 500 with a generic body.
class CodingService {
 public:
  CodingService(const DictionarySet& dicts, const EnrichTables& tables);

  struct Reply {
    int status = 200;
    std::string content_type;
    std::string body;
  };

  Reply handle(const std::string& request_body) const;

 private:
  const DictionarySet& dicts_;
  EnrichTables tables_;
};

// HTTP wrapper: POST /code runs CodingService, GET /health answers
// {"status":"ok"}. start() binds (port 0 picks a free port) and serves on a
// background thread; wait() blocks until stop().
class HttpEndpoint {
 public:
  HttpEndpoint(const DictionarySet& dicts, const EnrichTables& tables);
  ~HttpEndpoint();

  bool start(const std::string& host, int port);
  int port() const;
  void stop();
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace phoenix
