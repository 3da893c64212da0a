#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phoenix/coder.hpp"
#include "phoenix/dictionaries.hpp"
#include "phoenix/record.hpp"
#include "phoenix/store.hpp"

namespace phoenix {

// Quad class for a 2-digit root code ("01".."20"). Values are the fixed
// 5-way collapse of the event ontology: 0 verbal cooperation rolls up 01-02,
// 1 material cooperation 03-05, 2 verbal conflict 06-08, 3 material conflict
// includes 16, 4 protest/coerce/fight covers 14-15 and 17-20. Throws
// EnrichError{UnknownRoot} outside 01-20.
int quad_class(const std::string& root_code);

// Event-intensity scores in [-10, +10], keyed by event code with prefix
// fallback: a 4-digit lookup tries the 4-, then 3-, then 2-digit entry.
class GoldsteinTable {
 public:
  // File format: `# version: <v>` header, then `CODE<TAB>score` lines.
  // Every 2-digit root 01-20 must be present. Throws
  // EnrichError{FormatError} on violations.
  static GoldsteinTable load(const std::string& path);

  // Programmatic construction for tests; validates code and range.
  void add(const std::string& code, double score);

  double lookup(const std::string& code) const;  // EnrichError{UnknownRoot}
  bool has_exact(const std::string& code) const { return scores_.count(code) > 0; }
  size_t size() const { return scores_.size(); }
  const std::string& version() const { return version_; }
  void set_version(std::string v) { version_ = std::move(v); }

 private:
  std::map<std::string, double> scores_;
  std::string version_;
};

struct ActorDecomposition {
  std::string entity;                    // first 3-char segment
  std::optional<std::string> role;       // first segment in the roles set
  std::optional<std::string> attribute;  // first segment in the attributes set
  std::string full;

  bool operator==(const ActorDecomposition&) const = default;
};

// Splits a concatenated actor code into entity/role/attribute. Unrecognized
// segments stay only in `full`. Throws EnrichError{MalformedCode} when the
// length is not a positive multiple of 3.
ActorDecomposition decompose_actor(const std::string& full,
                                   const DictionarySet& dicts);

struct GazetteerEntry {
  std::string name;
  std::string country;  // country display name
  std::string admin1;   // state/province name; empty for country-level rows
  double lat = 0.0;
  double lon = 0.0;
  long population = 0;
};

struct GeoResult {
  double lat = 0.0;
  double lon = 0.0;
  std::string location_name;
  std::string country_name;
  std::string state_name;

  bool operator==(const GeoResult&) const = default;
};

class Gazetteer {
 public:
  // TSV columns: name, country, admin1, lat, lon, population; `#` comments.
  // Throws EnrichError{FormatError} with file and line on bad rows.
  static Gazetteer load(const std::string& path);

  void add(GazetteerEntry entry);
  size_t size() const { return entries_.size(); }

  // Candidates for a place name, case-insensitive, in file order.
  std::vector<const GazetteerEntry*> candidates(const std::string& name) const;

 private:
  friend std::optional<GeoResult> geolocate(const StoryDocument&,
                                            const Gazetteer&);
  std::vector<GazetteerEntry> entries_;
  std::map<std::string, std::vector<size_t>> by_name_;  // lowercased name
};

// Scans the document body for capitalized token runs (up to 3 tokens,
// longest first) that name gazetteer places. Ambiguous names prefer the
// candidate in the most-mentioned country, then the largest population,
// then file order. The result is the most-mentioned place name; ties go to
// the earliest first mention. Absent when nothing matches.
std::optional<GeoResult> geolocate(const StoryDocument& doc,
                                   const Gazetteer& gazetteer);

struct EnrichTables {
  const DictionarySet* dicts = nullptr;
  const GoldsteinTable* goldstein = nullptr;
  const Gazetteer* gazetteer = nullptr;  // null disables geolocation
};

// Builds the full output row for one coded event: date fields from the
// story's fetch date, quad class and Goldstein score from the event code,
// actor decomposition, issue tags counted over the body text, optional
// geolocation, and provenance (URL, source, story id). The EventID is
// assigned later by the run that emits the record.
EventRecord enrich_event(const CodedEvent& ev, const StoryDocument& doc,
                         const EnrichTables& tables);

}  // namespace phoenix
