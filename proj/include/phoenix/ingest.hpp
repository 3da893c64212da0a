#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phoenix/dates.hpp"
#include "phoenix/errors.hpp"
#include "phoenix/store.hpp"

namespace phoenix {

struct FeedEntry {
  std::string source_name;
  std::string feed_url;
  std::string language;  // BCP-47-ish tag, informational
};

struct FeedConfig {
  std::vector<FeedEntry> entries;
  std::chrono::seconds poll_interval{3600};
};

// Lines: source_name<TAB>feed_url<TAB>lang, `#` comments. Duplicate source
// names or URLs without a scheme raise IngestError{BadConfig}.
FeedConfig load_feed_config(const std::string& path);

struct FetchTask {
  std::string url;  // as listed in the feed; query string kept for fetching
  std::string source_name;
  Timestamp enqueued_at{};
  int attempts = 0;
};

struct IngestOptions {
  int timeout_ms = 30000;
  int max_retries = 3;      // total attempts per task
  int politeness_ms = 2000;  // minimum gap between hits on one host
  int backoff_ms = 1000;     // doubled after each failed attempt
  int pool_size = 4;
  std::string user_agent = "phoenix-ingest/0.1";
  std::optional<Timestamp> fixed_time;  // pins fetched_at for reproducible runs
};

struct PollError {
  std::string feed_url;
  std::string message;
};

struct PollResult {
  std::vector<FetchTask> tasks;
  std::vector<PollError> errors;  // per-feed failures; the cycle continues
  int duplicate = 0;              // same canonical link offered twice this cycle
};

// One poll cycle: fetch every feed, extract item links, and enqueue each
// canonical link at most once per store lifetime. Links are recorded before
// tasks are returned; links recorded earlier that never produced a document
// are re-enqueued (an interrupted cycle loses nothing). Links that already
// have a document are skipped; offering the same canonical link twice within
// one cycle counts as `duplicate`.
PollResult poll_feeds(const FeedConfig& config, DocumentStore& store,
                      const IngestOptions& options);

// <item>/<entry> links from an RSS or Atom document. Tolerates CDATA and
// both <link>url</link> and <link href="url"/> forms.
std::vector<std::string> feed_links(const std::string& xml);

// Main-content extraction over tag soup. Blocks (div/article/section/...)
// are scored by the text length of their low-link-density paragraphs,
// penalized by the block's overall link density, plus a per-paragraph bonus;
// the best block's paragraphs are returned. Pages without usable paragraphs
// fall back to the best block's whole text. Throws IngestError{NoContent}
// when the winning score is under 250.
// Returns {title, body_text}; the title comes from <title>, then og:title.
std::pair<std::string, std::string> extract_content(const std::string& html);

struct TaskResult {
  FetchTask task;
  bool ok = false;
  bool duplicate = false;  // fetched fine but the story was already stored
  int attempts = 0;
  std::string error;     // last failure, empty when ok
  std::string story_id;  // set when ok
};

struct IngestReport {
  int fetched = 0;
  int failed = 0;
  int duplicate = 0;
  std::vector<TaskResult> results;  // in task order
  std::vector<PollError> poll_errors;
};

// Fetches every task through a worker pool (timeouts, exponential-backoff
// retries on connection errors and 5xx; 4xx and empty extractions fail
// immediately) and persists successes as Fetched documents. Store insertion
// races count as duplicates. Individual failures never abort the batch.
IngestReport run_workers(const std::vector<FetchTask>& tasks, int pool_size,
                         DocumentStore& store, const IngestOptions& options);

}  // namespace phoenix
