#pragma once

#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phoenix/dates.hpp"
#include "phoenix/errors.hpp"

namespace phoenix {

// Forward-only lifecycle; Failed is terminal from any state.
enum class StoryStatus { Fetched, Parsed, Coded, Failed };

const char* to_string(StoryStatus status);
std::optional<StoryStatus> parse_status(const std::string& name);

struct StoryDocument {
  std::string story_id;  // digest of the canonical URL
  std::string url;       // as fetched, before canonicalization
  std::string source_name;
  std::string title;
  std::string body_text;
  Timestamp fetched_at{};
  std::optional<std::vector<std::string>> parse_trees;  // bracketed strings
  StoryStatus status = StoryStatus::Fetched;

  bool operator==(const StoryDocument&) const = default;
};

// scheme + lowercased host + path; query string and fragment dropped.
std::string canonical_url(const std::string& url);

// FNV-1a 64-bit digest of the canonical URL, as 16 hex digits.
std::string story_id_for(const std::string& url);

// Directory-backed document store:
//   <root>/links.txt          one seen canonical URL per line
//   <root>/docs/<id>.json     one document per file, written atomically
// Writes are serialized by an in-process mutex; readers see whole documents
// only (temp file + rename).
class DocumentStore {
 public:
  explicit DocumentStore(const std::string& root_dir);

  // Records a canonical URL as seen. Returns false if it was already known.
  bool record_link(const std::string& canonical);
  bool has_link(const std::string& canonical) const;
  std::vector<std::string> links() const;
  // Seen links that never got a document (interrupted cycles); these are
  // safe to re-enqueue.
  std::vector<std::string> links_without_documents() const;

  // Inserts a new document. Returns false (store unchanged) if a document
  // with this story_id already exists.
  bool insert_document(const StoryDocument& doc);

  // Replaces an existing document. Status may only move forward
  // (Fetched -> Parsed -> Coded); Failed is allowed from anywhere and is
  // terminal. Throws StoreError{InvalidTransition} on violations and
  // StoreError{IoError} if the document does not exist.
  void update_document(const StoryDocument& doc);

  std::optional<StoryDocument> load_document(const std::string& story_id) const;

  // All documents matching the filters, sorted by canonical URL then
  // story_id so iteration order is reproducible.
  std::vector<StoryDocument> load_documents(
      std::optional<StoryStatus> status = std::nullopt,
      std::optional<DateRange> fetched = std::nullopt) const;

  size_t document_count() const;
  const std::string& root() const { return root_; }

 private:
  std::string root_;
  mutable std::mutex mutex_;
  std::set<std::string> links_;
};

}  // namespace phoenix
