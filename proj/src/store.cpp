#include "phoenix/store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace phoenix {

const char* to_string(StoryStatus status) {
  switch (status) {
    case StoryStatus::Fetched: return "fetched";
    case StoryStatus::Parsed: return "parsed";
    case StoryStatus::Coded: return "coded";
    case StoryStatus::Failed: return "failed";
  }
  return "fetched";
}

std::optional<StoryStatus> parse_status(const std::string& name) {
  if (name == "fetched") return StoryStatus::Fetched;
  if (name == "parsed") return StoryStatus::Parsed;
  if (name == "coded") return StoryStatus::Coded;
  if (name == "failed") return StoryStatus::Failed;
  return std::nullopt;
}

std::string canonical_url(const std::string& url) {
  // scheme://host/path — lowercase scheme and host, drop ?query and #fragment.
  std::string out;
  size_t scheme_end = url.find("://");
  size_t host_begin = 0;
  if (scheme_end != std::string::npos) {
    for (size_t i = 0; i < scheme_end; ++i) {
      char c = url[i];
      out += (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c;
    }
    out += "://";
    host_begin = scheme_end + 3;
  }
  size_t path_begin = url.find('/', host_begin);
  size_t host_end = std::min(path_begin, url.size());
  for (size_t i = host_begin; i < host_end; ++i) {
    char c = url[i];
    out += (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c;
  }
  if (path_begin != std::string::npos) {
    size_t stop = url.find_first_of("?#", path_begin);
    out += url.substr(path_begin, stop == std::string::npos
                                      ? std::string::npos
                                      : stop - path_begin);
  }
  return out;
}

std::string story_id_for(const std::string& url) {
  std::string canon = canonical_url(url);
  uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 0x100000001b3ULL;  // FNV prime
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)hash);
  return buf;
}

namespace {

nlohmann::json to_json(const StoryDocument& doc) {
  nlohmann::json j;
  j["story_id"] = doc.story_id;
  j["url"] = doc.url;
  j["source_name"] = doc.source_name;
  j["title"] = doc.title;
  j["body_text"] = doc.body_text;
  j["fetched_at"] = iso8601(doc.fetched_at);
  if (doc.parse_trees) j["parse_trees"] = *doc.parse_trees;
  j["status"] = to_string(doc.status);
  return j;
}

StoryDocument from_json(const nlohmann::json& j, const std::string& path) {
  auto corrupt = [&](const std::string& why) {
    return StoreError(StoreError::Kind::StoreCorruption, path + ": " + why);
  };
  StoryDocument doc;
  try {
    doc.story_id = j.at("story_id").get<std::string>();
    doc.url = j.at("url").get<std::string>();
    doc.source_name = j.at("source_name").get<std::string>();
    doc.title = j.at("title").get<std::string>();
    doc.body_text = j.at("body_text").get<std::string>();
    auto ts = parse_iso8601(j.at("fetched_at").get<std::string>());
    if (!ts) throw corrupt("bad fetched_at timestamp");
    doc.fetched_at = *ts;
    if (j.contains("parse_trees"))
      doc.parse_trees = j.at("parse_trees").get<std::vector<std::string>>();
    auto status = parse_status(j.at("status").get<std::string>());
    if (!status) throw corrupt("unknown status");
    doc.status = *status;
  } catch (const nlohmann::json::exception& e) {
    throw corrupt(e.what());
  }
  return doc;
}

int status_rank(StoryStatus s) {
  switch (s) {
    case StoryStatus::Fetched: return 0;
    case StoryStatus::Parsed: return 1;
    case StoryStatus::Coded: return 2;
    case StoryStatus::Failed: return 3;
  }
  return 0;
}

void write_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw StoreError(StoreError::Kind::IoError,
                       "cannot write " + tmp.string());
    out << content;
    if (!out.flush())
      throw StoreError(StoreError::Kind::IoError,
                       "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw StoreError(StoreError::Kind::IoError,
                     "rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

DocumentStore::DocumentStore(const std::string& root_dir) : root_(root_dir) {
  std::error_code ec;
  fs::create_directories(fs::path(root_) / "docs", ec);
  if (ec)
    throw StoreError(StoreError::Kind::IoError,
                     "cannot create store at " + root_ + ": " + ec.message());
  std::ifstream in(fs::path(root_) / "links.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) links_.insert(line);
  }
}

bool DocumentStore::record_link(const std::string& canonical) {
  std::lock_guard lock(mutex_);
  if (!links_.insert(canonical).second) return false;
  std::ofstream out(fs::path(root_) / "links.txt",
                    std::ios::binary | std::ios::app);
  if (!out || !(out << canonical << '\n').flush())
    throw StoreError(StoreError::Kind::IoError,
                     "cannot append to links.txt in " + root_);
  return true;
}

bool DocumentStore::has_link(const std::string& canonical) const {
  std::lock_guard lock(mutex_);
  return links_.count(canonical) > 0;
}

std::vector<std::string> DocumentStore::links() const {
  std::lock_guard lock(mutex_);
  return {links_.begin(), links_.end()};
}

std::vector<std::string> DocumentStore::links_without_documents() const {
  std::vector<std::string> out;
  std::lock_guard lock(mutex_);
  for (const std::string& link : links_) {
    fs::path doc = fs::path(root_) / "docs" / (story_id_for(link) + ".json");
    if (!fs::exists(doc)) out.push_back(link);
  }
  return out;
}

bool DocumentStore::insert_document(const StoryDocument& doc) {
  std::lock_guard lock(mutex_);
  fs::path target = fs::path(root_) / "docs" / (doc.story_id + ".json");
  if (fs::exists(target)) return false;
  write_atomically(target, to_json(doc).dump(2) + "\n");
  return true;
}

void DocumentStore::update_document(const StoryDocument& doc) {
  std::lock_guard lock(mutex_);
  fs::path target = fs::path(root_) / "docs" / (doc.story_id + ".json");
  if (!fs::exists(target))
    throw StoreError(StoreError::Kind::IoError,
                     "no document " + doc.story_id + " to update");
  std::ifstream in(target);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(StoreError::Kind::StoreCorruption,
                     target.string() + ": " + e.what());
  }
  StoryDocument existing = from_json(j, target.string());
  if (existing.status == StoryStatus::Failed)
    throw StoreError(StoreError::Kind::InvalidTransition,
                     doc.story_id + ": document is Failed (terminal)");
  if (doc.status != StoryStatus::Failed &&
      status_rank(doc.status) < status_rank(existing.status))
    throw StoreError(
        StoreError::Kind::InvalidTransition,
        doc.story_id + ": cannot move from " +
            std::string(to_string(existing.status)) + " back to " +
            to_string(doc.status));
  write_atomically(target, to_json(doc).dump(2) + "\n");
}

std::optional<StoryDocument> DocumentStore::load_document(
    const std::string& story_id) const {
  std::lock_guard lock(mutex_);
  fs::path target = fs::path(root_) / "docs" / (story_id + ".json");
  std::ifstream in(target);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(StoreError::Kind::StoreCorruption,
                     target.string() + ": " + e.what());
  }
  StoryDocument doc = from_json(j, target.string());
  if (doc.story_id != story_id)
    throw StoreError(StoreError::Kind::StoreCorruption,
                     target.string() + ": story_id does not match filename");
  return doc;
}

std::vector<StoryDocument> DocumentStore::load_documents(
    std::optional<StoryStatus> status, std::optional<DateRange> fetched) const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(mutex_);
    for (const auto& entry : fs::directory_iterator(fs::path(root_) / "docs")) {
      if (!entry.is_regular_file()) continue;
      fs::path p = entry.path();
      if (p.extension() != ".json") continue;
      ids.push_back(p.stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<StoryDocument> out;
  for (const std::string& id : ids) {
    auto doc = load_document(id);
    if (!doc)
      throw StoreError(StoreError::Kind::StoreCorruption,
                       "document " + id + " vanished during scan");
    if (status && doc->status != *status) continue;
    if (fetched && !fetched->contains(date_of(doc->fetched_at))) continue;
    out.push_back(std::move(*doc));
  }
  std::sort(out.begin(), out.end(),
            [](const StoryDocument& a, const StoryDocument& b) {
              std::string ca = canonical_url(a.url), cb = canonical_url(b.url);
              if (ca != cb) return ca < cb;
              return a.story_id < b.story_id;
            });
  return out;
}

size_t DocumentStore::document_count() const {
  std::lock_guard lock(mutex_);
  size_t n = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(root_) / "docs"))
    if (entry.is_regular_file() && entry.path().extension() == ".json") ++n;
  return n;
}

}  // namespace phoenix
