#include "phoenix/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <json.hpp>

#include "phoenix/coder.hpp"

namespace fs = std::filesystem;

namespace phoenix {

std::string to_text(const DailyRunManifest& m) {
  std::ostringstream out;
  out << "run_date: " << m.run_date.yyyymmdd() << '\n'
      << "dictionary_version: " << m.dictionary_version << '\n'
      << "software_version: " << m.software_version << '\n'
      << "input_story_count: " << m.input_story_count << '\n'
      << "emitted_event_count: " << m.emitted_event_count << '\n'
      << "started_at: " << iso8601(m.started_at) << '\n'
      << "finished_at: " << iso8601(m.finished_at) << '\n';
  return out.str();
}

RunResult run_daily(const Date& date, const DocumentStore& store,
                    const EnrichTables& tables, const std::string& out_dir,
                    const RunOptions& options) {
  if (!date.ok())
    throw PipelineError(PipelineError::Kind::InvalidDate,
                        "not a calendar date: " + date.iso());
  if (!tables.dicts || !tables.goldstein)
    throw PipelineError(PipelineError::Kind::NoInput,
                        "dictionaries and score table must be loaded");

  std::vector<StoryDocument> docs =
      store.load_documents(StoryStatus::Parsed, DateRange{date, date});
  if (docs.empty())
    throw PipelineError(PipelineError::Kind::NoInput,
                        "no parsed documents for " + date.iso());

  RunResult result;
  result.manifest.run_date = date;
  result.manifest.dictionary_version = tables.dicts->version();
  result.manifest.software_version = options.software_version;
  result.manifest.input_story_count = int(docs.size());
  result.manifest.started_at = options.fixed_time.value_or(now_utc());

  std::vector<EventRecord> records;
  int seq = 0;
  for (const StoryDocument& doc : docs) {
    for (const CodedEvent& ev : code_story(doc, *tables.dicts)) {
      EventRecord rec = enrich_event(ev, doc, tables);
      char suffix[16];
      snprintf(suffix, sizeof suffix, "%06d", ++seq);
      rec.event_id = date.yyyymmdd() + "-" + suffix;
      records.push_back(std::move(rec));
    }
  }

  if (options.dedup) {
    // one-a-day filter: same source, target, code, and date collapse; the
    // earliest record keeps its EventID and absorbs the others' provenance
    std::vector<EventRecord> merged;
    std::map<std::tuple<std::string, std::string, std::string, std::string>,
             size_t>
        first;
    for (EventRecord& rec : records) {
      auto key = std::make_tuple(rec.source_full, rec.target_full,
                                 rec.event_code, rec.date.yyyymmdd());
      auto [it, fresh] = first.try_emplace(key, merged.size());
      if (fresh) {
        merged.push_back(std::move(rec));
        continue;
      }
      EventRecord& keeper = merged[it->second];
      for (const std::string& url : rec.urls)
        if (std::find(keeper.urls.begin(), keeper.urls.end(), url) ==
            keeper.urls.end())
          keeper.urls.push_back(url);
      for (const std::string& source : rec.news_sources)
        if (std::find(keeper.news_sources.begin(), keeper.news_sources.end(),
                      source) == keeper.news_sources.end())
          keeper.news_sources.push_back(source);
    }
    records = std::move(merged);
  }

  std::sort(records.begin(), records.end(),
            [](const EventRecord& a, const EventRecord& b) {
              if (a.date != b.date) return a.date < b.date;
              return a.event_id < b.event_id;
            });

  result.manifest.emitted_event_count = int(records.size());
  result.manifest.finished_at = options.fixed_time.value_or(now_utc());
  result.records = std::move(records);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw PipelineError(PipelineError::Kind::NoInput,
                        "cannot create output directory " + out_dir + ": " +
                            ec.message());
  std::string stem = "phoenix-events." + date.yyyymmdd();
  result.records_path = (fs::path(out_dir) / (stem + ".tsv")).string();
  result.manifest_path =
      (fs::path(out_dir) / (stem + ".manifest.txt")).string();
  {
    std::ofstream out(result.records_path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw PipelineError(PipelineError::Kind::NoInput,
                          "cannot write " + result.records_path);
    write_records(out, result.records);
  }
  {
    std::ofstream out(result.manifest_path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw PipelineError(PipelineError::Kind::NoInput,
                          "cannot write " + result.manifest_path);
    out << to_text(result.manifest);
  }
  return result;
}

std::optional<ReportKind> parse_report_kind(const std::string& name) {
  if (name == "daily_counts") return ReportKind::DailyCounts;
  if (name == "top_sources") return ReportKind::TopSources;
  if (name == "top_actors") return ReportKind::TopActors;
  if (name == "top_entities") return ReportKind::TopEntities;
  if (name == "top_roles") return ReportKind::TopRoles;
  if (name == "top_issues") return ReportKind::TopIssues;
  if (name == "quad_histogram") return ReportKind::QuadHistogram;
  if (name == "entity_filter") return ReportKind::EntityFilter;
  return std::nullopt;
}

namespace {

std::string top_table(const std::map<std::string, int>& counts, int top_n) {
  std::vector<std::pair<std::string, int>> rows(counts.begin(), counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (top_n > 0 && int(rows.size()) > top_n) rows.resize(top_n);
  std::string out;
  for (const auto& [name, count] : rows)
    out += name + "\t" + std::to_string(count) + "\n";
  return out;
}

}  // namespace

std::string report(const std::vector<std::string>& record_files,
                   ReportKind kind, int top_n, const std::string& entity) {
  std::vector<EventRecord> records;
  for (const std::string& path : record_files) {
    std::vector<EventRecord> batch = read_records(path);
    records.insert(records.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
  }

  switch (kind) {
    case ReportKind::DailyCounts: {
      std::map<std::string, int> counts;
      for (const EventRecord& r : records) ++counts[r.date.yyyymmdd()];
      std::string out;
      for (const auto& [date, count] : counts)
        out += date + "\t" + std::to_string(count) + "\n";
      return out;
    }
    case ReportKind::TopSources: {
      std::map<std::string, int> counts;
      for (const EventRecord& r : records)
        for (const std::string& s : r.news_sources)
          if (!s.empty()) ++counts[s];
      return top_table(counts, top_n);
    }
    case ReportKind::TopActors: {
      std::map<std::string, int> counts;
      for (const EventRecord& r : records) {
        if (!r.source_full.empty()) ++counts[r.source_full];
        if (!r.target_full.empty()) ++counts[r.target_full];
      }
      return top_table(counts, top_n);
    }
    case ReportKind::TopEntities: {
      std::map<std::string, int> counts;
      for (const EventRecord& r : records) {
        if (!r.source_entity.empty()) ++counts[r.source_entity];
        if (!r.target_entity.empty()) ++counts[r.target_entity];
      }
      return top_table(counts, top_n);
    }
    case ReportKind::TopRoles: {
      std::map<std::string, int> counts;
      for (const EventRecord& r : records) {
        if (!r.source_role.empty()) ++counts[r.source_role];
        if (!r.target_role.empty()) ++counts[r.target_role];
      }
      return top_table(counts, top_n);
    }
    case ReportKind::TopIssues: {
      // presence per record, not occurrence totals
      std::map<std::string, int> counts;
      for (const EventRecord& r : records) {
        size_t start = 0;
        while (start < r.issues.size()) {
          size_t semi = r.issues.find(';', start);
          std::string piece = r.issues.substr(
              start, semi == std::string::npos ? std::string::npos
                                               : semi - start);
          size_t colon = piece.find(':');
          std::string tag = piece.substr(0, colon);
          if (!tag.empty()) ++counts[tag];
          if (semi == std::string::npos) break;
          start = semi + 1;
        }
      }
      return top_table(counts, top_n);
    }
    case ReportKind::QuadHistogram: {
      std::map<int, int> counts;
      for (const EventRecord& r : records) ++counts[r.quad_class];
      std::string out;
      for (const auto& [quad, count] : counts)
        out += std::to_string(quad) + "\t" + std::to_string(count) + "\n";
      return out;
    }
    case ReportKind::EntityFilter: {
      std::string out = record_header() + "\n";
      for (const EventRecord& r : records)
        if (r.source_entity == entity || r.target_entity == entity)
          out += to_tsv(r) + "\n";
      return out;
    }
  }
  throw PipelineError(PipelineError::Kind::UnknownKind, "unknown report kind");
}

CodingService::CodingService(const DictionarySet& dicts,
                             const EnrichTables& tables)
    : dicts_(dicts), tables_(tables) {
  tables_.dicts = &dicts;
}

CodingService::Reply CodingService::handle(const std::string& request_body) const {
  auto json_reply = [](int status, const nlohmann::json& j) {
    return Reply{status, "application/json", j.dump()};
  };
  try {
    nlohmann::json request = nlohmann::json::parse(request_body, nullptr, false);
    if (request.is_discarded() || !request.is_object())
      return json_reply(400, {{"error", "request body is not a JSON object"}});

    if (!request.contains("trees") || !request["trees"].is_array() ||
        request["trees"].empty())
      return json_reply(400, {{"error", "no parse trees in request"}});
    for (const auto& t : request["trees"])
      if (!t.is_string())
        return json_reply(400, {{"error", "trees must be strings"}});

    std::string date_text = request.value("date", "");
    auto date = parse_date(date_text);
    if (!date || !date->ok())
      return json_reply(422, {{"error", "invalid date '" + date_text + "'"}});

    std::vector<ParseTree> trees;
    trees.reserve(request["trees"].size());
    for (size_t i = 0; i < request["trees"].size(); ++i) {
      try {
        trees.push_back(parse_treebank(request["trees"][i].get<std::string>()));
      } catch (const TreebankError& e) {
        return json_reply(
            400, {{"error",
                   "tree " + std::to_string(i) + ": " + std::string(e.what())}});
      }
    }

    StoryDocument blank;
    blank.fetched_at = start_of_day(*date);
    std::vector<EventRecord> records;
    int seq = 0;
    for (size_t i = 0; i < trees.size(); ++i) {
      CodingOutcome outcome = code_sentence(trees[i], dicts_, *date);
      for (CodedEvent& ev : outcome.events) {
        ev.sentence_id = int(i);
        EventRecord rec = enrich_event(ev, blank, tables_);
        char suffix[16];
        snprintf(suffix, sizeof suffix, "%06d", ++seq);
        rec.event_id = date->yyyymmdd() + "-" + suffix;
        records.push_back(std::move(rec));
      }
    }
    std::ostringstream body;
    write_records(body, records);
    return Reply{200, "text/tab-separated-values", body.str()};
  } catch (const std::exception&) {
    return json_reply(500, {{"error", "internal error"}});
  }
}

struct HttpEndpoint::Impl {
  Impl(const DictionarySet& dicts, const EnrichTables& tables)
      : service(dicts, tables) {}

  CodingService service;
  httplib::Server server;
  std::thread thread;
  int port = -1;
};

HttpEndpoint::HttpEndpoint(const DictionarySet& dicts,
                           const EnrichTables& tables)
    : impl_(std::make_unique<Impl>(dicts, tables)) {
  impl_->server.Post("/code", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    CodingService::Reply reply = impl_->service.handle(req.body);
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  });
  impl_->server.Get("/health", [](const httplib::Request&,
                                  httplib::Response& res) {
    res.set_content(nlohmann::json{{"status", "ok"}}.dump(),
                    "application/json");
  });
}

HttpEndpoint::~HttpEndpoint() { stop(); }

bool HttpEndpoint::start(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) return false;
    impl_->port = bound;
  } else {
    if (!impl_->server.bind_to_port(host, port)) return false;
    impl_->port = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  for (int i = 0; i < 1000 && !impl_->server.is_running(); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  return impl_->server.is_running();
}

int HttpEndpoint::port() const { return impl_->port; }

void HttpEndpoint::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpEndpoint::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace phoenix
