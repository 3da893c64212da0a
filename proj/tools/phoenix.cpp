// Command-line front end for the pipeline: ingestion, parse import, coding,
// daily runs, reports, dictionary validation, and the HTTP endpoint.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phoenix/coder.hpp"
#include "phoenix/dictionaries.hpp"
#include "phoenix/enrich.hpp"
#include "phoenix/ingest.hpp"
#include "phoenix/log.hpp"
#include "phoenix/pipeline.hpp"
#include "phoenix/store.hpp"
#include "phoenix/treebank.hpp"

namespace {

struct Paths {
  std::string actors = "data/dicts/actors.txt";
  std::string verbs = "data/dicts/verbs.txt";
  std::string issues = "data/dicts/issues.txt";
  std::string code_sets = "data/dicts/code_sets.txt";
  std::string goldstein = "data/goldstein.tsv";
  std::string gazetteer = "data/gazetteer.tsv";
  std::string store = "store";
};

phoenix::DictionarySet load_dicts(const Paths& paths) {
  return phoenix::load_dictionaries(paths.actors, paths.verbs, paths.issues,
                                    paths.code_sets);
}

phoenix::Timestamp parse_time_flag(const std::string& text) {
  auto t = phoenix::parse_iso8601(text);
  if (!t)
    throw phoenix::Error("bad --fixed-time '" + text +
                         "' (expected e.g. 2014-06-20T12:00:00Z)");
  return *t;
}

phoenix::Date parse_date_flag(const std::string& text) {
  auto d = phoenix::parse_date(text);
  if (!d || !d->ok())
    throw phoenix::Error("bad --date '" + text +
                         "' (expected YYYY-MM-DD or YYYYMMDD)");
  return *d;
}

// Parse-tree import file: blocks of one `# story: <id>` or `# url: <url>`
// header followed by one bracketed tree per line, separated by blank lines.
struct ParseBlock {
  std::string story_id;
  std::vector<std::string> trees;
  int line = 0;
};

std::vector<ParseBlock> read_parse_blocks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw phoenix::Error("cannot open " + path);
  std::vector<ParseBlock> blocks;
  ParseBlock current;
  std::string line;
  int line_no = 0;
  auto flush = [&] {
    if (current.story_id.empty() && current.trees.empty()) return;
    if (current.story_id.empty())
      throw phoenix::Error(path + ":" + std::to_string(current.line) +
                           ": trees before any '# story:' or '# url:' header");
    blocks.push_back(std::move(current));
    current = ParseBlock{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    auto header = [&](const std::string& prefix) -> std::string {
      if (line.rfind(prefix, 0) != 0) return "";
      std::string rest = line.substr(prefix.size());
      size_t b = rest.find_first_not_of(" \t");
      return b == std::string::npos ? "" : rest.substr(b);
    };
    if (std::string id = header("# story:"); !id.empty()) {
      flush();
      current.story_id = id;
      current.line = line_no;
      continue;
    }
    if (std::string url = header("# url:"); !url.empty()) {
      flush();
      current.story_id = phoenix::story_id_for(url);
      current.line = line_no;
      continue;
    }
    if (line[0] == '#') continue;
    if (current.line == 0) current.line = line_no;
    current.trees.push_back(line);
  }
  flush();
  return blocks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phoenix: news ingestion and political event coding pipeline"};
  app.require_subcommand(1);

  Paths paths;
  std::string log_level = "warn";
  app.add_option("--actors", paths.actors, "actor dictionary file")
      ->capture_default_str();
  app.add_option("--verbs", paths.verbs, "verb dictionary file")
      ->capture_default_str();
  app.add_option("--issues", paths.issues, "issue keyword file")
      ->capture_default_str();
  app.add_option("--code-sets", paths.code_sets, "role/attribute/entity sets")
      ->capture_default_str();
  app.add_option("--goldstein", paths.goldstein, "event score table")
      ->capture_default_str();
  app.add_option("--gazetteer", paths.gazetteer, "place table for --geolocate")
      ->capture_default_str();
  app.add_option("--store", paths.store, "document store directory")
      ->capture_default_str();
  app.add_option("--log-level", log_level, "debug|info|warn|error|off")
      ->capture_default_str();

  std::string feeds_path, fixed_time, input_path, date_text;
  std::string out_dir = "out";
  std::string host = "127.0.0.1";
  std::string report_kind_name, entity;
  std::vector<std::string> record_files;
  int port = 8080, pool = 4, top_n = 10;
  phoenix::IngestOptions ingest_opts;
  bool no_dedup = false, geolocate_flag = false;

  CLI::App* poll = app.add_subcommand(
      "poll", "poll feeds once and enqueue unseen article links");
  poll->add_option("--feeds", feeds_path, "feed list file")->required();
  poll->add_option("--fixed-time", fixed_time, "pin timestamps (ISO-8601)");

  CLI::App* fetch = app.add_subcommand(
      "fetch", "poll feeds and fetch pending articles into the store");
  fetch->add_option("--feeds", feeds_path, "feed list file")->required();
  fetch->add_option("--fixed-time", fixed_time, "pin timestamps (ISO-8601)");
  fetch->add_option("--pool", pool, "worker count")->capture_default_str();
  fetch->add_option("--timeout-ms", ingest_opts.timeout_ms, "per-request timeout")
      ->capture_default_str();
  fetch->add_option("--retries", ingest_opts.max_retries, "attempts per task")
      ->capture_default_str();
  fetch->add_option("--politeness-ms", ingest_opts.politeness_ms,
                    "per-host delay")
      ->capture_default_str();
  fetch->add_option("--backoff-ms", ingest_opts.backoff_ms,
                    "initial retry backoff")
      ->capture_default_str();

  CLI::App* import_parses = app.add_subcommand(
      "import-parses", "attach externally produced parse trees to stored docs");
  import_parses->add_option("--input", input_path, "treebank blocks file")
      ->required();

  CLI::App* code = app.add_subcommand(
      "code", "preview sentence codings for parsed documents (no writes)");
  code->add_option("--date", date_text, "only documents fetched on this date");

  CLI::App* run_daily_cmd =
      app.add_subcommand("run-daily", "code, enrich, filter, and write one day");
  run_daily_cmd->add_option("--date", date_text, "day to process")->required();
  run_daily_cmd->add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  run_daily_cmd->add_flag("--no-dedup", no_dedup,
                          "emit every mention (skip the one-a-day filter)");
  run_daily_cmd->add_flag("--geolocate", geolocate_flag,
                          "fill geolocation columns from the gazetteer");
  run_daily_cmd->add_option("--fixed-time", fixed_time,
                            "pin manifest timestamps (ISO-8601)");

  CLI::App* serve_cmd =
      app.add_subcommand("serve", "HTTP coding endpoint (POST /code)");
  serve_cmd->add_option("--host", host, "bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "bind port")->capture_default_str();
  serve_cmd->add_flag("--geolocate", geolocate_flag,
                      "fill geolocation columns from the gazetteer");

  CLI::App* report_cmd =
      app.add_subcommand("report", "aggregate one or more records files");
  report_cmd
      ->add_option("--kind", report_kind_name,
                   "daily_counts|top_sources|top_actors|top_entities|"
                   "top_roles|top_issues|quad_histogram|entity_filter")
      ->required();
  report_cmd->add_option("--top", top_n, "row limit for top_* kinds")
      ->capture_default_str();
  report_cmd->add_option("--entity", entity, "entity code for entity_filter");
  report_cmd->add_option("files", record_files, "records TSV files")
      ->required()
      ->expected(-1);

  CLI::App* validate =
      app.add_subcommand("validate-dicts", "load every table and report counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!phoenix::log::set_level_by_name(log_level))
      throw phoenix::Error("unknown --log-level '" + log_level + "'");

    if (*poll) {
      phoenix::FeedConfig config = phoenix::load_feed_config(feeds_path);
      phoenix::DocumentStore store(paths.store);
      phoenix::IngestOptions opts;
      if (!fixed_time.empty()) opts.fixed_time = parse_time_flag(fixed_time);
      phoenix::PollResult result = phoenix::poll_feeds(config, store, opts);
      for (const phoenix::FetchTask& task : result.tasks)
        std::cout << "task\t" << task.url << "\t" << task.source_name << "\n";
      for (const phoenix::PollError& err : result.errors)
        std::cerr << "feed error: " << err.feed_url << ": " << err.message
                  << "\n";
      std::cout << "tasks: " << result.tasks.size() << "\n"
                << "duplicate: " << result.duplicate << "\n"
                << "errors: " << result.errors.size() << "\n";
    } else if (*fetch) {
      phoenix::FeedConfig config = phoenix::load_feed_config(feeds_path);
      phoenix::DocumentStore store(paths.store);
      ingest_opts.pool_size = pool;
      if (!fixed_time.empty())
        ingest_opts.fixed_time = parse_time_flag(fixed_time);
      phoenix::PollResult polled =
          phoenix::poll_feeds(config, store, ingest_opts);
      for (const phoenix::PollError& err : polled.errors)
        std::cerr << "feed error: " << err.feed_url << ": " << err.message
                  << "\n";
      phoenix::IngestReport report =
          phoenix::run_workers(polled.tasks, pool, store, ingest_opts);
      std::cout << "fetched: " << report.fetched << "\n"
                << "failed: " << report.failed << "\n"
                << "duplicate: " << report.duplicate + polled.duplicate << "\n";
    } else if (*import_parses) {
      phoenix::DocumentStore store(paths.store);
      int imported = 0, failures = 0;
      for (const ParseBlock& block : read_parse_blocks(input_path)) {
        auto doc = store.load_document(block.story_id);
        if (!doc) {
          std::cerr << "no document " << block.story_id << "\n";
          ++failures;
          continue;
        }
        std::string bad;
        for (const std::string& tree : block.trees) {
          try {
            phoenix::parse_treebank(tree);
          } catch (const phoenix::TreebankError& e) {
            bad = e.what();
            break;
          }
        }
        if (!bad.empty()) {
          doc->status = phoenix::StoryStatus::Failed;
          store.update_document(*doc);
          std::cerr << "failed " << block.story_id << ": " << bad << "\n";
          ++failures;
          continue;
        }
        doc->parse_trees = block.trees;
        if (doc->status == phoenix::StoryStatus::Fetched)
          doc->status = phoenix::StoryStatus::Parsed;
        store.update_document(*doc);
        std::cout << "parsed\t" << block.story_id << "\t" << block.trees.size()
                  << " trees\n";
        ++imported;
      }
      std::cout << "imported: " << imported << "\n"
                << "failures: " << failures << "\n";
      return failures == 0 ? 0 : 2;
    } else if (*code) {
      phoenix::DictionarySet dicts = load_dicts(paths);
      phoenix::DocumentStore store(paths.store);
      std::optional<phoenix::DateRange> range;
      if (!date_text.empty()) {
        phoenix::Date d = parse_date_flag(date_text);
        range = phoenix::DateRange{d, d};
      }
      std::cout << "story_id\tsentence\toutcome\tsource\ttarget\tcode\ttrigger\n";
      for (const phoenix::StoryDocument& doc :
           store.load_documents(phoenix::StoryStatus::Parsed, range)) {
        if (!doc.parse_trees) continue;
        phoenix::Date at = phoenix::date_of(doc.fetched_at);
        for (size_t i = 0; i < doc.parse_trees->size(); ++i) {
          phoenix::ParseTree tree =
              phoenix::parse_treebank((*doc.parse_trees)[i]);
          phoenix::CodingOutcome outcome =
              phoenix::code_sentence(tree, dicts, at);
          if (outcome.skipped_reason) {
            std::cout << doc.story_id << "\t" << i << "\t"
                      << to_string(*outcome.skipped_reason) << "\t\t\t\t\n";
            continue;
          }
          for (const phoenix::CodedEvent& ev : outcome.events)
            std::cout << doc.story_id << "\t" << i << "\tcoded\t"
                      << ev.source_code << "\t"
                      << ev.target_code.value_or("") << "\t" << ev.event_code
                      << "\t" << ev.trigger_text << "\n";
        }
      }
    } else if (*run_daily_cmd) {
      phoenix::DictionarySet dicts = load_dicts(paths);
      phoenix::GoldsteinTable goldstein =
          phoenix::GoldsteinTable::load(paths.goldstein);
      std::optional<phoenix::Gazetteer> gazetteer;
      if (geolocate_flag)
        gazetteer = phoenix::Gazetteer::load(paths.gazetteer);
      phoenix::EnrichTables tables{&dicts, &goldstein,
                                   gazetteer ? &*gazetteer : nullptr};
      phoenix::DocumentStore store(paths.store);
      phoenix::RunOptions options;
      options.dedup = !no_dedup;
      if (!fixed_time.empty())
        options.fixed_time = parse_time_flag(fixed_time);
      phoenix::RunResult result = phoenix::run_daily(
          parse_date_flag(date_text), store, tables, out_dir, options);
      std::cout << "wrote " << result.records_path << "\n"
                << "wrote " << result.manifest_path << "\n"
                << to_text(result.manifest);
    } else if (*serve_cmd) {
      phoenix::DictionarySet dicts = load_dicts(paths);
      phoenix::GoldsteinTable goldstein =
          phoenix::GoldsteinTable::load(paths.goldstein);
      std::optional<phoenix::Gazetteer> gazetteer;
      if (geolocate_flag)
        gazetteer = phoenix::Gazetteer::load(paths.gazetteer);
      phoenix::EnrichTables tables{&dicts, &goldstein,
                                   gazetteer ? &*gazetteer : nullptr};
      phoenix::HttpEndpoint endpoint(dicts, tables);
      if (!endpoint.start(host, port))
        throw phoenix::Error("cannot bind " + host + ":" +
                             std::to_string(port));
      std::cout << "listening on http://" << host << ":" << endpoint.port()
                << "\n";
      endpoint.wait();
    } else if (*report_cmd) {
      auto kind = phoenix::parse_report_kind(report_kind_name);
      if (!kind)
        throw phoenix::PipelineError(phoenix::PipelineError::Kind::UnknownKind,
                                     "unknown report kind '" +
                                         report_kind_name + "'");
      if (*kind == phoenix::ReportKind::EntityFilter && entity.empty())
        throw phoenix::Error("entity_filter needs --entity");
      std::cout << phoenix::report(record_files, *kind, top_n, entity);
    } else if (*validate) {
      phoenix::DictionarySet dicts = load_dicts(paths);
      phoenix::GoldsteinTable goldstein =
          phoenix::GoldsteinTable::load(paths.goldstein);
      std::cout << "version: " << dicts.version() << "\n"
                << "actors: " << dicts.actor_count() << "\n"
                << "verbs: " << dicts.verb_count() << "\n"
                << "issues: " << dicts.issue_count() << "\n"
                << "roles: " << dicts.roles().size() << "\n"
                << "attributes: " << dicts.attributes().size() << "\n"
                << "special_entities: " << dicts.special_entities().size()
                << "\n"
                << "score_entries: " << goldstein.size() << "\n"
                << "score_version: " << goldstein.version() << "\n";
    }
  } catch (const phoenix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
