#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "fixture_server.hpp"
#include "json.hpp"
#include "phoenix/ingest.hpp"
#include "test_util.hpp"

using namespace phoenix;

namespace {

IngestOptions fast_options() {
  IngestOptions options;
  options.timeout_ms = 5000;
  options.max_retries = 3;
  options.politeness_ms = 0;
  options.backoff_ms = 1;
  options.pool_size = 4;
  options.fixed_time = start_of_day(Date{2014, 6, 20});
  return options;
}

FeedConfig three_feeds(const testutil::FixtureServer& server) {
  FeedConfig config;
  config.entries = {
      {"Examplewire", server.url("/feeds/feed1.xml"), "en"},
      {"Wireline", server.url("/feeds/feed2.xml"), "en"},
      {"Globalreport", server.url("/feeds/feed3.xml"), "en"}};
  return config;
}

const TaskResult* result_for(const IngestReport& report,
                             const std::string& url_fragment) {
  for (const TaskResult& r : report.results)
    if (r.task.url.find(url_fragment) != std::string::npos) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("feed config loads sources and skips comments") {
  testutil::TempDir tmp("feeds");
  auto path = tmp.sub("feeds.txt");
  testutil::write_file(path,
                       "# sources\n"
                       "Examplewire\thttp://feeds.example.com/world.xml\ten\n"
                       "\n"
                       "Wireline\thttps://wireline.example.org/rss\ten\n");
  FeedConfig config = load_feed_config(path);
  REQUIRE(config.entries.size() == 2);
  CHECK(config.entries[0].source_name == "Examplewire");
  CHECK(config.entries[0].feed_url == "http://feeds.example.com/world.xml");
  CHECK(config.entries[0].language == "en");
  CHECK(config.entries[1].source_name == "Wireline");
}

TEST_CASE("feed config errors carry path and line") {
  testutil::TempDir tmp("feeds");
  auto path = tmp.sub("feeds.txt");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_feed_config(tmp.sub("absent.txt")), IngestError);
  }
  SUBCASE("wrong column count") {
    testutil::write_file(path, "Examplewire\thttp://x.example.com/rss\n");
    try {
      load_feed_config(path);
      FAIL("expected IngestError");
    } catch (const IngestError& e) {
      CHECK(e.kind() == IngestError::Kind::BadConfig);
      CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
  }
  SUBCASE("URL without scheme") {
    testutil::write_file(path, "# c\nExamplewire\tfeeds.example.com/rss\ten\n");
    try {
      load_feed_config(path);
      FAIL("expected IngestError");
    } catch (const IngestError& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
      CHECK(std::string(e.what()).find("scheme") != std::string::npos);
    }
  }
  SUBCASE("duplicate source name") {
    testutil::write_file(path,
                         "A\thttp://a.example.com/rss\ten\n"
                         "A\thttp://b.example.com/rss\ten\n");
    CHECK_THROWS_AS(load_feed_config(path), IngestError);
  }
  SUBCASE("empty source name") {
    testutil::write_file(path, "\thttp://a.example.com/rss\ten\n");
    CHECK_THROWS_AS(load_feed_config(path), IngestError);
  }
}

TEST_CASE("feed link extraction handles RSS, Atom, CDATA, and entities") {
  CHECK(feed_links("<rss><channel>"
                   "<item><link>http://x.example.com/1</link></item>"
                   "<item><link>http://x.example.com/2</link></item>"
                   "</channel></rss>") ==
        std::vector<std::string>{"http://x.example.com/1",
                                 "http://x.example.com/2"});

  // Atom link elements carry the URL in an href attribute.
  CHECK(feed_links("<feed>"
                   "<entry><link rel=\"alternate\" "
                   "href=\"http://x.example.com/atom1\"/></entry>"
                   "</feed>") ==
        std::vector<std::string>{"http://x.example.com/atom1"});

  CHECK(feed_links("<rss><item><link><![CDATA[http://x.example.com/cdata]]>"
                   "</link></item></rss>") ==
        std::vector<std::string>{"http://x.example.com/cdata"});

  CHECK(feed_links("<rss><item><link>http://x.example.com/?a=1&amp;b=2"
                   "</link></item></rss>") ==
        std::vector<std::string>{"http://x.example.com/?a=1&b=2"});

  // Only the first link per item counts; items without links contribute none.
  CHECK(feed_links("<rss><item><link>http://x.example.com/first</link>"
                   "<link>http://x.example.com/second</link></item>"
                   "<item><title>no link</title></item></rss>") ==
        std::vector<std::string>{"http://x.example.com/first"});

  CHECK(feed_links("<html><p>not a feed</p></html>").empty());
}

TEST_CASE("content extraction matches the expected fixtures") {
  for (const char* name : {"article_nav", "article_ads"}) {
    CAPTURE(name);
    auto expected = nlohmann::json::parse(testutil::read_file(
        testutil::fixture_path(std::string("html/") + name +
                               "_expected.json")));
    auto [title, body] = extract_content(testutil::read_file(
        testutil::fixture_path(std::string("html/") + name + ".html")));
    CHECK(title == expected["title"].get<std::string>());
    CHECK(body == expected["body_text"].get<std::string>());
  }
}

TEST_CASE("pages without a real story are rejected") {
  try {
    extract_content(
        testutil::read_file(testutil::fixture_path("html/nav_only.html")));
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.kind() == IngestError::Kind::NoContent);
  }
  CHECK_THROWS_AS(extract_content("<html><body></body></html>"), IngestError);
  CHECK_THROWS_AS(extract_content(""), IngestError);
}

TEST_CASE("title falls back to og:title when <title> is absent") {
  std::string paragraph(400, 'x');
  std::string html =
      "<html><head><meta property=\"og:title\" content=\"Meta&amp;headline\"/>"
      "</head><body><div><p>" + paragraph + "</p></div></body></html>";
  auto [title, body] = extract_content(html);
  CHECK(title == "Meta&headline");
  CHECK(body == paragraph);
}

TEST_CASE("one poll cycle enqueues each canonical link once") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());

  PollResult poll = poll_feeds(three_feeds(server), store, fast_options());
  CHECK(poll.errors.empty());
  // 22 item links across the three feeds: 16 unique articles, one flaky and
  // one missing page, and 4 repeated offers.
  CHECK(poll.tasks.size() == 18);
  CHECK(poll.duplicate == 4);
  CHECK(store.links().size() == 18);

  // Source attribution follows the feed that first offered the link.
  auto a01 = std::find_if(poll.tasks.begin(), poll.tasks.end(),
                          [](const FetchTask& t) {
                            return t.url.find("a01.html") != std::string::npos;
                          });
  REQUIRE(a01 != poll.tasks.end());
  CHECK(a01->source_name == "Examplewire");

  // Nothing fetched yet, so a second cycle re-offers everything.
  PollResult again = poll_feeds(three_feeds(server), store, fast_options());
  CHECK(again.tasks.size() == 18);
  CHECK(again.duplicate == 4);
  CHECK(store.links().size() == 18);
}

TEST_CASE("a broken feed is reported without aborting the cycle") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());

  FeedConfig config;
  config.entries = {
      {"Deadwire", "http://127.0.0.1:1/feeds/dead.xml", "en"},
      {"NotXml", server.url("/articles/a01.html"), "en"},
      {"Gone", server.url("/feeds/nothere.xml"), "en"},
      {"Examplewire", server.url("/feeds/feed1.xml"), "en"}};
  PollResult poll = poll_feeds(config, store, fast_options());

  REQUIRE(poll.errors.size() == 3);
  CHECK(poll.errors[0].feed_url == "http://127.0.0.1:1/feeds/dead.xml");
  CHECK(poll.errors[0].message.find("unreachable") != std::string::npos);
  CHECK(poll.errors[1].message.find("not an RSS or Atom") != std::string::npos);
  CHECK(poll.errors[2].message.find("HTTP 404") != std::string::npos);
  CHECK(poll.tasks.size() == 9);  // feed1 still contributed
}

TEST_CASE("an empty feed yields no tasks and no errors") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());

  FeedConfig config;
  config.entries = {{"Quietwire", server.url("/feeds/empty.xml"), "en"}};
  PollResult poll = poll_feeds(config, store, fast_options());
  CHECK(poll.tasks.empty());
  CHECK(poll.errors.empty());
  CHECK(poll.duplicate == 0);
}

TEST_CASE("workers fetch, retry, and persist; failures never abort the batch") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());
  IngestOptions options = fast_options();

  PollResult poll = poll_feeds(three_feeds(server), store, options);
  REQUIRE(poll.tasks.size() == 18);
  IngestReport report = run_workers(poll.tasks, options.pool_size, store,
                                    options);

  CHECK(report.fetched == 16);
  CHECK(report.failed == 2);
  CHECK(report.duplicate == 0);
  CHECK(store.document_count() == 16);

  // The always-500 page exhausts all three attempts; 404 fails immediately.
  CHECK(server.hits("/articles/flaky.html") == 3);
  CHECK(server.hits("/articles/missing.html") == 1);
  const TaskResult* flaky = result_for(report, "flaky.html");
  REQUIRE(flaky != nullptr);
  CHECK_FALSE(flaky->ok);
  CHECK(flaky->attempts == 3);
  CHECK(flaky->error == "HTTP 500");
  const TaskResult* missing = result_for(report, "missing.html");
  REQUIRE(missing != nullptr);
  CHECK(missing->attempts == 1);
  CHECK(missing->error == "HTTP 404");

  // Failed pages stay as links without documents, ready for a later cycle.
  auto pending = store.links_without_documents();
  REQUIRE(pending.size() == 2);
  CHECK(pending[0].find("flaky.html") != std::string::npos);
  CHECK(pending[1].find("missing.html") != std::string::npos);

  // Stored documents carry extraction output and fixture metadata.
  const TaskResult* a01 = result_for(report, "a01.html");
  REQUIRE(a01 != nullptr);
  REQUIRE(a01->ok);
  auto doc = store.load_document(a01->story_id);
  REQUIRE(doc.has_value());
  CHECK(doc->source_name == "Examplewire");
  CHECK(doc->status == StoryStatus::Fetched);
  CHECK(doc->fetched_at == *options.fixed_time);
  CHECK(doc->title.find(" - ") != std::string::npos);
  CHECK(doc->body_text.size() > 250);
  CHECK_FALSE(doc->parse_trees.has_value());
}

TEST_CASE("a page that fails twice succeeds on the third attempt") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());
  IngestOptions options = fast_options();

  std::vector<FetchTask> tasks = {
      {server.url("/articles/wobbly.html"), "Testwire", *options.fixed_time, 0}};
  IngestReport report = run_workers(tasks, 2, store, options);

  CHECK(report.fetched == 1);
  CHECK(report.failed == 0);
  REQUIRE(report.results.size() == 1);
  CHECK(report.results[0].ok);
  CHECK(report.results[0].attempts == 3);
  CHECK(server.hits("/articles/wobbly.html") == 3);
  auto doc = store.load_document(report.results[0].story_id);
  REQUIRE(doc.has_value());
  CHECK(doc->title == "Agreement signed - Testwire");
}

TEST_CASE("fetching an already-stored story counts as a duplicate") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());
  IngestOptions options = fast_options();

  std::vector<FetchTask> task = {
      {server.url("/articles/a01.html"), "Examplewire", *options.fixed_time, 0}};
  IngestReport first = run_workers(task, 1, store, options);
  CHECK(first.fetched == 1);

  IngestReport second = run_workers(task, 1, store, options);
  CHECK(second.fetched == 0);
  CHECK(second.duplicate == 1);
  CHECK(second.failed == 0);
  CHECK(second.results[0].ok);
  CHECK(second.results[0].duplicate);
  CHECK(store.document_count() == 1);
}

TEST_CASE("a page without extractable content fails without retries") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());
  IngestOptions options = fast_options();

  // empty.xml parses as XML, not HTML, and has no content blocks.
  std::vector<FetchTask> tasks = {
      {server.url("/feeds/empty.xml"), "Quietwire", *options.fixed_time, 0}};
  IngestReport report = run_workers(tasks, 1, store, options);
  CHECK(report.failed == 1);
  CHECK(report.results[0].attempts == 1);
  CHECK(report.results[0].error.find("no content") != std::string::npos);
  CHECK(store.document_count() == 0);
}

TEST_CASE("links from an interrupted cycle are re-enqueued") {
  testutil::FixtureServer server;
  testutil::TempDir tmp("store");
  DocumentStore store(tmp.str());
  IngestOptions options = fast_options();

  // Simulate a crash after link recording but before any fetch.
  std::string orphan = canonical_url(server.url("/articles/a05.html"));
  store.record_link(orphan);

  FeedConfig config;  // no feeds this cycle
  PollResult poll = poll_feeds(config, store, options);
  REQUIRE(poll.tasks.size() == 1);
  CHECK(poll.tasks[0].url == orphan);
  CHECK(poll.tasks[0].source_name == "");  // original source unknown

  IngestReport report = run_workers(poll.tasks, 1, store, options);
  CHECK(report.fetched == 1);
  CHECK(store.links_without_documents().empty());

  // A later cycle must not re-enqueue it again.
  PollResult after = poll_feeds(config, store, options);
  CHECK(after.tasks.empty());
}

TEST_CASE("results are identical regardless of pool size") {
  testutil::FixtureServer server;
  IngestOptions options = fast_options();

  auto run_with_pool = [&](int pool) {
    testutil::TempDir tmp("store");
    DocumentStore store(tmp.str());
    PollResult poll = poll_feeds(three_feeds(server), store, options);
    IngestReport report = run_workers(poll.tasks, pool, store, options);
    return std::make_pair(std::make_tuple(report.fetched, report.failed,
                                          report.duplicate),
                          store.load_documents());
  };

  auto [counts1, docs1] = run_with_pool(1);
  auto [counts4, docs4] = run_with_pool(4);
  CHECK(counts1 == counts4);
  CHECK(docs1 == docs4);
  REQUIRE(docs1.size() == 16);
}
