#include "phoenix/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>

#include "phoenix/log.hpp"

namespace phoenix {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
  return out;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += char(cp);
  } else if (cp < 0x800) {
    out += char(0xC0 | (cp >> 6));
    out += char(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += char(0xE0 | (cp >> 12));
    out += char(0x80 | ((cp >> 6) & 0x3F));
    out += char(0x80 | (cp & 0x3F));
  } else {
    out += char(0xF0 | (cp >> 18));
    out += char(0x80 | ((cp >> 12) & 0x3F));
    out += char(0x80 | ((cp >> 6) & 0x3F));
    out += char(0x80 | (cp & 0x3F));
  }
}

std::string decode_entities(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    size_t semi = text.find(';', i + 1);
    if (semi == std::string::npos || semi - i > 10) {
      out += text[i++];
      continue;
    }
    std::string name = text.substr(i + 1, semi - i - 1);
    if (name == "amp") out += '&';
    else if (name == "lt") out += '<';
    else if (name == "gt") out += '>';
    else if (name == "quot") out += '"';
    else if (name == "apos") out += '\'';
    else if (name == "nbsp") out += ' ';
    else if (name.size() > 1 && name[0] == '#') {
      unsigned long cp = 0;
      try {
        cp = (name[1] == 'x' || name[1] == 'X')
                 ? std::stoul(name.substr(2), nullptr, 16)
                 : std::stoul(name.substr(1));
      } catch (const std::exception&) {
        out += text[i++];
        continue;
      }
      append_utf8(out, cp);
    } else {
      out += text[i++];  // unknown entity, keep literal
      continue;
    }
    i = semi + 1;
  }
  return out;
}

std::string squeeze(const std::string& text) {
  std::string out;
  bool pending = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
  }
  return out;
}

size_t find_ci(const std::string& hay, const std::string& needle, size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string::npos;
  for (size_t i = from; i + needle.size() <= hay.size(); ++i) {
    size_t k = 0;
    for (; k < needle.size(); ++k) {
      char a = hay[i + k], b = needle[k];
      if (a >= 'A' && a <= 'Z') a = char(a - 'A' + 'a');
      if (b >= 'A' && b <= 'Z') b = char(b - 'A' + 'a');
      if (a != b) break;
    }
    if (k == needle.size()) return i;
  }
  return std::string::npos;
}

// ---------------------------------------------------------------------------
// Tag-soup HTML model. Nodes live in one arena; children are indices, so
// growing the arena never invalidates structure.

struct HtmlNode {
  std::string tag;  // empty for text nodes
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<int> kids;
  std::string text;
};

struct HtmlDoc {
  std::vector<HtmlNode> arena;
  int root = 0;

  const HtmlNode& at(int i) const { return arena[i]; }
};

const std::set<std::string>& void_tags() {
  static const std::set<std::string> tags = {
      "br",  "img",   "meta",  "link",  "hr",    "input", "area",
      "base", "col",  "embed", "source", "track", "wbr"};
  return tags;
}

const std::set<std::string>& block_tags() {
  static const std::set<std::string> tags = {
      "p",  "div",   "section", "article", "ul",     "ol",    "table",
      "h1", "h2",    "h3",      "h4",      "h5",     "h6",    "blockquote",
      "main", "aside", "header", "footer", "nav",    "form"};
  return tags;
}

std::string attr_of(const HtmlNode& node, const std::string& name) {
  for (const auto& [k, v] : node.attrs)
    if (k == name) return v;
  return "";
}

HtmlDoc parse_html(const std::string& html) {
  HtmlDoc doc;
  doc.arena.push_back(HtmlNode{"#root", {}, {}, ""});
  std::vector<int> open = {0};

  auto add_text = [&](const std::string& raw) {
    if (raw.find_first_not_of(" \t\r\n") == std::string::npos) return;
    doc.arena.push_back(HtmlNode{"", {}, {}, decode_entities(raw)});
    doc.arena[open.back()].kids.push_back(int(doc.arena.size() - 1));
  };

  size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      size_t lt = html.find('<', i);
      add_text(html.substr(i, lt == std::string::npos ? std::string::npos
                                                      : lt - i));
      if (lt == std::string::npos) break;
      i = lt;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      size_t end = html.find("-->", i + 4);
      i = end == std::string::npos ? html.size() : end + 3;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      size_t end = html.find('>', i);
      i = end == std::string::npos ? html.size() : end + 1;
      continue;
    }
    bool closing = i + 1 < html.size() && html[i + 1] == '/';
    size_t p = i + (closing ? 2 : 1);
    size_t name_start = p;
    while (p < html.size() && (isalnum((unsigned char)html[p]) || html[p] == '-'))
      ++p;
    std::string tag = lower(html.substr(name_start, p - name_start));
    if (tag.empty()) {  // stray '<'
      add_text("<");
      ++i;
      continue;
    }

    // attributes up to '>', honoring quotes
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_close = false;
    while (p < html.size() && html[p] != '>') {
      if (html[p] == '/' && p + 1 < html.size() && html[p + 1] == '>') {
        self_close = true;
        ++p;
        break;
      }
      if (isspace((unsigned char)html[p])) {
        ++p;
        continue;
      }
      size_t an = p;
      while (p < html.size() && !isspace((unsigned char)html[p]) &&
             html[p] != '=' && html[p] != '>' && html[p] != '/')
        ++p;
      std::string aname = lower(html.substr(an, p - an));
      std::string avalue;
      while (p < html.size() && isspace((unsigned char)html[p])) ++p;
      if (p < html.size() && html[p] == '=') {
        ++p;
        while (p < html.size() && isspace((unsigned char)html[p])) ++p;
        if (p < html.size() && (html[p] == '"' || html[p] == '\'')) {
          char q = html[p++];
          size_t vs = p;
          while (p < html.size() && html[p] != q) ++p;
          avalue = html.substr(vs, p - vs);
          if (p < html.size()) ++p;
        } else {
          size_t vs = p;
          while (p < html.size() && !isspace((unsigned char)html[p]) &&
                 html[p] != '>')
            ++p;
          avalue = html.substr(vs, p - vs);
        }
      }
      if (!aname.empty()) attrs.emplace_back(aname, decode_entities(avalue));
    }
    if (p < html.size()) ++p;  // past '>'
    i = p;

    if (closing) {
      for (size_t d = open.size(); d-- > 1;) {
        if (doc.arena[open[d]].tag == tag) {
          open.resize(d);
          break;
        }
      }
      continue;
    }

    if (tag == "script" || tag == "style" || tag == "noscript") {
      size_t end = find_ci(html, "</" + tag, i);
      if (end == std::string::npos) break;
      size_t gt = html.find('>', end);
      i = gt == std::string::npos ? html.size() : gt + 1;
      continue;
    }

    // a block element implicitly terminates an open paragraph
    if (block_tags().count(tag)) {
      while (open.size() > 1 && doc.arena[open.back()].tag == "p")
        open.pop_back();
    }

    doc.arena.push_back(HtmlNode{tag, std::move(attrs), {}, ""});
    int idx = int(doc.arena.size() - 1);
    doc.arena[open.back()].kids.push_back(idx);
    if (!self_close && !void_tags().count(tag)) open.push_back(idx);
  }
  return doc;
}

void gather_text(const HtmlDoc& doc, int idx, std::string& out) {
  const HtmlNode& n = doc.at(idx);
  if (n.tag.empty()) {
    out += n.text;
    out += ' ';
    return;
  }
  for (int kid : n.kids) gather_text(doc, kid, out);
}

std::string node_text(const HtmlDoc& doc, int idx) {
  std::string raw;
  gather_text(doc, idx, raw);
  return squeeze(raw);
}

void text_stats(const HtmlDoc& doc, int idx, bool in_link, long& total,
                long& linked) {
  const HtmlNode& n = doc.at(idx);
  if (n.tag.empty()) {
    long len = long(squeeze(n.text).size());
    total += len;
    if (in_link) linked += len;
    return;
  }
  bool link = in_link || n.tag == "a";
  for (int kid : n.kids) text_stats(doc, kid, link, total, linked);
}

void collect_tag(const HtmlDoc& doc, int idx, const std::string& tag,
                 std::vector<int>& out) {
  const HtmlNode& n = doc.at(idx);
  if (n.tag == tag) out.push_back(idx);
  for (int kid : n.kids) collect_tag(doc, kid, tag, out);
}

}  // namespace

std::pair<std::string, std::string> extract_content(const std::string& html) {
  HtmlDoc doc = parse_html(html);

  std::string title;
  {
    std::vector<int> titles;
    collect_tag(doc, doc.root, "title", titles);
    if (!titles.empty()) title = node_text(doc, titles.front());
    if (title.empty()) {
      std::vector<int> metas;
      collect_tag(doc, doc.root, "meta", metas);
      for (int m : metas) {
        if (attr_of(doc.at(m), "property") == "og:title" ||
            attr_of(doc.at(m), "name") == "og:title") {
          title = squeeze(attr_of(doc.at(m), "content"));
          break;
        }
      }
    }
  }

  static const std::set<std::string> kCandidates = {
      "#root", "body", "div", "article", "section", "main", "td"};

  struct Scored {
    double score = -1;
    std::string body;
  };
  Scored best_paragraphs;
  Scored best_fallback;

  // preorder over candidate containers; strictly-greater score wins, so the
  // first best block in document order is kept
  std::vector<int> order;
  {
    std::vector<int> walk = {doc.root};
    while (!walk.empty()) {
      int idx = walk.back();
      walk.pop_back();
      const HtmlNode& n = doc.at(idx);
      if (!n.tag.empty() && kCandidates.count(n.tag)) order.push_back(idx);
      for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
        walk.push_back(*it);
    }
  }

  for (int idx : order) {
    long total = 0, linked = 0;
    text_stats(doc, idx, false, total, linked);
    double density = total > 0 ? double(linked) / double(total) : 1.0;

    std::vector<int> paragraphs;
    collect_tag(doc, idx, "p", paragraphs);
    double para_len = 0;
    int para_count = 0;
    std::string body;
    for (int p : paragraphs) {
      long ptotal = 0, plinked = 0;
      text_stats(doc, p, false, ptotal, plinked);
      if (ptotal == 0) continue;
      if (double(plinked) / double(ptotal) > 0.5) continue;  // ad/nav paragraph
      std::string ptext = node_text(doc, p);
      if (ptext.empty()) continue;
      para_len += double(ptext.size());
      ++para_count;
      if (!body.empty()) body += "\n\n";
      body += ptext;
    }
    if (para_count > 0) {
      double score = para_len * (1.0 - density) + 30.0 * para_count;
      if (score > best_paragraphs.score)
        best_paragraphs = Scored{score, std::move(body)};
    }
    double fallback = double(total) * (1.0 - density);
    if (fallback > best_fallback.score)
      best_fallback = Scored{fallback, node_text(doc, idx)};
  }

  const Scored& chosen =
      best_paragraphs.score >= 0 ? best_paragraphs : best_fallback;
  if (chosen.score < 250.0)
    throw IngestError(IngestError::Kind::NoContent,
                      "no content block scored above threshold");
  return {title, chosen.body};
}

std::vector<std::string> feed_links(const std::string& xml) {
  std::vector<std::string> links;
  auto scan_items = [&](const std::string& open, const std::string& close) {
    size_t pos = 0;
    while (true) {
      size_t s = find_ci(xml, open, pos);
      if (s == std::string::npos) return;
      size_t e = find_ci(xml, close, s);
      if (e == std::string::npos) e = xml.size();
      std::string item = xml.substr(s, e - s);
      // first <link> in the item wins
      size_t lp = find_ci(item, "<link", 0);
      if (lp != std::string::npos) {
        size_t gt = item.find('>', lp);
        if (gt != std::string::npos) {
          std::string tag_text = item.substr(lp, gt - lp + 1);
          size_t href = find_ci(tag_text, "href", 0);
          std::string url;
          if (href != std::string::npos) {
            size_t q1 = tag_text.find_first_of("\"'", href);
            if (q1 != std::string::npos) {
              size_t q2 = tag_text.find(tag_text[q1], q1 + 1);
              if (q2 != std::string::npos)
                url = tag_text.substr(q1 + 1, q2 - q1 - 1);
            }
          } else {
            size_t end = find_ci(item, "</link", gt);
            if (end != std::string::npos) {
              url = item.substr(gt + 1, end - gt - 1);
              size_t cd = url.find("<![CDATA[");
              if (cd != std::string::npos) {
                size_t ce = url.find("]]>", cd);
                url = url.substr(cd + 9, ce == std::string::npos
                                             ? std::string::npos
                                             : ce - cd - 9);
              }
            }
          }
          url = trim(decode_entities(url));
          if (!url.empty()) links.push_back(url);
        }
      }
      pos = e + 1;
    }
  };
  scan_items("<item", "</item");
  scan_items("<entry", "</entry");
  return links;
}

FeedConfig load_feed_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IngestError(IngestError::Kind::BadConfig, path + ": cannot open");
  FeedConfig config;
  std::set<std::string> names;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    auto bad = [&](const std::string& why) {
      throw IngestError(IngestError::Kind::BadConfig,
                        path + ":" + std::to_string(line_no) + ": " + why);
    };
    if (cols.size() != 3) bad("expected source_name<TAB>feed_url<TAB>lang");
    FeedEntry entry{trim(cols[0]), trim(cols[1]), trim(cols[2])};
    if (entry.source_name.empty()) bad("empty source name");
    if (entry.feed_url.find("://") == std::string::npos)
      bad("feed URL '" + entry.feed_url + "' has no scheme");
    if (!names.insert(entry.source_name).second)
      bad("duplicate source name '" + entry.source_name + "'");
    config.entries.push_back(std::move(entry));
  }
  return config;
}

namespace {

struct HttpResponse {
  int status = 0;  // 0 means transport failure
  std::string body;
  std::string error;
};

// Splits an absolute URL into the client base ("http://host:port") and the
// request target (path plus query).
bool split_url(const std::string& url, std::string& base, std::string& target) {
  size_t scheme = url.find("://");
  if (scheme == std::string::npos) return false;
  size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) {
    base = url;
    target = "/";
  } else {
    base = url.substr(0, path);
    target = url.substr(path);
  }
  return true;
}

HttpResponse http_get(const std::string& url, const IngestOptions& options) {
  std::string base, target;
  if (!split_url(url, base, target))
    return {0, "", "unsupported URL '" + url + "'"};
  httplib::Client client(base);
  client.set_connection_timeout(std::chrono::milliseconds(options.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(options.timeout_ms));
  client.set_follow_location(true);
  client.set_default_headers({{"User-Agent", options.user_agent}});
  auto res = client.Get(target);
  if (!res) return {0, "", httplib::to_string(res.error())};
  return {res->status, res->body, ""};
}

std::string host_of(const std::string& url) {
  std::string base, target;
  if (!split_url(url, base, target)) return url;
  return lower(base);
}

}  // namespace

PollResult poll_feeds(const FeedConfig& config, DocumentStore& store,
                      const IngestOptions& options) {
  PollResult out;
  std::set<std::string> cycle;
  Timestamp stamp = options.fixed_time.value_or(now_utc());

  for (const FeedEntry& feed : config.entries) {
    HttpResponse res = http_get(feed.feed_url, options);
    if (res.status == 0) {
      out.errors.push_back({feed.feed_url, "unreachable: " + res.error});
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      out.errors.push_back(
          {feed.feed_url, "unreachable: HTTP " + std::to_string(res.status)});
      continue;
    }
    if (find_ci(res.body, "<rss", 0) == std::string::npos &&
        find_ci(res.body, "<feed", 0) == std::string::npos) {
      out.errors.push_back({feed.feed_url, "not an RSS or Atom document"});
      continue;
    }
    for (const std::string& link : feed_links(res.body)) {
      std::string canon = canonical_url(link);
      if (!cycle.insert(canon).second) {
        ++out.duplicate;
        continue;
      }
      if (store.has_link(canon) &&
          store.load_document(story_id_for(link)).has_value())
        continue;  // already fetched in an earlier cycle
      store.record_link(canon);
      out.tasks.push_back(FetchTask{link, feed.source_name, stamp, 0});
    }
  }

  // Crash recovery: links recorded by an interrupted cycle whose documents
  // never landed, and which no current feed re-offered.
  for (const std::string& canon : store.links_without_documents()) {
    if (cycle.count(canon)) continue;
    out.tasks.push_back(FetchTask{canon, "", stamp, 0});
  }
  return out;
}

IngestReport run_workers(const std::vector<FetchTask>& tasks, int pool_size,
                         DocumentStore& store, const IngestOptions& options) {
  IngestReport report;
  report.results.resize(tasks.size());
  if (tasks.empty()) return report;

  std::atomic<size_t> next{0};
  std::mutex host_mutex;
  std::map<std::string, std::chrono::steady_clock::time_point> host_slots;

  auto politeness_wait = [&](const std::string& url) {
    if (options.politeness_ms <= 0) return;
    std::chrono::steady_clock::time_point start;
    {
      std::lock_guard lock(host_mutex);
      auto now = std::chrono::steady_clock::now();
      auto& slot = host_slots[host_of(url)];
      start = slot.time_since_epoch().count() == 0 ? now : std::max(now, slot);
      slot = start + std::chrono::milliseconds(options.politeness_ms);
    }
    std::this_thread::sleep_until(start);
  };

  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const FetchTask& task = tasks[i];
      TaskResult result;
      result.task = task;
      for (int attempt = 1; attempt <= options.max_retries; ++attempt) {
        result.attempts = attempt;
        politeness_wait(task.url);
        HttpResponse res = http_get(task.url, options);
        bool retryable = res.status == 0 || res.status >= 500;
        if (retryable) {
          result.error = res.status == 0
                             ? res.error
                             : "HTTP " + std::to_string(res.status);
          if (attempt < options.max_retries && options.backoff_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(
                options.backoff_ms << (attempt - 1)));
          continue;
        }
        if (res.status < 200 || res.status >= 300) {
          result.error = "HTTP " + std::to_string(res.status);
          break;
        }
        try {
          auto [title, body] = extract_content(res.body);
          StoryDocument doc;
          doc.story_id = story_id_for(task.url);
          doc.url = task.url;
          doc.source_name = task.source_name;
          doc.title = title;
          doc.body_text = body;
          doc.fetched_at = options.fixed_time.value_or(now_utc());
          doc.status = StoryStatus::Fetched;
          result.ok = true;
          result.error.clear();
          result.story_id = doc.story_id;
          result.duplicate = !store.insert_document(doc);
        } catch (const IngestError& e) {
          result.error = std::string("no content: ") + e.what();
        } catch (const StoreError& e) {
          result.error = std::string("store: ") + e.what();
        }
        break;
      }
      report.results[i] = std::move(result);
    }
  };

  int threads = std::max(1, std::min<int>(pool_size, int(tasks.size())));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  for (const TaskResult& r : report.results) {
    if (!r.ok) {
      ++report.failed;
      log::warn("fetch failed (" + std::to_string(r.attempts) + " attempts): " +
                r.task.url + ": " + r.error);
    } else if (r.duplicate) {
      ++report.duplicate;
    } else {
      ++report.fetched;
    }
  }
  return report;
}

}  // namespace phoenix
