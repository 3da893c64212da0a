#include "phoenix/enrich.hpp"

#include <algorithm>
#include <fstream>

namespace phoenix {

int quad_class(const std::string& root_code) {
  static const int table[21] = {-1, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3,
                                3,  3, 3, 4, 4, 3, 4, 4, 4, 4};
  if (root_code.size() == 2 && root_code[0] >= '0' && root_code[0] <= '9' &&
      root_code[1] >= '0' && root_code[1] <= '9') {
    int root = (root_code[0] - '0') * 10 + (root_code[1] - '0');
    if (root >= 1 && root <= 20) return table[root];
  }
  throw EnrichError(EnrichError::Kind::UnknownRoot,
                    "no quad class for root '" + root_code + "'");
}

namespace {

[[noreturn]] void format_error(const std::string& path, int line,
                               const std::string& why) {
  throw EnrichError(EnrichError::Kind::FormatError,
                    path + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

void GoldsteinTable::add(const std::string& code, double score) {
  if (!valid_cameo_code(code))
    throw EnrichError(EnrichError::Kind::FormatError,
                      "bad event code '" + code + "' in score table");
  if (score < -10.0 || score > 10.0)
    throw EnrichError(EnrichError::Kind::FormatError,
                      "score for " + code + " outside [-10, 10]");
  scores_[code] = score;
}

GoldsteinTable GoldsteinTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw EnrichError(EnrichError::Kind::FormatError,
                      path + ": cannot open");
  GoldsteinTable table;
  std::string line;
  int line_no = 0;
  bool have_version = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      static const std::string kPrefix = "# version:";
      if (!have_version && line.rfind(kPrefix, 0) == 0) {
        std::string v = line.substr(kPrefix.size());
        size_t b = v.find_first_not_of(" \t");
        if (b == std::string::npos) format_error(path, line_no, "empty version");
        table.version_ = v.substr(b);
        have_version = true;
      }
      continue;
    }
    if (!have_version)
      format_error(path, line_no, "missing '# version:' header");
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      format_error(path, line_no, "expected CODE<TAB>score");
    std::string code = line.substr(0, tab);
    std::string score_text = line.substr(tab + 1);
    double score = 0;
    try {
      size_t used = 0;
      score = std::stod(score_text, &used);
      if (used != score_text.size()) throw std::invalid_argument(score_text);
    } catch (const std::exception&) {
      format_error(path, line_no, "bad score '" + score_text + "'");
    }
    try {
      table.add(code, score);
    } catch (const EnrichError& e) {
      format_error(path, line_no, e.what());
    }
  }
  if (!have_version)
    throw EnrichError(EnrichError::Kind::FormatError,
                      path + ": missing '# version:' header");
  for (int root = 1; root <= 20; ++root) {
    char buf[3];
    snprintf(buf, sizeof buf, "%02d", root);
    if (!table.scores_.count(buf))
      throw EnrichError(EnrichError::Kind::FormatError,
                        path + ": no entry for root " + buf);
  }
  return table;
}

double GoldsteinTable::lookup(const std::string& code) const {
  if (valid_cameo_code(code)) {
    for (size_t len = code.size(); len >= 2; --len) {
      auto it = scores_.find(code.substr(0, len));
      if (it != scores_.end()) return it->second;
    }
  }
  throw EnrichError(EnrichError::Kind::UnknownRoot,
                    "no score for event code '" + code + "'");
}

ActorDecomposition decompose_actor(const std::string& full,
                                   const DictionarySet& dicts) {
  if (full.empty() || full.size() % 3 != 0)
    throw EnrichError(EnrichError::Kind::MalformedCode,
                      "actor code '" + full +
                          "' is not built from 3-character segments");
  ActorDecomposition out;
  out.full = full;
  out.entity = full.substr(0, 3);
  for (size_t i = 3; i + 3 <= full.size(); i += 3) {
    std::string segment = full.substr(i, 3);
    if (!out.role && dicts.roles().count(segment)) {
      out.role = segment;
    } else if (!out.attribute && dicts.attributes().count(segment)) {
      out.attribute = segment;
    }
    // anything else stays only in `full`
  }
  return out;
}

void Gazetteer::add(GazetteerEntry entry) {
  by_name_[ascii_lower(entry.name)].push_back(entries_.size());
  entries_.push_back(std::move(entry));
}

std::vector<const GazetteerEntry*> Gazetteer::candidates(
    const std::string& name) const {
  std::vector<const GazetteerEntry*> out;
  auto it = by_name_.find(ascii_lower(name));
  if (it == by_name_.end()) return out;
  for (size_t i : it->second) out.push_back(&entries_[i]);
  return out;
}

Gazetteer Gazetteer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw EnrichError(EnrichError::Kind::FormatError, path + ": cannot open");
  Gazetteer gaz;
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
    if (cols.size() != 6)
      format_error(path, line_no, "expected 6 tab-separated columns");
    GazetteerEntry entry;
    entry.name = cols[0];
    entry.country = cols[1];
    entry.admin1 = cols[2];
    try {
      entry.lat = std::stod(cols[3]);
      entry.lon = std::stod(cols[4]);
      entry.population = std::stol(cols[5]);
    } catch (const std::exception&) {
      format_error(path, line_no, "bad numeric field");
    }
    if (entry.name.empty()) format_error(path, line_no, "empty place name");
    if (entry.lat < -90 || entry.lat > 90 || entry.lon < -180 ||
        entry.lon > 180)
      format_error(path, line_no, "coordinates out of range");
    if (entry.population < 0)
      format_error(path, line_no, "negative population");
    gaz.add(std::move(entry));
  }
  return gaz;
}

namespace {

bool capitalized(const std::string& token) {
  return !token.empty() && token[0] >= 'A' && token[0] <= 'Z';
}

std::vector<std::string> words_of(const std::string& text) {
  static const std::string kStrip = ".,;:!?()[]{}\"'`";
  std::vector<std::string> words;
  std::string word;
  for (char c : text + " ") {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      size_t b = word.find_first_not_of(kStrip);
      if (b != std::string::npos) {
        size_t e = word.find_last_not_of(kStrip);
        words.push_back(word.substr(b, e - b + 1));
      }
      word.clear();
    } else {
      word += c;
    }
  }
  return words;
}

}  // namespace

std::optional<GeoResult> geolocate(const StoryDocument& doc,
                                   const Gazetteer& gazetteer) {
  std::vector<std::string> words = words_of(doc.body_text);

  // Non-overlapping capitalized n-grams (longest first) that name places.
  struct NameStats {
    int count = 0;
    size_t first_pos = 0;
  };
  std::map<std::string, NameStats> mentions;  // lowercased name
  std::vector<std::string> order;             // first-mention order
  for (size_t i = 0; i < words.size();) {
    if (!capitalized(words[i])) {
      ++i;
      continue;
    }
    size_t taken = 0;
    for (size_t len = 3; len >= 1; --len) {
      if (i + len > words.size()) continue;
      bool all_caps = true;
      std::string joined;
      for (size_t k = i; k < i + len; ++k) {
        if (!capitalized(words[k])) {
          all_caps = false;
          break;
        }
        if (!joined.empty()) joined += ' ';
        joined += words[k];
      }
      if (!all_caps) continue;
      std::string key = ascii_lower(joined);
      if (gazetteer.by_name_.count(key)) {
        auto [it, fresh] = mentions.try_emplace(key);
        if (fresh) {
          it->second.first_pos = i;
          order.push_back(key);
        }
        ++it->second.count;
        taken = len;
        break;
      }
    }
    i += taken ? taken : 1;
  }
  if (mentions.empty()) return std::nullopt;

  // Country mention weights from unambiguous names only.
  std::map<std::string, int> country_weight;
  for (const auto& [key, stats] : mentions) {
    const auto& cand = gazetteer.by_name_.at(key);
    if (cand.size() == 1)
      country_weight[gazetteer.entries_[cand.front()].country] += stats.count;
  }

  auto resolve = [&](const std::string& key) -> const GazetteerEntry* {
    const GazetteerEntry* best = nullptr;
    int best_weight = -1;
    for (size_t idx : gazetteer.by_name_.at(key)) {
      const GazetteerEntry& e = gazetteer.entries_[idx];
      auto it = country_weight.find(e.country);
      int weight = it == country_weight.end() ? 0 : it->second;
      if (!best || weight > best_weight ||
          (weight == best_weight && e.population > best->population)) {
        best = &e;
        best_weight = weight;
      }
    }
    return best;
  };

  // Focus: most mentions, ties by earliest first mention.
  const std::string* focus = nullptr;
  for (const std::string& key : order) {
    if (!focus) {
      focus = &key;
      continue;
    }
    if (mentions.at(key).count > mentions.at(*focus).count) focus = &key;
  }
  const GazetteerEntry* chosen = resolve(*focus);
  return GeoResult{chosen->lat, chosen->lon, chosen->name, chosen->country,
                   chosen->admin1};
}

EventRecord enrich_event(const CodedEvent& ev, const StoryDocument& doc,
                         const EnrichTables& tables) {
  EventRecord rec;
  rec.date = date_of(doc.fetched_at);
  rec.event_code = ev.event_code;
  rec.event_root_code = ev.event_code.substr(0, 2);
  rec.quad_class = quad_class(rec.event_root_code);
  rec.goldstein = tables.goldstein->lookup(ev.event_code);

  ActorDecomposition source = decompose_actor(ev.source_code, *tables.dicts);
  rec.source_full = source.full;
  rec.source_entity = source.entity;
  rec.source_role = source.role.value_or("");
  rec.source_attribute = source.attribute.value_or("");
  if (ev.target_code) {
    ActorDecomposition target = decompose_actor(*ev.target_code, *tables.dicts);
    rec.target_full = target.full;
    rec.target_entity = target.entity;
    rec.target_role = target.role.value_or("");
    rec.target_attribute = target.attribute.value_or("");
  }

  std::string tagged;
  for (const auto& [tag, count] : tables.dicts->match_issues(
           ascii_lower(doc.body_text))) {
    if (!tagged.empty()) tagged += ';';
    tagged += tag + ":" + std::to_string(count);
  }
  rec.issues = tagged;

  if (tables.gazetteer) {
    if (auto geo = geolocate(doc, *tables.gazetteer)) {
      rec.action_lat = geo->lat;
      rec.action_lon = geo->lon;
      rec.location_name = geo->location_name;
      rec.geo_country_name = geo->country_name;
      rec.geo_state_name = geo->state_name;
    }
  }

  rec.sentence_id = ev.sentence_id;
  rec.urls = {doc.url};
  rec.news_sources = {doc.source_name};
  rec.story_id = doc.story_id;
  return rec;
}

}  // namespace phoenix
