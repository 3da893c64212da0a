#include "phoenix/dictionaries.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "phoenix/log.hpp"

namespace phoenix {

std::string ascii_lower(const std::string& text) {
  std::string out = text;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
  return out;
}

std::vector<std::string> lower_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(ascii_lower(t));
  return out;
}

bool valid_actor_code(const std::string& code) {
  if (code.empty() || code.size() % 3 != 0) return false;
  return std::all_of(code.begin(), code.end(),
                     [](char c) { return c >= 'A' && c <= 'Z'; });
}

bool valid_cameo_code(const std::string& code) {
  if (code.size() < 2 || code.size() > 4) return false;
  if (!std::all_of(code.begin(), code.end(),
                   [](char c) { return c >= '0' && c <= '9'; }))
    return false;
  int root = (code[0] - '0') * 10 + (code[1] - '0');
  return root >= 1 && root <= 20;
}

namespace {

std::string join_tokens(const TokenPattern& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

bool same_range(const std::optional<DateRange>& a,
                const std::optional<DateRange>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->from == b->from && a->to == b->to;
}

}  // namespace

DictionarySet::Builder& DictionarySet::Builder::add_actor(
    const TokenPattern& pattern, const std::string& code,
    std::optional<DateRange> valid_range) {
  TokenPattern key = lower_tokens(pattern);

  // A pattern re-declared with the same validity window is a duplicate:
  // the later declaration wins.
  if (auto* refs = set_.actor_trie_.payloads_at_mutable(key)) {
    for (auto it = refs->begin(); it != refs->end(); ++it) {
      ActorEntry& old = set_.actors_[it->entry];
      if (same_range(old.valid_range, valid_range)) {
        log::warn("duplicate actor pattern '" + join_tokens(key) +
                  "': replacing code " + old.code + " with " + code);
        std::erase(old.patterns, key);
        refs->erase(it);
        break;
      }
    }
  }

  size_t entry_index = set_.actors_.size();
  for (size_t i = 0; i < set_.actors_.size(); ++i) {
    if (set_.actors_[i].code == code &&
        same_range(set_.actors_[i].valid_range, valid_range)) {
      entry_index = i;
      break;
    }
  }
  if (entry_index == set_.actors_.size())
    set_.actors_.push_back(ActorEntry{{}, code, valid_range});
  set_.actors_[entry_index].patterns.push_back(key);
  set_.actor_trie_.insert(key, ActorRef{entry_index, next_order_++});
  return *this;
}

DictionarySet::Builder& DictionarySet::Builder::add_verb(
    const TokenPattern& pattern, const std::string& code,
    std::map<std::string, std::string> composition_rules) {
  TokenPattern key = lower_tokens(pattern);

  if (auto* refs = set_.verb_trie_.payloads_at_mutable(key)) {
    if (!refs->empty()) {
      VerbEntry& old = set_.verbs_[refs->front().entry];
      log::warn("duplicate verb pattern '" + join_tokens(key) +
                "': replacing code " + old.code + " with " + code);
      std::erase(old.verb_forms, key);
      refs->clear();
    }
  }

  size_t entry_index = set_.verbs_.size();
  for (size_t i = 0; i < set_.verbs_.size(); ++i) {
    if (set_.verbs_[i].code == code &&
        set_.verbs_[i].composition_rules == composition_rules) {
      entry_index = i;
      break;
    }
  }
  if (entry_index == set_.verbs_.size())
    set_.verbs_.push_back(VerbEntry{{}, code, std::move(composition_rules)});
  set_.verbs_[entry_index].verb_forms.push_back(key);
  set_.verb_trie_.insert(key, VerbRef{entry_index, next_order_++});
  return *this;
}

DictionarySet::Builder& DictionarySet::Builder::add_issue(
    const std::string& keyword_phrase, const std::string& tag) {
  IssueEntry entry;
  std::string lowered = ascii_lower(keyword_phrase);
  std::string token;
  for (char c : lowered + " ") {
    if (c == ' ' || c == '\t') {
      if (!token.empty()) entry.keyword.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  entry.keyword_text = join_tokens(entry.keyword);
  entry.issue_tag = tag;
  set_.issues_.push_back(std::move(entry));
  return *this;
}

DictionarySet::Builder& DictionarySet::Builder::add_role(const std::string& code) {
  set_.roles_.insert(code);
  return *this;
}

DictionarySet::Builder& DictionarySet::Builder::add_attribute(
    const std::string& code) {
  set_.attributes_.insert(code);
  return *this;
}

DictionarySet::Builder& DictionarySet::Builder::add_special_entity(
    const std::string& code) {
  set_.entities_special_.insert(code);
  return *this;
}

DictionarySet::Builder& DictionarySet::Builder::set_version(std::string version) {
  set_.version_ = std::move(version);
  return *this;
}

DictionarySet DictionarySet::Builder::build() { return std::move(set_); }

std::optional<ActorMatch> DictionarySet::match_actor(
    const std::vector<std::string>& tokens, const Date& at_date) const {
  std::vector<std::string> lowered = lower_tokens(tokens);
  std::string code;
  auto depth = actor_trie_.longest_match(
      lowered, [&](int, const std::vector<ActorRef>& refs) {
        const ActorRef* best = nullptr;
        for (const ActorRef& ref : refs) {
          const ActorEntry& entry = actors_[ref.entry];
          if (entry.valid_range && !entry.valid_range->contains(at_date))
            continue;
          if (!best || ref.order < best->order) best = &ref;
        }
        if (!best) return false;
        code = actors_[best->entry].code;
        return true;
      });
  if (!depth) return std::nullopt;
  return ActorMatch{code, *depth};
}

std::optional<VerbMatch> DictionarySet::match_verb(
    const std::vector<std::string>& tokens) const {
  std::vector<std::string> lowered = lower_tokens(tokens);
  const VerbEntry* entry = nullptr;
  auto depth = verb_trie_.longest_match(
      lowered, [&](int, const std::vector<VerbRef>& refs) {
        const VerbRef* best = nullptr;
        for (const VerbRef& ref : refs)
          if (!best || ref.order < best->order) best = &ref;
        if (!best) return false;
        entry = &verbs_[best->entry];
        return true;
      });
  if (!depth) return std::nullopt;
  return VerbMatch{entry, *depth};
}

std::vector<std::pair<std::string, int>> DictionarySet::match_issues(
    const std::string& text) const {
  // Non-overlapping substring counts per keyword, aggregated by tag.
  std::map<std::string, int> by_tag;
  for (const IssueEntry& issue : issues_) {
    if (issue.keyword_text.empty()) continue;
    int count = 0;
    size_t pos = 0;
    while ((pos = text.find(issue.keyword_text, pos)) != std::string::npos) {
      ++count;
      pos += issue.keyword_text.size();
    }
    if (count > 0) by_tag[issue.issue_tag] += count;
  }
  std::vector<std::pair<std::string, int>> out(by_tag.begin(), by_tag.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

namespace {

struct LineReader {
  std::ifstream stream;
  std::string path;
  int line_no = 0;

  LineReader(const std::string& p) : stream(p), path(p) {
    if (!stream)
      throw DictionaryError(DictionaryError::Kind::MissingFile, p, 0,
                            "cannot open file");
  }

  // Returns false at EOF; skips blank lines. Comment lines are returned so
  // the caller can scan headers.
  bool next(std::string& line) {
    while (std::getline(stream, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      bool blank = line.find_first_not_of(" \t") == std::string::npos;
      if (!blank) return true;
    }
    return false;
  }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

TokenPattern split_pattern(const std::string& text, char sep) {
  TokenPattern tokens;
  for (const std::string& piece : split(text, sep)) {
    std::string t = trim(piece);
    if (!t.empty()) tokens.push_back(t);
  }
  return tokens;
}

std::optional<std::string> version_header(const std::string& line) {
  static const std::string kPrefix = "# version:";
  if (line.rfind(kPrefix, 0) != 0) return std::nullopt;
  return trim(line.substr(kPrefix.size()));
}

DateRange parse_range(LineReader& reader, const std::string& text) {
  auto dash = text.find('-');
  if (dash == std::string::npos)
    throw DictionaryError(DictionaryError::Kind::FormatError, reader.path,
                          reader.line_no,
                          "expected validity range YYYYMMDD-YYYYMMDD");
  auto from = parse_date(trim(text.substr(0, dash)));
  auto to = parse_date(trim(text.substr(dash + 1)));
  if (!from || !to || *to < *from)
    throw DictionaryError(DictionaryError::Kind::FormatError, reader.path,
                          reader.line_no,
                          "invalid validity range '" + text + "'");
  return DateRange{*from, *to};
}

void load_actor_file(const std::string& path, DictionarySet::Builder& builder) {
  LineReader reader(path);
  std::string line;
  bool have_version = false;
  while (reader.next(line)) {
    if (line[0] == '#') {
      if (auto v = version_header(line); v && !have_version) {
        if (v->empty())
          throw DictionaryError(DictionaryError::Kind::FormatError, path,
                                reader.line_no, "empty version header");
        builder.set_version(*v);
        have_version = true;
      }
      continue;
    }
    if (!have_version)
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no,
                            "missing '# version:' header before entries");
    auto fields = split(line, ';');
    if (fields.size() < 2 || fields.size() > 3)
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no,
                            "expected PATTERN;CODE[;YYYYMMDD-YYYYMMDD]");
    TokenPattern pattern = split_pattern(fields[0], '_');
    if (pattern.empty())
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no, "empty pattern");
    std::string code = trim(fields[1]);
    if (!valid_actor_code(code))
      throw DictionaryError(DictionaryError::Kind::InvalidCode, path,
                            reader.line_no,
                            "actor code '" + code +
                                "' must be uppercase 3-character segments");
    std::optional<DateRange> range;
    if (fields.size() == 3) range = parse_range(reader, trim(fields[2]));
    builder.add_actor(pattern, code, range);
  }
  if (!have_version)
    throw DictionaryError(DictionaryError::Kind::FormatError, path, 0,
                          "missing '# version:' header");
}

void load_verb_file(const std::string& path, DictionarySet::Builder& builder) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (line[0] == '#') continue;
    auto fields = split(line, ';');
    if (fields.size() < 2 || fields.size() > 3)
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no,
                            "expected PATTERN;CODE[;ROOT>COMPOSED,...]");
    TokenPattern pattern = split_pattern(fields[0], '_');
    if (pattern.empty())
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no, "empty pattern");
    std::string code = trim(fields[1]);
    if (!valid_cameo_code(code))
      throw DictionaryError(
          DictionaryError::Kind::InvalidCode, path, reader.line_no,
          "event code '" + code + "' must be 2-4 digits with root 01-20");
    std::map<std::string, std::string> rules;
    if (fields.size() == 3) {
      for (const std::string& piece : split(trim(fields[2]), ',')) {
        std::string rule = trim(piece);
        if (rule.empty()) continue;
        auto gt = rule.find('>');
        if (gt == std::string::npos)
          throw DictionaryError(DictionaryError::Kind::FormatError, path,
                                reader.line_no,
                                "expected ROOT>COMPOSED in '" + rule + "'");
        std::string root = trim(rule.substr(0, gt));
        std::string composed = trim(rule.substr(gt + 1));
        if (root.size() != 2 || !valid_cameo_code(root))
          throw DictionaryError(DictionaryError::Kind::InvalidCode, path,
                                reader.line_no,
                                "composition key '" + root +
                                    "' must be a 2-digit root in 01-20");
        if (!valid_cameo_code(composed))
          throw DictionaryError(DictionaryError::Kind::InvalidCode, path,
                                reader.line_no,
                                "composed code '" + composed + "' is not a "
                                "valid event code");
        rules[root] = composed;
      }
    }
    builder.add_verb(pattern, code, std::move(rules));
  }
}

void load_issue_file(const std::string& path, DictionarySet::Builder& builder) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (line[0] == '#') continue;
    auto fields = split(line, ';');
    if (fields.size() != 2)
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no, "expected keyword phrase;TAG");
    std::string keyword = trim(fields[0]);
    std::string tag = trim(fields[1]);
    if (keyword.empty())
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no, "empty keyword");
    bool tag_ok = !tag.empty() &&
                  std::all_of(tag.begin(), tag.end(), [](char c) {
                    return (c >= 'A' && c <= 'Z') || c == '_';
                  });
    if (!tag_ok)
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no,
                            "tag '" + tag +
                                "' must be uppercase with underscores");
    builder.add_issue(keyword, tag);
  }
}

void load_code_sets_file(const std::string& path,
                         DictionarySet::Builder& builder) {
  static const std::set<std::string> kSpecialEntities = {"IMG", "IGO", "MNC",
                                                         "NGO"};
  LineReader reader(path);
  std::string line;
  std::string section;
  while (reader.next(line)) {
    if (line[0] == '#') continue;
    std::string t = trim(line);
    if (t.front() == '[') {
      if (t.back() != ']')
        throw DictionaryError(DictionaryError::Kind::FormatError, path,
                              reader.line_no, "unterminated section header");
      section = t.substr(1, t.size() - 2);
      if (section != "roles" && section != "attributes" &&
          section != "entities")
        throw DictionaryError(DictionaryError::Kind::FormatError, path,
                              reader.line_no,
                              "unknown section '" + section + "'");
      continue;
    }
    if (section.empty())
      throw DictionaryError(DictionaryError::Kind::FormatError, path,
                            reader.line_no,
                            "entry before any [section] header");
    if (t.size() != 3 || !std::all_of(t.begin(), t.end(), [](char c) {
          return c >= 'A' && c <= 'Z';
        }))
      throw DictionaryError(DictionaryError::Kind::InvalidCode, path,
                            reader.line_no,
                            "'" + t + "' is not a 3-character uppercase code");
    if (section == "roles") {
      builder.add_role(t);
    } else if (section == "attributes") {
      builder.add_attribute(t);
    } else {
      if (!kSpecialEntities.count(t))
        throw DictionaryError(DictionaryError::Kind::InvalidCode, path,
                              reader.line_no,
                              "'" + t +
                                  "' is not one of the special entity codes "
                                  "IMG, IGO, MNC, NGO");
      builder.add_special_entity(t);
    }
  }
}

}  // namespace

DictionarySet load_dictionaries(const std::string& actor_path,
                                const std::string& verb_path,
                                const std::string& issue_path,
                                const std::string& code_sets_path) {
  DictionarySet::Builder builder;
  load_actor_file(actor_path, builder);
  load_verb_file(verb_path, builder);
  load_issue_file(issue_path, builder);
  load_code_sets_file(code_sets_path, builder);
  return builder.build();
}

}  // namespace phoenix
