#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phoenix/dates.hpp"
#include "phoenix/errors.hpp"

namespace phoenix {

// Token-sequence pattern, case-normalized at load time.
using TokenPattern = std::vector<std::string>;

struct ActorEntry {
  std::vector<TokenPattern> patterns;
  std::string code;  // concatenated 3-char segments, uppercase A-Z
  std::optional<DateRange> valid_range;
};

struct VerbEntry {
  std::vector<TokenPattern> verb_forms;
  std::string code;  // CAMEO code, 2-4 digits, root 01-20
  // Keyed by the partner verb's 2-digit root code.
  std::map<std::string, std::string> composition_rules;
};

struct IssueEntry {
  TokenPattern keyword;       // lowercase token sequence
  std::string keyword_text;   // the keyword as written, for substring counts
  std::string issue_tag;      // UPPERCASE_WITH_UNDERSCORES
};

struct ActorMatch {
  std::string code;
  int matched_length;
};

struct VerbMatch {
  const VerbEntry* entry;
  int matched_length;
};

// Token-level trie with longest-prefix retrieval. Entries at the same depth
// keep file order; the first eligible one wins a length tie.
template <typename Payload>
class PatternTrie {
 public:
  void insert(const TokenPattern& pattern, Payload payload) {
    NodeId node = 0;
    if (nodes_.empty()) nodes_.emplace_back();
    for (const std::string& token : pattern) {
      auto& edges = nodes_[node].edges;
      auto it = edges.find(token);
      if (it == edges.end()) {
        nodes_.emplace_back();
        it = nodes_[node].edges.emplace(token, NodeId(nodes_.size() - 1)).first;
      }
      node = it->second;
    }
    nodes_[node].payloads.push_back(std::move(payload));
  }

  // Walks `tokens` from the front, reporting every terminal node passed
  // through, deepest last. `visit(depth, payloads)` returns true to accept;
  // the deepest accepted match wins.
  template <typename Visit>
  std::optional<int> longest_match(const std::vector<std::string>& tokens,
                                   Visit visit) const {
    if (nodes_.empty()) return std::nullopt;
    std::optional<int> best;
    NodeId node = 0;
    int depth = 0;
    for (const std::string& token : tokens) {
      auto it = nodes_[node].edges.find(token);
      if (it == nodes_[node].edges.end()) break;
      node = it->second;
      ++depth;
      if (!nodes_[node].payloads.empty() && visit(depth, nodes_[node].payloads))
        best = depth;
    }
    return best;
  }

  const std::vector<Payload>* payloads_at(const TokenPattern& pattern) const {
    if (nodes_.empty()) return nullptr;
    NodeId node = 0;
    for (const std::string& token : pattern) {
      auto it = nodes_[node].edges.find(token);
      if (it == nodes_[node].edges.end()) return nullptr;
      node = it->second;
    }
    return &nodes_[node].payloads;
  }

  std::vector<Payload>* payloads_at_mutable(const TokenPattern& pattern) {
    return const_cast<std::vector<Payload>*>(payloads_at(pattern));
  }

 private:
  using NodeId = size_t;
  struct TrieNode {
    std::map<std::string, NodeId> edges;
    std::vector<Payload> payloads;
  };
  std::vector<TrieNode> nodes_;
};

// Immutable after construction; reloads build a fresh value.
class DictionarySet {
 public:
  class Builder;

  // Longest matching actor pattern over a prefix of `tokens` whose validity
  // window (if any) contains `at_date`. Length ties go to file order.
  std::optional<ActorMatch> match_actor(const std::vector<std::string>& tokens,
                                        const Date& at_date) const;

  // Longest matching verb pattern over a prefix of `tokens`.
  std::optional<VerbMatch> match_verb(const std::vector<std::string>& tokens) const;

  // Every issue keyword occurring in `text` (pre-lowercased, whole document),
  // with non-overlapping occurrence counts, sorted by count desc then tag asc.
  std::vector<std::pair<std::string, int>> match_issues(const std::string& text) const;

  const std::string& version() const { return version_; }
  const std::set<std::string>& roles() const { return roles_; }
  const std::set<std::string>& attributes() const { return attributes_; }
  const std::set<std::string>& special_entities() const { return entities_special_; }

  size_t actor_count() const { return actors_.size(); }
  size_t verb_count() const { return verbs_.size(); }
  size_t issue_count() const { return issues_.size(); }

 private:
  struct ActorRef {
    size_t entry;
    long order;
  };
  struct VerbRef {
    size_t entry;
    long order;
  };

  std::vector<ActorEntry> actors_;
  std::vector<VerbEntry> verbs_;
  std::vector<IssueEntry> issues_;
  PatternTrie<ActorRef> actor_trie_;
  PatternTrie<VerbRef> verb_trie_;
  std::set<std::string> roles_;
  std::set<std::string> attributes_;
  std::set<std::string> entities_special_;
  std::string version_;
};

// Programmatic construction; the file loader is built on top of it.
class DictionarySet::Builder {
 public:
  // Pattern tokens are case-normalized here. Re-adding a pattern with the
  // same validity window replaces the earlier binding (last one wins); the
  // same pattern under different windows coexists for date scoping.
  Builder& add_actor(const TokenPattern& pattern, const std::string& code,
                     std::optional<DateRange> valid_range = std::nullopt);
  Builder& add_verb(const TokenPattern& pattern, const std::string& code,
                    std::map<std::string, std::string> composition_rules = {});
  Builder& add_issue(const std::string& keyword_phrase, const std::string& tag);
  Builder& add_role(const std::string& code);
  Builder& add_attribute(const std::string& code);
  Builder& add_special_entity(const std::string& code);
  Builder& set_version(std::string version);

  DictionarySet build();

 private:
  DictionarySet set_;
  long next_order_ = 0;
};

// Validation helpers shared by loaders.
bool valid_actor_code(const std::string& code);   // 3n chars, uppercase A-Z
bool valid_cameo_code(const std::string& code);   // 2-4 digits, root 01-20

// Loads all four dictionary files. The actor file must start with a
// `# version: <string>` header; `#` comments and blank lines are skipped
// everywhere. Duplicate patterns resolve last-one-wins with a warning.
// Throws DictionaryError: MissingFile, FormatError, InvalidCode.
DictionarySet load_dictionaries(const std::string& actor_path,
                                const std::string& verb_path,
                                const std::string& issue_path,
                                const std::string& code_sets_path);

// Lowercases ASCII letters; other bytes pass through.
std::string ascii_lower(const std::string& text);
std::vector<std::string> lower_tokens(const std::vector<std::string>& tokens);

}  // namespace phoenix
