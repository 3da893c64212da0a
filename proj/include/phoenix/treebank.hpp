#pragma once

#include <string>
#include <vector>

#include "phoenix/errors.hpp"

namespace phoenix {

// Half-open token index range [begin, end).
struct Span {
  int begin = 0;
  int end = 0;
  bool operator==(const Span&) const = default;
  int width() const { return end - begin; }
};

// One node of a constituency tree. Leaves are preterminals: they carry the
// part-of-speech label plus the surface token. Internal nodes carry a
// syntactic label and an ordered child list.
struct Node {
  std::string label;
  std::vector<Node> children;
  std::string token;  // non-empty iff leaf
  Span span;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const Node& other) const {
    return label == other.label && token == other.token &&
           children == other.children;
  }
};

// A parsed sentence. The root is either the bracketing's own top node (when
// labeled ROOT or a clause label) or a synthetic ROOT wrapped around it, so
// the canonical serialized form always reparses to the same structure.
struct ParseTree {
  Node root;
  std::string sentence_text;  // leaf tokens joined by single spaces

  std::vector<const Node*> leaves() const;
  std::vector<std::string> tokens() const;
  int token_count() const { return root.span.width(); }
};

enum class ChunkKind { NounPhrase, VerbPhrase, PrepPhrase };

// A maximal NP/VP/PP constituent. `node` points into the ParseTree the chunk
// was extracted from and is valid only while that tree is alive.
struct PhraseChunk {
  ChunkKind kind;
  const Node* node;
  int head_token_index;  // NP: last token of the phrase; VP/PP: first token
};

// Label family tests. Function tags are ignored ("NP-SBJ" is an NP); labels
// beginning with '-' (e.g. -LRB- as a POS tag) belong to no family.
bool is_noun_phrase_label(const std::string& label);
bool is_verb_phrase_label(const std::string& label);
bool is_prep_phrase_label(const std::string& label);
bool is_clause_label(const std::string& label);  // S, SBAR, SINV, SQ, SBARQ

// Parses one Penn-Treebank-style bracketing. Tokens written as -LRB-/-RRB-
// are unescaped to literal parentheses; serialize() re-escapes them.
// Throws TreebankError: UnbalancedBrackets, EmptyTree, MalformedNode.
ParseTree parse_treebank(const std::string& text);

// Canonical bracketing: single spaces, parenthesis tokens escaped. Output
// reparses to an identical tree.
std::string serialize(const ParseTree& tree);
std::string serialize(const Node& node);

// Every maximal NP, VP, and PP node in preorder. A node is maximal when no
// ancestor belongs to the same family; an NP under a VP chunk is still
// listed, an NP under another NP is not.
std::vector<PhraseChunk> extract_chunks(const ParseTree& tree);

// Maximal same-family descendants of `root` (preorder), where maximality is
// relative to `root`: nodes with no matching ancestor strictly below it.
// `root` itself is never returned.
std::vector<const Node*> maximal_descendants(const Node& root,
                                             bool (*family)(const std::string&));

}  // namespace phoenix
