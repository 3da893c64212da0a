#include "phoenix/treebank.hpp"

#include <cctype>

namespace phoenix {

namespace {

std::string family_key(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  auto cut = label.find_first_of("-=|");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

std::string unescape_token(const std::string& tok) {
  if (tok == "-LRB-") return "(";
  if (tok == "-RRB-") return ")";
  return tok;
}

std::string escape_token(const std::string& tok) {
  if (tok == "(") return "-LRB-";
  if (tok == ")") return "-RRB-";
  return tok;
}

struct Parser {
  const std::string& text;
  size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(TreebankError::Kind kind, const std::string& why) {
    throw TreebankError(kind, why + " at offset " + std::to_string(pos));
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  std::string read_atom() {
    size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos;
    }
    return text.substr(start, pos - start);
  }

  Node parse_node() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '(')
      fail(TreebankError::Kind::UnbalancedBrackets, "expected '('");
    ++pos;
    skip_ws();
    if (pos >= text.size())
      fail(TreebankError::Kind::UnbalancedBrackets, "unexpected end of input");

    Node node;
    if (text[pos] != '(' && text[pos] != ')') node.label = read_atom();
    skip_ws();

    bool saw_token = false;
    while (true) {
      if (pos >= text.size())
        fail(TreebankError::Kind::UnbalancedBrackets, "missing ')'");
      char c = text[pos];
      if (c == ')') {
        ++pos;
        break;
      }
      if (c == '(') {
        if (saw_token)
          fail(TreebankError::Kind::MalformedNode,
               "mixed token and bracketed content under '" + node.label + "'");
        node.children.push_back(parse_node());
      } else {
        if (saw_token)
          fail(TreebankError::Kind::MalformedNode,
               "multiple tokens under '" + node.label + "'");
        if (!node.children.empty())
          fail(TreebankError::Kind::MalformedNode,
               "mixed token and bracketed content under '" + node.label + "'");
        node.token = unescape_token(read_atom());
        saw_token = true;
      }
      skip_ws();
    }

    if (node.label.empty() && node.children.empty() && node.token.empty())
      fail(TreebankError::Kind::MalformedNode, "empty node '()'");
    if (node.children.empty() && node.token.empty())
      fail(TreebankError::Kind::MalformedNode,
           "node '" + node.label + "' has neither children nor a token");
    if (node.label.empty() && node.token.empty() && node.children.size() == 1) {
      // PTB files often write "( (S ...))"; fold the unlabeled wrapper away.
      Node inner = std::move(node.children.front());
      return inner;
    }
    if (node.label.empty())
      fail(TreebankError::Kind::MalformedNode, "internal node without a label");
    return node;
  }
};

int assign_spans(Node& node, int next_token) {
  node.span.begin = next_token;
  if (node.is_leaf()) {
    node.span.end = next_token + 1;
    return node.span.end;
  }
  for (Node& child : node.children) next_token = assign_spans(child, next_token);
  node.span.end = next_token;
  return next_token;
}

void collect_leaves(const Node& node, std::vector<const Node*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const Node& child : node.children) collect_leaves(child, out);
}

void collect_maximal(const Node& node, bool (*family)(const std::string&),
                     std::vector<const Node*>& out) {
  for (const Node& child : node.children) {
    if (!child.is_leaf() && family(child.label)) {
      out.push_back(&child);
    } else {
      collect_maximal(child, family, out);
    }
  }
}

}  // namespace

bool is_noun_phrase_label(const std::string& label) {
  const std::string key = family_key(label);
  return key == "NP" || key == "NX" || key == "WHNP";
}

bool is_verb_phrase_label(const std::string& label) {
  return family_key(label) == "VP";
}

bool is_prep_phrase_label(const std::string& label) {
  const std::string key = family_key(label);
  return key == "PP" || key == "WHPP";
}

bool is_clause_label(const std::string& label) {
  const std::string key = family_key(label);
  return key == "S" || key == "SBAR" || key == "SBARQ" || key == "SINV" ||
         key == "SQ";
}

std::vector<const Node*> ParseTree::leaves() const {
  std::vector<const Node*> out;
  collect_leaves(root, out);
  return out;
}

std::vector<std::string> ParseTree::tokens() const {
  std::vector<std::string> out;
  for (const Node* leaf : leaves()) out.push_back(leaf->token);
  return out;
}

ParseTree parse_treebank(const std::string& text) {
  Parser parser(text);
  if (parser.at_end())
    throw TreebankError(TreebankError::Kind::EmptyTree, "empty input");

  Node top = parser.parse_node();
  if (!parser.at_end())
    throw TreebankError(
        TreebankError::Kind::UnbalancedBrackets,
        "trailing content after the tree at offset " + std::to_string(parser.pos));

  ParseTree tree;
  if (top.label == "ROOT" || top.label == "TOP" || is_clause_label(top.label)) {
    if (top.label == "TOP") top.label = "ROOT";
    tree.root = std::move(top);
  } else {
    tree.root.label = "ROOT";
    tree.root.children.push_back(std::move(top));
  }

  if (tree.root.is_leaf())
    throw TreebankError(TreebankError::Kind::EmptyTree,
                        "tree has a bare root and no phrase structure");
  assign_spans(tree.root, 0);
  if (tree.root.span.width() == 0)
    throw TreebankError(TreebankError::Kind::EmptyTree, "tree has no leaves");

  std::string text_out;
  for (const Node* leaf : tree.leaves()) {
    if (leaf->token.empty())
      throw TreebankError(TreebankError::Kind::MalformedNode,
                          "leaf with empty token under '" + leaf->label + "'");
    if (!text_out.empty()) text_out += ' ';
    text_out += leaf->token;
  }
  tree.sentence_text = std::move(text_out);
  return tree;
}

std::string serialize(const Node& node) {
  std::string out = "(" + node.label;
  if (node.is_leaf()) {
    out += ' ';
    out += escape_token(node.token);
  } else {
    for (const Node& child : node.children) {
      out += ' ';
      out += serialize(child);
    }
  }
  out += ')';
  return out;
}

std::string serialize(const ParseTree& tree) { return serialize(tree.root); }

std::vector<const Node*> maximal_descendants(const Node& root,
                                             bool (*family)(const std::string&)) {
  std::vector<const Node*> out;
  collect_maximal(root, family, out);
  return out;
}

std::vector<PhraseChunk> extract_chunks(const ParseTree& tree) {
  std::vector<PhraseChunk> chunks;
  struct Walker {
    std::vector<PhraseChunk>& chunks;
    void walk(const Node& node, bool in_np, bool in_vp, bool in_pp) {
      for (const Node& child : node.children) {
        if (child.is_leaf()) continue;
        bool np = is_noun_phrase_label(child.label);
        bool vp = is_verb_phrase_label(child.label);
        bool pp = is_prep_phrase_label(child.label);
        if (np && !in_np)
          chunks.push_back({ChunkKind::NounPhrase, &child, child.span.end - 1});
        if (vp && !in_vp)
          chunks.push_back({ChunkKind::VerbPhrase, &child, child.span.begin});
        if (pp && !in_pp)
          chunks.push_back({ChunkKind::PrepPhrase, &child, child.span.begin});
        walk(child, in_np || np, in_vp || vp, in_pp || pp);
      }
    }
  } walker{chunks};

  const Node& root = tree.root;
  bool np = is_noun_phrase_label(root.label);
  bool vp = is_verb_phrase_label(root.label);
  bool pp = is_prep_phrase_label(root.label);
  if (np) chunks.push_back({ChunkKind::NounPhrase, &root, root.span.end - 1});
  if (vp) chunks.push_back({ChunkKind::VerbPhrase, &root, root.span.begin});
  if (pp) chunks.push_back({ChunkKind::PrepPhrase, &root, root.span.begin});
  walker.walk(root, np, vp, pp);
  return chunks;
}

}  // namespace phoenix
