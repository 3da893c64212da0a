#include "phoenix/coder.hpp"

#include <set>
#include <tuple>

#include "phoenix/log.hpp"

namespace phoenix {

const char* to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::NoVerbMatch: return "NoVerbMatch";
    case SkipReason::NoSourceActor: return "NoSourceActor";
    case SkipReason::ComplexSentence: return "ComplexSentence";
  }
  return "NoVerbMatch";
}

namespace {

std::string label_family(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  size_t pos = label.find_first_of("-=|");
  return pos == std::string::npos ? label : label.substr(0, pos);
}

bool is_embedding_label(const std::string& label) {
  return is_verb_phrase_label(label) || label_family(label) == "SBAR";
}

// Longest clause-within-clause chain in the subtree rooted at `node`,
// counting `node` itself when it is a clause.
int clause_nesting(const Node& node) {
  int deepest = 0;
  for (const Node& child : node.children)
    deepest = std::max(deepest, clause_nesting(child));
  return deepest + (is_clause_label(node.label) ? 1 : 0);
}

std::vector<std::string> slice(const std::vector<std::string>& tokens,
                               int begin, int end) {
  return {tokens.begin() + begin, tokens.begin() + end};
}

// match_actor anchored at each successive start inside the phrase, so
// leading determiners or appositives don't block the pattern. Leftmost
// match wins; the trie keeps it longest at that position.
std::optional<std::string> resolve_actor(const Node& phrase,
                                         const std::vector<std::string>& tokens,
                                         const DictionarySet& dicts,
                                         const Date& at_date) {
  for (int off = phrase.span.begin; off < phrase.span.end; ++off) {
    auto m = dicts.match_actor(slice(tokens, off, phrase.span.end), at_date);
    if (m) return m->code;
  }
  return std::nullopt;
}

struct VerbHit {
  const VerbEntry* entry;
  int begin;  // absolute token index of the first matched token
  int end;    // one past the last matched token
};

std::optional<VerbHit> resolve_verb(const Node& phrase,
                                    const std::vector<std::string>& tokens,
                                    const DictionarySet& dicts) {
  for (int off = phrase.span.begin; off < phrase.span.end; ++off) {
    auto m = dicts.match_verb(slice(tokens, off, phrase.span.end));
    if (m) return VerbHit{m->entry, off, off + m->matched_length};
  }
  return std::nullopt;
}

// First embedded VP/SBAR (preorder, strictly below `node`) that starts at or
// after `from` and whose own verb matches.
std::optional<VerbHit> find_embedded_verb(const Node& node, int from,
                                          const std::vector<std::string>& tokens,
                                          const DictionarySet& dicts) {
  for (const Node& child : node.children) {
    if (child.is_leaf()) continue;
    if (is_embedding_label(child.label) && child.span.begin >= from) {
      if (auto hit = resolve_verb(child, tokens, dicts)) return hit;
    }
    if (auto hit = find_embedded_verb(child, from, tokens, dicts)) return hit;
  }
  return std::nullopt;
}

struct SentenceContext {
  const std::vector<std::string>& lower;
  const std::vector<std::string>& original;
  const DictionarySet& dicts;
  const Date& at_date;
  const std::string& source;
};

void code_verb_phrase(const Node& vp, const SentenceContext& ctx,
                      std::vector<CodedEvent>& events) {
  // "denounced and sanctioned": one event per conjunct VP.
  std::vector<const Node*> conjuncts;
  for (const Node& child : vp.children)
    if (!child.is_leaf() && is_verb_phrase_label(child.label))
      conjuncts.push_back(&child);
  if (conjuncts.size() >= 2) {
    for (const Node* conjunct : conjuncts)
      code_verb_phrase(*conjunct, ctx, events);
    return;
  }

  auto verb = resolve_verb(vp, ctx.lower, ctx.dicts);
  if (!verb) return;

  std::optional<std::string> target;
  for (const Node* np : maximal_descendants(vp, is_noun_phrase_label)) {
    if (np->span.begin < verb->end) continue;  // before the verb: not an object
    target = resolve_actor(*np, ctx.lower, ctx.dicts, ctx.at_date);
    break;
  }

  std::string code = verb->entry->code;
  if (auto inner = find_embedded_verb(vp, verb->end, ctx.lower, ctx.dicts))
    code = compose_codes(*verb->entry, *inner->entry);

  std::string trigger;
  for (int i = verb->begin; i < verb->end; ++i) {
    if (!trigger.empty()) trigger += ' ';
    trigger += ctx.original[i];
  }
  events.push_back(CodedEvent{ctx.source, target, code, 0, trigger});
}

}  // namespace

std::string compose_codes(const VerbEntry& outer, const VerbEntry& inner) {
  auto it = outer.composition_rules.find(inner.code.substr(0, 2));
  return it != outer.composition_rules.end() ? it->second : outer.code;
}

CodingOutcome code_sentence(const ParseTree& tree, const DictionarySet& dicts,
                            const Date& at_date) {
  CodingOutcome out;
  auto skip = [&](SkipReason reason) {
    out.skipped_reason = reason;
    return out;
  };

  std::vector<std::string> original = tree.tokens();
  std::vector<std::string> lower = lower_tokens(original);

  const Node* clause = nullptr;
  if (is_clause_label(tree.root.label)) {
    clause = &tree.root;
  } else {
    auto clauses = maximal_descendants(tree.root, is_clause_label);
    if (!clauses.empty()) clause = clauses.front();
  }
  if (!clause) return skip(SkipReason::NoVerbMatch);
  if (clause_nesting(*clause) > 3) return skip(SkipReason::ComplexSentence);

  auto vps = maximal_descendants(*clause, is_verb_phrase_label);
  if (vps.empty()) return skip(SkipReason::NoVerbMatch);
  const Node* vp = vps.front();

  const Node* subject = nullptr;
  for (const Node* np : maximal_descendants(*clause, is_noun_phrase_label)) {
    if (np->span.end <= vp->span.begin) {
      subject = np;
      break;
    }
  }
  if (!subject) return skip(SkipReason::NoSourceActor);

  int np_children = 0;
  bool has_cc = false;
  for (const Node& child : subject->children) {
    if (!child.is_leaf() && is_noun_phrase_label(child.label)) ++np_children;
    if (child.is_leaf() && child.label == "CC") has_cc = true;
  }
  if (np_children >= 2 && has_cc)
    log::info("conjoined subject '" +
              tree.sentence_text.substr(0, 40) +
              "...': coding the first matching conjunct only");

  auto source = resolve_actor(*subject, lower, dicts, at_date);
  if (!source) return skip(SkipReason::NoSourceActor);

  SentenceContext ctx{lower, original, dicts, at_date, *source};
  std::vector<CodedEvent> events;
  code_verb_phrase(*vp, ctx, events);
  if (events.empty()) return skip(SkipReason::NoVerbMatch);
  out.events = std::move(events);
  return out;
}

std::vector<CodedEvent> code_story(const StoryDocument& doc,
                                   const DictionarySet& dicts) {
  if (!doc.parse_trees || doc.parse_trees->empty())
    throw CoderError(CoderError::Kind::NoParses,
                     "story " + doc.story_id + " has no parse trees");
  Date at_date = date_of(doc.fetched_at);
  std::vector<CodedEvent> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (size_t i = 0; i < doc.parse_trees->size(); ++i) {
    ParseTree tree = parse_treebank((*doc.parse_trees)[i]);
    CodingOutcome outcome = code_sentence(tree, dicts, at_date);
    for (CodedEvent& ev : outcome.events) {
      ev.sentence_id = int(i);
      auto key = std::make_tuple(ev.source_code, ev.target_code.value_or(""),
                                 ev.event_code);
      if (seen.insert(key).second) out.push_back(std::move(ev));
    }
  }
  return out;
}

}  // namespace phoenix
