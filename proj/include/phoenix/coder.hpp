#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phoenix/dictionaries.hpp"
#include "phoenix/store.hpp"
#include "phoenix/treebank.hpp"

namespace phoenix {

struct CodedEvent {
  std::string source_code;
  std::optional<std::string> target_code;  // statements/protests may lack one
  std::string event_code;                  // 2-4 digits after composition
  int sentence_id = 0;                     // 0-based within the story
  std::string trigger_text;                // matched verb tokens, original case

  bool operator==(const CodedEvent&) const = default;
};

enum class SkipReason { NoVerbMatch, NoSourceActor, ComplexSentence };

const char* to_string(SkipReason reason);

struct CodingOutcome {
  std::vector<CodedEvent> events;
  std::optional<SkipReason> skipped_reason;  // present iff events is empty
};

// Tree-driven sentence coding:
//   1. main clause = the root if it is a clause, else the leftmost maximal
//      clause node; no clause -> NoVerbMatch. Clauses nesting more than 3
//      levels deep are skipped as ComplexSentence.
//   2. coded VP = first maximal VP inside the clause; none -> NoVerbMatch.
//   3. source = first maximal NP ending before the VP, resolved through
//      match_actor starting at each successive token of the phrase (so
//      determiners don't block a match); failure -> NoSourceActor. Conjoined
//      subjects resolve to their first matching conjunct (logged).
//   4. verb = match_verb at each successive token of the VP.
//   5. target = first maximal NP inside the VP starting at or after the end
//      of the verb match; an unmatched or missing target leaves the event
//      targetless.
//   6. an embedded VP/SBAR after the verb whose own verb matches composes
//      the event code via compose_codes. Conjoined VPs yield one event per
//      matching conjunct.
CodingOutcome code_sentence(const ParseTree& tree, const DictionarySet& dicts,
                            const Date& at_date);

// Composed code when `outer` governs `inner`: the outer entry's rule for the
// inner root if present, otherwise the outer code unchanged.
std::string compose_codes(const VerbEntry& outer, const VerbEntry& inner);

// Codes every stored parse tree of `doc` (dated by its fetch date) and
// collapses exact within-story duplicates — same source, target, and event
// code — to the first occurrence. Throws CoderError{NoParses} when the
// document has no trees.
std::vector<CodedEvent> code_story(const StoryDocument& doc,
                                   const DictionarySet& dicts);

}  // namespace phoenix
