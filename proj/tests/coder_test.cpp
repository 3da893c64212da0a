#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phoenix/coder.hpp"
#include "test_util.hpp"

using namespace phoenix;

namespace {

const Date kToday{2014, 6, 15};

CodingOutcome code(const std::string& tree_text,
                   const Date& at_date = kToday) {
  static DictionarySet dicts = testutil::load_toy_dicts();
  return code_sentence(parse_treebank(tree_text), dicts, at_date);
}

}  // namespace

TEST_CASE("transitive sentence codes source, verb, target") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP Russia)))))");
  CHECK_FALSE(out.skipped_reason.has_value());
  REQUIRE(out.events.size() == 1);
  const CodedEvent& ev = out.events[0];
  CHECK(ev.source_code == "USAGOV");
  REQUIRE(ev.target_code.has_value());
  CHECK(*ev.target_code == "RUS");
  CHECK(ev.event_code == "111");
  CHECK(ev.trigger_text == "denounced");
}

TEST_CASE("trigger text keeps original casing and spans multi-token verbs") {
  auto out = code(
      "(ROOT (S (NP (NNP Assad)) (VP (VBD Met) (PP (IN With) (NP (NNP "
      "Iran))))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "040");
  CHECK(out.events[0].trigger_text == "Met With");
  CHECK(out.events[0].target_code.value() == "IRN");
}

TEST_CASE("statement without an object stays targetless") {
  auto out = code("(ROOT (S (NP (NNS Rebels)) (VP (VBD protested))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "SYRREB");
  CHECK_FALSE(out.events[0].target_code.has_value());
  CHECK(out.events[0].event_code == "14");
}

TEST_CASE("an object NP that matches no actor leaves the event targetless") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP France)))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "USAGOV");
  CHECK_FALSE(out.events[0].target_code.has_value());
  CHECK(out.events[0].event_code == "111");
}

TEST_CASE("leading determiners do not block the subject match") {
  auto out = code(
      "(ROOT (S (NP (DT The) (NNS rebels)) (VP (VBD protested))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "SYRREB");
}

TEST_CASE("passive auxiliary: verb is found by scanning the verb phrase") {
  auto out = code(
      "(ROOT (S (NP (NNS Rebels)) (VP (VBD were) (VP (VBN defeated)))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "SYRREB");
  CHECK_FALSE(out.events[0].target_code.has_value());
  CHECK(out.events[0].event_code == "183");
  CHECK(out.events[0].trigger_text == "defeated");
}

TEST_CASE("target must begin at or after the end of the verb match") {
  // The only NP in the verb phrase sits inside the verb's own span scan
  // window but starts before a later verb; here the NP follows the verb.
  auto out = code(
      "(ROOT (S (NP (NNP Iran)) (VP (VBD sanctioned) (NP (NP (NNP Islamic) "
      "(NNP State)) (NN leadership)))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "IRN");
  CHECK(out.events[0].target_code.value() == "IMGMOSISI");
  CHECK(out.events[0].event_code == "163");
}

TEST_CASE("conjoined subject codes the first matching conjunct") {
  auto out = code(
      "(ROOT (S (NP (NP (NNP Obama)) (CC and) (NP (NNP Russia))) (VP (VBD "
      "met) (PP (IN with) (NP (NNP Iran))))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "USAGOV");
  CHECK(out.events[0].target_code.value() == "IRN");
}

TEST_CASE("subject resolution skips non-matching leading conjuncts") {
  auto out = code(
      "(ROOT (S (NP (NP (NNP France)) (CC and) (NP (NNP Russia))) (VP (VBD "
      "denounced) (NP (NNP Iran)))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "RUS");
}

TEST_CASE("conjoined verb phrases produce one event per conjunct") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VP (VBD sanctioned) (NP (NNP Iran))) "
      "(CC and) (VP (VBD denounced) (NP (NNS rebels))))))");
  REQUIRE(out.events.size() == 2);
  CHECK(out.events[0].source_code == "USAGOV");
  CHECK(out.events[0].target_code.value() == "IRN");
  CHECK(out.events[0].event_code == "163");
  CHECK(out.events[1].source_code == "USAGOV");
  CHECK(out.events[1].target_code.value() == "SYRREB");
  CHECK(out.events[1].event_code == "111");
}

TEST_CASE("conjunct whose verb is unknown contributes no event") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VP (VBD sanctioned) (NP (NNP Iran))) "
      "(CC and) (VP (VBD hesitated)))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "163");
}

TEST_CASE("verb with embedded infinitive composes through its rule table") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBZ intends) (S (VP (TO to) (VP (VB "
      "aid) (NP (NNS rebels))))))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "033");  // 03 + embedded 07 -> 033
  CHECK(out.events[0].target_code.value() == "SYRREB");
  CHECK(out.events[0].trigger_text == "intends");
}

TEST_CASE("verb with embedded clause composes through its rule table") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBD warned) (SBAR (IN that) (S (NP "
      "(NNS rebels)) (VP (VBD fought)))))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "1384");  // 138 + embedded 19 -> 1384
  CHECK(out.events[0].source_code == "USAGOV");
  CHECK(out.events[0].target_code.value() == "SYRREB");
}

TEST_CASE("embedded verb with no rule for its root keeps the outer code") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBD warned) (SBAR (IN that) (S (NP "
      "(NNS rebels)) (VP (VBD praised) (NP (NNP Assad))))))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "138");  // no rule for root 05

  out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBZ intends) (S (VP (TO to) (VP (VB "
      "sanction) (NP (NNP Iran))))))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "03");  // no rule for root 16
}

TEST_CASE("no embedded verb leaves the bare code") {
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBZ intends) (NP (NN peace)))))");
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].event_code == "03");
  CHECK_FALSE(out.events[0].target_code.has_value());
}

TEST_CASE("compose_codes consults the outer entry's rule for the inner root") {
  VerbEntry outer{{}, "138", {{"19", "1384"}}};
  VerbEntry inner_hit{{}, "190", {}};
  VerbEntry inner_miss{{}, "051", {}};
  CHECK(compose_codes(outer, inner_hit) == "1384");
  CHECK(compose_codes(outer, inner_miss) == "138");
}

TEST_CASE("skip: no verb match") {
  auto out = code("(ROOT (S (NP (NNP Obama)) (VP (VBD slept))))");
  CHECK(out.events.empty());
  REQUIRE(out.skipped_reason.has_value());
  CHECK(*out.skipped_reason == SkipReason::NoVerbMatch);

  // A bare noun phrase has no clause at all.
  out = code("(NP (NNP Obama))");
  CHECK(out.skipped_reason == SkipReason::NoVerbMatch);

  // A clause without any verb phrase.
  out = code("(ROOT (S (NP (NNP Obama))))");
  CHECK(out.skipped_reason == SkipReason::NoVerbMatch);

  out = code("(ROOT (INTJ (UH Hey)))");
  CHECK(out.skipped_reason == SkipReason::NoVerbMatch);
}

TEST_CASE("skip: no source actor") {
  auto out = code("(ROOT (S (NP (DT The) (NN weather)) (VP (VBD improved))))");
  CHECK(out.events.empty());
  CHECK(out.skipped_reason == SkipReason::NoSourceActor);

  // No noun phrase before the verb phrase.
  out = code("(ROOT (S (VP (VB Stop))))");
  CHECK(out.skipped_reason == SkipReason::NoSourceActor);

  // Inverted clause: the only NP follows the VP.
  out = code("(ROOT (SINV (VP (VBD said)) (NP (NNP Obama))))");
  CHECK(out.skipped_reason == SkipReason::NoSourceActor);
}

TEST_CASE("skip: clauses nested deeper than three levels") {
  // Three clause levels on the deepest path: coded.
  auto ok = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBD warned) (SBAR (IN that) (S (NP "
      "(NNS rebels)) (VP (VBD fought)))))))");
  CHECK(ok.events.size() == 1);

  // Four levels: skipped.
  auto out = code(
      "(ROOT (S (NP (NNP Obama)) (VP (VBD warned) (SBAR (IN that) (S (NP "
      "(NNS rebels)) (VP (VBD warned) (SBAR (IN that) (S (NP (NNP Iran)) "
      "(VP (VBD fought))))))))))");
  CHECK(out.events.empty());
  CHECK(out.skipped_reason == SkipReason::ComplexSentence);
}

TEST_CASE("source matching honors the event date") {
  const char* tree =
      "(ROOT (S (NP (NNP Soviet) (NNP Union)) (VP (VBD denounced) (NP (NNP "
      "Iran)))))";
  auto out = code(tree, Date{1980, 1, 1});
  REQUIRE(out.events.size() == 1);
  CHECK(out.events[0].source_code == "RUS");

  out = code(tree, kToday);
  CHECK(out.skipped_reason == SkipReason::NoSourceActor);
}

TEST_CASE("skip reason names") {
  CHECK(std::string(to_string(SkipReason::NoVerbMatch)) == "NoVerbMatch");
  CHECK(std::string(to_string(SkipReason::NoSourceActor)) == "NoSourceActor");
  CHECK(std::string(to_string(SkipReason::ComplexSentence)) ==
        "ComplexSentence");
}

TEST_CASE("code_story numbers sentences and drops within-story duplicates") {
  DictionarySet dicts = testutil::load_toy_dicts();
  StoryDocument doc;
  doc.story_id = "00000000deadbeef";
  doc.fetched_at = start_of_day(kToday);
  doc.parse_trees = std::vector<std::string>{
      "(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP Russia)))))",
      "(ROOT (S (NP (NNP Obama)) (VP (VBD slept))))",
      "(ROOT (S (NP (NNS Rebels)) (VP (VBD protested))))",
      // Same key as sentence 0: collapsed to the first occurrence.
      "(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNP Russia)))))",
      // Same source+code but different target: kept.
      "(ROOT (S (NP (NNP Obama)) (VP (VBD denounced) (NP (NNS rebels)))))"};

  auto events = code_story(doc, dicts);
  REQUIRE(events.size() == 3);
  CHECK(events[0].sentence_id == 0);
  CHECK(events[0].target_code.value() == "RUS");
  CHECK(events[1].sentence_id == 2);
  CHECK(events[1].event_code == "14");
  CHECK(events[2].sentence_id == 4);
  CHECK(events[2].target_code.value() == "SYRREB");
}

TEST_CASE("code_story requires parse trees") {
  DictionarySet dicts = testutil::load_toy_dicts();
  StoryDocument doc;
  doc.story_id = "00000000deadbeef";

  CHECK_THROWS_AS(code_story(doc, dicts), CoderError);
  doc.parse_trees = std::vector<std::string>{};
  try {
    code_story(doc, dicts);
    FAIL("expected CoderError");
  } catch (const CoderError& e) {
    CHECK(e.kind() == CoderError::Kind::NoParses);
  }
}

TEST_CASE("code_story dates dictionary lookups from the fetch timestamp") {
  DictionarySet dicts = testutil::load_toy_dicts();
  StoryDocument doc;
  doc.story_id = "00000000deadbeef";
  doc.parse_trees = std::vector<std::string>{
      "(ROOT (S (NP (NNP Soviet) (NNP Union)) (VP (VBD denounced) (NP (NNP "
      "Iran)))))"};

  doc.fetched_at = start_of_day(Date{1980, 1, 1});
  CHECK(code_story(doc, dicts).size() == 1);

  doc.fetched_at = start_of_day(kToday);
  CHECK(code_story(doc, dicts).empty());
}
