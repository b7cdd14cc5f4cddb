#include <catch2/catch_amalgamated.hpp>

#include "mixie/instruction_words.hpp"
#include "mixie/model.hpp"

using namespace mixie;

namespace {

TaskSpec tcree_spec(WordTask task = WordTask::ner) {
  return make_task_spec(TextTask::tc, {"sport", "movie", "women", "IT", "CM"}, task);
}

}  // namespace

TEST_CASE("validate_sample accepts a conforming sample", "[model]") {
  MixedSample sample{"s1", "メッシはサッカー選手です。", "sport",
                     PairList{{"Person", "メッシ"}}};
  CHECK(validate_sample(sample, tcree_spec()).empty());
}

TEST_CASE("validate_sample flags a label outside the candidate set", "[model]") {
  MixedSample sample{"s1", "text", "music", PairList{}};
  const auto report = validate_sample(sample, tcree_spec());
  REQUIRE(report.size() == 1);
  CHECK(report[0].code == "label_not_in_set");
}

TEST_CASE("validate_sample flags a payload variant mismatch", "[model]") {
  MixedSample sample{"s1", "text", "sport", PairList{{"A", "x"}}};
  const auto report = validate_sample(sample, tcree_spec(WordTask::re));
  REQUIRE(report.size() == 1);
  CHECK(report[0].code == "variant_mismatch");
}

TEST_CASE("validate_sample flags empty pair components and empty text", "[model]") {
  MixedSample sample{"s1", "  ", "sport", PairList{{"A", " "}}};
  const auto report = validate_sample(sample, tcree_spec());
  REQUIRE(report.size() == 2);
  CHECK(report[0].code == "empty_pair_span");
  CHECK(report[1].code == "empty_text");
}

TEST_CASE("validate_sample enforces the per-sample unit cap", "[model]") {
  TaskSpec spec = tcree_spec(WordTask::re);
  spec.max_units = 1;
  MixedSample one{"s1", "text", "sport", TripleList{{"a", "b", "c"}}};
  CHECK(validate_sample(one, spec).empty());
  MixedSample two{"s2", "text", "sport", TripleList{{"a", "b", "c"}, {"d", "e", "f"}}};
  const auto report = validate_sample(two, spec);
  REQUIRE(report.size() == 1);
  CHECK(report[0].code == "too_many_units");
}

TEST_CASE("draft samples skip the label membership check", "[model]") {
  MixedSample draft{"s1", "text", "", PairList{{"A", "x"}}};
  draft.draft = true;
  CHECK(validate_sample(draft, tcree_spec()).empty());
}

TEST_CASE("validate_spec rejects duplicates, reserved characters and empty sets", "[model]") {
  TaskSpec spec = tcree_spec();
  CHECK(validate_spec(spec).empty());

  spec.labels = {};
  CHECK_FALSE(validate_spec(spec).empty());

  spec.labels = {"a", "a"};
  REQUIRE(validate_spec(spec).size() == 1);
  CHECK(validate_spec(spec)[0].code == "duplicate_label");

  spec.labels = {"a<b"};
  CHECK(validate_spec(spec)[0].code == "reserved_char_in_label");

  spec.labels = {"a"};
  spec.instruction_word = "";
  CHECK(validate_spec(spec)[0].code == "empty_instruction_word");
  spec.instruction_word = "x;y";
  CHECK(validate_spec(spec)[0].code == "reserved_char_in_instruction_word");
}

TEST_CASE("validate_sample is empty iff every invariant holds", "[model][property]") {
  // Each violating sample breaks exactly one invariant at a time.
  const TaskSpec spec = tcree_spec();
  MixedSample good{"s1", "text", "IT", PairList{{"A", "x"}}};
  REQUIRE(validate_sample(good, spec).empty());

  auto bad_label = good;
  bad_label.gold_label = "jazz";
  CHECK(validate_sample(bad_label, spec).size() == 1);

  auto bad_variant = good;
  bad_variant.gold_payload = TripleList{};
  CHECK(validate_sample(bad_variant, spec).size() == 1);

  auto bad_span = good;
  bad_span.gold_payload = PairList{{"A", ""}};
  CHECK(validate_sample(bad_span, spec).size() == 1);

  auto bad_text = good;
  bad_text.text = "　";
  CHECK(validate_sample(bad_text, spec).size() == 1);
}

TEST_CASE("payload helpers", "[model]") {
  CHECK(payload_kind_for(WordTask::ner) == PayloadKind::pairs);
  CHECK(payload_kind_for(WordTask::sent_n_adj) == PayloadKind::pairs);
  CHECK(payload_kind_for(WordTask::re) == PayloadKind::triples);
  CHECK(payload_kind_for(WordTask::ee) == PayloadKind::quads);
  CHECK(unit_count(WordPayload{TripleList{{"a", "b", "c"}}}) == 1);
  CHECK(unit_count(WordPayload{PairList{}}) == 0);
}

TEST_CASE("task enum round-trips through strings", "[model]") {
  for (const WordTask t : {WordTask::ner, WordTask::re, WordTask::ee, WordTask::sent_rw,
                           WordTask::sent_n, WordTask::sent_adj, WordTask::sent_n_adj})
    CHECK(word_task_from_string(to_string(t)) == t);
  CHECK_THROWS_AS(word_task_from_string("pos"), Error);
}
