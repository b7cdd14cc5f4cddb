#pragma once

// Value types shared by the codec, the scorer and the dataset pipeline.
// Everything is an immutable value after construction; operations are pure.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixie/errors.hpp"
#include "mixie/text.hpp"

namespace mixie {

inline constexpr std::string_view kReservedChars = "<>:;";

inline bool has_reserved_char(std::string_view s) {
  return s.find_first_of(kReservedChars) != std::string_view::npos;
}

enum class TextTask { tc, sc };

enum class WordTask { ner, re, ee, sent_rw, sent_n, sent_adj, sent_n_adj };

inline const char* to_string(TextTask t) {
  return t == TextTask::tc ? "tc" : "sc";
}

inline const char* to_string(WordTask t) {
  switch (t) {
    case WordTask::ner: return "ner";
    case WordTask::re: return "re";
    case WordTask::ee: return "ee";
    case WordTask::sent_rw: return "sent_rw";
    case WordTask::sent_n: return "sent_n";
    case WordTask::sent_adj: return "sent_adj";
    case WordTask::sent_n_adj: return "sent_n_adj";
  }
  return "unknown";
}

inline TextTask text_task_from_string(std::string_view s) {
  if (s == "tc") return TextTask::tc;
  if (s == "sc") return TextTask::sc;
  fail(ErrorCode::unknown_task, "unknown text task: " + std::string(s));
}

inline WordTask word_task_from_string(std::string_view s) {
  if (s == "ner") return WordTask::ner;
  if (s == "re") return WordTask::re;
  if (s == "ee") return WordTask::ee;
  if (s == "sent_rw") return WordTask::sent_rw;
  if (s == "sent_n") return WordTask::sent_n;
  if (s == "sent_adj") return WordTask::sent_adj;
  if (s == "sent_n_adj") return WordTask::sent_n_adj;
  fail(ErrorCode::unknown_task, "unknown word task: " + std::string(s));
}

// Word-level units. Spans are surface strings, not offsets: the units are
// recovered from generated text where offsets have no meaning.
struct LabelSpanPair {
  std::string label;
  std::string span;
  bool operator==(const LabelSpanPair&) const = default;
};

struct RelationTriple {
  std::string object;
  std::string relation;
  std::string subject;
  bool operator==(const RelationTriple&) const = default;
};

// Event unit with four opaque fields. Field semantics are dataset-defined;
// by convention the second field carries the event label.
struct EventQuad {
  std::array<std::string, 4> fields;
  bool operator==(const EventQuad&) const = default;
};

using PairList = std::vector<LabelSpanPair>;
using TripleList = std::vector<RelationTriple>;
using QuadList = std::vector<EventQuad>;

using WordPayload = std::variant<PairList, TripleList, QuadList>;

enum class PayloadKind { pairs, triples, quads };

inline const char* to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::pairs: return "pairs";
    case PayloadKind::triples: return "triples";
    case PayloadKind::quads: return "quads";
  }
  return "unknown";
}

inline PayloadKind payload_kind(const WordPayload& p) {
  return static_cast<PayloadKind>(p.index());
}

inline PayloadKind payload_kind_for(WordTask task) {
  switch (task) {
    case WordTask::re: return PayloadKind::triples;
    case WordTask::ee: return PayloadKind::quads;
    default: return PayloadKind::pairs;
  }
}

inline std::size_t unit_count(const WordPayload& p) {
  return std::visit([](const auto& units) { return units.size(); }, p);
}

// Which text-level task (candidate label set) and word-level task a sample
// belongs to, plus the instruction word appended to every input sequence.
struct TaskSpec {
  TextTask text_task = TextTask::tc;
  std::vector<std::string> labels;  // candidate labels, in rendering order
  WordTask word_task = WordTask::ner;
  std::string instruction_word;
  std::optional<std::size_t> max_units;  // optional per-sample unit cap

  bool has_label(std::string_view label) const {
    for (const auto& l : labels)
      if (l == label) return true;
    return false;
  }
};

// Default polarity set for sentiment-classification specs. Configurable;
// datasets carry their own label set in the file header.
inline std::vector<std::string> default_sc_labels() {
  return {"positive", "negative"};
}

struct MixedSample {
  std::string id;
  std::string text;
  std::string gold_label;
  WordPayload gold_payload;
  bool draft = false;  // machine-drafted, pending human correction
  std::string note;
};

// Wrappers produced by the codec. SerializedInput always ends with the
// instruction word; SerializedOutput always begins with '<'.
struct SerializedInput {
  std::string value;
};

struct SerializedOutput {
  std::string value;
};

struct Violation {
  std::string code;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate_spec(const TaskSpec& spec) {
  ValidationReport out;
  if (spec.labels.empty()) out.push_back({"empty_label_set", "candidate label set is empty"});
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    const auto& label = spec.labels[i];
    if (label.empty()) out.push_back({"empty_label", "label " + std::to_string(i) + " is empty"});
    if (has_reserved_char(label))
      out.push_back({"reserved_char_in_label", "label '" + label + "' contains a reserved character"});
    for (std::size_t j = i + 1; j < spec.labels.size(); ++j)
      if (spec.labels[j] == label)
        out.push_back({"duplicate_label", "label '" + label + "' appears more than once"});
  }
  if (spec.instruction_word.empty())
    out.push_back({"empty_instruction_word", "instruction word is empty"});
  else if (has_reserved_char(spec.instruction_word))
    out.push_back({"reserved_char_in_instruction_word",
                   "instruction word contains a reserved character"});
  return out;
}

// Violations are data, not failures: an empty report means the sample is
// valid under the spec. Draft samples skip the gold-label membership check,
// since their labels are machine output pending correction.
inline ValidationReport validate_sample(const MixedSample& sample, const TaskSpec& spec) {
  ValidationReport out = validate_spec(spec);
  if (!sample.draft && !spec.has_label(sample.gold_label))
    out.push_back({"label_not_in_set",
                   "gold label '" + sample.gold_label + "' is not in the candidate set"});
  if (payload_kind(sample.gold_payload) != payload_kind_for(spec.word_task))
    out.push_back({"variant_mismatch",
                   std::string("payload variant ") + to_string(payload_kind(sample.gold_payload)) +
                       " does not match word task " + to_string(spec.word_task)});
  else if (const auto* pairs = std::get_if<PairList>(&sample.gold_payload)) {
    for (const auto& p : *pairs) {
      if (normalize_text(p.label).empty())
        out.push_back({"empty_pair_label", "sample " + sample.id + ": pair label is empty"});
      if (normalize_text(p.span).empty())
        out.push_back({"empty_pair_span", "sample " + sample.id + ": pair span is empty"});
    }
  }
  if (spec.max_units && unit_count(sample.gold_payload) > *spec.max_units)
    out.push_back({"too_many_units",
                   "sample " + sample.id + " has " + std::to_string(unit_count(sample.gold_payload)) +
                       " units, cap is " + std::to_string(*spec.max_units)});
  if (normalize_text(sample.text).empty())
    out.push_back({"empty_text", "sample " + sample.id + ": text is empty after normalization"});
  return out;
}

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

}  // namespace mixie
