#pragma once

// Bidirectional codec between structured records and the mark-token wire
// format.
//
//   input:      TEXT<label1>...<labelN>IW        (one bracket pair per
//               candidate label, in TaskSpec order, no separators)
//   output:     <chosen_label>IW BODY
//   pairs body:   :Label1;Span1:Label2;Span2     (no trailing ':')
//   triple body:  :Object;Relation;Subject:      (':' opens and closes a unit)
//   quad body:    :F1;F2;F3;F4:
//
// An empty body encodes an empty payload. Reserved characters : ; < > inside
// payload components are escaped with a backslash on encode and unescaped on
// parse; a literal backslash is doubled. A ':' shared between adjacent
// triple/quad units (":a;b;c:d;e;f:") is accepted on parse and normalized to
// the two-':' form on re-encode.
//
// Strict mode is the exact inverse of encode_output and throws on anything
// else. Tolerant mode never throws: it salvages every well-formed unit and
// reports everything it had to skip as diagnostics.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixie/errors.hpp"
#include "mixie/model.hpp"
#include "mixie/text.hpp"

namespace mixie {

enum class ParseMode { strict, tolerant };

enum class DiagnosticKind {
  leading_garbage,
  missing_label,
  malformed_label,
  iw_mismatch,
  stray_text,
  arity_mismatch,
  incomplete_pair,
  unterminated_unit,
};

inline const char* to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::leading_garbage: return "leading_garbage";
    case DiagnosticKind::missing_label: return "missing_label";
    case DiagnosticKind::malformed_label: return "malformed_label";
    case DiagnosticKind::iw_mismatch: return "iw_mismatch";
    case DiagnosticKind::stray_text: return "stray_text";
    case DiagnosticKind::arity_mismatch: return "arity_mismatch";
    case DiagnosticKind::incomplete_pair: return "incomplete_pair";
    case DiagnosticKind::unterminated_unit: return "unterminated_unit";
  }
  return "unknown";
}

struct Diagnostic {
  std::size_t position = 0;  // byte offset into the raw string
  DiagnosticKind kind = DiagnosticKind::stray_text;
  std::string message;
};

struct ParseOutcome {
  std::optional<std::string> label;
  WordPayload payload;
  std::vector<Diagnostic> diagnostics;
  ParseMode mode_used = ParseMode::tolerant;
};

inline std::string escape_component(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == ':' || c == ';' || c == '<' || c == '>') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// A backslash before anything other than an escapable character is kept
// literally, so unescaping is total.
inline std::string unescape_component(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char next = s[i + 1];
      if (next == '\\' || next == ':' || next == ';' || next == '<' || next == '>') {
        out.push_back(next);
        ++i;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

namespace detail {

// Position of the next unescaped occurrence of any char in `stops`, or
// s.size() if none.
inline std::size_t find_unescaped(std::string_view s, std::size_t i, std::string_view stops) {
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (stops.find(c) != std::string_view::npos) return i;
    ++i;
  }
  return s.size();
}

}  // namespace detail

inline SerializedInput build_input(std::string_view text, const TaskSpec& spec,
                                   const NormalizationPolicy& policy = {}) {
  const ValidationReport spec_report = validate_spec(spec);
  if (!spec_report.empty())
    fail(ErrorCode::invalid_spec, "invalid task spec: " + spec_report.front().message);
  std::string out = normalize_text(text, policy);
  if (out.empty()) fail(ErrorCode::empty_text, "input text is empty after normalization");
  for (const auto& label : spec.labels) {
    out.push_back('<');
    out.append(label);
    out.push_back('>');
  }
  out.append(spec.instruction_word);
  return SerializedInput{std::move(out)};
}

namespace detail {

inline std::string encode_body(const WordPayload& payload) {
  std::string body;
  std::visit(overloaded{
                 [&](const PairList& pairs) {
                   for (const auto& p : pairs) {
                     body.push_back(':');
                     body.append(escape_component(p.label));
                     body.push_back(';');
                     body.append(escape_component(p.span));
                   }
                 },
                 [&](const TripleList& triples) {
                   for (const auto& t : triples) {
                     body.push_back(':');
                     body.append(escape_component(t.object));
                     body.push_back(';');
                     body.append(escape_component(t.relation));
                     body.push_back(';');
                     body.append(escape_component(t.subject));
                     body.push_back(':');
                   }
                 },
                 [&](const QuadList& quads) {
                   for (const auto& q : quads) {
                     body.push_back(':');
                     for (std::size_t i = 0; i < q.fields.size(); ++i) {
                       if (i > 0) body.push_back(';');
                       body.append(escape_component(q.fields[i]));
                     }
                     body.push_back(':');
                   }
                 },
             },
             payload);
  return body;
}

}  // namespace detail

inline SerializedOutput encode_output(std::string_view label, const WordPayload& payload,
                                      const TaskSpec& spec) {
  if (!spec.has_label(label))
    fail(ErrorCode::label_not_in_set,
         "label '" + std::string(label) + "' is not in the candidate set");
  if (payload_kind(payload) != payload_kind_for(spec.word_task))
    fail(ErrorCode::variant_mismatch,
         std::string("payload variant ") + to_string(payload_kind(payload)) +
             " does not match word task " + to_string(spec.word_task));
  std::string out;
  out.push_back('<');
  out.append(label);
  out.push_back('>');
  out.append(spec.instruction_word);
  out.append(detail::encode_body(payload));
  return SerializedOutput{std::move(out)};
}

namespace detail {

class OutputParser {
 public:
  OutputParser(std::string_view raw, const TaskSpec& spec, ParseMode mode)
      : raw_(raw), spec_(spec), mode_(mode) {}

  ParseOutcome run() {
    ParseOutcome outcome;
    outcome.mode_used = mode_;
    const std::size_t body_start = parse_header(outcome);
    switch (payload_kind_for(spec_.word_task)) {
      case PayloadKind::pairs: outcome.payload = parse_pairs(body_start, outcome); break;
      case PayloadKind::triples: outcome.payload = parse_triples(body_start, outcome); break;
      case PayloadKind::quads: outcome.payload = parse_quads(body_start, outcome); break;
    }
    return outcome;
  }

 private:
  bool strict() const { return mode_ == ParseMode::strict; }

  void diagnose(ParseOutcome& outcome, std::size_t pos, DiagnosticKind kind, std::string msg,
                ErrorCode strict_code) const {
    if (strict())
      fail(strict_code, msg + " at byte " + std::to_string(pos));
    outcome.diagnostics.push_back({pos, kind, std::move(msg)});
  }

  // Reads "<label>" then the instruction-word echo; returns the body offset.
  std::size_t parse_header(ParseOutcome& outcome) const {
    const std::string& iw = spec_.instruction_word;
    std::size_t after_label = 0;

    if (strict()) {
      if (raw_.empty() || raw_[0] != '<')
        fail(ErrorCode::malformed_label, "output must begin with '<'");
      const std::size_t gt = raw_.find('>', 1);
      if (gt == std::string_view::npos)
        fail(ErrorCode::malformed_label, "unterminated label: missing '>'");
      outcome.label = std::string(raw_.substr(1, gt - 1));
      after_label = gt + 1;
      if (raw_.compare(after_label, iw.size(), iw) != 0)
        fail(ErrorCode::malformed_body, "instruction word mismatch after label");
      return after_label + iw.size();
    }

    const std::size_t lt = raw_.find('<');
    if (lt == std::string_view::npos) {
      diagnose(outcome, 0, DiagnosticKind::missing_label, "no '<label>' group found",
               ErrorCode::malformed_label);
      return 0;  // treat the whole string as a body candidate
    }
    if (lt > 0)
      diagnose(outcome, 0, DiagnosticKind::leading_garbage,
               "text before the first '<' was skipped", ErrorCode::malformed_label);
    const std::size_t gt = raw_.find('>', lt + 1);
    if (gt == std::string_view::npos) {
      diagnose(outcome, lt, DiagnosticKind::malformed_label, "'<' without closing '>'",
               ErrorCode::malformed_label);
      return find_unescaped(raw_, lt + 1, ":");
    }
    outcome.label = std::string(raw_.substr(lt + 1, gt - lt - 1));
    after_label = gt + 1;
    if (raw_.compare(after_label, iw.size(), iw) == 0) return after_label + iw.size();
    const std::size_t colon = find_unescaped(raw_, after_label, ":");
    diagnose(outcome, after_label, DiagnosticKind::iw_mismatch,
             "expected instruction word '" + iw + "', found '" +
                 std::string(raw_.substr(after_label, colon - after_label)) + "'",
             ErrorCode::malformed_body);
    return colon;
  }

  PairList parse_pairs(std::size_t pos, ParseOutcome& outcome) const {
    PairList pairs;
    const std::size_t n = raw_.size();
    while (pos < n) {
      if (raw_[pos] != ':') {
        const std::size_t next = find_unescaped(raw_, pos, ":");
        diagnose(outcome, pos, DiagnosticKind::stray_text,
                 "skipped text outside any unit: '" + clip(pos, next) + "'",
                 ErrorCode::trailing_garbage);
        pos = next;
        continue;
      }
      const std::size_t open = pos;
      const std::size_t sep = find_unescaped(raw_, open + 1, ";:");
      if (sep == n || raw_[sep] == ':') {
        diagnose(outcome, open, DiagnosticKind::incomplete_pair,
                 "pair without a ';' separator", ErrorCode::malformed_body);
        pos = sep;
        continue;
      }
      const std::size_t end = find_unescaped(raw_, sep + 1, ":");
      pairs.push_back({unescape_component(raw_.substr(open + 1, sep - open - 1)),
                       unescape_component(raw_.substr(sep + 1, end - sep - 1))});
      pos = end;
    }
    return pairs;
  }

  TripleList parse_triples(std::size_t pos, ParseOutcome& outcome) const {
    TripleList triples;
    for (const auto& fields : parse_tuples(pos, 3, outcome))
      triples.push_back({fields[0], fields[1], fields[2]});
    return triples;
  }

  QuadList parse_quads(std::size_t pos, ParseOutcome& outcome) const {
    QuadList quads;
    for (const auto& fields : parse_tuples(pos, 4, outcome))
      quads.push_back({{fields[0], fields[1], fields[2], fields[3]}});
    return quads;
  }

  // Units wrapped in ':' with ';' between fields. Handles the doubled form
  // ":a;b;c::d;e;f:" and the shared form ":a;b;c:d;e;f:".
  std::vector<std::vector<std::string>> parse_tuples(std::size_t pos, std::size_t arity,
                                                     ParseOutcome& outcome) const {
    std::vector<std::vector<std::string>> units;
    const std::size_t n = raw_.size();
    while (pos < n) {
      if (raw_[pos] != ':') {
        const std::size_t next = find_unescaped(raw_, pos, ":");
        diagnose(outcome, pos, DiagnosticKind::stray_text,
                 "skipped text outside any unit: '" + clip(pos, next) + "'",
                 ErrorCode::trailing_garbage);
        pos = next;
        continue;
      }
      const std::size_t open = pos;
      std::vector<std::string> fields;
      std::size_t field_start = open + 1;
      while (true) {
        const std::size_t stop = find_unescaped(raw_, field_start, ";:");
        if (stop == n) {
          diagnose(outcome, open, DiagnosticKind::unterminated_unit,
                   "unit without a closing ':'", ErrorCode::malformed_body);
          pos = n;
          break;
        }
        fields.push_back(unescape_component(raw_.substr(field_start, stop - field_start)));
        if (raw_[stop] == ';') {
          field_start = stop + 1;
          continue;
        }
        // ':' at `stop` closes the unit.
        if (fields.size() != arity) {
          diagnose(outcome, open, DiagnosticKind::arity_mismatch,
                   "unit has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(arity),
                   ErrorCode::arity_mismatch);
        } else {
          units.push_back(std::move(fields));
        }
        if (stop + 1 >= n) pos = n;                   // body ends with this unit
        else if (raw_[stop + 1] == ':') pos = stop + 1;  // doubled ':' between units
        else pos = stop;                              // shared ':' opens the next unit
        break;
      }
    }
    return units;
  }

  std::string clip(std::size_t begin, std::size_t end) const {
    static constexpr std::size_t kMax = 32;
    std::string_view v = raw_.substr(begin, end - begin);
    if (v.size() <= kMax) return std::string(v);
    return std::string(v.substr(0, kMax)) + "...";
  }

  std::string_view raw_;
  const TaskSpec& spec_;
  ParseMode mode_;
};

}  // namespace detail

// Total over arbitrary byte strings in tolerant mode; throws Error in strict
// mode when the input is not an exact encode_output image.
inline ParseOutcome parse_output(std::string_view raw, const TaskSpec& spec, ParseMode mode) {
  return detail::OutputParser(raw, spec, mode).run();
}

}  // namespace mixie
