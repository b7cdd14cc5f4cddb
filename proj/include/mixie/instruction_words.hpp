#pragma once

// Instruction-word registry. The instruction word is the short task-selecting
// suffix appended to every input sequence; it replaces in-context examples
// and instruction text entirely. Defaults are English. A language profile
// file can replace any entry (e.g. with Japanese strings) without code
// changes.
//
// Profile file format, one entry per line:
//
//     # comment
//     ner = 固有表現認識
//     sentiment.separator = " "
//
// Keys: ner, re, ee, sentiment.prefix, sentiment.separator,
// sentiment.relation_word, sentiment.noun, sentiment.adjective,
// sentiment.noun_adjective. Values are trimmed; wrap a value in double
// quotes to preserve leading/trailing whitespace. Unknown keys are rejected.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "mixie/errors.hpp"
#include "mixie/model.hpp"

namespace mixie {

struct IwProfile {
  std::string ner = "Named Entity Recognition";
  std::string re = "Relation Extraction";
  std::string ee = "Event Extraction";
  std::string sentiment_prefix = "Sentiment Extraction";
  std::string sentiment_separator;  // joins prefix and variant; empty by default
  std::string sentiment_relation_word = "Relation Word";
  std::string sentiment_noun = "Noun";
  std::string sentiment_adjective = "Adjective";
  std::string sentiment_noun_adjective = "Noun Adjective";
};

// All sentiment variants share the prefix; the variant word is concatenated
// directly unless the profile defines a separator.
inline std::string iw_for(WordTask task, const IwProfile& profile = {}) {
  const auto sent = [&](const std::string& variant) {
    return profile.sentiment_prefix + profile.sentiment_separator + variant;
  };
  switch (task) {
    case WordTask::ner: return profile.ner;
    case WordTask::re: return profile.re;
    case WordTask::ee: return profile.ee;
    case WordTask::sent_rw: return sent(profile.sentiment_relation_word);
    case WordTask::sent_n: return sent(profile.sentiment_noun);
    case WordTask::sent_adj: return sent(profile.sentiment_adjective);
    case WordTask::sent_n_adj: return sent(profile.sentiment_noun_adjective);
  }
  fail(ErrorCode::unknown_task, "unregistered word task");
}

inline IwProfile parse_iw_profile(std::string_view content) {
  IwProfile profile;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = detail::strip_ascii_ws(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse_error,
           "iw profile line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::strip_ascii_ws(stripped.substr(0, eq));
    std::string value = detail::strip_ascii_ws(stripped.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);

    if (key == "ner") profile.ner = value;
    else if (key == "re") profile.re = value;
    else if (key == "ee") profile.ee = value;
    else if (key == "sentiment.prefix") profile.sentiment_prefix = value;
    else if (key == "sentiment.separator") profile.sentiment_separator = value;
    else if (key == "sentiment.relation_word") profile.sentiment_relation_word = value;
    else if (key == "sentiment.noun") profile.sentiment_noun = value;
    else if (key == "sentiment.adjective") profile.sentiment_adjective = value;
    else if (key == "sentiment.noun_adjective") profile.sentiment_noun_adjective = value;
    else
      fail(ErrorCode::unknown_task,
           "iw profile line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return profile;
}

inline IwProfile load_iw_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse_error, "cannot open iw profile: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_iw_profile(buf.str());
}

// Convenience constructor: a spec whose instruction word comes from the
// registry. Pass a non-empty `iw_override` to pin a custom instruction word.
inline TaskSpec make_task_spec(TextTask text_task, std::vector<std::string> labels,
                               WordTask word_task, const IwProfile& profile = {},
                               std::string iw_override = {}) {
  TaskSpec spec;
  spec.text_task = text_task;
  spec.labels = std::move(labels);
  spec.word_task = word_task;
  spec.instruction_word =
      iw_override.empty() ? iw_for(word_task, profile) : std::move(iw_override);
  return spec;
}

}  // namespace mixie
