#pragma once

// Rule-based candidate extraction over a news-corpus directory, plus the
// machine-drafting step that turns candidates into a draft dataset for human
// correction.
//
// The corpus layout is one plain-text article per file, grouped in category
// subdirectories. When an article's first line is a URL, the first two lines
// (URL and timestamp) are treated as metadata and skipped. Sentences are
// segmented on the Japanese full stop 。 and on newlines.
//
// Rule file format, one rule per line:
//
//     # name  kind  pattern          (kind is `re` or `ee`)
//     birth   re    (は|が).*(生まれ|出身)
//
// Patterns are ECMAScript regular expressions matched against the normalized
// sentence. Rules are user data: the defaults shipped with the project are
// illustrative, not canonical.

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixie/backend.hpp"
#include "mixie/codec.hpp"
#include "mixie/dataset.hpp"
#include "mixie/errors.hpp"
#include "mixie/text.hpp"

namespace mixie {

enum class CandidateKind { re, ee };

inline const char* to_string(CandidateKind k) { return k == CandidateKind::re ? "re" : "ee"; }

inline CandidateKind candidate_kind_from_string(std::string_view s) {
  if (s == "re") return CandidateKind::re;
  if (s == "ee") return CandidateKind::ee;
  fail(ErrorCode::unknown_task, "unknown candidate kind: " + std::string(s));
}

struct ExtractionRule {
  std::string name;
  std::string pattern;
  CandidateKind yields = CandidateKind::re;
  std::regex compiled;
};

inline std::vector<ExtractionRule> parse_rules(std::string_view content) {
  std::vector<ExtractionRule> rules;
  std::set<std::string> names;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = detail::strip_ascii_ws(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::istringstream fields(stripped);
    ExtractionRule rule;
    std::string kind;
    fields >> rule.name >> kind;
    std::getline(fields, rule.pattern);
    rule.pattern = detail::strip_ascii_ws(rule.pattern);
    if (rule.name.empty() || kind.empty() || rule.pattern.empty())
      fail(ErrorCode::parse_error,
           "rules line " + std::to_string(lineno) + ": expected 'name kind pattern'");
    rule.yields = candidate_kind_from_string(kind);
    if (!names.insert(rule.name).second)
      fail(ErrorCode::parse_error,
           "rules line " + std::to_string(lineno) + ": duplicate rule name '" + rule.name + "'");
    try {
      rule.compiled = std::regex(rule.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      fail(ErrorCode::parse_error, "rules line " + std::to_string(lineno) +
                                       ": pattern does not compile: " + e.what());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

inline std::vector<ExtractionRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse_error, "cannot open rules file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str());
}

struct Candidate {
  std::string article_id;
  std::string sentence;  // normalized
  std::string rule;
  CandidateKind kind = CandidateKind::re;
};

struct ExtractResult {
  std::vector<Candidate> candidates;
  std::vector<std::string> skipped_files;  // unreadable, recorded and skipped
  std::size_t article_count = 0;
  std::size_t sentence_count = 0;
};

namespace detail {

// Splits on 。 (kept) and '\n' (dropped).
inline std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t i = 0;
  const std::size_t n = text.size();
  const auto flush = [&]() {
    if (!current.empty()) out.push_back(current);
    current.clear();
  };
  while (i < n) {
    if (text[i] == '\n') {
      flush();
      ++i;
      continue;
    }
    if (i + 2 < n && static_cast<unsigned char>(text[i]) == 0xE3 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x82) {
      current.append("\xE3\x80\x82");
      flush();
      i += 3;
      continue;
    }
    current.push_back(text[i]);
    ++i;
  }
  flush();
  return out;
}

inline bool looks_like_url(std::string_view line) {
  return line.starts_with("http://") || line.starts_with("https://");
}

}  // namespace detail

// Deterministic: files are processed in sorted relative-path order, and a
// sentence seen more than once (by normalized form) yields one candidate,
// attributed to its first occurrence and first matching rule.
inline ExtractResult extract_candidates(const std::filesystem::path& corpus_dir,
                                        const std::vector<ExtractionRule>& rules) {
  if (rules.empty()) fail(ErrorCode::no_rules, "no extraction rules given");
  if (!std::filesystem::is_directory(corpus_dir))
    fail(ErrorCode::invalid_argument, "not a directory: " + corpus_dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(corpus_dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  ExtractResult result;
  std::set<std::string> seen_sentences;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      result.skipped_files.push_back(file.string());
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    ++result.article_count;

    const std::string article_id =
        std::filesystem::relative(file, corpus_dir).generic_string();

    // Livedoor-style metadata: URL line followed by a timestamp line.
    std::istringstream head(text);
    std::string first_line;
    if (std::getline(head, first_line) && detail::looks_like_url(first_line)) {
      std::string second_line;
      std::getline(head, second_line);
      std::ostringstream rest;
      rest << head.rdbuf();
      text = rest.str();
    }

    for (const std::string& raw_sentence : detail::segment_sentences(text)) {
      const std::string sentence = normalize_text(raw_sentence);
      if (sentence.empty()) continue;
      ++result.sentence_count;
      if (seen_sentences.contains(sentence)) continue;
      for (const auto& rule : rules) {
        if (std::regex_search(sentence, rule.compiled)) {
          seen_sentences.insert(sentence);
          result.candidates.push_back({article_id, sentence, rule.name, rule.yields});
          break;
        }
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Candidate file IO: JSONL with a header record.

inline void write_candidates(const std::vector<Candidate>& candidates,
                             const std::filesystem::path& path) {
  std::ostringstream out;
  out << nlohmann::ordered_json{{"format", "mixie.candidates"}, {"version", 1}}.dump() << "\n";
  for (const auto& c : candidates) {
    nlohmann::ordered_json j;
    j["article_id"] = c.article_id;
    j["sentence"] = c.sentence;
    j["rule"] = c.rule;
    j["kind"] = to_string(c.kind);
    out << j.dump() << "\n";
  }
  detail::write_file_atomic(path, out.str());
}

inline std::vector<Candidate> read_candidates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse_error, "cannot open candidates file: " + path.string());
  std::vector<Candidate> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (lineno == 1) {
      if (!j.contains("format") || j.at("format") != "mixie.candidates")
        fail(ErrorCode::schema_mismatch, "expected a mixie.candidates header");
      continue;
    }
    detail::reject_unknown_keys(j, {"article_id", "sentence", "rule", "kind"},
                                "line " + std::to_string(lineno));
    out.push_back({j.at("article_id").get<std::string>(), j.at("sentence").get<std::string>(),
                   j.at("rule").get<std::string>(),
                   candidate_kind_from_string(j.at("kind").get<std::string>())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Machine drafting: label candidates through a backend, parse tolerantly,
// and flag every result as a draft for external review. A failed backend
// call is recorded and the run continues.

struct DraftError {
  std::string candidate_id;
  std::string message;
};

struct DraftResult {
  DatasetFile drafts;
  std::vector<DraftError> errors;
};

inline DraftResult draft_label(const std::vector<Candidate>& candidates, Backend& backend,
                               const TaskSpec& spec,
                               const NormalizationPolicy& policy = {}) {
  DraftResult result;
  result.drafts.task = spec;
  std::map<std::string, std::size_t> per_article;
  for (const auto& candidate : candidates) {
    const std::string id =
        candidate.article_id + "#" + std::to_string(per_article[candidate.article_id]++);
    const SerializedInput input = build_input(candidate.sentence, spec, policy);
    const Completion completion = backend.complete(input.value);
    if (!completion.ok) {
      result.errors.push_back(
          {id, std::string(error_code_name(completion.code)) + ": " + completion.error});
      continue;
    }
    const ParseOutcome outcome = parse_output(completion.text, spec, ParseMode::tolerant);
    MixedSample sample;
    sample.id = id;
    sample.text = candidate.sentence;
    sample.gold_label = outcome.label.value_or("");
    sample.gold_payload = outcome.payload;
    sample.draft = true;
    if (!outcome.diagnostics.empty())
      sample.note = "draft: " + std::to_string(outcome.diagnostics.size()) +
                    " parse diagnostic(s); review required";
    result.drafts.samples.push_back(std::move(sample));
  }
  return result;
}

}  // namespace mixie
