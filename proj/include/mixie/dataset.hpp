#pragma once

// Canonical dataset storage: line-delimited JSON with a header record first.
//
//   {"format":"mixie.dataset","version":1,"task":{...}}
//   {"id":"s0001","text":"...","label":"sport","pairs":[["Person","メッシ"]]}
//
// The payload key is `pairs`, `triples` or `quads` and must match the
// header's word task. Field order is fixed, so write∘read is the identity on
// canonical files. Unknown keys are rejected.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mixie/errors.hpp"
#include "mixie/model.hpp"
#include "mixie/rng.hpp"

namespace mixie {

struct DatasetFile {
  TaskSpec task;
  std::vector<MixedSample> samples;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::unordered_set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key))
      fail(ErrorCode::schema_mismatch, where + ": unknown key '" + key + "'");
  }
}

}  // namespace detail

inline nlohmann::ordered_json task_to_json(const TaskSpec& spec) {
  nlohmann::ordered_json j;
  j["text_task"] = to_string(spec.text_task);
  j["labels"] = spec.labels;
  j["word_task"] = to_string(spec.word_task);
  j["instruction_word"] = spec.instruction_word;
  if (spec.max_units) j["max_units"] = *spec.max_units;
  return j;
}

inline TaskSpec task_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j, {"text_task", "labels", "word_task", "instruction_word", "max_units"}, "task");
  TaskSpec spec;
  spec.text_task = text_task_from_string(j.at("text_task").get<std::string>());
  spec.labels = j.at("labels").get<std::vector<std::string>>();
  spec.word_task = word_task_from_string(j.at("word_task").get<std::string>());
  spec.instruction_word = j.at("instruction_word").get<std::string>();
  if (j.contains("max_units")) spec.max_units = j.at("max_units").get<std::size_t>();
  return spec;
}

inline nlohmann::ordered_json payload_to_json(const WordPayload& payload) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  std::visit(detail::overloaded{
                 [&](const PairList& pairs) {
                   for (const auto& p : pairs) arr.push_back({p.label, p.span});
                 },
                 [&](const TripleList& triples) {
                   for (const auto& t : triples) arr.push_back({t.object, t.relation, t.subject});
                 },
                 [&](const QuadList& quads) {
                   for (const auto& q : quads)
                     arr.push_back({q.fields[0], q.fields[1], q.fields[2], q.fields[3]});
                 },
             },
             payload);
  return arr;
}

inline WordPayload payload_from_json(const nlohmann::json& arr, PayloadKind kind,
                                     const std::string& where) {
  const std::size_t arity = kind == PayloadKind::pairs ? 2 : kind == PayloadKind::triples ? 3 : 4;
  if (!arr.is_array()) fail(ErrorCode::schema_mismatch, where + ": payload must be an array");
  for (const auto& unit : arr) {
    if (!unit.is_array() || unit.size() != arity)
      fail(ErrorCode::schema_mismatch,
           where + ": each unit must be an array of " + std::to_string(arity) + " strings");
    for (const auto& field : unit)
      if (!field.is_string())
        fail(ErrorCode::schema_mismatch, where + ": unit fields must be strings");
  }
  switch (kind) {
    case PayloadKind::pairs: {
      PairList out;
      for (const auto& u : arr) out.push_back({u[0].get<std::string>(), u[1].get<std::string>()});
      return out;
    }
    case PayloadKind::triples: {
      TripleList out;
      for (const auto& u : arr)
        out.push_back(
            {u[0].get<std::string>(), u[1].get<std::string>(), u[2].get<std::string>()});
      return out;
    }
    case PayloadKind::quads: {
      QuadList out;
      for (const auto& u : arr)
        out.push_back({{u[0].get<std::string>(), u[1].get<std::string>(),
                        u[2].get<std::string>(), u[3].get<std::string>()}});
      return out;
    }
  }
  fail(ErrorCode::schema_mismatch, where + ": unknown payload kind");
}

inline nlohmann::ordered_json sample_to_json(const MixedSample& sample, PayloadKind kind) {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["text"] = sample.text;
  j["label"] = sample.gold_label;
  j[to_string(kind)] = payload_to_json(sample.gold_payload);
  if (sample.draft) j["draft"] = true;
  if (!sample.note.empty()) j["note"] = sample.note;
  return j;
}

inline MixedSample sample_from_json(const nlohmann::json& j, const TaskSpec& spec,
                                    const std::string& where) {
  const PayloadKind kind = payload_kind_for(spec.word_task);
  const std::string payload_key = to_string(kind);
  detail::reject_unknown_keys(j, {"id", "text", "label", payload_key, "draft", "note"}, where);
  for (const char* key : {"id", "text", "label"})
    if (!j.contains(key) || !j.at(key).is_string())
      fail(ErrorCode::schema_mismatch, where + ": missing or non-string '" + key + "'");
  if (!j.contains(payload_key))
    fail(ErrorCode::schema_mismatch, where + ": missing '" + payload_key + "'");
  MixedSample sample;
  sample.id = j.at("id").get<std::string>();
  sample.text = j.at("text").get<std::string>();
  sample.gold_label = j.at("label").get<std::string>();
  sample.gold_payload = payload_from_json(j.at(payload_key), kind, where);
  if (j.contains("draft")) sample.draft = j.at("draft").get<bool>();
  if (j.contains("note")) sample.note = j.at("note").get<std::string>();
  return sample;
}

inline DatasetFile read_jsonl(const std::filesystem::path& path, bool validate = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse_error, "cannot open dataset: " + path.string());
  DatasetFile data;
  std::string line;
  std::size_t lineno = 0;
  std::unordered_set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string where = "line " + std::to_string(lineno);
    if (lineno == 1) {
      detail::reject_unknown_keys(j, {"format", "version", "task"}, where);
      if (!j.contains("format") || j.at("format") != "mixie.dataset")
        fail(ErrorCode::schema_mismatch, where + ": expected a mixie.dataset header");
      if (!j.contains("version") || j.at("version") != 1)
        fail(ErrorCode::schema_mismatch, where + ": unsupported version");
      data.task = task_from_json(j.at("task"));
      continue;
    }
    MixedSample sample = sample_from_json(j, data.task, where);
    if (!seen_ids.insert(sample.id).second)
      fail(ErrorCode::duplicate_id, where + ": duplicate id '" + sample.id + "'");
    if (validate) {
      const ValidationReport report = validate_sample(sample, data.task);
      if (!report.empty())
        fail(ErrorCode::schema_mismatch,
             where + ": invalid sample: " + report.front().message);
    }
    data.samples.push_back(std::move(sample));
  }
  if (lineno == 0) fail(ErrorCode::schema_mismatch, "empty file: missing header record");
  return data;
}

inline std::string dataset_to_string(const DatasetFile& data) {
  const PayloadKind kind = payload_kind_for(data.task.word_task);
  std::ostringstream out;
  nlohmann::ordered_json header;
  header["format"] = "mixie.dataset";
  header["version"] = 1;
  header["task"] = task_to_json(data.task);
  out << header.dump() << "\n";
  for (const auto& sample : data.samples) out << sample_to_json(sample, kind).dump() << "\n";
  return out.str();
}

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::parse_error, "cannot write: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline void write_jsonl(const DatasetFile& data, const std::filesystem::path& path) {
  detail::write_file_atomic(path, dataset_to_string(data));
}

// Uniform random partition into exactly (train_n, size - train_n), both sides
// keeping the original sample order. Deterministic under seed.
inline std::pair<DatasetFile, DatasetFile> split(const DatasetFile& data, std::size_t train_n,
                                                 std::uint64_t seed) {
  const std::size_t n = data.samples.size();
  if (train_n == 0 || train_n >= n)
    fail(ErrorCode::too_few_samples, "train size " + std::to_string(train_n) +
                                         " must be in [1, " + std::to_string(n) + ")");
  auto rng = seeded_rng(seed, 0);
  const std::vector<std::size_t> picks = sample_without_replacement(n, train_n, rng);
  std::vector<bool> in_train(n, false);
  for (const std::size_t i : picks) in_train[i] = true;
  DatasetFile train{data.task, {}};
  DatasetFile test{data.task, {}};
  for (std::size_t i = 0; i < n; ++i)
    (in_train[i] ? train : test).samples.push_back(data.samples[i]);
  return {std::move(train), std::move(test)};
}

inline DatasetFile sample_subset(const DatasetFile& data, std::size_t n, std::uint64_t seed) {
  if (n > data.samples.size())
    fail(ErrorCode::sample_too_large,
         "sample size " + std::to_string(n) + " exceeds dataset size " +
             std::to_string(data.samples.size()));
  auto rng = seeded_rng(seed, 0);
  const std::vector<std::size_t> picks = sample_without_replacement(data.samples.size(), n, rng);
  DatasetFile out{data.task, {}};
  for (const std::size_t i : picks) out.samples.push_back(data.samples[i]);
  return out;
}

inline DatasetFile subset_by_indices(const DatasetFile& data,
                                     const std::vector<std::size_t>& indices) {
  DatasetFile out{data.task, {}};
  for (const std::size_t i : indices) out.samples.push_back(data.samples.at(i));
  return out;
}

struct StatsReport {
  std::size_t sample_count = 0;
  std::size_t unit_sum = 0;
  double mean_units = 0.0;
  std::map<std::string, std::size_t> text_labels;
  std::map<std::string, std::size_t> word_labels;
};

// Word-label histogram key: pair label, triple relation, or quad field 2.
inline StatsReport stats(const DatasetFile& data) {
  StatsReport report;
  report.sample_count = data.samples.size();
  for (const auto& sample : data.samples) {
    ++report.text_labels[sample.gold_label];
    report.unit_sum += unit_count(sample.gold_payload);
    std::visit(detail::overloaded{
                   [&](const PairList& pairs) {
                     for (const auto& p : pairs) ++report.word_labels[p.label];
                   },
                   [&](const TripleList& triples) {
                     for (const auto& t : triples) ++report.word_labels[t.relation];
                   },
                   [&](const QuadList& quads) {
                     for (const auto& q : quads) ++report.word_labels[q.fields[1]];
                   },
               },
               sample.gold_payload);
  }
  report.mean_units = report.sample_count == 0
                          ? 0.0
                          : static_cast<double>(report.unit_sum) /
                                static_cast<double>(report.sample_count);
  return report;
}

inline nlohmann::ordered_json stats_to_json(const StatsReport& report) {
  nlohmann::ordered_json j;
  j["sample_count"] = report.sample_count;
  j["unit_sum"] = report.unit_sum;
  j["mean_units"] = report.mean_units;
  j["text_labels"] = report.text_labels;
  j["word_labels"] = report.word_labels;
  return j;
}

inline std::string format_stats(const StatsReport& report) {
  std::ostringstream out;
  out << "samples: " << report.sample_count << "\n";
  out << "units:   " << report.unit_sum << " (mean " << report.mean_units << " per sample)\n";
  out << "text labels:\n";
  for (const auto& [label, count] : report.text_labels)
    out << "  " << label << ": " << count << "\n";
  out << "word labels:\n";
  for (const auto& [label, count] : report.word_labels)
    out << "  " << label << ": " << count << "\n";
  return out.str();
}

}  // namespace mixie
