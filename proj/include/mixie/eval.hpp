#pragma once

// Evaluation harness: drives a backend over a dataset, caches raw responses,
// scores every sequence, and writes run artifacts. All outputs are identical
// regardless of parallelism, and a warm cache never changes any per-sample
// record relative to a cold run with a deterministic backend.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mixie/backend.hpp"
#include "mixie/codec.hpp"
#include "mixie/dataset.hpp"
#include "mixie/errors.hpp"
#include "mixie/scorer.hpp"

namespace mixie {

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

// One file per entry, written via temp-then-rename so a crash never leaves a
// torn entry. The full key is stored inside the entry and verified on read,
// so a filename hash collision degrades to a miss, never to a wrong answer.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<std::string> lookup(const std::string& backend, const std::string& model,
                                    const std::string& input,
                                    std::vector<std::string>* warnings = nullptr) const {
    const std::filesystem::path path = entry_path(backend, model, input);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
      in >> j;
      if (j.at("backend") != backend || j.at("model") != model || j.at("input") != input)
        return std::nullopt;  // hash collision; treat as a miss
      return j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      if (warnings)
        warnings->push_back("cache_corrupt: " + path.string() + ": " + e.what());
      return std::nullopt;
    }
  }

  void store(const std::string& backend, const std::string& model, const std::string& input,
             const std::string& output) const {
    nlohmann::ordered_json j;
    j["backend"] = backend;
    j["model"] = model;
    j["input"] = input;
    j["output"] = output;
    const std::filesystem::path path = entry_path(backend, model, input);
    static std::atomic<std::uint64_t> counter{0};
    const std::filesystem::path tmp =
        path.string() + ".tmp" + std::to_string(counter.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << j.dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
  }

  std::filesystem::path entry_path(const std::string& backend, const std::string& model,
                                   const std::string& input) const {
    std::string key = backend;
    key.push_back('\0');
    key += model;
    key.push_back('\0');
    key += input;
    const std::uint64_t h1 = detail::fnv1a64(key);
    const std::uint64_t h2 = detail::fnv1a64(key, 0x84222325cbf29ce4ull);
    return dir_ / (detail::hex64(h1) + detail::hex64(h2) + ".json");
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct SampleRecord {
  std::string id;
  std::string input;
  std::string raw_output;
  bool backend_ok = true;
  std::string backend_error;
  ParseOutcome outcome;
  SequenceScore score;
};

struct EvalRun {
  std::string run_id;
  std::string dataset_id;
  std::string backend_name;
  std::string backend_model;
  std::vector<SampleRecord> records;
  ScoreReport report;
  // Run-time observations; not serialized, so cold and warm runs stay
  // byte-identical on disk.
  std::size_t cache_hits = 0;
  std::size_t backend_failures = 0;
  std::vector<std::string> cache_warnings;
};

struct EvalConfig {
  std::filesystem::path cache_dir;  // empty disables caching
  std::size_t parallelism = 1;
  NormalizationPolicy normalization = {};
};

inline std::string dataset_content_id(const DatasetFile& data) {
  return detail::hex64(detail::fnv1a64(dataset_to_string(data)));
}

// Per sample: build input -> cache lookup -> backend on miss -> tolerant
// parse -> sequence score; then one deterministic corpus fold. A failed
// backend call scores as an empty prediction and the run continues.
inline EvalRun run_eval(const DatasetFile& data, Backend& backend, const EvalConfig& config = {}) {
  if (config.parallelism < 1) fail(ErrorCode::invalid_argument, "parallelism must be >= 1");
  if (data.samples.empty()) fail(ErrorCode::empty_corpus, "dataset has no samples");

  std::optional<ResponseCache> cache;
  if (!config.cache_dir.empty()) cache.emplace(config.cache_dir);

  EvalRun run;
  run.dataset_id = dataset_content_id(data);
  run.backend_name = backend.name();
  run.backend_model = backend.model();
  run.run_id = detail::hex64(detail::fnv1a64(run.backend_name + "\n" + run.backend_model + "\n" +
                                             run.dataset_id + "\n" +
                                             std::to_string(data.samples.size())));
  run.records.resize(data.samples.size());

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> hits{0};
  std::atomic<std::size_t> failures{0};
  std::mutex warn_mutex;
  std::vector<std::string> warnings;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= data.samples.size()) break;
      const MixedSample& sample = data.samples[i];
      SampleRecord& record = run.records[i];
      record.id = sample.id;
      record.input = build_input(sample.text, data.task, config.normalization).value;

      std::optional<std::string> cached;
      if (cache) {
        std::vector<std::string> local_warnings;
        cached = cache->lookup(run.backend_name, run.backend_model, record.input,
                               &local_warnings);
        if (!local_warnings.empty()) {
          const std::lock_guard<std::mutex> lock(warn_mutex);
          for (auto& w : local_warnings) warnings.push_back(std::move(w));
        }
      }
      if (cached) {
        record.raw_output = *cached;
        hits.fetch_add(1);
      } else {
        const Completion completion = backend.complete(record.input);
        if (completion.ok) {
          record.raw_output = completion.text;
          if (cache)
            cache->store(run.backend_name, run.backend_model, record.input, completion.text);
        } else {
          record.backend_ok = false;
          record.backend_error =
              std::string(error_code_name(completion.code)) + ": " + completion.error;
          failures.fetch_add(1);
        }
      }
      record.outcome = parse_output(record.raw_output, data.task, ParseMode::tolerant);
      record.score = score_sequence(record.outcome, sample, config.normalization);
    }
  };

  if (config.parallelism == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < config.parallelism; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  run.cache_hits = hits.load();
  run.backend_failures = failures.load();
  run.cache_warnings = std::move(warnings);

  std::vector<SequenceScore> scores;
  scores.reserve(run.records.size());
  for (const auto& record : run.records) scores.push_back(record.score);
  run.report = score_corpus(scores);
  return run;
}

inline SampledEvaluation sampled_run_eval(const DatasetFile& data, Backend& backend,
                                          const EvalConfig& config, std::size_t n,
                                          std::size_t reps, std::uint64_t seed) {
  return sampled_evaluation(data.samples.size(), n, reps, seed,
                            [&](const std::vector<std::size_t>& indices, std::size_t) {
                              const DatasetFile subset = subset_by_indices(data, indices);
                              return run_eval(subset, backend, config).report;
                            });
}

// ---------------------------------------------------------------------------
// Run artifacts: a directory holding records.jsonl, report.json and
// config.json. The report is recomputable from the records alone.

namespace detail {

inline nlohmann::ordered_json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : diagnostics)
    arr.push_back({{"position", d.position}, {"kind", to_string(d.kind)}, {"message", d.message}});
  return arr;
}

}  // namespace detail

inline nlohmann::ordered_json record_to_json(const SampleRecord& record, PayloadKind kind) {
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["input"] = record.input;
  j["raw_output"] = record.raw_output;
  j["backend_ok"] = record.backend_ok;
  if (!record.backend_ok) j["backend_error"] = record.backend_error;
  if (record.outcome.label) j["label"] = *record.outcome.label;
  else j["label"] = nullptr;
  j[to_string(kind)] = payload_to_json(record.outcome.payload);
  j["diagnostics"] = detail::diagnostics_to_json(record.outcome.diagnostics);
  j["score"] = {{"tl_correct", record.score.tl_correct},
                {"m_match", record.score.m_match},
                {"t_pair", record.score.t_pair},
                {"p_pair", record.score.p_pair_count},
                {"wl_perfect", record.score.wl_perfect}};
  return j;
}

inline void write_run(const EvalRun& run, const std::filesystem::path& dir, PayloadKind kind,
                      const EvalConfig& config) {
  std::filesystem::create_directories(dir);

  std::ostringstream records;
  nlohmann::ordered_json header;
  header["format"] = "mixie.evalrun";
  header["version"] = 1;
  header["run_id"] = run.run_id;
  header["dataset_id"] = run.dataset_id;
  header["backend"] = run.backend_name;
  header["model"] = run.backend_model;
  header["sample_count"] = run.records.size();
  records << header.dump() << "\n";
  for (const auto& record : run.records) records << record_to_json(record, kind).dump() << "\n";
  detail::write_file_atomic(dir / "records.jsonl", records.str());

  detail::write_file_atomic(dir / "report.json", score_report_to_json(run.report).dump(2) + "\n");

  nlohmann::ordered_json snapshot;
  snapshot["run_id"] = run.run_id;
  snapshot["dataset_id"] = run.dataset_id;
  snapshot["backend"] = run.backend_name;
  snapshot["model"] = run.backend_model;
  snapshot["cache"] = !config.cache_dir.empty();
  snapshot["normalization"] = {{"nfkc", config.normalization.nfkc},
                               {"trim", config.normalization.trim},
                               {"collapse", config.normalization.collapse}};
  detail::write_file_atomic(dir / "config.json", snapshot.dump(2) + "\n");
}

struct StoredRun {
  std::string run_id;
  std::string backend_name;
  std::vector<SequenceScore> scores;
  ScoreReport stored_report;
};

inline StoredRun read_run(const std::filesystem::path& dir) {
  StoredRun out;
  std::ifstream records(dir / "records.jsonl", std::ios::binary);
  if (!records)
    fail(ErrorCode::parse_error, "cannot open " + (dir / "records.jsonl").string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(records, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse_error, "records line " + std::to_string(lineno) + ": " + e.what());
    }
    if (lineno == 1) {
      if (!j.contains("format") || j.at("format") != "mixie.evalrun")
        fail(ErrorCode::schema_mismatch, "records.jsonl: expected a mixie.evalrun header");
      out.run_id = j.at("run_id").get<std::string>();
      out.backend_name = j.at("backend").get<std::string>();
      continue;
    }
    const auto& s = j.at("score");
    SequenceScore score;
    score.tl_correct = s.at("tl_correct").get<bool>();
    score.m_match = s.at("m_match").get<std::size_t>();
    score.t_pair = s.at("t_pair").get<std::size_t>();
    score.p_pair_count = s.at("p_pair").get<std::size_t>();
    score.wl_perfect = s.at("wl_perfect").get<bool>();
    out.scores.push_back(score);
  }
  std::ifstream report(dir / "report.json", std::ios::binary);
  if (!report) fail(ErrorCode::parse_error, "cannot open " + (dir / "report.json").string());
  nlohmann::json j;
  try {
    report >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, "report.json: " + std::string(e.what()));
  }
  out.stored_report = score_report_from_json(j);
  return out;
}

}  // namespace mixie
