// Command-line entry point: every pipeline stage as a subcommand.
//
//   encode / decode        wire-format codec over JSONL records
//   score                  TL/WL/ALL metrics for prediction files
//   eval run|report        drive a backend over a dataset, with caching
//   dataset ...            convert/split/sample/stats/tcree-extract/draft-label
//
// Exit codes: 0 success, 1 usage error, 2 data error. Errors are printed to
// stderr as one machine-readable JSON line.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixie/mixie.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct TaskFlags {
  std::string task_name;       // profile name in the config file
  std::string task_from;       // dataset file whose header supplies the spec
  std::string text_task = "tc";
  std::vector<std::string> labels;
  std::string word_task;
  std::string instruction_word;
  std::optional<std::size_t> max_units;
};

struct BackendFlags {
  std::string kind;  // mock-gold | baseline | http
  std::string gazetteer_path;
  mixie::HttpBackendConfig http;
};

struct CliConfig {
  std::string iw_profile_path;
  std::string cache_dir;
  std::uint64_t seed = 0;
  mixie::HttpBackendConfig backend;
  std::map<std::string, mixie::TaskSpec> tasks;
  mixie::IwProfile iw_profile;
};

mixie::TaskSpec task_spec_from_config_json(const json& j, const mixie::IwProfile& profile,
                                           const std::string& where) {
  mixie::detail::reject_unknown_keys(
      j, {"text_task", "labels", "word_task", "instruction_word", "max_units"}, where);
  mixie::TaskSpec spec;
  spec.text_task = mixie::text_task_from_string(j.at("text_task").get<std::string>());
  spec.labels = j.at("labels").get<std::vector<std::string>>();
  spec.word_task = mixie::word_task_from_string(j.at("word_task").get<std::string>());
  if (j.contains("instruction_word"))
    spec.instruction_word = j.at("instruction_word").get<std::string>();
  else
    spec.instruction_word = mixie::iw_for(spec.word_task, profile);
  if (j.contains("max_units")) spec.max_units = j.at("max_units").get<std::size_t>();
  return spec;
}

CliConfig load_config(const std::string& path) {
  CliConfig config;
  if (path.empty()) return config;
  std::ifstream in(path, std::ios::binary);
  if (!in) mixie::fail(mixie::ErrorCode::parse_error, "cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    mixie::fail(mixie::ErrorCode::parse_error, "config: " + std::string(e.what()));
  }
  mixie::detail::reject_unknown_keys(
      j, {"iw_profile", "cache_dir", "seed", "backend", "tasks"}, "config");
  if (j.contains("iw_profile")) config.iw_profile_path = j.at("iw_profile").get<std::string>();
  if (!config.iw_profile_path.empty())
    config.iw_profile = mixie::load_iw_profile(config.iw_profile_path);
  if (j.contains("cache_dir")) config.cache_dir = j.at("cache_dir").get<std::string>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("backend")) {
    const json& b = j.at("backend");
    mixie::detail::reject_unknown_keys(b,
                                       {"base_url", "model", "auth_env", "timeout_s", "retries",
                                        "backoff_base_s", "temperature", "max_tokens"},
                                       "config.backend");
    if (b.contains("base_url")) config.backend.base_url = b.at("base_url").get<std::string>();
    if (b.contains("model")) config.backend.model = b.at("model").get<std::string>();
    if (b.contains("auth_env")) config.backend.auth_env = b.at("auth_env").get<std::string>();
    if (b.contains("timeout_s")) config.backend.timeout_s = b.at("timeout_s").get<double>();
    if (b.contains("retries")) config.backend.retries = b.at("retries").get<std::size_t>();
    if (b.contains("backoff_base_s"))
      config.backend.backoff_base_s = b.at("backoff_base_s").get<double>();
    if (b.contains("temperature")) config.backend.temperature = b.at("temperature").get<double>();
    if (b.contains("max_tokens") && !b.at("max_tokens").is_null())
      config.backend.max_tokens = b.at("max_tokens").get<int>();
  }
  if (j.contains("tasks")) {
    for (const auto& [name, task_json] : j.at("tasks").items())
      config.tasks[name] =
          task_spec_from_config_json(task_json, config.iw_profile, "config.tasks." + name);
  }
  return config;
}

mixie::TaskSpec resolve_task_spec(const TaskFlags& flags, const CliConfig& config) {
  if (!flags.task_from.empty()) return mixie::read_jsonl(flags.task_from, false).task;
  if (!flags.task_name.empty()) {
    const auto it = config.tasks.find(flags.task_name);
    if (it == config.tasks.end())
      mixie::fail(mixie::ErrorCode::unknown_task,
                  "task profile '" + flags.task_name + "' not found in config");
    return it->second;
  }
  if (flags.labels.empty() || flags.word_task.empty())
    mixie::fail(mixie::ErrorCode::invalid_argument,
                "task spec required: use --task, --task-from, or --labels with --word-task");
  mixie::TaskSpec spec;
  spec.text_task = mixie::text_task_from_string(flags.text_task);
  spec.labels = flags.labels;
  spec.word_task = mixie::word_task_from_string(flags.word_task);
  spec.instruction_word = flags.instruction_word.empty()
                              ? mixie::iw_for(spec.word_task, config.iw_profile)
                              : flags.instruction_word;
  spec.max_units = flags.max_units;
  return spec;
}

std::unique_ptr<mixie::Backend> make_backend(const BackendFlags& flags,
                                             const mixie::DatasetFile* data,
                                             const mixie::TaskSpec* spec) {
  if (flags.kind == "mock-gold") {
    if (data == nullptr)
      mixie::fail(mixie::ErrorCode::invalid_argument, "mock-gold needs a dataset");
    return std::make_unique<mixie::MockGoldBackend>(*data);
  }
  if (flags.kind == "baseline") {
    if (flags.gazetteer_path.empty())
      mixie::fail(mixie::ErrorCode::invalid_argument, "baseline needs --gazetteer");
    if (spec == nullptr)
      mixie::fail(mixie::ErrorCode::invalid_argument, "baseline needs a task spec");
    return std::make_unique<mixie::BaselineBackend>(mixie::load_gazetteer(flags.gazetteer_path),
                                                    *spec);
  }
  if (flags.kind == "http") {
    if (flags.http.base_url.empty())
      mixie::fail(mixie::ErrorCode::invalid_argument, "http backend needs --base-url");
    return std::make_unique<mixie::HttpBackend>(flags.http);
  }
  mixie::fail(mixie::ErrorCode::invalid_argument,
              "unknown backend '" + flags.kind + "' (mock-gold, baseline, http)");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::string line;
  if (path.empty() || path == "-") {
    while (std::getline(std::cin, line)) lines.push_back(line);
    return lines;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) mixie::fail(mixie::ErrorCode::parse_error, "cannot open: " + path);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) mixie::fail(mixie::ErrorCode::parse_error, "cannot write: " + path);
  out << content;
}

ordered_json outcome_to_json(const mixie::ParseOutcome& outcome, mixie::PayloadKind kind) {
  ordered_json j;
  if (outcome.label) j["label"] = *outcome.label;
  else j["label"] = nullptr;
  j[mixie::to_string(kind)] = mixie::payload_to_json(outcome.payload);
  return j;
}

int run_encode(const std::string& data_path, const std::string& side, const std::string& out) {
  const mixie::DatasetFile data = mixie::read_jsonl(data_path);
  std::string result;
  for (const auto& sample : data.samples) {
    if (side == "input")
      result += mixie::build_input(sample.text, data.task).value;
    else
      result += mixie::encode_output(sample.gold_label, sample.gold_payload, data.task).value;
    result += "\n";
  }
  write_text(out, result);
  return 0;
}

int run_decode(const TaskFlags& task_flags, const CliConfig& config, const std::string& in,
               const std::string& out, bool strict) {
  const mixie::TaskSpec spec = resolve_task_spec(task_flags, config);
  const mixie::PayloadKind kind = mixie::payload_kind_for(spec.word_task);
  const std::vector<std::string> lines = read_lines(in);
  std::string result;
  std::size_t diagnostic_count = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    mixie::ParseOutcome outcome;
    if (strict) {
      try {
        outcome = mixie::parse_output(lines[i], spec, mixie::ParseMode::strict);
      } catch (const mixie::Error& e) {
        mixie::fail(e.code(), "line " + std::to_string(i + 1) + ": " + e.what());
      }
    } else {
      outcome = mixie::parse_output(lines[i], spec, mixie::ParseMode::tolerant);
    }
    result += outcome_to_json(outcome, kind).dump();
    result += "\n";
    if (!outcome.diagnostics.empty()) {
      diagnostic_count += outcome.diagnostics.size();
      ordered_json d;
      d["line"] = i + 1;
      d["diagnostics"] = mixie::detail::diagnostics_to_json(outcome.diagnostics);
      std::cerr << d.dump() << "\n";
    }
  }
  write_text(out, result);
  if (diagnostic_count > 0)
    std::cerr << ordered_json{{"diagnostic_count", diagnostic_count}}.dump() << "\n";
  return 0;
}

int run_score(const std::string& gold_path, const std::string& pred_path,
              const std::string& json_out, std::optional<std::size_t> sample_n,
              std::size_t reps, std::uint64_t seed) {
  const mixie::DatasetFile gold = mixie::read_jsonl(gold_path);
  const std::vector<std::string> preds = read_lines(pred_path);
  if (preds.size() != gold.samples.size())
    mixie::fail(mixie::ErrorCode::invalid_argument,
                "prediction count " + std::to_string(preds.size()) + " != gold sample count " +
                    std::to_string(gold.samples.size()));
  std::vector<mixie::SequenceScore> scores;
  scores.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const mixie::ParseOutcome outcome =
        mixie::parse_output(preds[i], gold.task, mixie::ParseMode::tolerant);
    scores.push_back(mixie::score_sequence(outcome, gold.samples[i]));
  }

  if (sample_n) {
    const mixie::SampledEvaluation sampled = mixie::sampled_evaluation(
        scores.size(), *sample_n, reps, seed,
        [&](const std::vector<std::size_t>& indices, std::size_t) {
          std::vector<mixie::SequenceScore> subset;
          subset.reserve(indices.size());
          for (const std::size_t idx : indices) subset.push_back(scores[idx]);
          return mixie::score_corpus(subset);
        });
    std::cout << mixie::format_score_table(sampled.mean);
    if (!json_out.empty()) {
      ordered_json j;
      j["mean"] = mixie::score_report_to_json(sampled.mean);
      j["reps"] = ordered_json::array();
      for (const auto& rep : sampled.reps) j["reps"].push_back(mixie::score_report_to_json(rep));
      j["sample_size"] = sampled.sample_size;
      j["rep_count"] = sampled.rep_count;
      j["seed"] = sampled.seed;
      write_text(json_out, j.dump(2) + "\n");
    }
    return 0;
  }

  const mixie::ScoreReport report = mixie::score_corpus(scores);
  std::cout << mixie::format_score_table(report);
  if (!json_out.empty())
    write_text(json_out, mixie::score_report_to_json(report).dump(2) + "\n");
  return 0;
}

int run_eval_run(const std::string& data_path, BackendFlags& backend_flags,
                 const CliConfig& config, const std::string& out_dir,
                 const std::string& cache_dir, std::size_t parallelism,
                 std::optional<std::size_t> sample_n, std::size_t reps, std::uint64_t seed) {
  const mixie::DatasetFile data = mixie::read_jsonl(data_path);
  const std::unique_ptr<mixie::Backend> backend =
      make_backend(backend_flags, &data, &data.task);
  mixie::EvalConfig eval_config;
  eval_config.cache_dir = cache_dir.empty() ? config.cache_dir : cache_dir;
  eval_config.parallelism = parallelism;

  if (sample_n) {
    const mixie::SampledEvaluation sampled =
        mixie::sampled_run_eval(data, *backend, eval_config, *sample_n, reps, seed);
    std::cout << mixie::format_score_table(sampled.mean);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      ordered_json j;
      j["mean"] = mixie::score_report_to_json(sampled.mean);
      j["reps"] = ordered_json::array();
      for (const auto& rep : sampled.reps) j["reps"].push_back(mixie::score_report_to_json(rep));
      j["sample_size"] = sampled.sample_size;
      j["rep_count"] = sampled.rep_count;
      j["seed"] = sampled.seed;
      mixie::detail::write_file_atomic(std::filesystem::path(out_dir) / "sampled.json",
                                       j.dump(2) + "\n");
    }
    return 0;
  }

  const mixie::EvalRun run = mixie::run_eval(data, *backend, eval_config);
  for (const auto& warning : run.cache_warnings)
    std::cerr << ordered_json{{"warning", warning}}.dump() << "\n";
  if (run.backend_failures > 0)
    std::cerr << ordered_json{{"backend_failures", run.backend_failures}}.dump() << "\n";
  std::cout << mixie::format_score_table(run.report);
  if (!out_dir.empty())
    mixie::write_run(run, out_dir, mixie::payload_kind_for(data.task.word_task), eval_config);
  return 0;
}

int run_eval_report(const std::string& run_dir) {
  const mixie::StoredRun stored = mixie::read_run(run_dir);
  if (stored.scores.empty())
    mixie::fail(mixie::ErrorCode::schema_mismatch, "run has no records");
  const mixie::ScoreReport recomputed = mixie::score_corpus(stored.scores);
  if (mixie::score_report_to_json(recomputed).dump() !=
      mixie::score_report_to_json(stored.stored_report).dump())
    mixie::fail(mixie::ErrorCode::schema_mismatch,
                "stored report does not match the report recomputed from records");
  std::cout << "run " << stored.run_id << " (backend " << stored.backend_name << ", "
            << stored.scores.size() << " samples)\n";
  std::cout << mixie::format_score_table(stored.stored_report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixie: mixed-task information extraction toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  // encode
  auto* encode = app.add_subcommand("encode", "dataset records -> wire-format lines");
  std::string encode_data, encode_out, encode_side = "output";
  encode->add_option("--data", encode_data, "dataset JSONL")->required();
  encode->add_option("--side", encode_side, "output (gold serializations) or input")
      ->check(CLI::IsMember({"output", "input"}));
  encode->add_option("-o,--out", encode_out, "output file (default stdout)");

  // decode
  auto* decode = app.add_subcommand("decode", "wire-format lines -> JSONL records");
  TaskFlags decode_task;
  std::string decode_in, decode_out;
  bool decode_strict = false;
  decode->add_option("--task", decode_task.task_name, "task profile name from config");
  decode->add_option("--task-from", decode_task.task_from, "dataset file supplying the task spec");
  decode->add_option("--text-task", decode_task.text_task, "tc or sc");
  decode->add_option("--labels", decode_task.labels, "candidate labels")->delimiter(',');
  decode->add_option("--word-task", decode_task.word_task,
                     "ner|re|ee|sent_rw|sent_n|sent_adj|sent_n_adj");
  decode->add_option("--iw", decode_task.instruction_word, "instruction word override");
  decode->add_option("-i,--in", decode_in, "input file (default stdin)");
  decode->add_option("-o,--out", decode_out, "output file (default stdout)");
  decode->add_flag("--strict", decode_strict, "strict mode: fail on any malformed line");

  // score
  auto* score = app.add_subcommand("score", "score a prediction file against gold");
  std::string score_gold, score_pred, score_json;
  std::optional<std::size_t> score_sample;
  std::size_t score_reps = 3;
  std::uint64_t score_seed = 0;
  score->add_option("--gold", score_gold, "gold dataset JSONL")->required();
  score->add_option("--pred", score_pred, "predictions, one wire-format line per gold sample")
      ->required();
  score->add_option("--json", score_json, "also write the report as JSON");
  score->add_option("--sample", score_sample, "sampled protocol: per-rep sample size");
  score->add_option("--reps", score_reps, "sampled protocol: rep count (default 3)");
  score->add_option("--seed", score_seed, "sampled protocol: seed");

  // eval
  auto* eval = app.add_subcommand("eval", "run backends and inspect runs");
  eval->require_subcommand(1);
  auto* eval_run_cmd = eval->add_subcommand("run", "evaluate a backend over a dataset");
  std::string eval_data, eval_out, eval_cache;
  BackendFlags eval_backend;
  std::size_t eval_parallelism = 1;
  std::optional<std::size_t> eval_sample;
  std::size_t eval_reps = 3;
  std::uint64_t eval_seed = 0;
  std::optional<int> eval_max_tokens;
  eval_run_cmd->add_option("--data", eval_data, "dataset JSONL")->required();
  eval_run_cmd->add_option("--backend", eval_backend.kind, "mock-gold | baseline | http")
      ->required();
  eval_run_cmd->add_option("--out", eval_out, "run artifact directory");
  eval_run_cmd->add_option("--cache", eval_cache, "response cache directory");
  eval_run_cmd->add_option("--parallelism", eval_parallelism, "in-flight requests (default 1)");
  eval_run_cmd->add_option("--gazetteer", eval_backend.gazetteer_path, "baseline gazetteer JSON");
  eval_run_cmd->add_option("--base-url", eval_backend.http.base_url, "http backend base URL");
  eval_run_cmd->add_option("--model", eval_backend.http.model, "http backend model name");
  eval_run_cmd->add_option("--auth-env", eval_backend.http.auth_env,
                           "env var holding the bearer token");
  eval_run_cmd->add_option("--timeout", eval_backend.http.timeout_s, "request timeout seconds");
  eval_run_cmd->add_option("--retries", eval_backend.http.retries, "retry budget");
  eval_run_cmd->add_option("--temperature", eval_backend.http.temperature, "sampling temperature");
  eval_run_cmd->add_option("--max-tokens", eval_max_tokens, "completion token cap");
  eval_run_cmd->add_option("--sample", eval_sample, "sampled protocol: per-rep sample size");
  eval_run_cmd->add_option("--reps", eval_reps, "sampled protocol: rep count (default 3)");
  eval_run_cmd->add_option("--seed", eval_seed, "sampled protocol: seed");

  auto* eval_report_cmd = eval->add_subcommand("report", "verify and print a stored run");
  std::string report_run_dir;
  eval_report_cmd->add_option("--run", report_run_dir, "run artifact directory")->required();

  // dataset
  auto* dataset = app.add_subcommand("dataset", "dataset pipeline operations");
  dataset->require_subcommand(1);

  auto* ds_convert = dataset->add_subcommand("convert", "validate and canonicalize a dataset");
  std::string conv_in, conv_out;
  bool conv_no_validate = false;
  ds_convert->add_option("--in", conv_in, "input dataset JSONL")->required();
  ds_convert->add_option("--out", conv_out, "output dataset JSONL")->required();
  ds_convert->add_flag("--no-validate", conv_no_validate, "skip sample validation");

  auto* ds_split = dataset->add_subcommand("split", "random train/test partition");
  std::string split_in, split_train_out, split_test_out;
  std::size_t split_train = 0;
  std::uint64_t split_seed = 0;
  ds_split->add_option("--in", split_in, "input dataset JSONL")->required();
  ds_split->add_option("--train-out", split_train_out, "train output path")->required();
  ds_split->add_option("--test-out", split_test_out, "test output path")->required();
  ds_split->add_option("--train", split_train, "train set size")->required();
  ds_split->add_option("--seed", split_seed, "seed");

  auto* ds_sample = dataset->add_subcommand("sample", "uniform random subset");
  std::string sample_in, sample_out;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 0;
  ds_sample->add_option("--in", sample_in, "input dataset JSONL")->required();
  ds_sample->add_option("--out", sample_out, "output dataset JSONL")->required();
  ds_sample->add_option("-n,--size", sample_n, "subset size")->required();
  ds_sample->add_option("--seed", sample_seed, "seed");

  auto* ds_stats = dataset->add_subcommand("stats", "dataset statistics");
  std::string stats_in, stats_json;
  ds_stats->add_option("--in", stats_in, "input dataset JSONL")->required();
  ds_stats->add_option("--json", stats_json, "also write statistics as JSON");

  auto* ds_extract = dataset->add_subcommand("tcree-extract",
                                             "rule-based candidate extraction over a corpus");
  std::string extract_corpus, extract_rules, extract_out;
  ds_extract->add_option("--corpus", extract_corpus, "corpus directory")->required();
  ds_extract->add_option("--rules", extract_rules, "rules file")->required();
  ds_extract->add_option("--out", extract_out, "candidates JSONL output")->required();

  auto* ds_draft = dataset->add_subcommand("draft-label",
                                           "machine-draft labels for extracted candidates");
  TaskFlags draft_task;
  BackendFlags draft_backend;
  std::string draft_candidates, draft_out, draft_kind = "auto";
  std::optional<int> draft_max_tokens;
  ds_draft->add_option("--candidates", draft_candidates, "candidates JSONL")->required();
  ds_draft->add_option("--out", draft_out, "draft dataset output")->required();
  ds_draft->add_option("--task", draft_task.task_name, "task profile name from config");
  ds_draft->add_option("--task-from", draft_task.task_from,
                       "dataset file supplying the task spec");
  ds_draft->add_option("--text-task", draft_task.text_task, "tc or sc");
  ds_draft->add_option("--labels", draft_task.labels, "candidate labels")->delimiter(',');
  ds_draft->add_option("--word-task", draft_task.word_task,
                       "ner|re|ee|sent_rw|sent_n|sent_adj|sent_n_adj");
  ds_draft->add_option("--iw", draft_task.instruction_word, "instruction word override");
  ds_draft->add_option("--kind", draft_kind, "re | ee | auto (match the task's word task)")
      ->check(CLI::IsMember({"re", "ee", "auto"}));
  ds_draft->add_option("--backend", draft_backend.kind, "baseline | http")->required();
  ds_draft->add_option("--gazetteer", draft_backend.gazetteer_path, "baseline gazetteer JSON");
  ds_draft->add_option("--base-url", draft_backend.http.base_url, "http backend base URL");
  ds_draft->add_option("--model", draft_backend.http.model, "http backend model name");
  ds_draft->add_option("--auth-env", draft_backend.http.auth_env,
                       "env var holding the bearer token");
  ds_draft->add_option("--timeout", draft_backend.http.timeout_s, "request timeout seconds");
  ds_draft->add_option("--retries", draft_backend.http.retries, "retry budget");
  ds_draft->add_option("--max-tokens", draft_max_tokens, "completion token cap");

  try {
    app.parse(argc, argv);
    const CliConfig config = load_config(config_path);

    if (*encode) return run_encode(encode_data, encode_side, encode_out);
    if (*decode) return run_decode(decode_task, config, decode_in, decode_out, decode_strict);
    if (*score)
      return run_score(score_gold, score_pred, score_json, score_sample, score_reps, score_seed);
    if (*eval_run_cmd) {
      if (eval_backend.http.base_url.empty()) eval_backend.http = config.backend;
      if (eval_max_tokens) eval_backend.http.max_tokens = eval_max_tokens;
      return run_eval_run(eval_data, eval_backend, config, eval_out, eval_cache,
                          eval_parallelism, eval_sample, eval_reps, eval_seed);
    }
    if (*eval_report_cmd) return run_eval_report(report_run_dir);
    if (*ds_convert) {
      mixie::write_jsonl(mixie::read_jsonl(conv_in, !conv_no_validate), conv_out);
      return 0;
    }
    if (*ds_split) {
      const mixie::DatasetFile data = mixie::read_jsonl(split_in);
      const auto [train, test] = mixie::split(data, split_train, split_seed);
      mixie::write_jsonl(train, split_train_out);
      mixie::write_jsonl(test, split_test_out);
      std::cout << "train " << train.samples.size() << " / test " << test.samples.size() << "\n";
      return 0;
    }
    if (*ds_sample) {
      mixie::write_jsonl(mixie::sample_subset(mixie::read_jsonl(sample_in), sample_n, sample_seed),
                         sample_out);
      return 0;
    }
    if (*ds_stats) {
      const mixie::StatsReport report = mixie::stats(mixie::read_jsonl(stats_in));
      std::cout << mixie::format_stats(report);
      if (!stats_json.empty())
        mixie::detail::write_file_atomic(stats_json,
                                         mixie::stats_to_json(report).dump(2) + "\n");
      return 0;
    }
    if (*ds_extract) {
      const std::vector<mixie::ExtractionRule> rules = mixie::load_rules(extract_rules);
      const mixie::ExtractResult result = mixie::extract_candidates(extract_corpus, rules);
      for (const auto& skipped : result.skipped_files)
        std::cerr << ordered_json{{"warning", "unreadable file skipped: " + skipped}}.dump()
                  << "\n";
      mixie::write_candidates(result.candidates, extract_out);
      std::cout << "articles " << result.article_count << ", sentences "
                << result.sentence_count << ", candidates " << result.candidates.size() << "\n";
      return 0;
    }
    if (*ds_draft) {
      const mixie::TaskSpec spec = resolve_task_spec(draft_task, config);
      if (draft_backend.http.base_url.empty()) draft_backend.http = config.backend;
      if (draft_max_tokens) draft_backend.http.max_tokens = draft_max_tokens;
      std::vector<mixie::Candidate> candidates = mixie::read_candidates(draft_candidates);
      const std::string kind_filter =
          draft_kind == "auto"
              ? (mixie::payload_kind_for(spec.word_task) == mixie::PayloadKind::quads ? "ee"
                                                                                      : "re")
              : draft_kind;
      std::erase_if(candidates, [&](const mixie::Candidate& c) {
        return std::string(mixie::to_string(c.kind)) != kind_filter;
      });
      const std::unique_ptr<mixie::Backend> backend =
          make_backend(draft_backend, nullptr, &spec);
      const mixie::DraftResult result = mixie::draft_label(candidates, *backend, spec);
      mixie::write_jsonl(result.drafts, draft_out);
      for (const auto& error : result.errors)
        std::cerr << ordered_json{{"candidate", error.candidate_id}, {"error", error.message}}
                         .dump()
                  << "\n";
      std::cout << "drafts " << result.drafts.samples.size() << ", errors "
                << result.errors.size() << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << ordered_json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const mixie::Error& e) {
    std::cerr << ordered_json{{"error", mixie::error_code_name(e.code())},
                              {"message", e.what()}}
                     .dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}
