#pragma once

// Backend contract: anything that maps a serialized input string to a raw
// output string. complete() is total — failures come back as structured
// Completion values, never as exceptions.

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mixie/codec.hpp"
#include "mixie/dataset.hpp"
#include "mixie/errors.hpp"
#include "mixie/model.hpp"

namespace mixie {

struct Completion {
  bool ok = false;
  std::string text;
  ErrorCode code = ErrorCode::remote_error;
  std::string error;

  static Completion success(std::string text) {
    Completion c;
    c.ok = true;
    c.text = std::move(text);
    return c;
  }
  static Completion failure(ErrorCode code, std::string message) {
    Completion c;
    c.ok = false;
    c.code = code;
    c.error = std::move(message);
    return c;
  }
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const std::string& input) = 0;
  virtual std::string name() const = 0;
  virtual std::string model() const { return {}; }
  virtual bool deterministic() const = 0;
};

// Answers every known input with its gold serialization. Test oracle for the
// end-to-end pipeline: evaluating a dataset against it must score 1.0/1.0/1.0.
class MockGoldBackend : public Backend {
 public:
  explicit MockGoldBackend(const DatasetFile& data, const NormalizationPolicy& policy = {}) {
    for (const auto& sample : data.samples) {
      const SerializedInput input = build_input(sample.text, data.task, policy);
      table_[input.value] = encode_output(sample.gold_label, sample.gold_payload, data.task).value;
    }
  }

  Completion complete(const std::string& input) override {
    const auto it = table_.find(input);
    if (it == table_.end())
      return Completion::failure(ErrorCode::unknown_input, "input not in the gold table");
    return Completion::success(it->second);
  }

  std::string name() const override { return "mock-gold"; }
  bool deterministic() const override { return true; }

 private:
  std::map<std::string, std::string> table_;
};

// Lexicon-matching smoke baseline: always predicts the majority text label
// and, for pair-shaped tasks, emits one pair per gazetteer entry whose span
// occurs in the input.
struct Gazetteer {
  std::string majority_label;
  std::vector<LabelSpanPair> entries;
};

inline Gazetteer gazetteer_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"majority_label", "entries"}, "gazetteer");
  Gazetteer g;
  g.majority_label = j.at("majority_label").get<std::string>();
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 2)
      fail(ErrorCode::schema_mismatch, "gazetteer: entries must be [label, span] arrays");
    g.entries.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
  }
  return g;
}

inline Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse_error, "cannot open gazetteer: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, "gazetteer: " + std::string(e.what()));
  }
  return gazetteer_from_json(j);
}

class BaselineBackend : public Backend {
 public:
  BaselineBackend(Gazetteer gazetteer, TaskSpec spec)
      : gazetteer_(std::move(gazetteer)), spec_(std::move(spec)) {
    if (!spec_.has_label(gazetteer_.majority_label))
      fail(ErrorCode::label_not_in_set,
           "gazetteer majority label '" + gazetteer_.majority_label +
               "' is not in the candidate set");
  }

  Completion complete(const std::string& input) override {
    WordPayload payload;
    if (payload_kind_for(spec_.word_task) == PayloadKind::pairs) {
      PairList pairs;
      for (const auto& entry : gazetteer_.entries)
        if (!entry.span.empty() && input.find(entry.span) != std::string::npos)
          pairs.push_back(entry);
      payload = std::move(pairs);
    } else if (payload_kind_for(spec_.word_task) == PayloadKind::triples) {
      payload = TripleList{};
    } else {
      payload = QuadList{};
    }
    return Completion::success(
        encode_output(gazetteer_.majority_label, payload, spec_).value);
  }

  std::string name() const override { return "baseline-gazetteer"; }
  bool deterministic() const override { return true; }

 private:
  Gazetteer gazetteer_;
  TaskSpec spec_;
};

// ---------------------------------------------------------------------------
// Chat-completion HTTP backend. The serialized input is sent as the sole user
// message, with no system prompt: the wire format itself carries all task
// information. Transient failures (connect/timeout/429/5xx) are retried with
// exponential backoff up to the retry budget.

struct HttpBackendConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080/v1"
  std::string model;
  std::string auth_env;  // env var holding the bearer token; empty = no auth
  double timeout_s = 30.0;
  std::size_t retries = 3;        // additional attempts after the first
  double backoff_base_s = 0.25;   // doubled after every transient failure
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (!config_.auth_env.empty()) {
      const char* token = std::getenv(config_.auth_env.c_str());
      if (token == nullptr || *token == '\0')
        fail(ErrorCode::auth_missing,
             "environment variable '" + config_.auth_env + "' is not set");
      token_ = token;
    }
    const auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos)
      fail(ErrorCode::invalid_argument, "base_url must start with http:// or https://");
    const auto path_begin = config_.base_url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
      origin_ = config_.base_url;
    } else {
      origin_ = config_.base_url.substr(0, path_begin);
      path_prefix_ = config_.base_url.substr(path_begin);
      while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
  }

  Completion complete(const std::string& input) override {
    nlohmann::ordered_json body;
    body["model"] = config_.model;
    body["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "user"}, {"content", input}}});
    body["temperature"] = config_.temperature;
    if (config_.max_tokens) body["max_tokens"] = *config_.max_tokens;
    const std::string payload = body.dump();

    Completion last = Completion::failure(ErrorCode::remote_error, "no attempt made");
    for (std::size_t attempt = 0; attempt <= config_.retries; ++attempt) {
      if (attempt > 0) {
        const double delay_s = config_.backoff_base_s * static_cast<double>(1ull << (attempt - 1));
        std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
      }
      bool transient = false;
      last = attempt_once(payload, transient);
      if (last.ok || !transient) return last;
    }
    if (last.code == ErrorCode::timeout) return last;
    return Completion::failure(ErrorCode::budget_exhausted,
                               "retry budget exhausted; last error: " + last.error);
  }

  std::string name() const override { return "http"; }
  std::string model() const override { return config_.model; }
  bool deterministic() const override { return config_.temperature == 0.0; }

 private:
  Completion attempt_once(const std::string& payload, bool& transient) {
    httplib::Client client(origin_);
    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    const auto res = client.Post(path_prefix_ + "/chat/completions", headers, payload,
                                 "application/json");
    if (!res) {
      transient = true;
      const httplib::Error err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
          err == httplib::Error::Write)
        return Completion::failure(ErrorCode::timeout,
                                   "request timed out: " + httplib::to_string(err));
      return Completion::failure(ErrorCode::remote_error,
                                 "connection failed: " + httplib::to_string(err));
    }
    if (res->status == 429 || res->status >= 500) {
      transient = true;
      return Completion::failure(ErrorCode::remote_error,
                                 "status " + std::to_string(res->status));
    }
    if (res->status < 200 || res->status >= 300) {
      transient = false;
      return Completion::failure(ErrorCode::remote_error,
                                 "status " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      const nlohmann::json j = nlohmann::json::parse(res->body);
      return Completion::success(
          j.at("choices").at(0).at("message").at("content").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      transient = false;
      return Completion::failure(ErrorCode::remote_error,
                                 "unexpected response body: " + std::string(e.what()));
    }
  }

  HttpBackendConfig config_;
  std::string token_;
  std::string origin_;
  std::string path_prefix_;
};

}  // namespace mixie
