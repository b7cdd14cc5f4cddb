#pragma once

// Test-only machinery:
//  - deterministic generators for specs, payloads and raw wire strings
//  - a brute-force reference scorer that recomputes TL/WL/ALL from the raw
//    strings with naive splitting and exhaustive unit matching, fully
//    independent of the codec and scorer under test
//
// Generated corpora use a reserved-character-free alphabet so the naive
// splitting in the reference scorer is honest.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mixie/codec.hpp"
#include "mixie/dataset.hpp"
#include "mixie/instruction_words.hpp"
#include "mixie/model.hpp"
#include "mixie/rng.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Brute-force reference scorer.

struct RefSequence {
  std::string gold_raw;
  std::string pred_raw;
};

struct RefReport {
  double tl = 0.0;
  std::optional<double> wl;
  double all = 0.0;
  std::size_t m_sum = 0;
  std::size_t t_sum = 0;
};

inline std::string ref_label(const std::string& raw) {
  const auto lt = raw.find('<');
  const auto gt = raw.find('>');
  if (lt == std::string::npos || gt == std::string::npos || gt < lt) return {};
  return raw.substr(lt + 1, gt - lt - 1);
}

inline std::string ref_body(const std::string& raw, const std::string& iw) {
  const auto gt = raw.find('>');
  if (gt == std::string::npos) return {};
  std::string rest = raw.substr(gt + 1);
  if (rest.rfind(iw, 0) == 0) rest = rest.substr(iw.size());
  return rest;
}

inline std::vector<std::string> ref_split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (const char c : s) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

inline std::vector<std::vector<std::string>> ref_units(const std::string& body,
                                                       std::size_t arity) {
  std::vector<std::vector<std::string>> units;
  for (const std::string& segment : ref_split(body, ':')) {
    if (segment.empty()) continue;
    const std::vector<std::string> fields = ref_split(segment, ';');
    if (fields.size() != arity) continue;
    units.push_back(fields);
  }
  return units;
}

// Exhaustive matching: every gold unit grabs the first unused equal
// predicted unit.
inline std::size_t ref_match(const std::vector<std::vector<std::string>>& pred,
                             const std::vector<std::vector<std::string>>& gold) {
  std::vector<bool> used(pred.size(), false);
  std::size_t m = 0;
  for (const auto& g : gold) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (!used[i] && pred[i] == g) {
        used[i] = true;
        ++m;
        break;
      }
    }
  }
  return m;
}

inline RefReport ref_score(const std::vector<RefSequence>& sequences, const std::string& iw,
                           std::size_t arity) {
  RefReport report;
  std::size_t tl_count = 0, all_count = 0;
  for (const auto& seq : sequences) {
    const auto gold_units = ref_units(ref_body(seq.gold_raw, iw), arity);
    const auto pred_units = ref_units(ref_body(seq.pred_raw, iw), arity);
    const std::size_t m = ref_match(pred_units, gold_units);
    const bool tl = !ref_label(seq.pred_raw).empty() &&
                    ref_label(seq.pred_raw) == ref_label(seq.gold_raw);
    const bool perfect = gold_units.empty() ? pred_units.empty() : m == gold_units.size();
    report.m_sum += m;
    report.t_sum += gold_units.size();
    if (tl) ++tl_count;
    if (tl && perfect) ++all_count;
  }
  report.tl = static_cast<double>(tl_count) / static_cast<double>(sequences.size());
  report.all = static_cast<double>(all_count) / static_cast<double>(sequences.size());
  if (report.t_sum > 0)
    report.wl = static_cast<double>(report.m_sum) / static_cast<double>(report.t_sum);
  return report;
}

// ---------------------------------------------------------------------------
// Generators.

inline const std::vector<std::string>& tc_labels() {
  static const std::vector<std::string> labels{"sport", "movie", "women", "IT", "CM"};
  return labels;
}

inline const std::vector<std::string>& sc_labels() {
  static const std::vector<std::string> labels{"positive", "negative"};
  return labels;
}

inline const std::vector<std::string>& unit_words() {
  static const std::vector<std::string> words{"Person", "Org",  "Loc",    "Work", "Messi",
                                              "Tokyo",  "apple", "x1",     "監督", "映画",
                                              "試合",   "選手",  "データ", "青"};
  return words;
}

inline std::string pick(const std::vector<std::string>& pool, std::mt19937_64& rng) {
  return pool[static_cast<std::size_t>(mixie::bounded(rng, pool.size()))];
}

inline mixie::WordTask pick_word_task(std::mt19937_64& rng) {
  static const mixie::WordTask tasks[] = {
      mixie::WordTask::ner,      mixie::WordTask::re,       mixie::WordTask::ee,
      mixie::WordTask::sent_rw,  mixie::WordTask::sent_n,   mixie::WordTask::sent_adj,
      mixie::WordTask::sent_n_adj};
  return tasks[mixie::bounded(rng, 7)];
}

inline mixie::TaskSpec make_spec(mixie::WordTask task) {
  const bool sentiment = mixie::payload_kind_for(task) == mixie::PayloadKind::pairs &&
                         task != mixie::WordTask::ner;
  return mixie::make_task_spec(sentiment ? mixie::TextTask::sc : mixie::TextTask::tc,
                               sentiment ? sc_labels() : tc_labels(), task);
}

inline std::size_t unit_arity(const mixie::TaskSpec& spec) {
  switch (mixie::payload_kind_for(spec.word_task)) {
    case mixie::PayloadKind::pairs: return 2;
    case mixie::PayloadKind::triples: return 3;
    case mixie::PayloadKind::quads: return 4;
  }
  return 2;
}

inline std::vector<std::string> gen_unit(std::size_t arity, std::mt19937_64& rng) {
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < arity; ++i) fields.push_back(pick(unit_words(), rng));
  return fields;
}

// Canonical wire string assembled by plain concatenation (not the codec).
inline std::string assemble_raw(const std::string& label, const mixie::TaskSpec& spec,
                                const std::vector<std::vector<std::string>>& units) {
  std::string out = "<" + label + ">" + spec.instruction_word;
  const std::size_t arity = unit_arity(spec);
  for (const auto& unit : units) {
    out.push_back(':');
    for (std::size_t i = 0; i < unit.size(); ++i) {
      if (i > 0) out.push_back(';');
      out.append(unit[i]);
    }
    if (arity > 2) out.push_back(':');
  }
  return out;
}

inline mixie::WordPayload payload_from_units(const std::vector<std::vector<std::string>>& units,
                                             const mixie::TaskSpec& spec) {
  switch (mixie::payload_kind_for(spec.word_task)) {
    case mixie::PayloadKind::pairs: {
      mixie::PairList pairs;
      for (const auto& u : units) pairs.push_back({u[0], u[1]});
      return pairs;
    }
    case mixie::PayloadKind::triples: {
      mixie::TripleList triples;
      for (const auto& u : units) triples.push_back({u[0], u[1], u[2]});
      return triples;
    }
    case mixie::PayloadKind::quads: {
      mixie::QuadList quads;
      for (const auto& u : units) quads.push_back({{u[0], u[1], u[2], u[3]}});
      return quads;
    }
  }
  return mixie::PairList{};
}

struct GeneratedCorpus {
  mixie::TaskSpec spec;
  std::vector<mixie::MixedSample> gold;     // structured gold
  std::vector<RefSequence> raw;             // gold/pred raw strings
};

// Small random corpus with noisy predictions: dropped, mutated and spurious
// units, wrong labels, duplicates.
inline GeneratedCorpus gen_corpus(std::mt19937_64& rng, std::size_t max_sequences = 10,
                                  std::size_t max_units = 5) {
  GeneratedCorpus corpus;
  corpus.spec = make_spec(pick_word_task(rng));
  const std::size_t arity = unit_arity(corpus.spec);
  const std::size_t n = 1 + mixie::bounded(rng, max_sequences);
  for (std::size_t s = 0; s < n; ++s) {
    const std::string gold_label = pick(corpus.spec.labels, rng);
    std::vector<std::vector<std::string>> gold_units;
    const std::size_t unit_n = mixie::bounded(rng, max_units + 1);
    for (std::size_t u = 0; u < unit_n; ++u) {
      if (!gold_units.empty() && mixie::bounded(rng, 4) == 0)
        gold_units.push_back(gold_units.back());  // deliberate duplicate
      else
        gold_units.push_back(gen_unit(arity, rng));
    }

    std::string pred_label = gold_label;
    if (mixie::bounded(rng, 10) < 3) pred_label = pick(corpus.spec.labels, rng);
    std::vector<std::vector<std::string>> pred_units;
    for (const auto& unit : gold_units) {
      if (mixie::bounded(rng, 4) == 0) continue;  // dropped
      auto copy = unit;
      if (mixie::bounded(rng, 5) == 0)
        copy[mixie::bounded(rng, copy.size())] = pick(unit_words(), rng);  // mutated
      pred_units.push_back(std::move(copy));
    }
    const std::size_t spurious = mixie::bounded(rng, 3);
    for (std::size_t u = 0; u < spurious; ++u) pred_units.push_back(gen_unit(arity, rng));
    for (std::size_t i = pred_units.size(); i > 1; --i)
      std::swap(pred_units[i - 1], pred_units[mixie::bounded(rng, i)]);

    mixie::MixedSample sample;
    sample.id = "s" + std::to_string(s);
    sample.text = "text " + std::to_string(s);
    sample.gold_label = gold_label;
    sample.gold_payload = payload_from_units(gold_units, corpus.spec);
    corpus.gold.push_back(std::move(sample));
    corpus.raw.push_back({assemble_raw(gold_label, corpus.spec, gold_units),
                          assemble_raw(pred_label, corpus.spec, pred_units)});
  }
  return corpus;
}

// Synthetic dataset with unique, unit-bearing texts; suitable for the
// end-to-end identity checks.
inline mixie::DatasetFile gen_dataset(std::mt19937_64& rng, std::size_t n,
                                      mixie::WordTask task = mixie::WordTask::ner,
                                      std::size_t min_units = 1) {
  mixie::DatasetFile data;
  data.task = make_spec(task);
  const std::size_t arity = unit_arity(data.task);
  for (std::size_t i = 0; i < n; ++i) {
    mixie::MixedSample sample;
    sample.id = "s" + std::to_string(i);
    sample.text = "記事" + std::to_string(i) + " " + pick(unit_words(), rng) + "の話題";
    sample.gold_label = pick(data.task.labels, rng);
    std::vector<std::vector<std::string>> units;
    const std::size_t unit_n = min_units + mixie::bounded(rng, 3);
    for (std::size_t u = 0; u < unit_n; ++u) units.push_back(gen_unit(arity, rng));
    sample.gold_payload = payload_from_units(units, data.task);
    data.samples.push_back(std::move(sample));
  }
  return data;
}

}  // namespace oracle
