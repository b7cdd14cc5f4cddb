#pragma once

// Sequence and corpus scoring. Three accuracies per corpus:
//
//   TL   — fraction of sequences whose text-level label is correct
//   WL   — matched word-level units over gold units, micro-aggregated
//   ALL  — fraction of sequences that are perfect at both levels
//
// Unit matching is multiset intersection over normalized component tuples:
// duplicates count once per copy, order never matters. WL divides by the
// gold unit count only, so spurious predicted units do not lower it; they
// are visible in the informational extras (precision/F1, macro WL) instead.
// Sequences with no gold units contribute nothing to the micro WL fractions;
// for such a sequence, word-level perfection means predicting nothing.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixie/codec.hpp"
#include "mixie/errors.hpp"
#include "mixie/model.hpp"
#include "mixie/rng.hpp"
#include "mixie/text.hpp"

namespace mixie {

using UnitMultiset = std::map<std::vector<std::string>, std::size_t>;

inline UnitMultiset canonical_units(const WordPayload& payload,
                                    const NormalizationPolicy& policy = {}) {
  UnitMultiset units;
  const auto norm = [&](const std::string& s) { return normalize_text(s, policy); };
  std::visit(detail::overloaded{
                 [&](const PairList& pairs) {
                   for (const auto& p : pairs) ++units[{norm(p.label), norm(p.span)}];
                 },
                 [&](const TripleList& triples) {
                   for (const auto& t : triples)
                     ++units[{norm(t.object), norm(t.relation), norm(t.subject)}];
                 },
                 [&](const QuadList& quads) {
                   for (const auto& q : quads)
                     ++units[{norm(q.fields[0]), norm(q.fields[1]), norm(q.fields[2]),
                              norm(q.fields[3])}];
                 },
             },
             payload);
  return units;
}

inline std::size_t multiset_intersection_size(const UnitMultiset& a, const UnitMultiset& b) {
  std::size_t total = 0;
  for (const auto& [unit, count] : a) {
    const auto it = b.find(unit);
    if (it != b.end()) total += std::min(count, it->second);
  }
  return total;
}

struct SequenceScore {
  bool tl_correct = false;
  std::size_t m_match = 0;
  std::size_t t_pair = 0;        // gold unit count
  std::size_t p_pair_count = 0;  // predicted unit count
  bool wl_perfect = false;
};

// A failed parse scores as an empty prediction: tl_correct=false, m_match=0.
inline SequenceScore score_sequence(const ParseOutcome& pred, const MixedSample& gold,
                                    const NormalizationPolicy& policy = {}) {
  SequenceScore score;
  const UnitMultiset gold_units = canonical_units(gold.gold_payload, policy);
  const UnitMultiset pred_units = canonical_units(pred.payload, policy);
  score.t_pair = unit_count(gold.gold_payload);
  score.p_pair_count = unit_count(pred.payload);
  score.m_match = multiset_intersection_size(pred_units, gold_units);
  score.tl_correct =
      pred.label.has_value() && normalized_equal(*pred.label, gold.gold_label, policy);
  score.wl_perfect = score.t_pair > 0 ? score.m_match == score.t_pair
                                      : score.p_pair_count == 0;
  return score;
}

struct ScoreTotals {
  std::size_t m_match_sum = 0;
  std::size_t t_pair_sum = 0;
  std::size_t p_pair_sum = 0;
  std::size_t t_label = 0;  // number of sequences
  std::size_t tl_correct_count = 0;
  std::size_t exact_count = 0;       // tl_correct and wl_perfect
  std::size_t wl_perfect_count = 0;
  std::size_t wl_scored_sequences = 0;  // sequences with at least one gold unit
};

struct ScoreReport {
  double tl_accuracy = 0.0;
  std::optional<double> wl_accuracy;  // absent when the corpus has no gold units
  double all_accuracy = 0.0;
  ScoreTotals totals;
  // Informational extras; not part of the primary metric set.
  std::optional<double> wl_macro;
  std::optional<double> wl_precision;
  std::optional<double> wl_f1;
  std::vector<std::string> notes;
};

inline ScoreReport score_corpus(const std::vector<SequenceScore>& scores) {
  if (scores.empty()) fail(ErrorCode::empty_corpus, "cannot score an empty corpus");
  ScoreReport report;
  ScoreTotals& t = report.totals;
  double macro_sum = 0.0;
  for (const auto& s : scores) {
    t.m_match_sum += s.m_match;
    t.t_pair_sum += s.t_pair;
    t.p_pair_sum += s.p_pair_count;
    ++t.t_label;
    if (s.tl_correct) ++t.tl_correct_count;
    if (s.wl_perfect) ++t.wl_perfect_count;
    if (s.tl_correct && s.wl_perfect) ++t.exact_count;
    if (s.t_pair > 0) {
      ++t.wl_scored_sequences;
      macro_sum += static_cast<double>(s.m_match) / static_cast<double>(s.t_pair);
    }
  }
  report.tl_accuracy = static_cast<double>(t.tl_correct_count) / static_cast<double>(t.t_label);
  report.all_accuracy = static_cast<double>(t.exact_count) / static_cast<double>(t.t_label);
  if (t.t_pair_sum > 0)
    report.wl_accuracy = static_cast<double>(t.m_match_sum) / static_cast<double>(t.t_pair_sum);
  else
    report.notes.push_back("wl_accuracy undefined: corpus has no gold units");
  if (t.wl_scored_sequences > 0)
    report.wl_macro = macro_sum / static_cast<double>(t.wl_scored_sequences);
  if (t.p_pair_sum > 0)
    report.wl_precision = static_cast<double>(t.m_match_sum) / static_cast<double>(t.p_pair_sum);
  if (report.wl_accuracy && report.wl_precision &&
      (*report.wl_accuracy + *report.wl_precision) > 0.0)
    report.wl_f1 = 2.0 * *report.wl_accuracy * *report.wl_precision /
                   (*report.wl_accuracy + *report.wl_precision);
  return report;
}

// ---------------------------------------------------------------------------
// Sampling protocol: `reps` independently seeded uniform samples of size `n`
// drawn without replacement within each rep; the final accuracies are the
// arithmetic means of the per-rep accuracies. Totals are summed across reps.

struct SampledEvaluation {
  ScoreReport mean;
  std::vector<ScoreReport> reps;
  std::size_t sample_size = 0;
  std::size_t rep_count = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace detail

// RepEval: (const std::vector<std::size_t>& indices, std::size_t rep) -> ScoreReport
template <class RepEval>
SampledEvaluation sampled_evaluation(std::size_t population, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, RepEval&& eval_rep) {
  if (n == 0 || n > population)
    fail(ErrorCode::sample_too_large, "sample size " + std::to_string(n) +
                                          " is not in [1, " + std::to_string(population) + "]");
  if (reps < 1) fail(ErrorCode::invalid_argument, "reps must be >= 1");

  SampledEvaluation out;
  out.sample_size = n;
  out.rep_count = reps;
  out.seed = seed;

  std::vector<std::optional<double>> wls, macros, precisions, f1s;
  double tl_sum = 0.0, all_sum = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    auto rng = seeded_rng(seed, rep);
    const std::vector<std::size_t> indices = sample_without_replacement(population, n, rng);
    ScoreReport report = eval_rep(indices, rep);
    tl_sum += report.tl_accuracy;
    all_sum += report.all_accuracy;
    wls.push_back(report.wl_accuracy);
    macros.push_back(report.wl_macro);
    precisions.push_back(report.wl_precision);
    f1s.push_back(report.wl_f1);
    out.reps.push_back(std::move(report));
  }

  ScoreReport& mean = out.mean;
  mean.tl_accuracy = tl_sum / static_cast<double>(reps);
  mean.all_accuracy = all_sum / static_cast<double>(reps);
  mean.wl_accuracy = detail::mean_of_defined(wls);
  mean.wl_macro = detail::mean_of_defined(macros);
  mean.wl_precision = detail::mean_of_defined(precisions);
  mean.wl_f1 = detail::mean_of_defined(f1s);
  for (const auto& rep : out.reps) {
    mean.totals.m_match_sum += rep.totals.m_match_sum;
    mean.totals.t_pair_sum += rep.totals.t_pair_sum;
    mean.totals.p_pair_sum += rep.totals.p_pair_sum;
    mean.totals.t_label += rep.totals.t_label;
    mean.totals.tl_correct_count += rep.totals.tl_correct_count;
    mean.totals.exact_count += rep.totals.exact_count;
    mean.totals.wl_perfect_count += rep.totals.wl_perfect_count;
    mean.totals.wl_scored_sequences += rep.totals.wl_scored_sequences;
  }
  if (!mean.wl_accuracy)
    mean.notes.push_back("wl_accuracy undefined in every rep");
  mean.notes.push_back("mean of " + std::to_string(reps) + " reps of size " + std::to_string(n));
  return out;
}

// ---------------------------------------------------------------------------
// Report serialization.

inline nlohmann::ordered_json score_report_to_json(const ScoreReport& report) {
  nlohmann::ordered_json j;
  j["tl_accuracy"] = report.tl_accuracy;
  if (report.wl_accuracy) j["wl_accuracy"] = *report.wl_accuracy;
  else j["wl_accuracy"] = nullptr;
  j["all_accuracy"] = report.all_accuracy;
  j["totals"] = {
      {"m_match", report.totals.m_match_sum},
      {"t_pair", report.totals.t_pair_sum},
      {"p_pair", report.totals.p_pair_sum},
      {"t_label", report.totals.t_label},
      {"tl_correct", report.totals.tl_correct_count},
      {"exact", report.totals.exact_count},
      {"wl_perfect", report.totals.wl_perfect_count},
      {"wl_scored_sequences", report.totals.wl_scored_sequences},
  };
  nlohmann::ordered_json extras;
  extras["wl_macro"] = report.wl_macro ? nlohmann::ordered_json(*report.wl_macro) : nullptr;
  extras["wl_precision"] =
      report.wl_precision ? nlohmann::ordered_json(*report.wl_precision) : nullptr;
  extras["wl_f1"] = report.wl_f1 ? nlohmann::ordered_json(*report.wl_f1) : nullptr;
  j["extras"] = extras;
  j["notes"] = report.notes;
  return j;
}

inline ScoreReport score_report_from_json(const nlohmann::json& j) {
  ScoreReport r;
  r.tl_accuracy = j.at("tl_accuracy").get<double>();
  if (!j.at("wl_accuracy").is_null()) r.wl_accuracy = j.at("wl_accuracy").get<double>();
  r.all_accuracy = j.at("all_accuracy").get<double>();
  const auto& t = j.at("totals");
  r.totals.m_match_sum = t.at("m_match").get<std::size_t>();
  r.totals.t_pair_sum = t.at("t_pair").get<std::size_t>();
  r.totals.p_pair_sum = t.at("p_pair").get<std::size_t>();
  r.totals.t_label = t.at("t_label").get<std::size_t>();
  r.totals.tl_correct_count = t.at("tl_correct").get<std::size_t>();
  r.totals.exact_count = t.at("exact").get<std::size_t>();
  r.totals.wl_perfect_count = t.at("wl_perfect").get<std::size_t>();
  r.totals.wl_scored_sequences = t.at("wl_scored_sequences").get<std::size_t>();
  const auto& e = j.at("extras");
  if (!e.at("wl_macro").is_null()) r.wl_macro = e.at("wl_macro").get<double>();
  if (!e.at("wl_precision").is_null()) r.wl_precision = e.at("wl_precision").get<double>();
  if (!e.at("wl_f1").is_null()) r.wl_f1 = e.at("wl_f1").get<double>();
  for (const auto& note : j.at("notes")) r.notes.push_back(note.get<std::string>());
  return r;
}

inline std::string format_score_table(const ScoreReport& report) {
  std::ostringstream out;
  const auto line = [&](const char* name, const std::optional<double>& value,
                        const std::string& detail) {
    out << std::left << std::setw(5) << name;
    if (value)
      out << std::fixed << std::setprecision(4) << std::setw(8) << *value;
    else
      out << std::setw(8) << "n/a";
    out << "  " << detail << "\n";
  };
  const ScoreTotals& t = report.totals;
  line("TL", report.tl_accuracy,
       "(" + std::to_string(t.tl_correct_count) + "/" + std::to_string(t.t_label) + ")");
  line("WL", report.wl_accuracy,
       "(" + std::to_string(t.m_match_sum) + "/" + std::to_string(t.t_pair_sum) + ")");
  line("ALL", report.all_accuracy,
       "(" + std::to_string(t.exact_count) + "/" + std::to_string(t.t_label) + ")");
  out << "extras: ";
  const auto opt = [&](const char* name, const std::optional<double>& v) {
    out << name << "=";
    if (v)
      out << std::fixed << std::setprecision(4) << *v;
    else
      out << "n/a";
  };
  opt("wl_macro", report.wl_macro);
  out << " ";
  opt("wl_precision", report.wl_precision);
  out << " ";
  opt("wl_f1", report.wl_f1);
  out << "\n";
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  return out.str();
}

}  // namespace mixie
