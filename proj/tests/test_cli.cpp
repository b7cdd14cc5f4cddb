#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include <json.hpp>

#include "mixie/dataset.hpp"
#include "mixie/instruction_words.hpp"

#include "oracle.hpp"
#include "support.hpp"

using namespace mixie;
using support::run_cli;

namespace {

const std::filesystem::path kDataDir = MIXIE_TEST_DATA_DIR;

std::filesystem::path write_fixture_dataset(const std::filesystem::path& dir, std::size_t n,
                                            WordTask task = WordTask::ner) {
  auto rng = seeded_rng(606);
  const DatasetFile data = oracle::gen_dataset(rng, n, task);
  const auto path = dir / "data.jsonl";
  write_jsonl(data, path);
  return path;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("cli: help and usage errors", "[cli]") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);
  const auto unknown = run_cli("score --gold a --pred b --no-such-flag");
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.err.find("usage") != std::string::npos);
}

TEST_CASE("cli: decode inverts the golden relation line", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  support::write_file(dir / "pred.txt",
                      "<sport>Relation Extraction:Lionel Messi;Occupation;Soccer player:\n");
  const auto result =
      run_cli("decode --labels sport,movie,women,IT,CM --word-task re -i " +
              (dir / "pred.txt").string());
  REQUIRE(result.exit_code == 0);
  const auto record = nlohmann::json::parse(lines_of(result.out).at(0));
  CHECK(record.at("label") == "sport");
  CHECK(record.at("triples").at(0) ==
        nlohmann::json::array({"Lionel Messi", "Occupation", "Soccer player"}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: encode then decode is the identity on a fixture", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 8);
  const DatasetFile data = read_jsonl(data_path);

  const auto encoded = run_cli("encode --data " + data_path.string());
  REQUIRE(encoded.exit_code == 0);
  support::write_file(dir / "encoded.txt", encoded.out);

  const auto decoded = run_cli("decode --task-from " + data_path.string() + " -i " +
                               (dir / "encoded.txt").string());
  REQUIRE(decoded.exit_code == 0);
  CHECK(decoded.err.empty());  // fully well-formed input, no diagnostics
  const auto records = lines_of(decoded.out);
  REQUIRE(records.size() == data.samples.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto record = nlohmann::json::parse(records[i]);
    CHECK(record.at("label") == data.samples[i].gold_label);
    CHECK(record.at("pairs") == payload_to_json(data.samples[i].gold_payload));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: encode --side input produces model inputs", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 3);
  const auto result = run_cli("encode --data " + data_path.string() + " --side input");
  REQUIRE(result.exit_code == 0);
  for (const auto& line : lines_of(result.out)) {
    CHECK(line.find("<sport>") != std::string::npos);
    CHECK(line.ends_with("Named Entity Recognition"));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: decode of garbage stays exit 0 in tolerant mode", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  support::write_file(dir / "garbage.txt", "complete nonsense\n:::;;\n");
  const auto result = run_cli("decode --labels a,b --word-task ner -i " +
                              (dir / "garbage.txt").string());
  CHECK(result.exit_code == 0);
  CHECK(lines_of(result.out).size() == 2);
  CHECK(result.err.find("diagnostic") != std::string::npos);

  const auto strict = run_cli("decode --strict --labels a,b --word-task ner -i " +
                              (dir / "garbage.txt").string());
  CHECK(strict.exit_code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: score against a gold-echo prediction file", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 10);
  const auto encoded = run_cli("encode --data " + data_path.string());
  support::write_file(dir / "pred.txt", encoded.out);

  const auto result = run_cli("score --gold " + data_path.string() + " --pred " +
                              (dir / "pred.txt").string() + " --json " +
                              (dir / "report.json").string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("TL   1.0000") != std::string::npos);
  CHECK(result.out.find("ALL  1.0000") != std::string::npos);
  const auto report = nlohmann::json::parse(support::read_file(dir / "report.json"));
  CHECK(report.at("all_accuracy") == 1.0);

  // Length mismatch is a data error.
  support::write_file(dir / "short.txt", "only one line\n");
  CHECK(run_cli("score --gold " + data_path.string() + " --pred " +
                (dir / "short.txt").string())
            .exit_code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: score with the sampled protocol", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 30);
  const auto encoded = run_cli("encode --data " + data_path.string());
  support::write_file(dir / "pred.txt", encoded.out);
  const auto result = run_cli("score --gold " + data_path.string() + " --pred " +
                              (dir / "pred.txt").string() +
                              " --sample 10 --reps 3 --seed 5 --json " +
                              (dir / "sampled.json").string());
  REQUIRE(result.exit_code == 0);
  const auto sampled = nlohmann::json::parse(support::read_file(dir / "sampled.json"));
  CHECK(sampled.at("reps").size() == 3);
  CHECK(sampled.at("mean").at("tl_accuracy") == 1.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: dataset split writes exact partitions deterministically", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 50);
  const std::string args = "dataset split --in " + data_path.string() + " --train-out " +
                           (dir / "train.jsonl").string() + " --test-out " +
                           (dir / "test.jsonl").string() + " --train 10 --seed 7";
  const auto result = run_cli(args);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("train 10 / test 40") != std::string::npos);
  const std::string train_bytes = support::read_file(dir / "train.jsonl");
  REQUIRE(run_cli(args).exit_code == 0);
  CHECK(support::read_file(dir / "train.jsonl") == train_bytes);
  CHECK(read_jsonl(dir / "test.jsonl").samples.size() == 40);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: dataset stats prints label histograms", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 20);
  const auto result = run_cli("dataset stats --in " + data_path.string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("samples: 20") != std::string::npos);
  CHECK(result.out.find("text labels:") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: dataset convert canonicalizes and validates", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 5);
  const auto out_path = dir / "canon.jsonl";
  REQUIRE(run_cli("dataset convert --in " + data_path.string() + " --out " +
                  out_path.string())
              .exit_code == 0);
  CHECK(support::read_file(out_path) == support::read_file(data_path));
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: eval run with mock gold writes verifiable artifacts", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto data_path = write_fixture_dataset(dir, 15);
  const auto run_dir = dir / "run";
  const auto result = run_cli("eval run --data " + data_path.string() +
                              " --backend mock-gold --out " + run_dir.string() + " --cache " +
                              (dir / "cache").string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("ALL  1.0000") != std::string::npos);
  const auto report = nlohmann::json::parse(support::read_file(run_dir / "report.json"));
  CHECK(report.at("all_accuracy") == 1.0);

  const auto verify = run_cli("eval report --run " + run_dir.string());
  REQUIRE(verify.exit_code == 0);
  CHECK(verify.out.find("mock-gold") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: tcree extraction and baseline drafting pipeline", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  const auto candidates_path = dir / "candidates.jsonl";
  const auto extract = run_cli("dataset tcree-extract --corpus " +
                               (kDataDir / "corpus").string() + " --rules " +
                               (kDataDir / "tcree.rules").string() + " --out " +
                               candidates_path.string());
  REQUIRE(extract.exit_code == 0);
  CHECK(extract.out.find("candidates 2") != std::string::npos);

  const auto drafts_path = dir / "drafts.jsonl";
  const auto draft = run_cli("dataset draft-label --candidates " + candidates_path.string() +
                             " --out " + drafts_path.string() +
                             " --labels sport,movie,women,IT,CM --word-task re" +
                             " --backend baseline --gazetteer " +
                             (kDataDir / "gazetteer.json").string());
  REQUIRE(draft.exit_code == 0);
  const DatasetFile drafts = read_jsonl(drafts_path);
  REQUIRE(drafts.samples.size() == 1);  // one re-kind candidate
  CHECK(drafts.samples[0].draft);
  CHECK(drafts.samples[0].gold_label == "sport");
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: config file task profiles drive decode", "[cli]") {
  const auto dir = support::make_temp_dir("cli");
  support::write_file(dir / "config.json", R"({
  "tasks": {
    "scnm": {"text_task": "tc", "labels": ["sport", "movie"], "word_task": "ner"}
  }
})");
  support::write_file(dir / "pred.txt", "<sport>Named Entity Recognition:Person;Messi\n");
  const auto result = run_cli("--config " + (dir / "config.json").string() +
                              " decode --task scnm -i " + (dir / "pred.txt").string());
  REQUIRE(result.exit_code == 0);
  const auto record = nlohmann::json::parse(lines_of(result.out).at(0));
  CHECK(record.at("label") == "sport");

  // Unknown config keys are rejected.
  support::write_file(dir / "bad.json", R"({"task": {}})");
  CHECK(run_cli("--config " + (dir / "bad.json").string() + " decode --task x -i " +
                (dir / "pred.txt").string())
            .exit_code == 2);
  std::filesystem::remove_all(dir);
}
