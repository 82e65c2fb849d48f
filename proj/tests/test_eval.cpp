// Copyright 2026 The dptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dptext/eval.hpp"

#include <algorithm>
#include <fstream>

#include <doctest.h>

#include "dptext/errors.hpp"
#include "support.hpp"

using namespace dptext;

namespace {

// Toy model that always answers "x": its table continues "r: " (the tail of
// the Answer: scaffold) with x and then stops.
ToyModel answer_x_model() {
  ToyModelSpec spec = testsupport::make_spec("Inputas:ewrAxy \n", 3, 2, 0.5);
  ToyTableBuilder builder(spec);
  builder.observe_text("r: x", /*append_eos=*/true);
  return ToyModel(builder.build(30.0));
}

SyntheticRecord record_of(const std::string& text, const std::string& label) {
  SyntheticRecord record;
  record.text = text;
  record.label = label;
  return record;
}

IclTask label_task(const std::vector<PrivateExample>& tests,
                   std::vector<std::string> labels) {
  IclTask task;
  task.name = "fixture";
  task.kind = IclTask::Kind::kClassification;
  task.label_set = std::move(labels);
  task.test_examples = tests;
  task.prompt_header = "";
  return task;
}

}  // namespace

TEST_CASE("icl prompts follow the Input/Answer block format") {
  const std::vector<SyntheticRecord> demos{record_of("alpha", "A"),
                                           record_of("beta", "B")};
  const std::string prompt =
      build_icl_prompt("Classify the following examples:", demos, "gamma");
  CHECK(prompt ==
        "Classify the following examples:\n"
        "Input: alpha\nAnswer: A\n"
        "Input: beta\nAnswer: B\n"
        "Input: gamma\nAnswer: ");

  // Demo order follows input order, byte for byte.
  std::vector<SyntheticRecord> reversed{demos[1], demos[0]};
  CHECK(build_icl_prompt("h", reversed, "q") !=
        build_icl_prompt("h", demos, "q"));
  CHECK(build_icl_prompt("h", demos, "q") ==
        build_icl_prompt("h", demos, "q"));
}

TEST_CASE("k-shot prediction decodes the scripted answer") {
  testsupport::ScriptedAnswerProvider provider({"Business"});
  const std::string answer =
      k_shot_predict({}, "some query", provider, "header:");
  CHECK(answer == "Business");
}

TEST_CASE("answers are cut at the first newline and trimmed") {
  testsupport::ScriptedAnswerProvider provider({"  padded  "});
  CHECK(k_shot_predict({}, "q", provider, "") == "padded");
}

TEST_CASE("all-correct fixture scores 100") {
  ToyModel model = answer_x_model();
  std::vector<PrivateExample> tests;
  for (int i = 0; i < 10; ++i) {
    tests.push_back({"aa", "x"});
  }
  std::vector<SyntheticRecord> corpus{record_of("aa", "x"),
                                      record_of("as", "x")};
  const EvalReport report =
      evaluate_icl(corpus, label_task(tests, {"x"}), 2, 1, 5, model);
  CHECK(report.accuracy_mean == 100.0);
  CHECK(report.accuracy_std == 0.0);
  CHECK(report.runs == 1);
}

TEST_CASE("two of three correct rounds to 66.7") {
  ToyModel model = answer_x_model();
  const std::vector<PrivateExample> tests{
      {"aa", "x"}, {"as", "x"}, {"aw", "y"}};
  std::vector<SyntheticRecord> corpus{record_of("aa", "x"),
                                      record_of("as", "y")};
  const EvalReport report =
      evaluate_icl(corpus, label_task(tests, {"x", "y"}), 2, 1, 5, model);
  CHECK(report.accuracy_mean == 66.7);
}

TEST_CASE("scripted 70/75/80 fixture gives mean 75.0 and std 5.0") {
  // 20 queries per run over 3 runs; runs get 14, 15 and 16 correct answers.
  std::vector<std::string> answers;
  for (int run = 0; run < 3; ++run) {
    for (int q = 0; q < 20; ++q) {
      answers.push_back(q < 14 + run ? "x" : "zz");
    }
  }
  testsupport::ScriptedAnswerProvider provider(std::move(answers));

  std::vector<PrivateExample> tests;
  for (int q = 0; q < 20; ++q) {
    tests.push_back({"query " + std::to_string(q), "x"});
  }
  const EvalReport report =
      evaluate_icl({}, label_task(tests, {"x"}), 0, 3, 5, provider);
  REQUIRE(report.per_run.size() == 3);
  CHECK(report.per_run[0] == doctest::Approx(70.0));
  CHECK(report.per_run[1] == doctest::Approx(75.0));
  CHECK(report.per_run[2] == doctest::Approx(80.0));
  CHECK(report.accuracy_mean == 75.0);
  CHECK(report.accuracy_std == 5.0);
}

TEST_CASE("zero-shot never touches the corpus") {
  testsupport::ScriptedAnswerProvider provider({"x"});
  const std::vector<PrivateExample> tests{{"q", "x"}};
  // Empty corpus is fine at k = 0.
  const EvalReport report =
      evaluate_icl({}, label_task(tests, {"x"}), 0, 1, 5, provider);
  CHECK(report.accuracy_mean == 100.0);
}

TEST_CASE("insufficient demos raise a configuration error") {
  ToyModel model = answer_x_model();
  const std::vector<PrivateExample> tests{{"aa", "x"}};
  std::vector<SyntheticRecord> corpus{record_of("aa", "x")};
  CHECK_THROWS_AS(
      evaluate_icl(corpus, label_task(tests, {"x"}), 4, 1, 5, model),
      ConfigError);
  CHECK_THROWS_AS(
      evaluate_icl(corpus, label_task(tests, {"x"}), 2, 0, 5, model),
      ConfigError);
  CHECK_THROWS_AS(
      evaluate_icl(corpus, label_task({}, {"x"}), 0, 1, 5, model),
      ConfigError);
}

TEST_CASE("evaluation is invariant to test example order") {
  ToyModel model = answer_x_model();
  std::vector<PrivateExample> tests{
      {"aa", "x"}, {"as", "y"}, {"aw", "x"}, {"ae", "x"}};
  std::vector<SyntheticRecord> corpus{record_of("aa", "x"),
                                      record_of("as", "y")};
  const IclTask forward = label_task(tests, {"x", "y"});
  std::reverse(tests.begin(), tests.end());
  const IclTask backward = label_task(tests, {"x", "y"});

  const EvalReport a = evaluate_icl(corpus, forward, 2, 2, 9, model);
  const EvalReport b = evaluate_icl(corpus, backward, 2, 2, 9, model);
  CHECK(a.accuracy_mean == b.accuracy_mean);
  CHECK(a.accuracy_std == b.accuracy_std);
}

TEST_CASE("extraction matches after whitespace normalization") {
  testsupport::ScriptedAnswerProvider provider(
      {"  Steven   Spielberg ", "Wrong Answer"});
  IclTask task;
  task.kind = IclTask::Kind::kExtraction;
  task.slot_name = "director";
  task.prompt_header = "";
  task.test_examples = {{"movie one", "Steven Spielberg"},
                        {"movie two", "Someone Else"}};
  const EvalReport report = evaluate_icl({}, task, 0, 1, 5, provider);
  CHECK(report.accuracy_mean == 50.0);
}

TEST_CASE("structured evaluation arithmetic") {
  SUBCASE("two parses and one validation out of three") {
    std::vector<SyntheticRecord> records{
        record_of(R"({"title": "Jaws", "year": 1975})", ""),
        record_of(R"([1, 2, 3])", ""),  // parses, fails object schema
        record_of("not json at all", "")};
    const StructuredEval result = evaluate_structured(records);
    CHECK(result.parse_rate == 66.7);
    CHECK(result.validate_rate == 33.3);
    CHECK(result.raw_count == 3);
  }

  SUBCASE("all-empty outputs score zero") {
    std::vector<SyntheticRecord> records{record_of("", ""), record_of("", "")};
    const StructuredEval result = evaluate_structured(records);
    CHECK(result.parse_rate == 0.0);
    CHECK(result.validate_rate == 0.0);
    CHECK(result.raw_count == 2);
  }

  SUBCASE("minimal object under a permissive schema") {
    std::vector<SyntheticRecord> records{record_of("{}", "")};
    const StructuredEval result = evaluate_structured(
        records, [](const nlohmann::json&) { return true; });
    CHECK(result.parse_rate == 100.0);
    CHECK(result.validate_rate == 100.0);
    CHECK(result.raw_count == 1);
  }

  SUBCASE("default schema wants a non-empty object") {
    std::vector<SyntheticRecord> records{record_of("{}", "")};
    const StructuredEval result = evaluate_structured(records);
    CHECK(result.parse_rate == 100.0);
    CHECK(result.validate_rate == 0.0);
  }

  SUBCASE("validation never exceeds parsing") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<SyntheticRecord> records;
      const int n = 1 + static_cast<int>(uniform01(rng) * 10);
      for (int i = 0; i < n; ++i) {
        switch (static_cast<int>(uniform01(rng) * 4)) {
          case 0: records.push_back(record_of("{\"k\": 1}", "")); break;
          case 1: records.push_back(record_of("{}", "")); break;
          case 2: records.push_back(record_of("17", "")); break;
          default: records.push_back(record_of("<broken", "")); break;
        }
      }
      const StructuredEval result = evaluate_structured(records);
      CHECK(result.validate_rate <= result.parse_rate);
    }
  }

  SUBCASE("empty corpus") {
    const StructuredEval result = evaluate_structured({});
    CHECK(result.raw_count == 0);
    CHECK(result.parse_rate == 0.0);
  }
}

TEST_CASE("task files load with relative test paths") {
  testsupport::TempDir tmp("task");
  {
    std::ofstream out(tmp.path("tests.jsonl"));
    out << R"({"text": "what is this", "label": "Description"})" << "\n";
  }
  {
    std::ofstream out(tmp.path("task.json"));
    out << R"({"name": "trec-mini", "kind": "classification",
               "labels": ["Description", "Entity"],
               "prompt_header": "Answer the question type:",
               "test_path": "tests.jsonl"})";
  }
  const IclTask task = IclTask::load(tmp.path("task.json").string());
  CHECK(task.name == "trec-mini");
  CHECK(task.kind == IclTask::Kind::kClassification);
  CHECK(task.label_set.size() == 2);
  CHECK(task.test_examples.size() == 1);
  CHECK(task.prompt_header == "Answer the question type:");

  {
    std::ofstream out(tmp.path("bad.json"));
    out << R"({"name": "x", "kind": "mystery", "test_path": "tests.jsonl"})";
  }
  CHECK_THROWS_AS(IclTask::load(tmp.path("bad.json").string()), ConfigError);
}
