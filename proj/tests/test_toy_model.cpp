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

#include "dptext/toy_model.hpp"

#include <fstream>

#include <doctest.h>

#include "dptext/errors.hpp"
#include "support.hpp"

using namespace dptext;

namespace {

ToyModelSpec fixture_spec() {
  ToyModelSpec spec = testsupport::make_spec("abcd", 3, 21, 1.0);
  ToyModel tokenizer(spec);
  spec.table[tokenizer.encode("a")] = {2.0, 1.0, 0.0, -1.0, -5.0};
  spec.table[tokenizer.encode("ab")] = {0.0, 0.0, 3.0, 0.0, -2.0};
  spec.table[tokenizer.encode("")] = {1.0, 1.0, 1.0, 1.0, 1.0};
  return spec;
}

}  // namespace

TEST_CASE("tokenization round trips") {
  ToyModel model(testsupport::make_spec("ab c", 2));
  const TokenSequence tokens = model.encode("ab c<eos>ba");
  CHECK(tokens.size() == 7);
  CHECK(model.decode(tokens) == "ab cba");  // <eos> renders empty
  CHECK_THROWS_AS(model.encode("az"), EncodingError);
  CHECK_THROWS_AS(model.decode({99}), EncodingError);
}

TEST_CASE("table rows are returned exactly") {
  ToyModel model(fixture_spec());

  // Fixture row for context "a".
  CHECK(model.logits_for_prefix(model.encode("a")) ==
        LogitVector{2.0, 1.0, 0.0, -1.0, -5.0});

  // Longest suffix wins: "ab" row, not "b" fallback or default.
  CHECK(model.logits_for_prefix(model.encode("ab")) ==
        LogitVector{0.0, 0.0, 3.0, 0.0, -2.0});
  CHECK(model.logits_for_prefix(model.encode("dab")) ==
        LogitVector{0.0, 0.0, 3.0, 0.0, -2.0});

  // Uniform default row for unmatched contexts.
  CHECK(model.logits_for_prefix(model.encode("dc")) ==
        LogitVector{1.0, 1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("sessions reproduce direct prefix evaluation") {
  ToyModel model(fixture_spec());
  auto session = model.open_session(model.encode("ab"));
  CHECK(session->next_logits() == model.logits_for_prefix(model.encode("ab")));
  CHECK(session->next_logits() ==
        session->next_logits());  // purity per position
}

TEST_CASE("prefix extension consistency, exhaustively to depth 3") {
  ToyModelSpec spec = testsupport::make_spec("abcdefg", 3, 99, 2.0);
  ToyModel tokenizer(spec);
  spec.table[tokenizer.encode("a")] = LogitVector(8, 0.5);
  spec.table[tokenizer.encode("fg")] = {0, 1, 2, 3, 4, 5, 6, 7};
  ToyModel model(spec);
  const std::size_t vocab = model.vocab_size();

  std::vector<TokenSequence> prefixes{{}};
  for (int len = 0; len < 3; ++len) {
    std::vector<TokenSequence> next;
    for (const auto& prefix : prefixes) {
      for (std::size_t t = 0; t < vocab; ++t) {
        TokenSequence extended = prefix;
        extended.push_back(static_cast<TokenId>(t));
        next.push_back(extended);

        // Incremental session versus a fresh session on the full prefix.
        auto incremental = model.open_session(prefix);
        incremental->append_token(static_cast<TokenId>(t));
        auto fresh = model.open_session(extended);
        CHECK(incremental->next_logits() == fresh->next_logits());
      }
    }
    prefixes = std::move(next);
  }
}

TEST_CASE("fallback logits are deterministic, finite and bounded") {
  ToyModel model(testsupport::make_spec("xyz", 3, 1234, 0.75));
  const LogitVector a = model.logits_for_prefix(model.encode("xyz"));
  const LogitVector b = model.logits_for_prefix(model.encode("xyz"));
  CHECK(a == b);
  for (double v : a) {
    CHECK(v >= 0.0);
    CHECK(v <= 0.75);
  }
  // Different contexts get different fallback rows.
  CHECK(a != model.logits_for_prefix(model.encode("zyx")));
}

TEST_CASE("session guards") {
  ToyModel model(fixture_spec());
  auto session = model.open_session({});
  CHECK_THROWS_AS(session->append_token(17), EncodingError);
  CHECK_THROWS_AS(session->append_token(-1), EncodingError);
  session->close();
  CHECK_THROWS_AS(session->next_logits(), StateError);
  CHECK_THROWS_AS(model.open_session({42}), EncodingError);
}

TEST_CASE("spec validation") {
  ToyModelSpec no_eos;
  no_eos.vocab = {"a", "b"};
  CHECK_THROWS_AS(ToyModel{no_eos}, InvalidParameterError);

  ToyModelSpec deep = testsupport::make_spec("ab");
  deep.order = 4;
  CHECK_THROWS_AS(ToyModel{deep}, InvalidParameterError);

  ToyModelSpec ragged = testsupport::make_spec("ab");
  ragged.table[{0}] = {1.0, 2.0};  // vocab is 3 wide
  CHECK_THROWS_AS(ToyModel{ragged}, InvalidParameterError);
}

TEST_CASE("table file round trip") {
  testsupport::TempDir tmp("toy_io");
  ToyModelSpec spec = testsupport::make_spec("ab \n", 3, 5, 0.5);
  ToyModel tokenizer(spec);
  spec.table[tokenizer.encode("a b")] = {1.5, -2.25, 0.0, 3.0, -7.0};
  spec.table[tokenizer.encode("\n")] = {0.0, 0.1, 0.2, 0.3, 0.4};
  spec.table[tokenizer.encode("")] = LogitVector(5, 2.0);

  const std::string path = tmp.path("model.txt").string();
  spec.save(path);
  const ToyModelSpec loaded = ToyModelSpec::load(path);

  CHECK(loaded.vocab == spec.vocab);
  CHECK(loaded.order == spec.order);
  CHECK(loaded.fallback_seed == spec.fallback_seed);
  CHECK(loaded.fallback_scale == spec.fallback_scale);
  CHECK(loaded.table == spec.table);
}

TEST_CASE("table file parse errors") {
  testsupport::TempDir tmp("toy_parse");

  {
    std::ofstream out(tmp.path("bad_row.txt"));
    out << "vocab a b <eos>\nab\t1 2\n";  // row too short
  }
  CHECK_THROWS_AS(ToyModelSpec::load(tmp.path("bad_row.txt").string()),
                  ParseError);

  {
    std::ofstream out(tmp.path("bad_directive.txt"));
    out << "vocabulary a b\n";
  }
  CHECK_THROWS_AS(ToyModelSpec::load(tmp.path("bad_directive.txt").string()),
                  ParseError);

  {
    std::ofstream out(tmp.path("no_vocab.txt"));
    out << "order 2\n";
  }
  CHECK_THROWS_AS(ToyModelSpec::load(tmp.path("no_vocab.txt").string()),
                  ParseError);

  CHECK_THROWS_AS(ToyModelSpec::load(tmp.path("absent.txt").string()),
                  ConfigError);
}

TEST_CASE("builder memorizes observed chains") {
  ToyModelSpec base = testsupport::make_spec("abc", 3, 0, 0.0);
  ToyTableBuilder builder(base);
  builder.observe_text("abc", /*append_eos=*/true);
  const ToyModelSpec spec = builder.build(20.0);
  ToyModel model(spec);

  // Each observed context peaks on the observed next token.
  const LogitVector after_ab = model.logits_for_prefix(model.encode("ab"));
  CHECK(after_ab[2] == 20.0);  // 'c'
  CHECK(after_ab[0] == 0.0);

  const LogitVector after_abc = model.logits_for_prefix(model.encode("abc"));
  CHECK(after_abc[static_cast<std::size_t>(model.eos_token())] == 20.0);

  // Repeated observations scale relative weights by frequency.
  ToyTableBuilder counts(base);
  counts.observe_text("ab", false);
  counts.observe_text("ab", false);
  counts.observe_text("ac", false);
  const ToyModelSpec weighted = counts.build(20.0);
  ToyModel weighted_model(weighted);
  const LogitVector after_a =
      weighted_model.logits_for_prefix(weighted_model.encode("a"));
  CHECK(after_a[1] == 20.0);  // 'b' seen twice
  CHECK(after_a[2] == 10.0);  // 'c' seen once
}
