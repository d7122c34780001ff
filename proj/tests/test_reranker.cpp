// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "corpus.hpp"
#include "vic/backend.hpp"
#include "vic/reranker.hpp"

using namespace vic;
using namespace vic::reranker;
using nlohmann::json;

namespace {

std::vector<std::size_t> order(const Permutation& p) { return {p.order().begin(), p.order().end()}; }

CandidateSequence seq_of(const std::vector<std::string>& items) {
  std::vector<CandidateSlot> slots;
  std::map<std::string, std::size_t> rank;
  for (const auto& i : items) slots.push_back({ItemId(i), "t", ++rank["t"]});
  return CandidateSequence(QueryId("q"), slots);
}

GridPtr tiny_grid(const std::string& item, std::optional<std::string> subtitle = std::nullopt) {
  return std::make_shared<const sgrid::SGrid>(
      sgrid::SGrid{ItemId(item), Image(6, 6), std::move(subtitle), {0}, 1, 1, {}});
}

CorpusManifest manifest_for(const std::vector<std::string>& items) {
  CorpusManifest m;
  m.captions.emplace(ItemId("q"), "a dog surfing");
  for (const auto& i : items) m.captions.emplace(ItemId(i), "caption of " + i);
  return m;
}

/// Replays scripted outcomes: a reply string or a thrown TransportError.
class ScriptedBackend final : public Backend {
 public:
  struct Step {
    std::string reply;
    bool fail = false;
    bool retryable = true;
  };
  explicit ScriptedBackend(std::vector<Step> steps) : steps_(std::move(steps)) {}
  std::string complete(const PromptBundle&, const BackendConfig&) override {
    const auto& s = steps_.at(std::min(calls++, steps_.size() - 1));
    if (s.fail) throw TransportError("scripted failure", s.retryable, s.retryable ? 503 : 400);
    return s.reply;
  }
  std::string tag() const override { return "scripted"; }
  std::size_t calls = 0;

 private:
  std::vector<Step> steps_;
};

BackendConfig fast_config() {
  BackendConfig cfg;
  cfg.backoff = std::chrono::milliseconds(1);
  return cfg;
}

}  // namespace

TEST_CASE("parse_permutation worked examples") {
  const auto a = parse_permutation("[3, 1, 2]", 3);
  CHECK(order(a) == std::vector<std::size_t>{3, 1, 2});
  CHECK(a.status() == PermutationStatus::clean);

  const auto b = parse_permutation("Ranking: 2 > 2 > 3", 4);
  CHECK(order(b) == std::vector<std::size_t>{2, 3, 1, 4});
  CHECK(b.status() == PermutationStatus::repaired);

  const auto c = parse_permutation("I cannot rank these.", 5);
  CHECK(order(c) == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(c.status() == PermutationStatus::identity_fallback);
}

TEST_CASE("parse_permutation repairs") {
  CHECK(parse_permutation("[2, 1]", 3).status() == PermutationStatus::repaired);
  CHECK(order(parse_permutation("[2, 1]", 3)) == std::vector<std::size_t>{2, 1, 3});
  CHECK(order(parse_permutation("[9, 2, 0, 2, 1]", 3)) == std::vector<std::size_t>{2, 1, 3});
  CHECK(parse_permutation("Answer: [1, 2, 3] then [3, 2, 1]", 3).status() == PermutationStatus::clean);
  CHECK(order(parse_permutation("[x] best is 3 then 1", 3)) == std::vector<std::size_t>{3, 1, 2});
  CHECK(parse_permutation("[7, 8]", 3).status() == PermutationStatus::identity_fallback);
  CHECK(parse_permutation("", 1).status() == PermutationStatus::identity_fallback);
  CHECK(order(parse_permutation("[99999999999999999999999, 2]", 2)) == std::vector<std::size_t>{2, 1});
  CHECK_THROWS_AS(parse_permutation("[1]", 0), ValidationError);
}

TEST_CASE("parse_permutation round-trips rendered permutations") {
  std::mt19937 rng(4);
  for (std::size_t k = 1; k <= 30; ++k) {
    std::vector<std::size_t> o(k);
    std::iota(o.begin(), o.end(), 1);
    std::shuffle(o.begin(), o.end(), rng);
    const Permutation p(o);
    const auto back = parse_permutation(render_permutation(p), k);
    CHECK(back == p);
  }
}

TEST_CASE("parse_permutation is total on fuzzed input") {
  std::mt19937 rng(12);
  const std::string alphabet = "0123456789[],- >\n\tabc";
  for (int t = 0; t < 2000; ++t) {
    std::string s(rng() % 60, ' ');
    for (auto& ch : s) ch = alphabet[rng() % alphabet.size()];
    const std::size_t k = 1 + rng() % 25;
    const auto p = parse_permutation(s, k);
    auto sorted = order(p);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < k; ++i) REQUIRE(sorted[i] == i + 1);
  }
}

TEST_CASE("apply reindexes slots") {
  const auto seq = seq_of({"a", "c", "b", "x"});
  const auto out = apply(seq, Permutation({3, 1, 2, 4}));
  CHECK(out[0].item == ItemId("b"));
  CHECK(out[1].item == ItemId("a"));
  CHECK(out[3].item == ItemId("x"));
  CHECK(apply(seq, Permutation::identity(4)) == std::vector<CandidateSlot>(seq.slots().begin(), seq.slots().end()));
  CHECK_THROWS_AS(apply(seq, Permutation::identity(3)), ValidationError);

  // Label-sorting the applied output recovers the input.
  const Permutation p({4, 2, 1, 3});
  const auto applied = apply(seq, p);
  std::vector<CandidateSlot> restored(4, applied[0]);
  for (std::size_t j = 0; j < 4; ++j) restored[p.order()[j] - 1] = applied[j];
  CHECK(restored == std::vector<CandidateSlot>(seq.slots().begin(), seq.slots().end()));
}

TEST_CASE("build_prompt t2v keeps duplicate slots") {
  std::vector<CandidateSlot> slots{
      {ItemId("a"), "x", 1}, {ItemId("c"), "y", 1}, {ItemId("b"), "x", 2}, {ItemId("a"), "y", 2}};
  const CandidateSequence seq(QueryId("q"), slots);
  std::map<std::string, GridPtr> grids{{"a", tiny_grid("a", "sub a")}, {"b", tiny_grid("b")}, {"c", tiny_grid("c")}};
  const auto bundle = build_prompt(QueryId("q"), seq, manifest_for({}),
                                   [&](const ItemId& i) { return grids.at(i.str()); }, Direction::t2v);
  REQUIRE(bundle.size() == 4);
  CHECK(*bundle.query_text == "a dog surfing");
  for (std::size_t i = 0; i < 4; ++i) CHECK(bundle.candidates[i].label == i + 1);
  CHECK(std::get<GridPtr>(bundle.candidates[0].content) == std::get<GridPtr>(bundle.candidates[3].content));

  const auto tpl = PromptTemplate::load("v1");
  const auto messages = render_messages(bundle, tpl);
  REQUIRE(messages.size() == 1);
  CHECK(messages[0]["role"] == "user");
  const auto& content = messages[0]["content"];
  std::size_t images = 0;
  bool saw_subtitle = false;
  bool saw_query = false;
  for (const auto& part : content) {
    if (part["type"] == "image_url") {
      ++images;
      CHECK(part["image_url"]["url"].get<std::string>().rfind("data:image/jpeg;base64,", 0) == 0);
    } else {
      const auto text = part["text"].get<std::string>();
      saw_subtitle = saw_subtitle || text.find("sub a") != std::string::npos;
      saw_query = saw_query || text.find("a dog surfing") != std::string::npos;
    }
  }
  CHECK(images == 4);
  CHECK(saw_subtitle);
  CHECK(saw_query);
}

TEST_CASE("build_prompt v2t uses caption parts") {
  std::vector<std::string> items;
  for (int i = 0; i < 20; ++i) items.push_back("t" + std::to_string(i));
  const auto seq = seq_of(items);
  auto manifest = manifest_for(items);
  const auto bundle = build_prompt(QueryId("q"), seq, manifest, [](const ItemId& i) { return tiny_grid(i.str()); },
                                   Direction::v2t);
  CHECK(bundle.size() == 20);
  CHECK(bundle.query_image != nullptr);
  CHECK(std::get<std::string>(bundle.candidates[4].content) == "caption of t4");
  const auto content = render_messages(bundle, PromptTemplate::load("v1"))[0]["content"];
  std::size_t images = 0;
  for (const auto& part : content) images += part["type"] == "image_url";
  CHECK(images == 1);

  manifest.captions.erase(ItemId("t3"));
  CHECK_THROWS_AS(build_prompt(QueryId("q"), seq, manifest, [](const ItemId& i) { return tiny_grid(i.str()); },
                               Direction::v2t),
                  ValidationError);
}

TEST_CASE("build_prompt rejects unresolvable grids") {
  const auto seq = seq_of({"a", "b"});
  CHECK_THROWS_AS(build_prompt(QueryId("q"), seq, manifest_for({}),
                               [](const ItemId& i) -> GridPtr {
                                 if (i.str() == "b") return nullptr;
                                 return tiny_grid("a");
                               },
                               Direction::t2v),
                  ValidationError);
}

TEST_CASE("templates: placeholders are filled once and custom ids load from a directory") {
  const auto dir = testing::scratch_dir("reranker-templates");
  json custom = json::parse(R"({"id": "terse",
    "t2v": {"preamble": "Q={query} K={K}", "candidate": "#{label}", "subtitle": "s={subtitle}", "closing": "go"},
    "v2t": {"preamble": "p", "query_subtitle": "{subtitle}", "candidates_header": "h",
            "candidate": "{label}:{caption}", "closing": "c"}})");
  std::ofstream(dir / "terse.json") << custom.dump();
  const auto tpl = PromptTemplate::load("terse", dir);
  CHECK(tpl.t2v.candidate == "#{label}");
  CHECK_THROWS_AS(PromptTemplate::load("nope", dir), ValidationError);

  PromptBundle bundle{Direction::t2v, QueryId("q"), std::string("{K} literally"), nullptr,
                      {{1, ItemId("a"), tiny_grid("a")}}, "terse"};
  const auto content = render_messages(bundle, tpl)[0]["content"];
  CHECK(content[0]["text"] == "Q={K} literally K=1");
}

TEST_CASE("mock oracle examples") {
  PromptBundle bundle{Direction::v2t, QueryId("q"), std::nullopt, tiny_grid("q"), {}, "v1"};
  for (const auto* item : {"b", "a", "c"}) {
    bundle.candidates.push_back({bundle.candidates.size() + 1, ItemId(item), std::string("x")});
  }
  Relevance rel{{{QueryId("q"), ItemId("a")}, 1.0}};
  CHECK(mock_oracle(bundle, rel) == "[2, 1, 3]");
  CHECK(mock_oracle(bundle, {}) == "[1, 2, 3]");

  bundle.candidates.clear();
  for (const auto* item : {"g", "b", "c", "g", "d"}) {
    bundle.candidates.push_back({bundle.candidates.size() + 1, ItemId(item), std::string("x")});
  }
  CHECK(mock_oracle(bundle, {{{QueryId("q"), ItemId("g")}, 1.0}}).rfind("[1, 4, ", 0) == 0);
}

TEST_CASE("rerank: retries, fallback and K=1") {
  PromptBundle bundle{Direction::v2t, QueryId("q"), std::nullopt, tiny_grid("q"), {}, "v1"};
  for (int i = 0; i < 3; ++i) {
    bundle.candidates.push_back({bundle.candidates.size() + 1, ItemId("c" + std::to_string(i)), std::string("x")});
  }
  auto cfg = fast_config();

  ScriptedBackend flaky({{"", true}, {"[3, 2, 1]"}});
  auto r = rerank(bundle, flaky, cfg);
  CHECK(flaky.calls == 2);
  CHECK(order(r.permutation) == std::vector<std::size_t>{3, 2, 1});
  CHECK_FALSE(r.backend_failed);
  CHECK(r.backend_tag == "scripted");

  ScriptedBackend down({{"", true}});
  r = rerank(bundle, down, cfg);
  CHECK(down.calls == 3);
  CHECK(r.permutation.status() == PermutationStatus::identity_fallback);
  CHECK(r.backend_failed);
  CHECK(r.raw_reply.rfind("error:", 0) == 0);

  ScriptedBackend rejecting({{"", true, false}});
  r = rerank(bundle, rejecting, cfg);
  CHECK(rejecting.calls == 1);
  CHECK(r.backend_failed);

  ScriptedBackend chatty({{"no idea"}});
  r = rerank(bundle, chatty, cfg);
  CHECK(r.permutation.status() == PermutationStatus::identity_fallback);
  CHECK_FALSE(r.backend_failed);

  bundle.candidates.erase(bundle.candidates.begin() + 1, bundle.candidates.end());
  ScriptedBackend never({{"[5, 5]"}});
  r = rerank(bundle, never, cfg);
  CHECK(never.calls == 0);
  CHECK(order(r.permutation) == std::vector<std::size_t>{1});
}

TEST_CASE("rerank with the mock oracle is deterministic") {
  PromptBundle bundle{Direction::v2t, QueryId("q"), std::nullopt, tiny_grid("q"), {}, "v1"};
  for (const auto* item : {"b", "a", "c", "a"}) {
    bundle.candidates.push_back({bundle.candidates.size() + 1, ItemId(item), std::string("x")});
  }
  MockOracleBackend mock(relevance_from_gold({{QueryId("q"), {ItemId("a")}}}));
  const auto first = rerank(bundle, mock, fast_config());
  const auto second = rerank(bundle, mock, fast_config());
  CHECK(first.permutation == second.permutation);
  CHECK(first.raw_reply == second.raw_reply);
  CHECK(order(first.permutation) == std::vector<std::size_t>{2, 4, 1, 3});
}

TEST_CASE("transcript log writes one JSON line per call") {
  const auto dir = testing::scratch_dir("reranker-transcripts");
  PromptBundle bundle{Direction::v2t, QueryId("q"), std::nullopt, tiny_grid("q"), {}, "v1"};
  bundle.candidates.push_back({1, ItemId("a"), std::string("x")});
  bundle.candidates.push_back({2, ItemId("b"), std::string("y")});
  {
    TranscriptLog log(dir / "t.jsonl", false);
    IdentityBackend id;
    log.record(bundle, rerank(bundle, id, fast_config()));
    log.record(bundle, rerank(bundle, id, fast_config()));
  }
  std::ifstream in(dir / "t.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto doc = json::parse(line);
    CHECK(doc["status"] == "clean");
    CHECK(doc["backend"] == "identity");
    CHECK_FALSE(doc.contains("latency_ms"));
    ++lines;
  }
  CHECK(lines == 2);
}
