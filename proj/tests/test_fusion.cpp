// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "vic/fusion.hpp"

using namespace vic;
using fusion::FusionWeights;

namespace {

ScoreMatrix matrix(const std::string& tag, std::map<std::string, double> row, const std::string& q = "q") {
  ScoreRow r;
  for (const auto& [k, v] : row) r[ItemId(k)] = v;
  return ScoreMatrix(tag, {{QueryId(q), r}});
}

RankedList list(const std::string& tag, const std::vector<std::string>& items, const std::string& q = "q") {
  std::vector<RankedEntry> entries;
  for (const auto& i : items) entries.push_back({ItemId(i), std::nullopt});
  return RankedList(tag, QueryId(q), entries);
}

std::vector<std::string> order(const RankedList& l) {
  std::vector<std::string> out;
  for (const auto& e : l.entries()) out.push_back(e.item.str());
  return out;
}

}  // namespace

TEST_CASE("minmax examples") {
  const auto n = fusion::minmax_normalize({{ItemId("a"), 2}, {ItemId("b"), 4}, {ItemId("c"), 3}});
  CHECK(n.at(ItemId("a")) == 0.0);
  CHECK(n.at(ItemId("b")) == 1.0);
  CHECK(n.at(ItemId("c")) == 0.5);
  const auto flat = fusion::minmax_normalize({{ItemId("a"), 5}, {ItemId("b"), 5}});
  CHECK(flat.at(ItemId("a")) == 0.0);
  CHECK(flat.at(ItemId("b")) == 0.0);
  CHECK(fusion::minmax_normalize({{ItemId("a"), 7}}).at(ItemId("a")) == 0.0);
}

TEST_CASE("comb_sum examples") {
  const std::vector<ScoreMatrix> ms{matrix("m1", {{"a", 1}, {"b", 0}}), matrix("m2", {{"a", 0}, {"b", 1}})};
  const auto fused = fusion::comb_sum(ms, {}, QueryId("q"), 2);
  CHECK(order(fused) == std::vector<std::string>{"a", "b"});
  CHECK(*fused.entries()[0].score == 1.0);
  CHECK(*fused.entries()[1].score == 1.0);
  CHECK(fused.retriever_tag() == "combsum");

  const std::vector<ScoreMatrix> one{matrix("m1", {{"a", 0.2}, {"b", 0.9}, {"c", 0.5}})};
  CHECK(order(fusion::comb_sum(one, FusionWeights({{"m1", 3.0}}), QueryId("q"), 3)) ==
        order(ranked_from_scores(one[0], QueryId("q"), 3)));

  const std::vector<ScoreMatrix> two{matrix("m1", {{"a", 0.2}, {"b", 0.9}, {"c", 0.5}}),
                                     matrix("m2", {{"a", 9}, {"b", 0}, {"c", 1}, {"d", 5}})};
  CHECK(order(fusion::comb_sum(two, FusionWeights({{"m1", 2.0}, {"m2", 0.0}}), QueryId("q"), 5)) ==
        order(ranked_from_scores(two[0], QueryId("q"), 5)));
}

TEST_CASE("fusion weights validation") {
  CHECK_THROWS_AS(FusionWeights({{"a", -1.0}}), ValidationError);
  CHECK_THROWS_AS(FusionWeights({{"a", 0.0}}), ValidationError);
  CHECK_THROWS_AS(FusionWeights({{"a", NAN}}), ValidationError);
  const std::vector<ScoreMatrix> ms{matrix("m1", {{"a", 1}})};
  CHECK_THROWS_AS(fusion::comb_sum(ms, FusionWeights({{"other", 1.0}}), QueryId("q"), 1), ValidationError);
  CHECK_THROWS_AS(fusion::comb_sum(ms, {}, QueryId("nope"), 1), ValidationError);
}

TEST_CASE("comb_mnz examples") {
  // Three sources; "x" is retrieved by two of them with a CombSUM of 0.8.
  const std::vector<ScoreMatrix> ms{matrix("m1", {{"x", 0.8}, {"lo", 0.0}, {"hi", 1.0}}),
                                    matrix("m2", {{"x", 0.0}, {"hi", 1.0}}),
                                    matrix("m3", {{"y", 1.0}, {"z", 0.0}})};
  const auto sum = fusion::comb_sum(ms, {}, QueryId("q"), 10);
  const auto mnz = fusion::comb_mnz(ms, {}, QueryId("q"), 10);
  auto score_of = [](const RankedList& l, const std::string& item) {
    for (const auto& e : l.entries()) {
      if (e.item.str() == item) return *e.score;
    }
    return -1.0;
  };
  CHECK(score_of(sum, "x") == doctest::Approx(0.8));
  CHECK(score_of(mnz, "x") == doctest::Approx(1.6));
  CHECK(score_of(mnz, "y") == doctest::Approx(score_of(sum, "y")));
  CHECK(mnz.retriever_tag() == "combmnz");

  const std::vector<ScoreMatrix> full{matrix("m1", {{"a", 3}, {"b", 1}, {"c", 2}}),
                                      matrix("m2", {{"a", 0}, {"b", 5}, {"c", 4}})};
  CHECK(order(fusion::comb_mnz(full, {}, QueryId("q"), 3)) == order(fusion::comb_sum(full, {}, QueryId("q"), 3)));
}

TEST_CASE("rrf examples") {
  const std::vector<RankedList> both{list("A", {"x", "y"}), list("B", {"x", "z"})};
  const auto fused = fusion::rrf(both, {}, 10);
  CHECK(fused.entries()[0].item == ItemId("x"));
  CHECK(*fused.entries()[0].score == doctest::Approx(2.0 / 61).epsilon(1e-12));

  const std::vector<RankedList> consensus{list("A", {"solo", "c"}), list("B", {"other", "c"})};
  CHECK(fusion::rrf(consensus, {}, 1).entries()[0].item == ItemId("c"));

  const std::vector<RankedList> single{list("A", {"p", "q", "r", "s"})};
  for (double k : {0.5, 1.0, 60.0, 1000.0}) {
    CHECK(order(fusion::rrf(single, {k}, 4)) == std::vector<std::string>{"p", "q", "r", "s"});
  }
  const std::vector<RankedList> mixed{list("A", {"a"}, "q1"), list("B", {"a"}, "q2")};
  CHECK_THROWS_AS(fusion::rrf(mixed, {}, 1), ValidationError);
}

TEST_CASE("rrf scores are bounded by M/k") {
  std::mt19937 rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<RankedList> lists;
    const std::size_t m = 1 + rng() % 4;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::string> items;
      for (int j = 0; j < 10; ++j) items.push_back("i" + std::to_string((rng() % 5) * 10 + j));
      std::sort(items.begin(), items.end());
      items.erase(std::unique(items.begin(), items.end()), items.end());
      lists.push_back(list("t" + std::to_string(i), items));
    }
    const auto fused = fusion::rrf(lists, {60}, 100);
    for (const auto& e : fused.entries()) {
      CHECK(*e.score > 0);
      CHECK(*e.score <= static_cast<double>(m) / 60.0);
    }
  }
}

TEST_CASE("batched kernels: parallel equals serial equals single-query") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ScoreMatrix> matrices;
  std::vector<RunMap> runs;
  for (int m = 0; m < 3; ++m) {
    std::map<QueryId, ScoreRow> rows;
    for (int q = 0; q < 40; ++q) {
      ScoreRow row;
      for (int i = 0; i < 30; ++i) row[ItemId("i" + std::to_string(i))] = u(rng);
      rows.emplace(QueryId("q" + std::to_string(q)), row);
    }
    matrices.emplace_back("m" + std::to_string(m), rows);
    RunMap run;
    for (const auto& [q, _] : rows) run.emplace(q, ranked_from_scores(matrices.back(), q, 20));
    runs.push_back(run);
  }
  for (auto method : {fusion::ScoreMethod::combsum, fusion::ScoreMethod::combmnz}) {
    const auto par = fusion::fuse_scores_all(matrices, {}, method, 10, 15, Exec::parallel, 3);
    const auto ser = fusion::fuse_scores_all(matrices, {}, method, 10, 15, Exec::serial);
    CHECK(par == ser);
    const auto& q0 = QueryId("q0");
    CHECK(par.at(q0) == (method == fusion::ScoreMethod::combsum ? fusion::comb_sum(matrices, {}, q0, 10)
                                                                : fusion::comb_mnz(matrices, {}, q0, 10, 15)));
  }
  const auto par = fusion::rrf_all(runs, {}, 10, Exec::parallel, 3);
  CHECK(par == fusion::rrf_all(runs, {}, 10, Exec::serial));
  CHECK(par.size() == 40);
}

TEST_CASE("comb fusion matches the brute-force oracle") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + rng() % 4;
    std::vector<ScoreMatrix> ms;
    std::vector<testing::Scores> rows;
    std::vector<double> w;
    std::map<std::string, double> wmap;
    for (std::size_t i = 0; i < m; ++i) {
      testing::Scores row;
      const int n = 1 + static_cast<int>(rng() % 30);
      for (int j = 0; j < n; ++j) row["i" + std::to_string(rng() % 40)] = u(rng);
      rows.push_back(row);
      ms.push_back(matrix("s" + std::to_string(i), row));
      w.push_back(i == 0 ? 1.0 : static_cast<double>(rng() % 3));
      wmap["s" + std::to_string(i)] = w.back();
    }
    const FusionWeights weights(wmap);
    const auto got = fusion::comb_mnz(ms, weights, QueryId("q"), 25, 10);
    const auto want = testing::brute_comb_mnz(rows, w, 25, 10);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.entries()[i].item.str() == want[i].first);
      CHECK(std::abs(*got.entries()[i].score - want[i].second) <= 1e-9);
    }
  }
}
