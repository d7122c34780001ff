// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include "vic/eval.hpp"

using namespace vic;
using namespace vic::eval;

namespace {

std::vector<ItemId> ids(const std::vector<std::string>& v) {
  std::vector<ItemId> out;
  for (const auto& s : v) out.emplace_back(s);
  return out;
}

RankedList list(const std::string& q, const std::vector<std::string>& items) {
  std::vector<RankedEntry> entries;
  for (const auto& i : items) entries.push_back({ItemId(i), std::nullopt});
  return RankedList("t", QueryId(q), entries);
}

}  // namespace

TEST_CASE("dedup_ranked examples") {
  CHECK(dedup_ranked(ids({"b", "a", "c", "a"})) == ids({"b", "a", "c"}));
  CHECK(dedup_ranked(ids({"x", "y"})) == ids({"x", "y"}));
  CHECK(dedup_ranked(ids({"a", "a", "a"})) == ids({"a"}));
}

TEST_CASE("recall_at examples") {
  const std::vector<std::size_t> c12{1, 2};
  CHECK(recall_at(ids({"b", "a"}), {ItemId("a")}, c12) == std::map<std::size_t, int>{{1, 0}, {2, 1}});
  CHECK(recall_at(ids({"b", "c"}), {ItemId("a")}, c12) == std::map<std::size_t, int>{{1, 0}, {2, 0}});
  CHECK(recall_at(ids({"a", "b"}), {ItemId("a")}, c12).at(1) == 1);
  CHECK(recall_at(ids({"b", "a"}), {ItemId("a"), ItemId("b")}, c12).at(1) == 1);
  CHECK_THROWS_AS(recall_at(ids({"a"}), {}, c12), ValidationError);
}

TEST_CASE("evaluate_run: aggregates, missing and unknown queries") {
  RunMap run;
  run.emplace(QueryId("q1"), list("q1", {"a", "b", "c"}));
  run.emplace(QueryId("q2"), list("q2", {"b", "x", "y"}));
  run.emplace(QueryId("stray"), list("stray", {"a"}));
  const std::map<QueryId, std::set<ItemId>> gold{
      {QueryId("q1"), {ItemId("a")}}, {QueryId("q2"), {ItemId("y")}}, {QueryId("q3"), {ItemId("a")}}};
  const auto r = evaluate_run(run, gold, {5, 1});
  CHECK(r.cutoffs == std::vector<std::size_t>{1, 5});
  CHECK(r.aggregate.at(1) == doctest::Approx(1.0 / 3));
  CHECK(r.aggregate.at(5) == doctest::Approx(2.0 / 3));
  CHECK(r.per_query.at("q2").hit_rank == 3u);
  CHECK(r.per_query.at("q3").status == kStatusMissing);
  CHECK(r.per_query.at("stray").status == kStatusUnknownQuery);
  CHECK(r.flagged_count() == 2);
}

TEST_CASE("recall is non-decreasing in the cutoff and within [0, 1]") {
  RunMap run;
  std::map<QueryId, std::set<ItemId>> gold;
  for (int q = 0; q < 30; ++q) {
    std::vector<std::string> items;
    for (int i = 0; i < 12; ++i) items.push_back("i" + std::to_string((q * 7 + i * 3) % 40));
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    const auto qid = "q" + std::to_string(q);
    run.emplace(QueryId(qid), list(qid, items));
    gold[QueryId(qid)] = {ItemId("i" + std::to_string(q % 40))};
  }
  const auto r = evaluate_run(run, gold, {1, 2, 3, 5, 10, 20});
  double prev = 0;
  for (const auto& [c, v] : r.aggregate) {
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("latency percentiles use reranked rows only") {
  EvalReport r;
  r.cutoffs = {1};
  for (int i = 1; i <= 20; ++i) r.per_query["q" + std::to_string(i)] = {1, static_cast<double>(i), "clean"};
  r.per_query["z"] = {std::nullopt, 1000.0, std::string(kStatusError), true};
  finalize(r);
  CHECK(r.mean_latency_ms == doctest::Approx(10.5));
  CHECK(r.p50_latency_ms == 10.0);
  CHECK(r.p95_latency_ms == 19.0);
  CHECK(r.aggregate.at(1) == doctest::Approx(20.0 / 21));
}

TEST_CASE("report formats") {
  RunMap run;
  run.emplace(QueryId("q1"), list("q1", {"a", "b"}));
  run.emplace(QueryId("q2"), list("q2", {"b", "a"}));
  auto r = evaluate_run(run, {{QueryId("q1"), {ItemId("a")}}, {QueryId("q2"), {ItemId("a")}}}, {1, 5});
  r.dataset = "synthetic";
  r.direction = "t2v";
  r.config_fingerprint = "abc";

  const auto json_text = emit_report(r, ReportFormat::json);
  CHECK(report_from_json(json_text) == r);
  r.generated_at = now_iso8601();
  CHECK(report_from_json(emit_report(r, ReportFormat::json)) == r);

  const auto csv = emit_report(r, ReportFormat::csv);
  CHECK(csv.rfind("query_id,hit_rank,status,latency_ms\n", 0) == 0);
  CHECK(csv.find("q2,2,none,") != std::string::npos);

  const auto table = emit_report(r, ReportFormat::table);
  CHECK(table.find("50.0") != std::string::npos);
  CHECK(table.find("100.0") != std::string::npos);
  CHECK(report_format_from_string("csv") == ReportFormat::csv);
  CHECK_THROWS_AS(report_format_from_string("xml"), ValidationError);
}
