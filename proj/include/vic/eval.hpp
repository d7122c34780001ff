// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vic/core.hpp"

namespace vic::eval {

/// First occurrence of every item, order kept.
std::vector<ItemId> dedup_ranked(std::span<const CandidateSlot> slots);
std::vector<ItemId> dedup_ranked(std::span<const ItemId> items);

/// cutoff -> 1 if any of the first `cutoff` items is gold, else 0.
std::map<std::size_t, int> recall_at(std::span<const ItemId> ranked, const std::set<ItemId>& gold,
                                     std::span<const std::size_t> cutoffs);

/// 1-based position of the first gold item, if any.
std::optional<std::size_t> first_hit(std::span<const ItemId> ranked, const std::set<ItemId>& gold);

// Per-query status values besides the permutation statuses.
inline constexpr std::string_view kStatusNone = "none";
inline constexpr std::string_view kStatusMissing = "missing";
inline constexpr std::string_view kStatusError = "error";
inline constexpr std::string_view kStatusUnknownQuery = "unknown_query";

struct QueryOutcome {
  std::optional<std::size_t> hit_rank;
  double latency_ms = 0;
  std::string status{kStatusNone};
  bool flagged = false;
  std::string note;

  friend bool operator==(const QueryOutcome&, const QueryOutcome&) = default;
};

struct EvalReport {
  std::string name;
  std::string method;
  std::string dataset;
  std::string direction;
  std::vector<std::size_t> cutoffs;
  std::map<std::string, QueryOutcome> per_query;
  std::map<std::size_t, double> aggregate;
  double mean_latency_ms = 0;
  double p50_latency_ms = 0;
  double p95_latency_ms = 0;
  std::string config_fingerprint;
  std::optional<std::string> generated_at;

  std::size_t flagged_count() const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Fills `aggregate` and the latency statistics from `per_query`. Queries
/// with status unknown_query carry no gold and are left out of the means;
/// latencies are summarised over queries that went through a reranker.
void finalize(EvalReport& report);

/// Scores a run against gold. Gold queries absent from the run score as
/// flagged misses; run queries without gold are flagged unknown_query.
EvalReport evaluate_run(const RunMap& run, const std::map<QueryId, std::set<ItemId>>& gold,
                        std::vector<std::size_t> cutoffs, std::string method = "run");

enum class ReportFormat { table, json, csv };
ReportFormat report_format_from_string(std::string_view text);

std::string emit_report(const EvalReport& report, ReportFormat format);

/// Method rows by (dataset, direction, cutoff) columns, recall in percent.
std::string emit_table(std::span<const EvalReport> reports);

EvalReport report_from_json(std::string_view json_text);

std::string now_iso8601();

}  // namespace vic::eval
