// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace vic::fusion {

FusionWeights::FusionWeights(std::map<std::string, double> weights) : weights_(std::move(weights)) {
  bool any_positive = false;
  for (const auto& [tag, w] : *weights_) {
    if (!std::isfinite(w) || w < 0) {
      throw ValidationError("weight of '" + tag + "' must be finite and >= 0");
    }
    any_positive = any_positive || w > 0;
  }
  if (!any_positive) {
    throw ValidationError("at least one fusion weight must be > 0");
  }
}

double FusionWeights::weight(const std::string& tag) const {
  if (!weights_) return 1.0;
  auto it = weights_->find(tag);
  if (it == weights_->end()) {
    throw ValidationError("no fusion weight for retriever '" + tag + "'");
  }
  return it->second;
}

ScoreRow minmax_normalize(const ScoreRow& row) {
  ScoreRow out;
  if (row.empty()) return out;
  auto [lo, hi] = std::minmax_element(row.begin(), row.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  const double min = lo->second;
  const double range = hi->second - min;
  for (const auto& [item, score] : row) {
    out.emplace_hint(out.end(), item, range > 0 ? (score - min) / range : 0.0);
  }
  return out;
}

namespace {

std::map<ItemId, double> weighted_sum(std::span<const ScoreMatrix> matrices,
                                      const FusionWeights& weights, const QueryId& query) {
  if (matrices.empty()) {
    throw ValidationError("score fusion needs at least one matrix");
  }
  std::map<ItemId, double> fused;
  for (const auto& matrix : matrices) {
    const double w = weights.weight(matrix.retriever_tag());
    const auto normalized = minmax_normalize(matrix.row(query));
    if (w == 0) continue;
    for (const auto& [item, value] : normalized) fused[item] += w * value;
  }
  return fused;
}

RankedList to_list(std::string tag, const QueryId& query, const std::map<ItemId, double>& fused,
                   std::size_t depth) {
  return RankedList(std::move(tag), query,
                    top_by_score({fused.begin(), fused.end()}, depth));
}

}  // namespace

RankedList comb_sum(std::span<const ScoreMatrix> matrices, const FusionWeights& weights,
                    const QueryId& query, std::size_t depth) {
  return to_list("combsum", query, weighted_sum(matrices, weights, query), depth);
}

RankedList comb_mnz(std::span<const ScoreMatrix> matrices, const FusionWeights& weights,
                    const QueryId& query, std::size_t depth, std::size_t depth_pool) {
  auto fused = weighted_sum(matrices, weights, query);
  std::map<ItemId, std::size_t> hits;
  for (const auto& matrix : matrices) {
    if (weights.weight(matrix.retriever_tag()) == 0) continue;
    const auto pool = ranked_from_scores(matrix, query, depth_pool);
    for (const auto& e : pool.entries()) ++hits[e.item];
  }
  for (auto& [item, score] : fused) {
    auto it = hits.find(item);
    score *= it == hits.end() ? 0.0 : static_cast<double>(it->second);
  }
  return to_list("combmnz", query, fused, depth);
}

RankedList rrf(std::span<const RankedList> lists, const RrfConfig& cfg, std::size_t depth) {
  if (lists.empty()) {
    throw ValidationError("rrf needs at least one list");
  }
  if (!(cfg.k > 0)) {
    throw ValidationError("rrf k must be > 0");
  }
  const auto& query = lists.front().query();
  std::map<ItemId, double> fused;
  for (const auto& list : lists) {
    if (list.query() != query) {
      throw ValidationError("rrf over lists for different queries: '" + query.str() + "' and '" +
                            list.query().str() + "'");
    }
    const auto entries = list.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      fused[entries[i].item] += 1.0 / (cfg.k + static_cast<double>(i + 1));
    }
  }
  return to_list("rrf", query, fused, depth);
}

RunMap fuse_scores_all(std::span<const ScoreMatrix> matrices, const FusionWeights& weights,
                       ScoreMethod method, std::size_t depth, std::size_t depth_pool, Exec exec,
                       int jobs) {
  if (matrices.empty()) {
    throw ValidationError("score fusion needs at least one matrix");
  }
  std::vector<QueryId> queries;
  for (const auto& [query, row] : matrices.front().rows()) queries.push_back(query);

  std::vector<std::optional<RankedList>> fused(queries.size());
  for_each_index(queries.size(), exec, jobs, [&](std::size_t i) {
    fused[i] = method == ScoreMethod::combsum
                   ? comb_sum(matrices, weights, queries[i], depth)
                   : comb_mnz(matrices, weights, queries[i], depth, depth_pool);
  });

  RunMap out;
  for (std::size_t i = 0; i < queries.size(); ++i) out.emplace(queries[i], std::move(*fused[i]));
  return out;
}

RunMap rrf_all(std::span<const RunMap> runs, const RrfConfig& cfg, std::size_t depth, Exec exec,
               int jobs) {
  std::set<QueryId> query_set;
  for (const auto& run : runs) {
    for (const auto& [query, list] : run) query_set.insert(query);
  }
  const std::vector<QueryId> queries(query_set.begin(), query_set.end());

  std::vector<std::optional<RankedList>> fused(queries.size());
  for_each_index(queries.size(), exec, jobs, [&](std::size_t i) {
    std::vector<RankedList> lists;
    for (const auto& run : runs) {
      if (auto it = run.find(queries[i]); it != run.end()) lists.push_back(it->second);
    }
    fused[i] = rrf(lists, cfg, depth);
  });

  RunMap out;
  for (std::size_t i = 0; i < queries.size(); ++i) out.emplace(queries[i], std::move(*fused[i]));
  return out;
}

}  // namespace vic::fusion
