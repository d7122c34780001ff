// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "vic/core.hpp"
#include "vic/parallel.hpp"

namespace vic::fusion {

/// Per-retriever non-negative weights. A default-constructed value weighs
/// every source 1.0.
class FusionWeights {
 public:
  FusionWeights() = default;
  explicit FusionWeights(std::map<std::string, double> weights);

  /// Throws ValidationError when explicit weights do not cover `tag`.
  double weight(const std::string& tag) const;
  bool uniform() const noexcept { return !weights_.has_value(); }
  const std::map<std::string, double>* explicit_weights() const noexcept {
    return weights_ ? &*weights_ : nullptr;
  }

 private:
  std::optional<std::map<std::string, double>> weights_;
};

struct RrfConfig {
  double k = 60.0;
};

inline constexpr std::size_t kDefaultDepthPool = 100;

/// (s - min) / (max - min); a constant row maps to all zeros.
ScoreRow minmax_normalize(const ScoreRow& row);

/// Weighted sum of min-max normalized scores. Sources with weight 0 are
/// ignored entirely; items missing from a source get 0 from it.
RankedList comb_sum(std::span<const ScoreMatrix> matrices, const FusionWeights& weights,
                    const QueryId& query, std::size_t depth);

/// comb_sum times the number of (non-zero weight) sources that retrieve the
/// item within their top `depth_pool`.
RankedList comb_mnz(std::span<const ScoreMatrix> matrices, const FusionWeights& weights,
                    const QueryId& query, std::size_t depth,
                    std::size_t depth_pool = kDefaultDepthPool);

/// Reciprocal rank fusion: sum over lists of 1 / (k + rank).
RankedList rrf(std::span<const RankedList> lists, const RrfConfig& cfg, std::size_t depth);

enum class ScoreMethod { combsum, combmnz };

/// Fuses every query present in the first matrix.
RunMap fuse_scores_all(std::span<const ScoreMatrix> matrices, const FusionWeights& weights,
                       ScoreMethod method, std::size_t depth,
                       std::size_t depth_pool = kDefaultDepthPool, Exec exec = Exec::parallel,
                       int jobs = 0);

/// Fuses every query present in any of the runs.
RunMap rrf_all(std::span<const RunMap> runs, const RrfConfig& cfg, std::size_t depth,
               Exec exec = Exec::parallel, int jobs = 0);

}  // namespace vic::fusion
