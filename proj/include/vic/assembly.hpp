// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vic/core.hpp"

namespace vic::assembly {

struct AssemblyConfig {
  std::size_t k = 14;
  bool keep_duplicates = true;
  /// Visiting order of retriever tags inside each round. Must name every
  /// input list exactly once.
  std::optional<std::vector<std::string>> priority_order;
};

/// ceil(k / m): how deep each of the m lists is read.
std::size_t per_list_depth(std::size_t k, std::size_t m);

/// Duplicate-preserving round-robin interleave of the lists, each cut to
/// per_list_depth(k, m) first, then cut to k.
///
/// With `keep_duplicates == false` a repeated item is skipped and the next
/// one in round-robin order takes its place, so the result is only shorter
/// than k when the truncated lists run out of distinct items.
CandidateSequence round_robin(std::span<const RankedList> lists, const AssemblyConfig& cfg);

std::size_t multiplicity(const CandidateSequence& seq, const ItemId& item);

}  // namespace vic::assembly
