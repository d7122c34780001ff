// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/assembly.hpp"

#include <algorithm>
#include <set>

namespace vic::assembly {

std::size_t per_list_depth(std::size_t k, std::size_t m) {
  if (k == 0 || m == 0) {
    throw ValidationError("per_list_depth needs k >= 1 and m >= 1");
  }
  return (k + m - 1) / m;
}

namespace {

// Index of each list in visiting order.
std::vector<std::size_t> visit_order(std::span<const RankedList> lists,
                                     const AssemblyConfig& cfg) {
  std::vector<std::size_t> order(lists.size());
  for (std::size_t i = 0; i < lists.size(); ++i) order[i] = i;
  if (!cfg.priority_order) return order;

  const auto& priority = *cfg.priority_order;
  if (priority.size() != lists.size()) {
    throw ValidationError("priority order names " + std::to_string(priority.size()) +
                          " tags for " + std::to_string(lists.size()) + " lists");
  }
  order.clear();
  for (const auto& tag : priority) {
    auto it = std::find_if(lists.begin(), lists.end(),
                           [&](const RankedList& l) { return l.retriever_tag() == tag; });
    if (it == lists.end()) {
      throw ValidationError("priority order names unknown retriever '" + tag + "'");
    }
    const auto index = static_cast<std::size_t>(it - lists.begin());
    if (std::find(order.begin(), order.end(), index) != order.end()) {
      throw ValidationError("priority order repeats retriever '" + tag + "'");
    }
    order.push_back(index);
  }
  return order;
}

}  // namespace

CandidateSequence round_robin(std::span<const RankedList> lists, const AssemblyConfig& cfg) {
  if (lists.empty()) {
    throw ValidationError("round_robin needs at least one list");
  }
  if (cfg.k == 0) {
    throw ValidationError("K must be >= 1");
  }
  const auto& query = lists.front().query();
  std::set<std::string> tags;
  for (const auto& list : lists) {
    if (list.query() != query) {
      throw ValidationError("lists for different queries: '" + query.str() + "' and '" +
                            list.query().str() + "'");
    }
    if (!tags.insert(list.retriever_tag()).second) {
      throw ValidationError("two lists share retriever tag '" + list.retriever_tag() + "'");
    }
  }

  const auto depth = per_list_depth(cfg.k, lists.size());
  const auto order = visit_order(lists, cfg);

  std::vector<CandidateSlot> slots;
  slots.reserve(cfg.k);
  std::set<ItemId> emitted;
  for (std::size_t rank = 0; rank < depth && slots.size() < cfg.k; ++rank) {
    for (auto li : order) {
      if (slots.size() == cfg.k) break;
      const auto entries = lists[li].entries();
      if (rank >= entries.size()) continue;  // exhausted
      const auto& item = entries[rank].item;
      if (!cfg.keep_duplicates && !emitted.insert(item).second) continue;
      slots.push_back({item, lists[li].retriever_tag(), rank + 1});
    }
  }
  return CandidateSequence(query, std::move(slots));
}

std::size_t multiplicity(const CandidateSequence& seq, const ItemId& item) {
  const auto slots = seq.slots();
  return static_cast<std::size_t>(std::count_if(
      slots.begin(), slots.end(), [&](const CandidateSlot& s) { return s.item == item; }));
}

}  // namespace vic::assembly
