// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "vic/backend.hpp"
#include "vic/core.hpp"
#include "vic/prompt.hpp"

namespace vic::reranker {

/// Turns an untrusted model reply into a permutation of 1..k. Never fails:
///
///  1. integers of the first bracketed integer list, e.g. "[3, 1, 2]";
///  2. otherwise (or when that list has no usable value) every integer in
///     the reply, in order.
///
/// Out-of-range values are dropped, repeats keep their first occurrence and
/// missing labels are appended in ascending order. The status is `clean`
/// only when step 1 produced an exact permutation, `identity_fallback` when
/// nothing usable was found, `repaired` otherwise.
Permutation parse_permutation(std::string_view reply, std::size_t k);

/// "[a, b, c]".
std::string render_permutation(const Permutation& perm);

/// Slot j of the result is `seq[perm.order()[j] - 1]`.
std::vector<CandidateSlot> apply(const CandidateSequence& seq, const Permutation& perm);

struct RerankResult {
  Permutation permutation;
  std::string raw_reply;
  std::chrono::duration<double, std::milli> latency{0};
  std::string backend_tag;
  /// True when no reply was obtained at all (retries exhausted or a
  /// non-retryable transport error).
  bool backend_failed = false;
};

/// One list-wise call with retries. Failures degrade to the identity
/// permutation with the error text in `raw_reply`; nothing is thrown for
/// backend trouble.
RerankResult rerank(const PromptBundle& bundle, Backend& backend, const BackendConfig& cfg);

/// JSON-lines audit log of requests and replies; safe to share across
/// threads.
class TranscriptLog {
 public:
  explicit TranscriptLog(const std::filesystem::path& path, bool timestamps = true);
  void record(const PromptBundle& bundle, const RerankResult& result);

 private:
  std::mutex mutex_;
  std::ofstream out_;
  bool timestamps_;
};

}  // namespace vic::reranker
