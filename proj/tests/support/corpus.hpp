// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace vic::testing {

struct CorpusOptions {
  std::size_t queries = 200;
  std::size_t videos = 300;
  std::size_t frames_per_video = 6;
  std::size_t list_length = 20;
  /// Probability that retriever m returns the gold video anywhere in its list.
  std::vector<double> recall{0.75, 0.6, 0.45};
  std::uint32_t seed = 20260417;
};

struct SyntheticCorpus {
  std::filesystem::path root;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> runs;  // one per retriever, tags r1..rM
  std::map<std::string, std::string> gold;  // query -> gold video
  /// lists[m][query] = item ids in rank order.
  std::vector<std::map<std::string, std::vector<std::string>>> lists;
};

/// Writes frames, captions, gold and run files under `root` (t2v layout:
/// queries are captions, candidates are videos).
SyntheticCorpus make_corpus(const std::filesystem::path& root, const CorpusOptions& options = {});

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace vic::testing
