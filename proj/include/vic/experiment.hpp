// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vic/assembly.hpp"
#include "vic/backend.hpp"
#include "vic/core.hpp"
#include "vic/eval.hpp"
#include "vic/prompt.hpp"
#include "vic/sgrid.hpp"

namespace vic::experiment {

enum class Method { none, rrf, combsum, combmnz, vic };

std::string_view to_string(Method method);
Method method_from_string(std::string_view text);

enum class SourceKind { run, scores };

struct SourceSpec {
  std::string path;
  SourceKind kind = SourceKind::run;
  /// Overrides the tag found in the file (run) or the file stem (scores).
  std::optional<std::string> tag;
};

enum class BackendKind { mock, identity, http };

struct BackendSpec {
  BackendKind kind = BackendKind::mock;
  reranker::BackendConfig config;
};

/// One evaluation point. Serialised as a single JSON document; every field
/// has a default, so a config file only names what it changes.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string dataset;
  reranker::Direction direction = reranker::Direction::t2v;
  std::size_t k = 14;
  bool keep_duplicates = true;
  std::optional<std::vector<std::string>> priority_order;
  Method method = Method::vic;
  std::vector<SourceSpec> sources;
  std::optional<BackendSpec> backend;
  sgrid::GridSpec grid;
  std::vector<std::size_t> recall_cutoffs{1, 5, 10};
  double rrf_k = 60.0;
  std::map<std::string, double> weights;  // empty: uniform
  std::size_t depth_pool = 100;
  std::string manifest;
  std::optional<std::string> grids_dir;
  std::string template_id = "v1";
  std::optional<std::string> template_dir;
  int jobs = 4;
  bool timestamps = true;
  std::optional<std::string> transcript_path;

  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json default_config_json();

/// SHA-256 over the canonical JSON of the fields that affect results
/// (credentials, parallelism and logging are left out).
std::string fingerprint(const ExperimentConfig& cfg);

std::unique_ptr<reranker::Backend> make_backend(const ExperimentConfig& cfg,
                                                const CorpusManifest& manifest);

struct ExperimentResult {
  eval::EvalReport report;
  RunMap output;  // per-query final ranking, duplicates removed
  std::size_t reranked = 0;
  std::size_t backend_failures = 0;
};

/// Runs every query found in the sources or the gold table: assemble and
/// rerank (vic), fuse (rrf/combsum/combmnz) or pass through the single
/// source (none), then score the deduplicated ranking. Per-query failures
/// are recorded in the report and never abort the run.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const CorpusManifest& manifest);

}  // namespace vic::experiment
