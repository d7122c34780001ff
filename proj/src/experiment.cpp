// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/experiment.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <variant>

#include <openssl/evp.h>

#include "vic/fusion.hpp"
#include "vic/parallel.hpp"
#include "vic/reranker.hpp"

namespace vic::experiment {

using nlohmann::json;
using reranker::Direction;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::none:
      return "none";
    case Method::rrf:
      return "rrf";
    case Method::combsum:
      return "combsum";
    case Method::combmnz:
      return "combmnz";
    case Method::vic:
      return "vic";
  }
  return "unknown";
}

Method method_from_string(std::string_view text) {
  for (auto m : {Method::none, Method::rrf, Method::combsum, Method::combmnz, Method::vic}) {
    if (text == to_string(m)) return m;
  }
  throw ValidationError("unknown method '" + std::string(text) +
                        "' (expected none, rrf, combsum, combmnz or vic)");
}

namespace {

std::string_view to_string(SourceKind kind) { return kind == SourceKind::run ? "run" : "scores"; }

SourceKind source_kind_from_string(std::string_view text) {
  if (text == "run") return SourceKind::run;
  if (text == "scores") return SourceKind::scores;
  throw ValidationError("unknown source kind '" + std::string(text) + "' (expected run or scores)");
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::mock:
      return "mock";
    case BackendKind::identity:
      return "identity";
    case BackendKind::http:
      return "http";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(std::string_view text) {
  for (auto k : {BackendKind::mock, BackendKind::identity, BackendKind::http}) {
    if (text == to_string(k)) return k;
  }
  throw ValidationError("unknown backend '" + std::string(text) + "' (expected mock, identity or http)");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return obj.at(key).get<T>();
}

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void ExperimentConfig::validate() const {
  if (k == 0) throw ValidationError("K must be >= 1");
  grid.validate();
  if (recall_cutoffs.empty()) throw ValidationError("recall cutoffs must not be empty");
  if (!std::is_sorted(recall_cutoffs.begin(), recall_cutoffs.end()) ||
      std::adjacent_find(recall_cutoffs.begin(), recall_cutoffs.end()) != recall_cutoffs.end()) {
    throw ValidationError("recall cutoffs must be strictly ascending");
  }
  if (std::find(recall_cutoffs.begin(), recall_cutoffs.end(), 0) != recall_cutoffs.end()) {
    throw ValidationError("recall cutoffs must be >= 1");
  }
  if (method == Method::vic && !backend) throw ValidationError("method vic needs a backend");
  if (method == Method::none && sources.size() != 1) {
    throw ValidationError("method none takes exactly one source");
  }
  if (!(rrf_k > 0)) throw ValidationError("rrf k must be > 0");
  if (depth_pool == 0) throw ValidationError("depth_pool must be >= 1");
  if (backend) backend->config.validate();
  if (!weights.empty()) fusion::FusionWeights{weights};
}

json to_json(const ExperimentConfig& cfg) {
  json sources = json::array();
  for (const auto& s : cfg.sources) {
    sources.push_back({{"path", s.path}, {"kind", to_string(s.kind)}, {"tag", optional_json(s.tag)}});
  }
  json backend = nullptr;
  if (cfg.backend) {
    const auto& b = cfg.backend->config;
    backend = {
        {"kind", to_string(cfg.backend->kind)},
        {"endpoint_url", b.endpoint_url},
        {"model_id", b.model_id},
        {"api_key", b.api_key},
        {"timeout_s", std::chrono::duration<double>(b.timeout).count()},
        {"max_retries", b.max_retries},
        {"temperature", b.temperature},
        {"backoff_ms", b.backoff.count()},
        {"jpeg_quality", b.jpeg_quality},
    };
  }
  return {
      {"name", cfg.name},
      {"dataset", cfg.dataset},
      {"direction", reranker::to_string(cfg.direction)},
      {"K", cfg.k},
      {"assembly",
       {{"keep_duplicates", cfg.keep_duplicates},
        {"priority_order", cfg.priority_order ? json(*cfg.priority_order) : json(nullptr)}}},
      {"method", to_string(cfg.method)},
      {"sources", sources},
      {"backend", backend},
      {"grid", {{"s", cfg.grid.s}, {"canvas_h", cfg.grid.canvas_h}, {"canvas_w", cfg.grid.canvas_w}}},
      {"recall_cutoffs", cfg.recall_cutoffs},
      {"fusion", {{"rrf_k", cfg.rrf_k}, {"weights", cfg.weights}, {"depth_pool", cfg.depth_pool}}},
      {"manifest", cfg.manifest},
      {"grids_dir", optional_json(cfg.grids_dir)},
      {"template", {{"id", cfg.template_id}, {"dir", optional_json(cfg.template_dir)}}},
      {"jobs", cfg.jobs},
      {"timestamps", cfg.timestamps},
      {"transcripts", optional_json(cfg.transcript_path)},
  };
}

json default_config_json() { return to_json(ExperimentConfig{}); }

ExperimentConfig config_from_json(const json& doc) {
  check_keys(doc,
             {"name", "dataset", "direction", "K", "assembly", "method", "sources", "backend", "grid",
              "recall_cutoffs", "fusion", "manifest", "grids_dir", "template", "jobs", "timestamps",
              "transcripts"},
             "");
  ExperimentConfig cfg;
  try {
    cfg.name = get_or(doc, "name", cfg.name);
    cfg.dataset = get_or(doc, "dataset", cfg.dataset);
    cfg.direction = reranker::direction_from_string(get_or<std::string>(doc, "direction", "t2v"));
    cfg.k = get_or(doc, "K", cfg.k);
    if (doc.contains("assembly") && !doc.at("assembly").is_null()) {
      const auto& a = doc.at("assembly");
      check_keys(a, {"keep_duplicates", "priority_order"}, "assembly");
      cfg.keep_duplicates = get_or(a, "keep_duplicates", cfg.keep_duplicates);
      if (a.contains("priority_order") && !a.at("priority_order").is_null()) {
        cfg.priority_order = a.at("priority_order").get<std::vector<std::string>>();
      }
    }
    cfg.method = method_from_string(get_or<std::string>(doc, "method", "vic"));
    if (doc.contains("sources") && !doc.at("sources").is_null()) {
      for (const auto& s : doc.at("sources")) {
        check_keys(s, {"path", "kind", "tag"}, "sources[]");
        SourceSpec spec;
        spec.path = s.at("path").get<std::string>();
        spec.kind = source_kind_from_string(get_or<std::string>(s, "kind", "run"));
        if (s.contains("tag") && !s.at("tag").is_null()) spec.tag = s.at("tag").get<std::string>();
        cfg.sources.push_back(std::move(spec));
      }
    }
    if (doc.contains("backend") && !doc.at("backend").is_null()) {
      const auto& b = doc.at("backend");
      check_keys(b,
                 {"kind", "endpoint_url", "model_id", "api_key", "timeout_s", "max_retries",
                  "temperature", "backoff_ms", "jpeg_quality"},
                 "backend");
      BackendSpec spec;
      auto& c = spec.config;
      spec.kind = backend_kind_from_string(get_or<std::string>(b, "kind", "mock"));
      c.endpoint_url = get_or(b, "endpoint_url", c.endpoint_url);
      c.model_id = get_or(b, "model_id", c.model_id);
      c.api_key = get_or(b, "api_key", c.api_key);
      c.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::duration<double>(get_or(b, "timeout_s", 120.0)));
      c.max_retries = get_or(b, "max_retries", c.max_retries);
      c.temperature = get_or(b, "temperature", c.temperature);
      c.backoff = std::chrono::milliseconds(get_or<long long>(b, "backoff_ms", c.backoff.count()));
      c.jpeg_quality = get_or(b, "jpeg_quality", c.jpeg_quality);
      cfg.backend = std::move(spec);
    }
    if (doc.contains("grid") && !doc.at("grid").is_null()) {
      const auto& g = doc.at("grid");
      check_keys(g, {"s", "canvas_h", "canvas_w"}, "grid");
      cfg.grid.s = get_or(g, "s", cfg.grid.s);
      cfg.grid.canvas_h = get_or(g, "canvas_h", cfg.grid.canvas_h);
      cfg.grid.canvas_w = get_or(g, "canvas_w", cfg.grid.canvas_w);
    }
    cfg.recall_cutoffs = get_or(doc, "recall_cutoffs", cfg.recall_cutoffs);
    if (doc.contains("fusion") && !doc.at("fusion").is_null()) {
      const auto& f = doc.at("fusion");
      check_keys(f, {"rrf_k", "weights", "depth_pool"}, "fusion");
      cfg.rrf_k = get_or(f, "rrf_k", cfg.rrf_k);
      cfg.weights = get_or(f, "weights", cfg.weights);
      cfg.depth_pool = get_or(f, "depth_pool", cfg.depth_pool);
    }
    cfg.manifest = get_or(doc, "manifest", cfg.manifest);
    if (doc.contains("grids_dir") && !doc.at("grids_dir").is_null()) {
      cfg.grids_dir = doc.at("grids_dir").get<std::string>();
    }
    if (doc.contains("template") && !doc.at("template").is_null()) {
      const auto& t = doc.at("template");
      check_keys(t, {"id", "dir"}, "template");
      cfg.template_id = get_or(t, "id", cfg.template_id);
      if (t.contains("dir") && !t.at("dir").is_null()) cfg.template_dir = t.at("dir").get<std::string>();
    }
    cfg.jobs = get_or(doc, "jobs", cfg.jobs);
    cfg.timestamps = get_or(doc, "timestamps", cfg.timestamps);
    if (doc.contains("transcripts") && !doc.at("transcripts").is_null()) {
      cfg.transcript_path = doc.at("transcripts").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string fingerprint(const ExperimentConfig& cfg) {
  auto doc = to_json(cfg);
  doc.erase("jobs");
  doc.erase("timestamps");
  doc.erase("transcripts");
  if (doc.at("backend").is_object()) doc["backend"].erase("api_key");
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  const auto text = doc.dump();

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::unique_ptr<reranker::Backend> make_backend(const ExperimentConfig& cfg,
                                                const CorpusManifest& manifest) {
  if (!cfg.backend) throw ValidationError("no backend configured");
  switch (cfg.backend->kind) {
    case BackendKind::mock:
      return std::make_unique<reranker::MockOracleBackend>(reranker::relevance_from_gold(manifest.gold));
    case BackendKind::identity:
      return std::make_unique<reranker::IdentityBackend>();
    case BackendKind::http: {
      std::optional<std::filesystem::path> dir;
      if (cfg.template_dir) dir = *cfg.template_dir;
      return std::make_unique<reranker::HttpChatBackend>(reranker::PromptTemplate::load(cfg.template_id, dir));
    }
  }
  throw ValidationError("unknown backend kind");
}

namespace {

struct Source {
  std::string tag;
  std::variant<RunMap, ScoreMatrix> data;
};

std::vector<Source> load_sources(const ExperimentConfig& cfg) {
  std::vector<Source> sources;
  std::set<std::string> tags;
  for (const auto& spec : cfg.sources) {
    Source source{"", RunMap{}};
    if (spec.kind == SourceKind::run) {
      auto run = load_run_file(spec.path);
      source.tag = spec.tag.value_or(run.empty() ? std::filesystem::path(spec.path).stem().string()
                                                 : run.begin()->second.retriever_tag());
      source.data = std::move(run);
    } else {
      auto matrix = load_score_matrix(spec.path, spec.tag);
      source.tag = matrix.retriever_tag();
      source.data = std::move(matrix);
    }
    // Lists in one candidate sequence need distinct tags.
    const auto base = source.tag;
    for (int n = 2; !tags.insert(source.tag).second; ++n) source.tag = base + "_" + std::to_string(n);
    sources.push_back(std::move(source));
  }
  return sources;
}

std::optional<RankedList> list_for(const Source& source, const QueryId& query, std::size_t depth) {
  if (const auto* run = std::get_if<RunMap>(&source.data)) {
    auto it = run->find(query);
    if (it == run->end()) return std::nullopt;
    const auto top = it->second.top(depth);
    return RankedList(source.tag, query, {top.entries().begin(), top.entries().end()});
  }
  const auto& matrix = std::get<ScoreMatrix>(source.data);
  if (!matrix.contains(query)) return std::nullopt;
  const auto list = ranked_from_scores(matrix, query, depth);
  return RankedList(source.tag, query, {list.entries().begin(), list.entries().end()});
}

ScoreMatrix matrix_for(const Source& source) {
  if (const auto* m = std::get_if<ScoreMatrix>(&source.data)) {
    return ScoreMatrix(source.tag, m->rows());
  }
  return matrix_from_runs(std::get<RunMap>(source.data), source.tag);
}

void check_items_known(const std::vector<Source>& sources, const CorpusManifest& manifest,
                       Direction direction) {
  const bool videos = direction == Direction::t2v;
  if (videos ? manifest.videos.empty() : manifest.captions.empty()) return;
  std::set<std::string> unknown;
  const auto check = [&](const ItemId& item) {
    if (videos ? !manifest.videos.contains(item) : !manifest.captions.contains(item)) {
      unknown.insert(item.str());
    }
  };
  for (const auto& source : sources) {
    if (const auto* run = std::get_if<RunMap>(&source.data)) {
      for (const auto& [q, list] : *run) {
        for (const auto& e : list.entries()) check(e.item);
      }
    } else {
      for (const auto& [q, row] : std::get<ScoreMatrix>(source.data).rows()) {
        for (const auto& [item, score] : row) check(item);
      }
    }
  }
  if (!unknown.empty()) {
    std::string sample;
    std::size_t shown = 0;
    for (const auto& id : unknown) {
      if (shown++ == 5) break;
      sample += (sample.empty() ? "" : ", ") + id;
    }
    throw ValidationError(std::to_string(unknown.size()) + " source items unknown to the manifest (" +
                          sample + ")");
  }
}

RankedList ranked_output(const QueryId& query, const std::vector<ItemId>& items) {
  std::vector<RankedEntry> entries;
  entries.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    entries.push_back({items[i], static_cast<double>(items.size() - i)});
  }
  return RankedList("vic", query, std::move(entries));
}

struct QueryRun {
  eval::QueryOutcome outcome;
  std::optional<RankedList> output;
  bool reranked = false;
  bool backend_failed = false;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const CorpusManifest& manifest) {
  cfg.validate();
  const auto sources = load_sources(cfg);
  check_items_known(sources, manifest, cfg.direction);
  if (cfg.priority_order) {
    std::multiset<std::string> given(cfg.priority_order->begin(), cfg.priority_order->end());
    std::multiset<std::string> tags;
    for (const auto& s : sources) tags.insert(s.tag);
    if (given != tags) {
      throw ValidationError("priority order must name every source tag exactly once");
    }
  }

  std::set<QueryId> query_set;
  for (const auto& [q, gold] : manifest.gold) query_set.insert(q);
  for (const auto& source : sources) {
    if (const auto* run = std::get_if<RunMap>(&source.data)) {
      for (const auto& [q, list] : *run) query_set.insert(q);
    } else {
      for (const auto& [q, row] : std::get<ScoreMatrix>(source.data).rows()) query_set.insert(q);
    }
  }
  const std::vector<QueryId> queries(query_set.begin(), query_set.end());

  std::vector<ScoreMatrix> matrices;
  if (cfg.method == Method::combsum || cfg.method == Method::combmnz) {
    for (const auto& s : sources) matrices.push_back(matrix_for(s));
  }
  const fusion::FusionWeights weights =
      cfg.weights.empty() ? fusion::FusionWeights{} : fusion::FusionWeights{cfg.weights};

  std::unique_ptr<reranker::Backend> backend;
  std::unique_ptr<sgrid::GridCache> grids;
  std::unique_ptr<reranker::TranscriptLog> transcripts;
  if (cfg.method == Method::vic) {
    backend = make_backend(cfg, manifest);
    std::optional<std::filesystem::path> grid_dir;
    if (cfg.grids_dir) grid_dir = *cfg.grids_dir;
    grids = std::make_unique<sgrid::GridCache>(manifest, cfg.grid, grid_dir);
    if (cfg.transcript_path) {
      transcripts = std::make_unique<reranker::TranscriptLog>(*cfg.transcript_path, cfg.timestamps);
    }
  }
  const assembly::AssemblyConfig assembly_cfg{cfg.k, cfg.keep_duplicates, cfg.priority_order};

  std::vector<QueryRun> results(queries.size());
  for_each_index(queries.size(), Exec::parallel, cfg.jobs, [&](std::size_t qi) {
    const auto& query = queries[qi];
    auto& run = results[qi];
    auto& outcome = run.outcome;
    try {
      std::vector<RankedList> lists;
      const auto depth = cfg.method == Method::rrf ? cfg.depth_pool : cfg.k;
      for (const auto& s : sources) {
        if (auto list = list_for(s, query, depth)) lists.push_back(std::move(*list));
      }
      if (lists.empty()) {
        outcome.status = eval::kStatusMissing;
        outcome.flagged = true;
        outcome.note = "no source has this query";
        return;
      }

      switch (cfg.method) {
        case Method::none:
          run.output = lists.front();
          break;
        case Method::rrf:
          run.output = fusion::rrf(lists, {cfg.rrf_k}, cfg.k);
          break;
        case Method::combsum:
          run.output = fusion::comb_sum(matrices, weights, query, cfg.k);
          break;
        case Method::combmnz:
          run.output = fusion::comb_mnz(matrices, weights, query, cfg.k, cfg.depth_pool);
          break;
        case Method::vic: {
          const auto seq = assembly::round_robin(lists, assembly_cfg);
          const auto bundle = reranker::build_prompt(
              query, seq, manifest, [&](const ItemId& item) { return grids->get(item); }, cfg.direction,
              cfg.template_id);
          const auto result = reranker::rerank(bundle, *backend, cfg.backend->config);
          if (transcripts) transcripts->record(bundle, result);
          run.output = ranked_output(query, eval::dedup_ranked(reranker::apply(seq, result.permutation)));
          run.reranked = true;
          run.backend_failed = result.backend_failed;
          outcome.status = std::string(vic::to_string(result.permutation.status()));
          outcome.latency_ms = cfg.timestamps ? result.latency.count() : 0.0;
          if (result.backend_failed) {
            outcome.flagged = true;
            outcome.note = result.raw_reply;
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      run.output.reset();
      outcome.status = eval::kStatusError;
      outcome.flagged = true;
      outcome.note = e.what();
    }
  });

  ExperimentResult out;
  auto& report = out.report;
  report.name = cfg.name;
  report.method = to_string(cfg.method);
  report.dataset = cfg.dataset;
  report.direction = reranker::to_string(cfg.direction);
  report.cutoffs = cfg.recall_cutoffs;
  report.config_fingerprint = fingerprint(cfg);
  if (cfg.timestamps) report.generated_at = eval::now_iso8601();

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    auto& run = results[qi];
    const auto& query = queries[qi];
    out.reranked += run.reranked ? 1 : 0;
    out.backend_failures += run.backend_failed ? 1 : 0;
    auto gold = manifest.gold.find(query);
    if (run.output) {
      if (gold != manifest.gold.end()) {
        std::vector<ItemId> items;
        for (const auto& e : run.output->entries()) items.push_back(e.item);
        run.outcome.hit_rank = eval::first_hit(eval::dedup_ranked(items), gold->second);
      }
      out.output.emplace(query, std::move(*run.output));
    }
    if (gold == manifest.gold.end()) {
      if (manifest.gold.empty()) continue;
      run.outcome.flagged = true;
      if (run.outcome.note.empty()) run.outcome.note = "query has no gold items";
      run.outcome.status = eval::kStatusUnknownQuery;
    }
    report.per_query.emplace(query.str(), std::move(run.outcome));
  }
  eval::finalize(report);
  return out;
}

}  // namespace vic::experiment
