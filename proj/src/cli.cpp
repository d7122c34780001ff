// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vic/core.hpp"
#include "vic/eval.hpp"
#include "vic/experiment.hpp"
#include "vic/fusion.hpp"
#include "vic/sgrid.hpp"

namespace vic::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flags, bad config or bad input files: exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::map<std::string, double> parse_weights(const std::string& text) {
  std::map<std::string, double> weights;
  std::stringstream in(text);
  for (std::string pair; std::getline(in, pair, ',');) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("bad weight '" + pair + "' (expected tag=value)");
    }
    try {
      std::size_t used = 0;
      const double w = std::stod(pair.substr(eq + 1), &used);
      if (used != pair.size() - eq - 1) throw std::invalid_argument(pair);
      weights[pair.substr(0, eq)] = w;
    } catch (const std::logic_error&) {
      throw UsageError("bad weight value in '" + pair + "'");
    }
  }
  return weights;
}

// Dotted-path assignment; missing or null intermediate nodes become objects.
void set_path(json& doc, const std::string& path, json value) {
  json* node = &doc;
  std::stringstream in(path);
  std::vector<std::string> keys;
  for (std::string key; std::getline(in, key, '.');) keys.push_back(key);
  if (keys.empty()) throw UsageError("empty config path");
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    auto& child = (*node)[keys[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw UsageError("config path '" + path + "' crosses a non-object");
    node = &child;
  }
  (*node)[keys.back()] = std::move(value);
}

void merge_into(json& base, const json& patch) {
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

/// Flags shared by `rerank` and `sweep`. Every flag maps onto one leaf of
/// the experiment config; the config file is applied first, flags win.
struct ExperimentFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string name, dataset, direction, method, manifest, grids, backend, endpoint, model;
  std::string priority, weights, tmpl, template_dir, transcripts;
  std::size_t k = 0;
  std::vector<std::string> runs, scores;
  std::vector<std::size_t> cutoffs;
  int grid_size = 0, canvas = 0, max_retries = 0, jobs = 0;
  double timeout_s = 0, temperature = 0, rrf_k = 0;
  std::size_t depth_pool = 0;
  bool no_duplicates = false, no_timestamps = false;
  std::map<std::string, CLI::Option*> given;

  void attach(CLI::App* app, bool allow_method) {
    const auto add = [&](const std::string& flag, auto& target, const std::string& help) {
      given[flag] = app->add_option(flag, target, help);
      return given[flag];
    };
    add("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    add("--set", sets, "override a config leaf: dotted.path=value (repeatable)");
    add("--name", name, "experiment name used in reports");
    add("--dataset", dataset, "dataset label used in reports");
    add("--direction", direction, "t2v or v2t")->check(CLI::IsMember({"t2v", "v2t"}));
    add("--K", k, "candidate sequence length")->check(CLI::PositiveNumber);
    if (allow_method) add("--method", method, "none, rrf, combsum, combmnz or vic");
    add("--runs", runs, "TREC run files, one per retriever")->check(CLI::ExistingFile);
    add("--scores", scores, "score-matrix JSON files, one per retriever")->check(CLI::ExistingFile);
    add("--manifest", manifest, "corpus manifest (JSON)");
    add("--grids", grids, "directory of built S-Grids (composed on the fly when absent)");
    add("--backend", backend, "mock, identity or http")->check(CLI::IsMember({"mock", "identity", "http"}));
    add("--endpoint", endpoint, "chat-completion URL (env VIC_ENDPOINT_URL)");
    add("--model", model, "model id sent to the endpoint");
    add("--timeout", timeout_s, "request timeout in seconds")->check(CLI::PositiveNumber);
    add("--max-retries", max_retries, "retries on transport errors and HTTP 5xx")->check(CLI::NonNegativeNumber);
    add("--temperature", temperature, "sampling temperature")->check(CLI::NonNegativeNumber);
    given["--no-duplicates"] = app->add_flag("--no-duplicates", no_duplicates, "deduplicate the candidate sequence");
    add("--priority", priority, "retriever tags in within-round visiting order, comma separated");
    add("--grid-size", grid_size, "S-Grid dimension s")->check(CLI::PositiveNumber);
    add("--canvas", canvas, "S-Grid canvas side in pixels")->check(CLI::PositiveNumber);
    add("--cutoffs", cutoffs, "recall cutoffs, comma separated")->delimiter(',');
    add("--rrf-k", rrf_k, "RRF smoothing constant")->check(CLI::PositiveNumber);
    add("--weights", weights, "fusion weights tag=w,...");
    add("--depth-pool", depth_pool, "CombMNZ hit depth")->check(CLI::PositiveNumber);
    add("--template", tmpl, "prompt template id");
    add("--template-dir", template_dir, "extra prompt templates (<id>.json)");
    add("--jobs", jobs, "in-flight queries")->check(CLI::PositiveNumber);
    add("--log-transcripts", transcripts, "write request/reply transcripts (JSON lines)");
    given["--no-timestamps"] = app->add_flag("--no-timestamps", no_timestamps, "omit wall-clock fields from outputs");
  }

  bool has(const std::string& flag) const {
    auto it = given.find(flag);
    return it != given.end() && it->second->count() > 0;
  }

  json build(std::ostream& err) const {
    json doc = experiment::default_config_json();
    if (has("--config")) {
      try {
        merge_into(doc, json::parse(read_text_file(config_path)));
      } catch (const json::parse_error& e) {
        throw UsageError(config_path + ": " + e.what());
      }
    }
    if (has("--name")) set_path(doc, "name", name);
    if (has("--dataset")) set_path(doc, "dataset", dataset);
    if (has("--direction")) set_path(doc, "direction", direction);
    if (has("--K")) set_path(doc, "K", k);
    if (has("--method")) set_path(doc, "method", method);
    if (has("--runs") || has("--scores")) {
      json sources = json::array();
      for (const auto& p : runs) sources.push_back({{"path", p}, {"kind", "run"}});
      for (const auto& p : scores) sources.push_back({{"path", p}, {"kind", "scores"}});
      set_path(doc, "sources", sources);
    }
    if (has("--manifest")) set_path(doc, "manifest", manifest);
    if (has("--grids")) set_path(doc, "grids_dir", grids);
    if (has("--backend")) set_path(doc, "backend.kind", backend);
    if (has("--endpoint")) set_path(doc, "backend.endpoint_url", endpoint);
    if (has("--model")) set_path(doc, "backend.model_id", model);
    if (has("--timeout")) set_path(doc, "backend.timeout_s", timeout_s);
    if (has("--max-retries")) set_path(doc, "backend.max_retries", max_retries);
    if (has("--temperature")) set_path(doc, "backend.temperature", temperature);
    if (no_duplicates) set_path(doc, "assembly.keep_duplicates", false);
    if (has("--priority")) {
      std::vector<std::string> tags;
      std::stringstream in(priority);
      for (std::string tag; std::getline(in, tag, ',');) {
        if (!tag.empty()) tags.push_back(tag);
      }
      set_path(doc, "assembly.priority_order", tags);
    }
    if (has("--grid-size")) set_path(doc, "grid.s", grid_size);
    if (has("--canvas")) {
      set_path(doc, "grid.canvas_h", canvas);
      set_path(doc, "grid.canvas_w", canvas);
    }
    if (has("--cutoffs")) set_path(doc, "recall_cutoffs", cutoffs);
    if (has("--rrf-k")) set_path(doc, "fusion.rrf_k", rrf_k);
    if (has("--weights")) set_path(doc, "fusion.weights", parse_weights(weights));
    if (has("--depth-pool")) set_path(doc, "fusion.depth_pool", depth_pool);
    if (has("--template")) set_path(doc, "template.id", tmpl);
    if (has("--template-dir")) set_path(doc, "template.dir", template_dir);
    if (has("--jobs")) set_path(doc, "jobs", jobs);
    if (has("--log-transcripts")) set_path(doc, "transcripts", transcripts);
    if (no_timestamps) set_path(doc, "timestamps", false);
    for (const auto& assignment : sets) {
      const auto eq = assignment.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects path=value, got '" + assignment + "'");
      set_path(doc, assignment.substr(0, eq), parse_override_value(assignment.substr(eq + 1)));
    }

    // Environment fills only what neither the config nor the flags set.
    if (doc["backend"].is_object()) {
      auto& b = doc["backend"];
      if (const char* url = std::getenv("VIC_ENDPOINT_URL"); url && b.value("endpoint_url", "").empty()) {
        b["endpoint_url"] = url;
      }
      if (const char* key = std::getenv("VIC_API_KEY"); key && b.value("api_key", "").empty()) {
        b["api_key"] = key;
      }
    }
    (void)err;
    return doc;
  }
};

experiment::ExperimentConfig to_config(const json& doc) {
  try {
    return experiment::config_from_json(doc);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

CorpusManifest manifest_or_usage(const std::string& path, ManifestOptions options = {}) {
  if (path.empty()) throw UsageError("a corpus manifest is required (--manifest)");
  try {
    return load_manifest(path, options);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

void write_report_files(const eval::EvalReport& report, const std::string& stem) {
  write_text(stem + ".report.json", eval::emit_report(report, eval::ReportFormat::json));
  write_text(stem + ".report.csv", eval::emit_report(report, eval::ReportFormat::csv));
}

// ---------------------------------------------------------------- sgrid

struct SgridArgs {
  std::string manifest, out;
  int grid_size = 3, canvas = 1024, canvas_h = 0, canvas_w = 0, quality = 90, jobs = 0;
  bool keep_going = false;
};

int cmd_sgrid(const SgridArgs& a, std::ostream& out, std::ostream& err) {
  sgrid::GridSpec spec{a.grid_size, a.canvas_h > 0 ? a.canvas_h : a.canvas,
                       a.canvas_w > 0 ? a.canvas_w : a.canvas};
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const auto manifest = manifest_or_usage(a.manifest, {.check_paths = !a.keep_going});
  err << "building " << manifest.videos.size() << " S-Grids (" << spec.s << "x" << spec.s << ", "
      << spec.canvas_w << "x" << spec.canvas_h << ") into " << a.out << '\n';
  const auto summary = sgrid::build_all(manifest, spec, a.out, a.quality, a.jobs, a.keep_going);
  for (const auto& [item, why] : summary.failures) err << "failed: " << item.str() << ": " << why << '\n';
  err << "built " << summary.built << ", failed " << summary.failures.size() << '\n';
  (void)out;
  return summary.failures.empty() ? kExitOk : kExitFailure;
}

// ----------------------------------------------------------------- fuse

struct FuseArgs {
  std::string method, weights, out;
  std::vector<std::string> runs, scores;
  double rrf_k = 60;
  std::size_t depth = 100, depth_pool = fusion::kDefaultDepthPool;
  int jobs = 0;
};

int cmd_fuse(const FuseArgs& a, std::ostream& out, std::ostream& err) {
  if (a.method == "vic") {
    throw UsageError("vic is not a score formula; run `vic rerank` for ViC fusion");
  }
  if (a.method != "rrf" && a.method != "combsum" && a.method != "combmnz") {
    throw UsageError("unknown fusion method '" + a.method + "' (expected rrf, combsum or combmnz)");
  }
  if (a.runs.empty() && a.scores.empty()) throw UsageError("fuse needs --runs or --scores");

  std::vector<RunMap> runs;
  std::vector<ScoreMatrix> matrices;
  try {
    for (const auto& p : a.runs) runs.push_back(load_run_file(p));
    for (const auto& p : a.scores) matrices.push_back(load_score_matrix(p));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  RunMap fused;
  if (a.method == "rrf") {
    for (const auto& m : matrices) {
      RunMap as_lists;
      for (const auto& [q, row] : m.rows()) as_lists.emplace(q, ranked_from_scores(m, q, a.depth_pool));
      runs.push_back(std::move(as_lists));
    }
    fused = fusion::rrf_all(runs, {a.rrf_k}, a.depth, Exec::parallel, a.jobs);
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto tag = runs[i].empty() ? fs::path(a.runs[i]).stem().string()
                                       : runs[i].begin()->second.retriever_tag();
      matrices.push_back(matrix_from_runs(runs[i], tag));
    }
    const auto weights = a.weights.empty() ? fusion::FusionWeights{}
                                           : fusion::FusionWeights{parse_weights(a.weights)};
    const auto method = a.method == "combsum" ? fusion::ScoreMethod::combsum : fusion::ScoreMethod::combmnz;
    fused = fusion::fuse_scores_all(matrices, weights, method, a.depth, a.depth_pool, Exec::parallel, a.jobs);
  }

  if (a.out.empty()) {
    write_run(out, fused);
  } else {
    write_run_file(a.out, fused);
  }
  err << "fused " << fused.size() << " queries with " << a.method << '\n';
  return kExitOk;
}

// --------------------------------------------------------------- rerank

struct RerankArgs {
  ExperimentFlags flags;
  std::string out, report;
};

void print_status_summary(const experiment::ExperimentResult& result, std::ostream& err) {
  std::map<std::string, std::size_t> counts;
  for (const auto& [q, o] : result.report.per_query) ++counts[o.status];
  err << "reranked " << result.reranked << " queries;";
  for (const auto& [status, n] : counts) err << ' ' << status << '=' << n;
  err << "; backend failures " << result.backend_failures << '\n';
}

int cmd_rerank(const RerankArgs& a, std::ostream& out, std::ostream& err) {
  auto doc = a.flags.build(err);
  set_path(doc, "method", "vic");
  if (doc["backend"].is_null()) set_path(doc, "backend.kind", "mock");
  const auto cfg = to_config(doc);
  if (cfg.sources.empty()) throw UsageError("rerank needs --runs or --scores");
  const auto manifest = manifest_or_usage(cfg.manifest);

  experiment::ExperimentResult result;
  try {
    result = experiment::run_experiment(cfg, manifest);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }

  if (a.out.empty()) {
    write_run(out, result.output);
  } else {
    write_run_file(a.out, result.output);
  }
  print_status_summary(result, err);
  if (!a.report.empty() && !manifest.gold.empty()) {
    write_report_files(result.report, a.report);
    (a.out.empty() ? err : out) << eval::emit_report(result.report, eval::ReportFormat::table);
  }

  const bool any_error = std::any_of(result.report.per_query.begin(), result.report.per_query.end(),
                                     [](const auto& kv) { return kv.second.status == eval::kStatusError; });
  if (result.reranked > 0 && result.backend_failures == result.reranked) {
    err << "backend unreachable for every query\n";
    return kExitFailure;
  }
  return any_error ? kExitFailure : kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string run, manifest, format = "table", out, name = "run";
  std::vector<std::size_t> cutoffs{1, 5, 10};
  bool no_timestamps = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto manifest = manifest_or_usage(a.manifest, {.check_paths = false});
  if (manifest.gold.empty()) throw UsageError("manifest has no gold section");
  auto cutoffs = a.cutoffs;
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  if (cutoffs.empty() || cutoffs.front() == 0) throw UsageError("cutoffs must be >= 1");
  RunMap run;
  try {
    run = load_run_file(a.run);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  auto report = eval::evaluate_run(run, manifest.gold, cutoffs, a.name);
  if (!a.no_timestamps) report.generated_at = eval::now_iso8601();
  const auto format = eval::report_format_from_string(a.format);
  out << eval::emit_report(report, format);
  if (!a.out.empty()) write_report_files(report, a.out);

  const auto flagged = report.flagged_count();
  if (flagged > 0) {
    err << flagged << " flagged queries:";
    for (const auto& [q, o] : report.per_query) {
      if (o.flagged) err << ' ' << q << " (" << o.status << ')';
    }
    err << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  ExperimentFlags flags;
  std::string axis, out;
  std::vector<std::string> values;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.values.empty()) throw UsageError("sweep needs at least one --values entry");
  const auto base = a.flags.build(err);
  const auto manifest = manifest_or_usage(base.value("manifest", ""));

  std::vector<eval::EvalReport> reports;
  std::ostringstream csv;
  bool header_written = false;
  bool any_flagged = false;
  for (const auto& value : a.values) {
    auto doc = base;
    if (a.axis == "grid-size") {
      set_path(doc, "grid.s", parse_override_value(value));
      if (!doc["grids_dir"].is_null()) {
        err << "note: --grids ignored for the grid-size axis; grids are composed per point\n";
        doc["grids_dir"] = nullptr;
      }
    } else if (a.axis == "K") {
      set_path(doc, "K", parse_override_value(value));
    } else {
      set_path(doc, "backend.model_id", value);
    }
    const std::string point = a.axis + "=" + value;
    set_path(doc, "name", point);
    if (doc["transcripts"].is_string()) {
      set_path(doc, "transcripts", doc["transcripts"].get<std::string>() + "." + a.axis + "-" + value);
    }
    const auto cfg = to_config(doc);
    experiment::ExperimentResult result;
    try {
      result = experiment::run_experiment(cfg, manifest);
    } catch (const ValidationError& e) {
      throw UsageError(point + ": " + e.what());
    }
    write_report_files(result.report, (fs::path(a.out) / (a.axis + "-" + value)).string());
    any_flagged = any_flagged || result.report.flagged_count() > 0;

    const auto& r = result.report;
    if (!header_written) {
      csv << "axis,value";
      for (auto c : r.cutoffs) csv << ",R@" << c;
      csv << ",mean_latency_ms,p95_latency_ms,flagged,fingerprint\n";
      header_written = true;
    }
    csv << a.axis << ',' << value;
    for (auto c : r.cutoffs) csv << ',' << r.aggregate.at(c);
    csv << ',' << r.mean_latency_ms << ',' << r.p95_latency_ms << ',' << r.flagged_count() << ','
        << r.config_fingerprint << '\n';
    err << "finished " << point << '\n';
    reports.push_back(result.report);
  }
  write_text(fs::path(a.out) / "sweep.csv", csv.str());
  out << eval::emit_table(reports);
  return any_flagged ? kExitFailure : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vic: multi-retriever fusion and list-wise reranking"};
  app.name("vic");
  app.require_subcommand(1);

  SgridArgs sg;
  auto* sgrid_cmd = app.add_subcommand("sgrid", "S-Grid construction");
  sgrid_cmd->require_subcommand(1);
  auto* build = sgrid_cmd->add_subcommand("build", "compose one S-Grid per manifest video");
  build->add_option("--manifest", sg.manifest, "corpus manifest")->required();
  build->add_option("--grid-size", sg.grid_size, "grid dimension s")->check(CLI::PositiveNumber);
  build->add_option("--canvas", sg.canvas, "canvas side in pixels")->check(CLI::PositiveNumber);
  build->add_option("--canvas-h", sg.canvas_h, "canvas height (overrides --canvas)")->check(CLI::PositiveNumber);
  build->add_option("--canvas-w", sg.canvas_w, "canvas width (overrides --canvas)")->check(CLI::PositiveNumber);
  build->add_option("--quality", sg.quality, "JPEG quality")->check(CLI::Range(1, 100));
  build->add_option("--out", sg.out, "output directory")->required();
  build->add_option("--jobs", sg.jobs, "parallel videos")->check(CLI::PositiveNumber);
  build->add_flag("--keep-going", sg.keep_going, "build what can be built; report failures");

  FuseArgs fu;
  auto* fuse = app.add_subcommand("fuse", "classical fusion baselines");
  fuse->add_option("--method", fu.method, "rrf, combsum or combmnz")->required();
  fuse->add_option("--runs", fu.runs, "TREC run files")->check(CLI::ExistingFile);
  fuse->add_option("--scores", fu.scores, "score-matrix JSON files")->check(CLI::ExistingFile);
  fuse->add_option("--weights", fu.weights, "tag=w,... (default uniform)");
  fuse->add_option("--rrf-k", fu.rrf_k, "RRF smoothing constant")->check(CLI::PositiveNumber);
  fuse->add_option("--depth", fu.depth, "fused list length")->check(CLI::PositiveNumber);
  fuse->add_option("--depth-pool", fu.depth_pool, "CombMNZ hit depth; RRF depth for score inputs")
      ->check(CLI::PositiveNumber);
  fuse->add_option("--out", fu.out, "output run file (stdout when absent)");
  fuse->add_option("--jobs", fu.jobs, "threads")->check(CLI::PositiveNumber);

  RerankArgs rr;
  auto* rerank = app.add_subcommand("rerank", "ViC: assemble, rerank with a model, write a run");
  rr.flags.attach(rerank, false);
  rerank->add_option("--out", rr.out, "output run file (stdout when absent)");
  rerank->add_option("--report", rr.report, "also evaluate; writes <name>.report.json/.csv");

  EvalArgs ev;
  auto* evaluate = app.add_subcommand("eval", "Recall@K of a run file");
  evaluate->add_option("--run", ev.run, "run file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--manifest", ev.manifest, "corpus manifest with gold")->required();
  evaluate->add_option("--cutoffs", ev.cutoffs, "comma separated")->delimiter(',');
  evaluate->add_option("--format", ev.format, "table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  evaluate->add_option("--out", ev.out, "also write <out>.report.json and <out>.report.csv");
  evaluate->add_option("--name", ev.name, "method label in the report");
  evaluate->add_flag("--no-timestamps", ev.no_timestamps, "omit the generation time");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "ablation sweep over one config axis");
  sw.flags.attach(sweep, true);
  sweep->add_option("--axis", sw.axis, "grid-size, K or backend-model")
      ->required()
      ->check(CLI::IsMember({"grid-size", "K", "backend-model"}));
  sweep->add_option("--values", sw.values, "comma separated axis values")->required()->delimiter(',');
  sweep->add_option("--out", sw.out, "report directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "vic: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (build->parsed()) return cmd_sgrid(sg, out, err);
    if (fuse->parsed()) return cmd_fuse(fu, out, err);
    if (rerank->parsed()) return cmd_rerank(rr, out, err);
    if (evaluate->parsed()) return cmd_eval(ev, out, err);
    if (sweep->parsed()) return cmd_sweep(sw, out, err);
  } catch (const UsageError& e) {
    err << "vic: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "vic: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace vic::cli
