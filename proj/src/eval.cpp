// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace vic::eval {

using nlohmann::json;

std::vector<ItemId> dedup_ranked(std::span<const ItemId> items) {
  std::set<ItemId> seen;
  std::vector<ItemId> out;
  for (const auto& item : items) {
    if (seen.insert(item).second) out.push_back(item);
  }
  return out;
}

std::vector<ItemId> dedup_ranked(std::span<const CandidateSlot> slots) {
  std::vector<ItemId> items;
  items.reserve(slots.size());
  for (const auto& slot : slots) items.push_back(slot.item);
  return dedup_ranked(items);
}

std::optional<std::size_t> first_hit(std::span<const ItemId> ranked, const std::set<ItemId>& gold) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (gold.contains(ranked[i])) return i + 1;
  }
  return std::nullopt;
}

std::map<std::size_t, int> recall_at(std::span<const ItemId> ranked, const std::set<ItemId>& gold,
                                     std::span<const std::size_t> cutoffs) {
  if (gold.empty()) {
    throw ValidationError("recall_at needs a non-empty gold set");
  }
  const auto hit = first_hit(ranked, gold);
  std::map<std::size_t, int> out;
  for (auto c : cutoffs) out[c] = hit && *hit <= c ? 1 : 0;
  return out;
}

std::size_t EvalReport::flagged_count() const {
  return static_cast<std::size_t>(std::count_if(per_query.begin(), per_query.end(),
                                                [](const auto& kv) { return kv.second.flagged; }));
}

namespace {

bool was_reranked(const std::string& status) {
  return status == "clean" || status == "repaired" || status == "identity_fallback";
}

// Nearest-rank percentile of a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0;
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

void finalize(EvalReport& report) {
  std::sort(report.cutoffs.begin(), report.cutoffs.end());
  report.aggregate.clear();
  std::size_t scored = 0;
  std::vector<double> latencies;
  for (const auto& [query, outcome] : report.per_query) {
    if (was_reranked(outcome.status)) latencies.push_back(outcome.latency_ms);
    if (outcome.status == kStatusUnknownQuery) continue;
    ++scored;
    for (auto c : report.cutoffs) {
      report.aggregate[c] += outcome.hit_rank && *outcome.hit_rank <= c ? 1.0 : 0.0;
    }
  }
  for (auto c : report.cutoffs) {
    report.aggregate[c] = scored > 0 ? report.aggregate[c] / static_cast<double>(scored) : 0.0;
  }
  std::sort(latencies.begin(), latencies.end());
  double sum = 0;
  for (double l : latencies) sum += l;
  report.mean_latency_ms = latencies.empty() ? 0 : sum / static_cast<double>(latencies.size());
  report.p50_latency_ms = percentile(latencies, 0.50);
  report.p95_latency_ms = percentile(latencies, 0.95);
}

EvalReport evaluate_run(const RunMap& run, const std::map<QueryId, std::set<ItemId>>& gold,
                        std::vector<std::size_t> cutoffs, std::string method) {
  EvalReport report;
  report.name = method;
  report.method = std::move(method);
  report.cutoffs = std::move(cutoffs);
  for (const auto& [query, relevant] : gold) {
    QueryOutcome outcome;
    auto it = run.find(query);
    if (it == run.end()) {
      outcome.status = kStatusMissing;
      outcome.flagged = true;
      outcome.note = "query absent from run";
    } else {
      std::vector<ItemId> items;
      for (const auto& e : it->second.entries()) items.push_back(e.item);
      outcome.hit_rank = first_hit(dedup_ranked(items), relevant);
    }
    report.per_query.emplace(query.str(), std::move(outcome));
  }
  for (const auto& [query, list] : run) {
    if (gold.contains(query)) continue;
    report.per_query.emplace(query.str(),
                             QueryOutcome{std::nullopt, 0, std::string(kStatusUnknownQuery), true,
                                          "query has no gold items"});
  }
  finalize(report);
  return report;
}

ReportFormat report_format_from_string(std::string_view text) {
  if (text == "table") return ReportFormat::table;
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw ValidationError("unknown report format '" + std::string(text) + "'");
}

namespace {

json to_json(const EvalReport& r) {
  json per_query = json::object();
  for (const auto& [query, o] : r.per_query) {
    per_query[query] = {
        {"hit_rank", o.hit_rank ? json(*o.hit_rank) : json(nullptr)},
        {"latency_ms", o.latency_ms},
        {"status", o.status},
        {"flagged", o.flagged},
        {"note", o.note},
    };
  }
  json aggregate = json::object();
  for (const auto& [c, v] : r.aggregate) aggregate[std::to_string(c)] = v;
  json doc = {
      {"name", r.name},
      {"method", r.method},
      {"dataset", r.dataset},
      {"direction", r.direction},
      {"cutoffs", r.cutoffs},
      {"aggregate", aggregate},
      {"mean_latency_ms", r.mean_latency_ms},
      {"p50_latency_ms", r.p50_latency_ms},
      {"p95_latency_ms", r.p95_latency_ms},
      {"config_fingerprint", r.config_fingerprint},
      {"per_query", per_query},
  };
  if (r.generated_at) doc["generated_at"] = *r.generated_at;
  return doc;
}

std::string percent(double fraction) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << fraction * 100.0;
  return out.str();
}

std::string fixed3(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  return out.str();
}

}  // namespace

EvalReport report_from_json(std::string_view json_text) {
  try {
    const auto doc = json::parse(json_text);
    EvalReport r;
    r.name = doc.at("name");
    r.method = doc.at("method");
    r.dataset = doc.at("dataset");
    r.direction = doc.at("direction");
    r.cutoffs = doc.at("cutoffs").get<std::vector<std::size_t>>();
    for (const auto& [c, v] : doc.at("aggregate").items()) r.aggregate[std::stoul(c)] = v.get<double>();
    r.mean_latency_ms = doc.at("mean_latency_ms");
    r.p50_latency_ms = doc.at("p50_latency_ms");
    r.p95_latency_ms = doc.at("p95_latency_ms");
    r.config_fingerprint = doc.at("config_fingerprint");
    if (doc.contains("generated_at")) r.generated_at = doc.at("generated_at").get<std::string>();
    for (const auto& [query, o] : doc.at("per_query").items()) {
      QueryOutcome outcome;
      if (!o.at("hit_rank").is_null()) outcome.hit_rank = o.at("hit_rank").get<std::size_t>();
      outcome.latency_ms = o.at("latency_ms");
      outcome.status = o.at("status");
      outcome.flagged = o.at("flagged");
      outcome.note = o.at("note");
      r.per_query.emplace(query, std::move(outcome));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError("report", 0, e.what());
  }
}

std::string emit_table(std::span<const EvalReport> reports) {
  struct Column {
    std::string dataset, direction;
    std::size_t cutoff;
    bool operator<(const Column& o) const {
      return std::tie(dataset, direction, cutoff) < std::tie(o.dataset, o.direction, o.cutoff);
    }
  };
  std::vector<Column> columns;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, Column>, double> cells;
  for (const auto& r : reports) {
    if (std::find(methods.begin(), methods.end(), r.name) == methods.end()) methods.push_back(r.name);
    for (auto c : r.cutoffs) {
      Column col{r.dataset, r.direction, c};
      if (std::find_if(columns.begin(), columns.end(), [&](const Column& x) {
            return !(x < col) && !(col < x);
          }) == columns.end()) {
        columns.push_back(col);
      }
      cells[{r.name, col}] = r.aggregate.count(c) ? r.aggregate.at(c) : 0.0;
    }
  }
  std::sort(columns.begin(), columns.end());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Method"};
  for (const auto& col : columns) {
    std::string name = col.dataset.empty() ? "" : col.dataset + " ";
    header.push_back(name + col.direction + " R@" + std::to_string(col.cutoff));
  }
  rows.push_back(header);
  for (const auto& m : methods) {
    std::vector<std::string> row{m};
    for (const auto& col : columns) {
      auto it = cells.find({m, col});
      row.push_back(it == cells.end() ? "--" : percent(it->second));
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << '|';
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      out << ' ' << std::setw(static_cast<int>(widths[i])) << (i == 0 ? std::left : std::right)
          << rows[r][i] << " |";
    }
    out << '\n';
    if (r == 0) {
      out << '|';
      for (auto w : widths) out << std::string(w + 2, '-') << '|';
      out << '\n';
    }
  }
  return out.str();
}

std::string emit_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json:
      return to_json(report).dump(2) + "\n";
    case ReportFormat::csv: {
      std::ostringstream out;
      out << "query_id,hit_rank,status,latency_ms\n";
      for (const auto& [query, o] : report.per_query) {
        out << query << ',' << (o.hit_rank ? std::to_string(*o.hit_rank) : "") << ',' << o.status
            << ',' << fixed3(o.latency_ms) << '\n';
      }
      return out.str();
    }
    case ReportFormat::table:
      return emit_table(std::span<const EvalReport>(&report, 1));
  }
  return {};
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace vic::eval
