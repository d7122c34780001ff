// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vic {

namespace fs = std::filesystem;
using nlohmann::json;

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

namespace detail {

void check_identifier(std::string_view kind, std::string_view value) {
  if (value.empty()) {
    throw ValidationError("empty " + std::string(kind));
  }
  const bool has_space = std::any_of(value.begin(), value.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
  if (has_space) {
    throw ValidationError(std::string(kind) + " contains whitespace: '" + std::string(value) + "'");
  }
}

}  // namespace detail

RankedList::RankedList(std::string retriever_tag, QueryId query, std::vector<RankedEntry> entries)
    : tag_(std::move(retriever_tag)), query_(std::move(query)), entries_(std::move(entries)) {
  std::set<ItemId> seen;
  const bool scored = !entries_.empty() && entries_.front().score.has_value();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!seen.insert(e.item).second) {
      throw ValidationError("duplicate item '" + e.item.str() + "' in list for query '" +
                            query_.str() + "'");
    }
    if (e.score.has_value() != scored) {
      throw ValidationError("list for query '" + query_.str() +
                            "' mixes scored and unscored entries");
    }
    if (scored && i > 0 && *e.score > *entries_[i - 1].score) {
      throw ValidationError("scores increase at rank " + std::to_string(i + 1) +
                            " in list for query '" + query_.str() + "'");
    }
  }
}

bool RankedList::has_scores() const noexcept {
  return !entries_.empty() && entries_.front().score.has_value();
}

RankedList RankedList::top(std::size_t depth) const {
  const auto n = std::min(depth, entries_.size());
  return RankedList(tag_, query_, {entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)});
}

ScoreMatrix::ScoreMatrix(std::string retriever_tag, std::map<QueryId, ScoreRow> rows)
    : tag_(std::move(retriever_tag)), rows_(std::move(rows)) {
  for (const auto& [query, row] : rows_) {
    if (row.empty()) {
      throw ValidationError("empty score row for query '" + query.str() + "'");
    }
    for (const auto& [item, score] : row) {
      if (!std::isfinite(score)) {
        throw ValidationError("non-finite score for (" + query.str() + ", " + item.str() + ")");
      }
    }
  }
}

const ScoreRow& ScoreMatrix::row(const QueryId& query) const {
  auto it = rows_.find(query);
  if (it == rows_.end()) {
    throw ValidationError("unknown query '" + query.str() + "' in score matrix '" + tag_ + "'");
  }
  return it->second;
}

CandidateSequence::CandidateSequence(QueryId query, std::vector<CandidateSlot> slots)
    : query_(std::move(query)), slots_(std::move(slots)) {
  std::map<std::string, std::size_t> last_rank;
  for (const auto& slot : slots_) {
    if (slot.source_rank == 0) {
      throw ValidationError("source rank must be 1-based");
    }
    auto [it, inserted] = last_rank.try_emplace(slot.source_tag, slot.source_rank);
    if (!inserted) {
      if (slot.source_rank <= it->second) {
        throw ValidationError("source ranks of '" + slot.source_tag + "' are not increasing");
      }
      it->second = slot.source_rank;
    }
  }
}

std::string_view to_string(PermutationStatus status) {
  switch (status) {
    case PermutationStatus::clean:
      return "clean";
    case PermutationStatus::repaired:
      return "repaired";
    case PermutationStatus::identity_fallback:
      return "identity_fallback";
  }
  return "unknown";
}

PermutationStatus permutation_status_from_string(std::string_view text) {
  if (text == "clean") return PermutationStatus::clean;
  if (text == "repaired") return PermutationStatus::repaired;
  if (text == "identity_fallback") return PermutationStatus::identity_fallback;
  throw ValidationError("unknown permutation status '" + std::string(text) + "'");
}

Permutation::Permutation(std::vector<std::size_t> order, PermutationStatus status)
    : order_(std::move(order)), status_(status) {
  std::vector<bool> seen(order_.size() + 1, false);
  for (auto index : order_) {
    if (index == 0 || index > order_.size() || seen[index]) {
      throw ValidationError("not a permutation of 1.." + std::to_string(order_.size()));
    }
    seen[index] = true;
  }
}

Permutation Permutation::identity(std::size_t size, PermutationStatus status) {
  std::vector<std::size_t> order(size);
  for (std::size_t i = 0; i < size; ++i) order[i] = i + 1;
  return Permutation(std::move(order), status);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CorpusManifest parse_manifest(std::string_view json_text, const fs::path& base_dir,
                              ManifestOptions options) {
  const std::string source = "manifest";
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(source, 0, "top level must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "videos" && key != "captions" && key != "gold") {
      throw ParseError(source, 0, "unknown section '" + key + "'");
    }
  }

  CorpusManifest manifest;
  try {
    if (doc.contains("videos")) {
      for (const auto& [id, entry] : doc.at("videos").items()) {
        VideoEntry video;
        fs::path frames = entry.at("frames").get<std::string>();
        video.frames_dir = frames.is_absolute() ? frames : base_dir / frames;
        if (entry.contains("subtitle") && !entry.at("subtitle").is_null()) {
          video.subtitle = entry.at("subtitle").get<std::string>();
        }
        if (options.check_paths && !fs::is_directory(video.frames_dir)) {
          throw ValidationError("frames directory of video '" + id +
                                "' does not exist: " + video.frames_dir.string());
        }
        manifest.videos.emplace(ItemId(id), std::move(video));
      }
    }
    if (doc.contains("captions")) {
      for (const auto& [id, text] : doc.at("captions").items()) {
        manifest.captions.emplace(ItemId(id), text.get<std::string>());
      }
    }
    if (doc.contains("gold")) {
      for (const auto& [query, relevant] : doc.at("gold").items()) {
        std::set<ItemId> items;
        if (relevant.is_string()) {
          items.emplace(relevant.get<std::string>());
        } else {
          for (const auto& item : relevant) items.emplace(item.get<std::string>());
        }
        if (items.empty()) {
          throw ValidationError("empty gold set for query '" + query + "'");
        }
        manifest.gold.emplace(QueryId(query), std::move(items));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
  return manifest;
}

CorpusManifest load_manifest(const fs::path& path, ManifestOptions options) {
  try {
    return parse_manifest(read_text_file(path), path.parent_path(), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

namespace {

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_score(double score) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, score);
  return std::string(buf, ptr);
}

struct RunRow {
  std::size_t rank;
  ItemId item;
  double score;
};

}  // namespace

RunMap parse_run(std::istream& in, const std::string& source_name) {
  std::map<QueryId, std::vector<RunRow>> rows;
  std::optional<std::string> tag;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string col; fields >> col;) cols.push_back(std::move(col));
    if (cols.empty() || cols.front().starts_with('#')) continue;
    if (cols.size() != 6) {
      throw ParseError(source_name, line_no,
                       "expected 6 columns, found " + std::to_string(cols.size()));
    }
    std::size_t rank = 0;
    if (!parse_number(cols[3], rank) || rank == 0) {
      throw ParseError(source_name, line_no, "bad rank '" + cols[3] + "'");
    }
    double score = 0;
    if (!parse_number(cols[4], score) || !std::isfinite(score)) {
      throw ParseError(source_name, line_no, "bad score '" + cols[4] + "'");
    }
    if (!tag) {
      tag = cols[5];
    } else if (*tag != cols[5]) {
      throw ParseError(source_name, line_no,
                       "tag '" + cols[5] + "' differs from file tag '" + *tag + "'");
    }
    rows[QueryId(cols[0])].push_back({rank, ItemId(cols[2]), score});
    auto& bucket = rows[QueryId(cols[0])];
    for (std::size_t i = 0; i + 1 < bucket.size(); ++i) {
      if (bucket[i].item == bucket.back().item) {
        throw ParseError(source_name, line_no,
                         "duplicate item '" + cols[2] + "' for query '" + cols[0] + "'");
      }
      if (bucket[i].rank == rank) {
        throw ParseError(source_name, line_no,
                         "duplicate rank " + cols[3] + " for query '" + cols[0] + "'");
      }
    }
  }

  RunMap runs;
  for (auto& [query, bucket] : rows) {
    std::sort(bucket.begin(), bucket.end(),
              [](const RunRow& a, const RunRow& b) { return a.rank < b.rank; });
    std::vector<RankedEntry> entries;
    entries.reserve(bucket.size());
    for (auto& row : bucket) entries.push_back({std::move(row.item), row.score});
    try {
      runs.emplace(query, RankedList(*tag, query, std::move(entries)));
    } catch (const ValidationError& e) {
      throw ParseError(source_name, 0, e.what());
    }
  }
  return runs;
}

RunMap load_run_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open run file '" + path.string() + "'");
  }
  return parse_run(in, path.string());
}

void write_run(std::ostream& out, const RankedList& list) {
  const auto entries = list.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double score = entries[i].score.value_or(static_cast<double>(entries.size() - i));
    out << list.query().str() << " Q0 " << entries[i].item.str() << ' ' << (i + 1) << ' '
        << format_score(score) << ' ' << list.retriever_tag() << '\n';
  }
}

void write_run(std::ostream& out, const RunMap& runs) {
  for (const auto& [query, list] : runs) write_run(out, list);
}

void write_run_file(const fs::path& path, const RunMap& runs) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write run file '" + path.string() + "'");
  }
  write_run(out, runs);
}

namespace {

bool is_non_finite_literal(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) text.erase(0, 1);
  return text == "nan" || text == "inf" || text == "infinity";
}

}  // namespace

ScoreMatrix parse_score_matrix(std::string_view json_text, std::string tag) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(tag, 0, e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(tag, 0, "score matrix must be a JSON object");
  }
  std::map<QueryId, ScoreRow> rows;
  for (const auto& [query, row] : doc.items()) {
    if (!row.is_object()) {
      throw ParseError(tag, 0, "row '" + query + "' is not an object");
    }
    ScoreRow parsed;
    for (const auto& [item, value] : row.items()) {
      if (value.is_number()) {
        parsed.emplace(ItemId(item), value.get<double>());
      } else if (value.is_string() && is_non_finite_literal(value.get<std::string>())) {
        throw ValidationError("non-finite score for (" + query + ", " + item + ") in '" + tag + "'");
      } else {
        throw ParseError(tag, 0, "score for (" + query + ", " + item + ") is not a number");
      }
    }
    rows.emplace(QueryId(query), std::move(parsed));
  }
  return ScoreMatrix(std::move(tag), std::move(rows));
}

ScoreMatrix load_score_matrix(const fs::path& path, std::optional<std::string> tag) {
  return parse_score_matrix(read_text_file(path), tag.value_or(path.stem().string()));
}

std::vector<RankedEntry> top_by_score(std::vector<std::pair<ItemId, double>> scored,
                                      std::size_t depth) {
  const auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const auto n = std::min(depth, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    better);
  std::vector<RankedEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({std::move(scored[i].first), scored[i].second});
  return out;
}

RankedList ranked_from_scores(const ScoreMatrix& matrix, const QueryId& query, std::size_t depth) {
  const auto& row = matrix.row(query);
  std::vector<std::pair<ItemId, double>> scored(row.begin(), row.end());
  return RankedList(matrix.retriever_tag(), query, top_by_score(std::move(scored), depth));
}

ScoreMatrix matrix_from_runs(const RunMap& runs, std::string tag) {
  std::map<QueryId, ScoreRow> rows;
  for (const auto& [query, list] : runs) {
    if (list.empty()) continue;
    if (!list.has_scores()) {
      throw ValidationError("run list for query '" + query.str() + "' has no scores");
    }
    ScoreRow row;
    for (const auto& e : list.entries()) row.emplace(e.item, *e.score);
    rows.emplace(query, std::move(row));
  }
  return ScoreMatrix(std::move(tag), std::move(rows));
}

}  // namespace vic
