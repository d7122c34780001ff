// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that does not match its file format. `line()` is 1-based, 0 when
/// the format has no line structure.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value that breaks a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

namespace detail {
void check_identifier(std::string_view kind, std::string_view value);
}

/// Opaque identifier: non-empty, no whitespace (it has to survive a
/// whitespace-separated run file).
template <class Tag>
class Id {
 public:
  explicit Id(std::string value) : value_(std::move(value)) {
    detail::check_identifier(Tag::kind, value_);
  }

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

 private:
  std::string value_;
};

struct ItemTag {
  static constexpr std::string_view kind = "item id";
};
struct QueryTag {
  static constexpr std::string_view kind = "query id";
};

using ItemId = Id<ItemTag>;
using QueryId = Id<QueryTag>;

struct RankedEntry {
  ItemId item;
  std::optional<double> score;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// One retriever's ranked candidates for one query, best first.
///
/// Construction enforces: no item repeats, scores are all-or-nothing, and
/// present scores never increase with position.
class RankedList {
 public:
  RankedList(std::string retriever_tag, QueryId query, std::vector<RankedEntry> entries);

  const std::string& retriever_tag() const noexcept { return tag_; }
  const QueryId& query() const noexcept { return query_; }
  std::span<const RankedEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool has_scores() const noexcept;

  /// First `depth` entries.
  RankedList top(std::size_t depth) const;

  friend bool operator==(const RankedList&, const RankedList&) = default;

 private:
  std::string tag_;
  QueryId query_;
  std::vector<RankedEntry> entries_;
};

using ScoreRow = std::map<ItemId, double>;

/// Dense or sparse similarity scores of one retriever, keyed by query.
class ScoreMatrix {
 public:
  ScoreMatrix(std::string retriever_tag, std::map<QueryId, ScoreRow> rows);

  const std::string& retriever_tag() const noexcept { return tag_; }
  const std::map<QueryId, ScoreRow>& rows() const noexcept { return rows_; }
  bool contains(const QueryId& query) const { return rows_.contains(query); }

  /// Throws ValidationError for an unknown query.
  const ScoreRow& row(const QueryId& query) const;

 private:
  std::string tag_;
  std::map<QueryId, ScoreRow> rows_;
};

struct CandidateSlot {
  ItemId item;
  std::string source_tag;
  std::size_t source_rank = 0;  // 1-based rank inside the source list

  friend bool operator==(const CandidateSlot&, const CandidateSlot&) = default;
};

/// The interleaved sequence handed to the reranker. Duplicates are allowed;
/// per source the ranks must strictly increase along the sequence.
class CandidateSequence {
 public:
  CandidateSequence(QueryId query, std::vector<CandidateSlot> slots);

  const QueryId& query() const noexcept { return query_; }
  std::span<const CandidateSlot> slots() const noexcept { return slots_; }
  const CandidateSlot& operator[](std::size_t i) const { return slots_[i]; }
  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }

  friend bool operator==(const CandidateSequence&, const CandidateSequence&) = default;

 private:
  QueryId query_;
  std::vector<CandidateSlot> slots_;
};

enum class PermutationStatus { clean, repaired, identity_fallback };

std::string_view to_string(PermutationStatus status);
PermutationStatus permutation_status_from_string(std::string_view text);

/// A bijection on {1..K}, stored 1-based in output order: slot j of the
/// reranked list is candidate `order()[j]`.
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> order,
                       PermutationStatus status = PermutationStatus::clean);

  static Permutation identity(std::size_t size,
                              PermutationStatus status = PermutationStatus::clean);

  std::span<const std::size_t> order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }
  PermutationStatus status() const noexcept { return status_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> order_;
  PermutationStatus status_;
};

struct VideoEntry {
  std::filesystem::path frames_dir;
  std::optional<std::string> subtitle;
};

struct CorpusManifest {
  std::map<ItemId, VideoEntry> videos;
  std::map<ItemId, std::string> captions;
  std::map<QueryId, std::set<ItemId>> gold;
};

struct ManifestOptions {
  /// When false, missing frame directories are tolerated (the S-Grid
  /// builder reports them per video instead).
  bool check_paths = true;
};

/// Frame paths are resolved against the manifest's directory.
CorpusManifest load_manifest(const std::filesystem::path& path, ManifestOptions options = {});
CorpusManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                              ManifestOptions options = {});

using RunMap = std::map<QueryId, RankedList>;

/// TREC run file: `query_id Q0 item_id rank score tag` per line.
RunMap load_run_file(const std::filesystem::path& path);
RunMap parse_run(std::istream& in, const std::string& source_name);

/// Lists without scores are written with a descending surrogate `n - i`.
void write_run(std::ostream& out, const RunMap& runs);
void write_run(std::ostream& out, const RankedList& list);
void write_run_file(const std::filesystem::path& path, const RunMap& runs);

/// JSON object `{query_id: {item_id: score}}`. The tag defaults to the file
/// stem.
ScoreMatrix load_score_matrix(const std::filesystem::path& path,
                              std::optional<std::string> tag = std::nullopt);
ScoreMatrix parse_score_matrix(std::string_view json_text, std::string tag);

/// The `depth` best entries of `scored`, score descending, ties by
/// ascending item id.
std::vector<RankedEntry> top_by_score(std::vector<std::pair<ItemId, double>> scored,
                                      std::size_t depth);

RankedList ranked_from_scores(const ScoreMatrix& matrix, const QueryId& query, std::size_t depth);

/// Scored run lists as a sparse score matrix (one row per query).
ScoreMatrix matrix_from_runs(const RunMap& runs, std::string tag);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace vic

template <class Tag>
struct std::hash<vic::Id<Tag>> {
  std::size_t operator()(const vic::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
