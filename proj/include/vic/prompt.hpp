// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vic/core.hpp"
#include "vic/sgrid.hpp"

namespace vic::reranker {

enum class Direction { t2v, v2t };

std::string_view to_string(Direction direction);
Direction direction_from_string(std::string_view text);

using GridPtr = std::shared_ptr<const sgrid::SGrid>;
using GridLookup = std::function<GridPtr(const ItemId&)>;

struct CandidatePart {
  std::size_t label = 0;  // 1-based position in the candidate sequence
  ItemId item;
  std::variant<GridPtr, std::string> content;  // grid for t2v, caption for v2t
};

/// Everything one list-wise request needs. For t2v the query is text and
/// every candidate a grid; for v2t the query is a grid and every candidate
/// a caption.
struct PromptBundle {
  Direction direction = Direction::t2v;
  QueryId query;
  std::optional<std::string> query_text;
  GridPtr query_image;
  std::vector<CandidatePart> candidates;
  std::string template_id = "v1";

  std::size_t size() const noexcept { return candidates.size(); }
  void validate() const;
};

/// Each duplicate slot of `seq` becomes its own labelled part.
PromptBundle build_prompt(const QueryId& query, const CandidateSequence& seq,
                          const CorpusManifest& manifest, const GridLookup& grids,
                          Direction direction, std::string template_id = "v1");

/// Instruction wording for both directions. Placeholders: {query}, {K},
/// {label}, {subtitle}, {caption}.
struct PromptTemplate {
  std::string id;
  struct {
    std::string preamble, candidate, subtitle, closing;
  } t2v;
  struct {
    std::string preamble, query_subtitle, candidates_header, candidate, closing;
  } v2t;

  static PromptTemplate parse(std::string_view json_text);
  /// Built-in templates first, then `<dir>/<id>.json`.
  static PromptTemplate load(const std::string& id,
                             const std::optional<std::filesystem::path>& dir = std::nullopt);
};

/// OpenAI-style `messages` array: one user message whose content
/// interleaves text parts and inline base64 JPEG image parts.
nlohmann::json render_messages(const PromptBundle& bundle, const PromptTemplate& tpl,
                               int jpeg_quality = 90);

std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace vic::reranker
