// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/prompt.hpp"

#include <algorithm>

#include <openssl/evp.h>

#include "prompt_assets.hpp"

namespace vic::reranker {

using nlohmann::json;

std::string_view to_string(Direction direction) {
  return direction == Direction::t2v ? "t2v" : "v2t";
}

Direction direction_from_string(std::string_view text) {
  if (text == "t2v") return Direction::t2v;
  if (text == "v2t") return Direction::v2t;
  throw ValidationError("unknown direction '" + std::string(text) + "' (expected t2v or v2t)");
}

void PromptBundle::validate() const {
  if (direction == Direction::t2v) {
    if (!query_text) throw ValidationError("t2v prompt needs query text");
  } else if (!query_image) {
    throw ValidationError("v2t prompt needs a query grid");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& part = candidates[i];
    if (part.label != i + 1) throw ValidationError("candidate labels must be 1..K in order");
    const bool is_grid = std::holds_alternative<GridPtr>(part.content);
    if (is_grid != (direction == Direction::t2v) || (is_grid && !std::get<GridPtr>(part.content))) {
      throw ValidationError("candidate " + std::to_string(part.label) +
                            " does not match the prompt direction");
    }
  }
}

PromptBundle build_prompt(const QueryId& query, const CandidateSequence& seq,
                          const CorpusManifest& manifest, const GridLookup& grids,
                          Direction direction, std::string template_id) {
  PromptBundle bundle{direction, query, std::nullopt, nullptr, {}, std::move(template_id)};
  const auto resolve_grid = [&](const ItemId& item) {
    GridPtr grid;
    try {
      grid = grids(item);
    } catch (const std::exception& e) {
      throw ValidationError("no grid for '" + item.str() + "': " + e.what());
    }
    if (!grid) throw ValidationError("no grid for '" + item.str() + "'");
    return grid;
  };

  if (direction == Direction::t2v) {
    auto it = manifest.captions.find(ItemId(query.str()));
    if (it == manifest.captions.end()) {
      throw ValidationError("no caption text for query '" + query.str() + "'");
    }
    bundle.query_text = it->second;
  } else {
    bundle.query_image = resolve_grid(ItemId(query.str()));
  }

  bundle.candidates.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& item = seq[i].item;
    if (direction == Direction::t2v) {
      bundle.candidates.push_back({i + 1, item, resolve_grid(item)});
    } else {
      auto it = manifest.captions.find(item);
      if (it == manifest.captions.end()) {
        throw ValidationError("no caption text for candidate '" + item.str() + "'");
      }
      bundle.candidates.push_back({i + 1, item, it->second});
    }
  }
  return bundle;
}

PromptTemplate PromptTemplate::parse(std::string_view json_text) {
  try {
    const auto doc = json::parse(json_text);
    PromptTemplate tpl;
    tpl.id = doc.at("id").get<std::string>();
    const auto& t = doc.at("t2v");
    tpl.t2v = {t.at("preamble"), t.at("candidate"), t.at("subtitle"), t.at("closing")};
    const auto& v = doc.at("v2t");
    tpl.v2t = {v.at("preamble"), v.at("query_subtitle"), v.at("candidates_header"),
               v.at("candidate"), v.at("closing")};
    return tpl;
  } catch (const json::exception& e) {
    throw ParseError("prompt template", 0, e.what());
  }
}

PromptTemplate PromptTemplate::load(const std::string& id,
                                    const std::optional<std::filesystem::path>& dir) {
  if (id == "v1") return parse(assets::kTemplateV1);
  if (dir) {
    const auto path = *dir / (id + ".json");
    if (std::filesystem::exists(path)) {
      auto tpl = parse(read_text_file(path));
      if (tpl.id != id) throw ValidationError(path.string() + " declares id '" + tpl.id + "'");
      return tpl;
    }
  }
  throw ValidationError("unknown prompt template '" + id + "'");
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

namespace {

// Single pass, so substituted values are never re-expanded.
std::string fill(const std::string& text,
                 const std::vector<std::pair<std::string_view, std::string>>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find('{', pos);
    if (open == std::string::npos) break;
    const auto close = text.find('}', open);
    if (close == std::string::npos) break;
    const std::string_view key(text.data() + open + 1, close - open - 1);
    auto var = std::find_if(vars.begin(), vars.end(), [&](const auto& v) { return v.first == key; });
    out.append(text, pos, open - pos);
    if (var != vars.end()) {
      out += var->second;
      pos = close + 1;
    } else {
      out += '{';
      pos = open + 1;
    }
  }
  out.append(text, pos);
  return out;
}

json text_part(std::string text) { return {{"type", "text"}, {"text", std::move(text)}}; }

json image_part(const sgrid::SGrid& grid, int quality) {
  const auto bytes = grid.jpeg.empty() ? encode_jpeg(grid.canvas, quality) : grid.jpeg;
  return {{"type", "image_url"},
          {"image_url", {{"url", "data:image/jpeg;base64," + base64_encode(bytes)}}}};
}

}  // namespace

json render_messages(const PromptBundle& bundle, const PromptTemplate& tpl, int jpeg_quality) {
  bundle.validate();
  const auto k = std::to_string(bundle.size());
  json content = json::array();

  if (bundle.direction == Direction::t2v) {
    content.push_back(text_part(fill(tpl.t2v.preamble, {{"query", *bundle.query_text}, {"K", k}})));
    for (const auto& part : bundle.candidates) {
      const auto& grid = *std::get<GridPtr>(part.content);
      std::string label = fill(tpl.t2v.candidate, {{"label", std::to_string(part.label)}});
      if (grid.subtitle) label += "\n" + fill(tpl.t2v.subtitle, {{"subtitle", *grid.subtitle}});
      content.push_back(text_part(std::move(label)));
      content.push_back(image_part(grid, jpeg_quality));
    }
    content.push_back(text_part(fill(tpl.t2v.closing, {{"K", k}})));
  } else {
    content.push_back(text_part(fill(tpl.v2t.preamble, {{"K", k}})));
    content.push_back(image_part(*bundle.query_image, jpeg_quality));
    std::string listing;
    if (bundle.query_image->subtitle) {
      listing += fill(tpl.v2t.query_subtitle, {{"subtitle", *bundle.query_image->subtitle}}) + "\n\n";
    }
    listing += fill(tpl.v2t.candidates_header, {{"K", k}});
    for (const auto& part : bundle.candidates) {
      listing += "\n" + fill(tpl.v2t.candidate, {{"label", std::to_string(part.label)},
                                                 {"caption", std::get<std::string>(part.content)}});
    }
    content.push_back(text_part(std::move(listing)));
    content.push_back(text_part(fill(tpl.v2t.closing, {{"K", k}})));
  }
  return json::array({{{"role", "user"}, {"content", std::move(content)}}});
}

}  // namespace vic::reranker
