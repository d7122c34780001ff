// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vic/core.hpp"
#include "vic/image.hpp"

namespace vic::sgrid {

struct GridSpec {
  int s = 3;
  int canvas_h = 1024;
  int canvas_w = 1024;

  void validate() const;
  int cell_h() const { return canvas_h / s; }
  int cell_w() const { return canvas_w / s; }
};

/// Temporally ordered frames of one video. Frames are decoded on demand
/// through `Decoder`, so only the sampled ones are ever read.
class FrameSource {
 public:
  using Decoder = std::function<Image(std::size_t index)>;

  FrameSource(ItemId item, std::size_t frame_count, Decoder decoder);
  static FrameSource from_images(ItemId item, std::vector<Image> frames);

  const ItemId& item() const noexcept { return item_; }
  std::size_t frame_count() const noexcept { return frame_count_; }
  Image frame(std::size_t index) const;

 private:
  ItemId item_;
  std::size_t frame_count_;
  Decoder decoder_;
};

struct SGrid {
  ItemId item;
  Image canvas;
  std::optional<std::string> subtitle;
  std::vector<std::size_t> indices;
  std::size_t frame_count = 0;
  int s = 0;
  /// Encoded bytes as read from disk, reused when the grid is sent to a
  /// model. Empty for freshly composed grids.
  std::vector<std::uint8_t> jpeg;
};

/// s*s zero-based frame indices, floor((i-1) * F / (s*s - 1)) clamped to
/// F-1; the middle frame F/2 when s == 1.
std::vector<std::size_t> select_indices(std::size_t frame_count, int s);

SGrid compose_grid(const FrameSource& src, const GridSpec& spec,
                   std::optional<std::string> subtitle = std::nullopt,
                   Exec exec = Exec::parallel);

/// "f_2" sorts before "f_10": digit runs compare by value.
bool natural_less(const std::string& a, const std::string& b);

/// Image files (.jpg/.jpeg/.png) of `dir`, in natural filename order.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

FrameSource load_frames(const std::filesystem::path& dir, ItemId item);

/// `<item>.sgrid.jpg` plus the `<item>.sgrid.json` sidecar.
void write_sgrid(const SGrid& grid, const std::filesystem::path& out_dir, int quality = 90);
SGrid read_sgrid(const std::filesystem::path& dir, const ItemId& item);

struct BuildSummary {
  std::size_t built = 0;
  std::vector<std::pair<ItemId, std::string>> failures;
};

/// Builds and writes a grid for every manifest video. Without `keep_going`
/// the first failure is rethrown.
BuildSummary build_all(const CorpusManifest& manifest, const GridSpec& spec,
                       const std::filesystem::path& out_dir, int quality = 90, int jobs = 0,
                       bool keep_going = false);

/// Thread-safe, memoizing source of grids: read from a directory of built
/// grids when one is given, composed from the manifest's frames otherwise.
class GridCache {
 public:
  GridCache(const CorpusManifest& manifest, GridSpec spec,
            std::optional<std::filesystem::path> grid_dir = std::nullopt);

  std::shared_ptr<const SGrid> get(const ItemId& item);

 private:
  const CorpusManifest& manifest_;
  GridSpec spec_;
  std::optional<std::filesystem::path> dir_;
  std::mutex mutex_;
  std::map<ItemId, std::shared_ptr<const SGrid>> cache_;
};

}  // namespace vic::sgrid
