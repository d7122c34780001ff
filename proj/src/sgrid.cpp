// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/sgrid.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

namespace vic::sgrid {

namespace fs = std::filesystem;
using nlohmann::json;

void GridSpec::validate() const {
  if (s < 1) throw ValidationError("grid size must be >= 1");
  if (canvas_h < s || canvas_w < s) {
    throw ValidationError("canvas " + std::to_string(canvas_w) + "x" + std::to_string(canvas_h) +
                          " too small for a " + std::to_string(s) + "x" + std::to_string(s) +
                          " grid");
  }
}

FrameSource::FrameSource(ItemId item, std::size_t frame_count, Decoder decoder)
    : item_(std::move(item)), frame_count_(frame_count), decoder_(std::move(decoder)) {
  if (frame_count_ == 0) {
    throw ValidationError("video '" + item_.str() + "' has no frames");
  }
}

FrameSource FrameSource::from_images(ItemId item, std::vector<Image> frames) {
  auto shared = std::make_shared<const std::vector<Image>>(std::move(frames));
  const auto count = shared->size();
  return FrameSource(std::move(item), count, [shared](std::size_t i) { return shared->at(i); });
}

Image FrameSource::frame(std::size_t index) const {
  if (index >= frame_count_) {
    throw ValidationError("frame index " + std::to_string(index) + " out of range");
  }
  return decoder_(index);
}

std::vector<std::size_t> select_indices(std::size_t frame_count, int s) {
  if (frame_count == 0 || s < 1) {
    throw ValidationError("select_indices needs F >= 1 and s >= 1");
  }
  if (s == 1) return {frame_count / 2};

  const auto cells = static_cast<std::size_t>(s) * static_cast<std::size_t>(s);
  std::vector<std::size_t> indices(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    indices[i] = std::min(i * frame_count / (cells - 1), frame_count - 1);
  }
  return indices;
}

SGrid compose_grid(const FrameSource& src, const GridSpec& spec,
                   std::optional<std::string> subtitle, Exec exec) {
  spec.validate();
  const int cell_h = spec.cell_h();
  const int cell_w = spec.cell_w();

  SGrid grid{src.item(), Image(cell_w * spec.s, cell_h * spec.s), std::move(subtitle),
             select_indices(src.frame_count(), spec.s), src.frame_count(), spec.s, {}};

  std::map<std::size_t, Image> decoded;
  for (auto index : grid.indices) {
    if (!decoded.contains(index)) decoded.emplace(index, src.frame(index));
  }
  for (std::size_t i = 0; i < grid.indices.size(); ++i) {
    const int row = static_cast<int>(i) / spec.s;
    const int col = static_cast<int>(i) % spec.s;
    resize_bilinear_into(decoded.at(grid.indices[i]), grid.canvas,
                         {col * cell_w, row * cell_h, cell_w, cell_h}, exec);
  }
  return grid;
}

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  const auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      // Compare by value without overflow: strip leading zeros, then by
      // length, then lexicographically.
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      if (ie - is != je - js) return ie - is < je - js;
      if (auto c = a.compare(is, ie - is, b, js, je - js); c != 0) return c < 0;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error("frames directory does not exist: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".jpg" || ext == ".jpeg" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return natural_less(a.filename().string(), b.filename().string());
  });
  return files;
}

FrameSource load_frames(const fs::path& dir, ItemId item) {
  auto files = list_frame_files(dir);
  if (files.empty()) {
    throw Error("no frames in " + dir.string());
  }
  const auto count = files.size();
  return FrameSource(std::move(item), count,
                     [files = std::move(files)](std::size_t i) { return decode_image_file(files.at(i)); });
}

namespace {

fs::path image_path(const fs::path& dir, const ItemId& item) {
  return dir / (item.str() + ".sgrid.jpg");
}

fs::path sidecar_path(const fs::path& dir, const ItemId& item) {
  return dir / (item.str() + ".sgrid.json");
}

}  // namespace

void write_sgrid(const SGrid& grid, const fs::path& out_dir, int quality) {
  fs::create_directories(out_dir);
  write_bytes(image_path(out_dir, grid.item), encode_jpeg(grid.canvas, quality));

  json sidecar = {
      {"item", grid.item.str()},
      {"s", grid.s},
      {"frame_count", grid.frame_count},
      {"indices", grid.indices},
      {"canvas_w", grid.canvas.width},
      {"canvas_h", grid.canvas.height},
      {"quality", quality},
      {"subtitle", grid.subtitle ? json(*grid.subtitle) : json(nullptr)},
  };
  std::ofstream out(sidecar_path(out_dir, grid.item));
  out << sidecar.dump(2) << '\n';
  if (!out) {
    throw Error("cannot write sidecar for '" + grid.item.str() + "'");
  }
}

SGrid read_sgrid(const fs::path& dir, const ItemId& item) {
  const auto text = read_text_file(sidecar_path(dir, item));
  json sidecar;
  try {
    sidecar = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(sidecar_path(dir, item).string(), 0, e.what());
  }
  const auto bytes = read_text_file(image_path(dir, item));
  SGrid grid{item, Image(), std::nullopt, {}, 0, 0, {bytes.begin(), bytes.end()}};
  grid.canvas = decode_image(grid.jpeg);
  try {
    grid.s = sidecar.at("s").get<int>();
    grid.frame_count = sidecar.at("frame_count").get<std::size_t>();
    grid.indices = sidecar.at("indices").get<std::vector<std::size_t>>();
    if (!sidecar.at("subtitle").is_null()) grid.subtitle = sidecar.at("subtitle").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(sidecar_path(dir, item).string(), 0, e.what());
  }
  return grid;
}

BuildSummary build_all(const CorpusManifest& manifest, const GridSpec& spec, const fs::path& out_dir,
                       int quality, int jobs, bool keep_going) {
  spec.validate();
  fs::create_directories(out_dir);

  std::vector<const std::pair<const ItemId, VideoEntry>*> videos;
  for (const auto& entry : manifest.videos) videos.push_back(&entry);
  std::vector<std::optional<std::string>> errors(videos.size());

  // Each video is composed serially; parallelism is across videos.
  for_each_index(videos.size(), Exec::parallel, jobs, [&](std::size_t i) {
    const auto& [item, video] = *videos[i];
    try {
      auto grid = compose_grid(load_frames(video.frames_dir, item), spec, video.subtitle, Exec::serial);
      write_sgrid(grid, out_dir, quality);
    } catch (const std::exception& e) {
      if (!keep_going) throw;
      errors[i] = e.what();
    }
  });

  BuildSummary summary;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (errors[i]) {
      summary.failures.emplace_back(videos[i]->first, *errors[i]);
    } else {
      ++summary.built;
    }
  }
  return summary;
}

GridCache::GridCache(const CorpusManifest& manifest, GridSpec spec, std::optional<fs::path> grid_dir)
    : manifest_(manifest), spec_(spec), dir_(std::move(grid_dir)) {
  spec_.validate();
}

std::shared_ptr<const SGrid> GridCache::get(const ItemId& item) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(item); it != cache_.end()) return it->second;
  }
  std::shared_ptr<const SGrid> grid;
  if (dir_) {
    auto loaded = read_sgrid(*dir_, item);
    if (!loaded.subtitle) {
      if (auto v = manifest_.videos.find(item); v != manifest_.videos.end()) {
        loaded.subtitle = v->second.subtitle;
      }
    }
    grid = std::make_shared<const SGrid>(std::move(loaded));
  } else {
    auto v = manifest_.videos.find(item);
    if (v == manifest_.videos.end()) {
      throw ValidationError("video '" + item.str() + "' is not in the manifest");
    }
    grid = std::make_shared<const SGrid>(
        compose_grid(load_frames(v->second.frames_dir, item), spec_, v->second.subtitle));
  }
  std::lock_guard lock(mutex_);
  return cache_.emplace(item, std::move(grid)).first->second;
}

}  // namespace vic::sgrid
