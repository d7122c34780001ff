// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vic/core.hpp"
#include "vic/parallel.hpp"

namespace vic {

/// 8-bit RGB raster, row-major, channels interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h);

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// JPEG/PNG/anything the codec layer understands. Throws vic::Error when the
/// file cannot be decoded.
Image decode_image_file(const std::filesystem::path& path);
Image decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality = 90);
std::vector<std::uint8_t> encode_png(const Image& image);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Destination rectangle inside a larger canvas.
struct Region {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// Bilinear resize of `src` into `dst` restricted to `region` (pixel-center
/// aligned, edge clamped). Parallel over destination rows; every pixel is
/// computed by the same arithmetic in both modes, so the output is
/// bit-identical across `exec`.
void resize_bilinear_into(const Image& src, Image& dst, Region region, Exec exec = Exec::parallel);

Image resize_bilinear(const Image& src, int width, int height, Exec exec = Exec::parallel);

}  // namespace vic
