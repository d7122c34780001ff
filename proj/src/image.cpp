// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "vic/core.hpp"

namespace vic {

Image::Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {
  if (w <= 0 || h <= 0) {
    throw ValidationError("image dimensions must be positive");
  }
}

namespace {

// imdecode with IMREAD_COLOR always yields 8-bit BGR.
Image from_bgr(const cv::Mat& bgr) {
  Image img(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<std::uint8_t>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      auto* px = img.at(x, y);
      px[0] = row[3 * x + 2];
      px[1] = row[3 * x + 1];
      px[2] = row[3 * x + 0];
    }
  }
  return img;
}

cv::Mat to_bgr(const Image& img) {
  cv::Mat mat(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width; ++x) {
      const auto* px = img.at(x, y);
      row[3 * x + 0] = px[2];
      row[3 * x + 1] = px[1];
      row[3 * x + 2] = px[0];
    }
  }
  return mat;
}

std::vector<std::uint8_t> encode(const Image& img, const std::string& ext, std::vector<int> params) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(ext, to_bgr(img), out, params)) {
    throw Error("failed to encode " + ext + " image");
  }
  return out;
}

}  // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat mat;
  try {
    mat = cv::imdecode(raw, cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(std::string("image decode failed: ") + e.what());
  }
  if (mat.empty() || mat.depth() != CV_8U) {
    throw Error("image decode failed");
  }
  return from_bgr(mat);
}

Image decode_image_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return decode_image({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  } catch (const Error&) {
    throw Error("cannot decode image '" + path.string() + "'");
  }
}

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality) {
  return encode(image, ".jpg", {cv::IMWRITE_JPEG_QUALITY, std::clamp(quality, 1, 100)});
}

std::vector<std::uint8_t> encode_png(const Image& image) { return encode(image, ".png", {}); }

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error("cannot write '" + path.string() + "'");
  }
}

namespace {

// Source sample position for destination coordinate `d` when mapping
// `dst_len` pixels onto `src_len`, pixel centers aligned.
struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> taps(int src_len, int dst_len) {
  std::vector<Tap> out(static_cast<std::size_t>(dst_len));
  const double scale = static_cast<double>(src_len) / dst_len;
  for (int d = 0; d < dst_len; ++d) {
    double pos = (d + 0.5) * scale - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(src_len - 1));
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, src_len - 1);
    out[static_cast<std::size_t>(d)] = {lo, hi, pos - lo};
  }
  return out;
}

void resize_row(const Image& src, Image& dst, const Region& r, const std::vector<Tap>& xs,
                const Tap& ty, int row) {
  const auto* top = src.pixels.data() + static_cast<std::size_t>(ty.lo) * src.width * 3;
  const auto* bottom = src.pixels.data() + static_cast<std::size_t>(ty.hi) * src.width * 3;
  auto* out = dst.at(r.x, r.y + row);
  for (int col = 0; col < r.width; ++col) {
    const auto& tx = xs[static_cast<std::size_t>(col)];
    for (int c = 0; c < 3; ++c) {
      const double a = top[tx.lo * 3 + c] + (top[tx.hi * 3 + c] - top[tx.lo * 3 + c]) * tx.frac;
      const double b =
          bottom[tx.lo * 3 + c] + (bottom[tx.hi * 3 + c] - bottom[tx.lo * 3 + c]) * tx.frac;
      const double v = a + (b - a) * ty.frac;
      out[col * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
}

}  // namespace

void resize_bilinear_into(const Image& src, Image& dst, Region region, Exec exec) {
  if (src.width <= 0 || src.height <= 0) {
    throw ValidationError("cannot resize an empty image");
  }
  if (region.width <= 0 || region.height <= 0) {
    throw ValidationError("resize target has zero area");
  }
  if (region.x < 0 || region.y < 0 || region.x + region.width > dst.width ||
      region.y + region.height > dst.height) {
    throw ValidationError("resize region outside destination");
  }
  const auto xs = taps(src.width, region.width);
  const auto ys = taps(src.height, region.height);

  if (exec == Exec::serial) {
    for (int row = 0; row < region.height; ++row) {
      resize_row(src, dst, region, xs, ys[static_cast<std::size_t>(row)], row);
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int row = 0; row < region.height; ++row) {
    resize_row(src, dst, region, xs, ys[static_cast<std::size_t>(row)], row);
  }
}

Image resize_bilinear(const Image& src, int width, int height, Exec exec) {
  Image dst(width, height);
  resize_bilinear_into(src, dst, {0, 0, width, height}, exec);
  return dst;
}

}  // namespace vic
