// Copyright 2026 the hps authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HPS_IMAGE_HPP
#define HPS_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hps/common.hpp"

namespace hps {

/// Row-major 8-bit grayscale bitmap.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {
    require(w >= 1 && h >= 1, "image dimensions must be >= 1");
  }

  std::uint8_t at(int x, int y) const {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return samples[static_cast<std::size_t>(y) * width + x];
  }

  friend bool operator==(const GrayImage& a, const GrayImage& b) {
    return a.width == b.width && a.height == b.height &&
           a.samples == b.samples;
  }
};

/// Row-major foreground mask.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  BinaryImage() = default;
  BinaryImage(int w, int h)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {
    require(w >= 1 && h >= 1, "image dimensions must be >= 1");
  }

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  /// Out-of-range coordinates read as background.
  bool at_or_bg(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return at(x, y);
  }

  std::size_t foreground_count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }

  friend bool operator==(const BinaryImage& a, const BinaryImage& b) {
    return a.width == b.width && a.height == b.height && a.bits == b.bits;
  }
};

enum class InkPolarity {
  BrightInk,  // foreground = bright pixels (MNIST-style white-on-black)
  DarkInk,    // foreground = dark pixels (scans of line drawings)
};

/// Downscale so that max(width, height) <= max_dim, preserving aspect ratio.
/// Uses exact area averaging: each output sample is the mean intensity of
/// its (fractional) source block. Images already within the limit pass
/// through untouched.
inline GrayImage resize_below(const GrayImage& img, int max_dim) {
  require(max_dim >= 8, "resize_below: max_dim must be >= 8");
  require(img.width >= 1 && img.height >= 1 && !img.samples.empty(),
          "resize_below: degenerate image");
  if (img.width <= max_dim && img.height <= max_dim) return img;

  const int longest = std::max(img.width, img.height);
  const double scale = static_cast<double>(max_dim) / longest;
  const int out_w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int out_h = std::max(1, static_cast<int>(std::lround(img.height * scale)));

  GrayImage out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int oy = 0; oy < out_h; ++oy) {
    const double ty0 = oy * sy, ty1 = (oy + 1) * sy;
    for (int ox = 0; ox < out_w; ++ox) {
      const double tx0 = ox * sx, tx1 = (ox + 1) * sx;
      double acc = 0.0;
      for (int y = static_cast<int>(ty0); y < ty1; ++y) {
        const double wy =
            std::min(ty1, static_cast<double>(y + 1)) - std::max(ty0, static_cast<double>(y));
        if (wy <= 0) continue;
        for (int x = static_cast<int>(tx0); x < tx1; ++x) {
          const double wx = std::min(tx1, static_cast<double>(x + 1)) -
                            std::max(tx0, static_cast<double>(x));
          if (wx <= 0) continue;
          acc += wx * wy * img.at(std::min(x, img.width - 1), std::min(y, img.height - 1));
        }
      }
      out.at(ox, oy) =
          static_cast<std::uint8_t>(std::lround(acc / (sx * sy)));
    }
  }
  return out;
}

/// One pass of a 3x3 box blur. Border pixels average over the clamped
/// neighborhood that actually exists, so a constant image stays constant.
inline GrayImage blur(const GrayImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      int sum = 0, n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= img.width || yy >= img.height) continue;
          sum += img.at(xx, yy);
          ++n;
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>(
          std::lround(static_cast<double>(sum) / n));
    }
  }
  return out;
}

/// Threshold to a foreground mask. BrightInk keeps pixels >= threshold,
/// DarkInk keeps pixels <= threshold.
inline BinaryImage binarize(const GrayImage& img, int threshold,
                            InkPolarity polarity = InkPolarity::BrightInk) {
  require(threshold >= 0 && threshold <= 255,
          "binarize: threshold out of range");
  BinaryImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    const bool fg = polarity == InkPolarity::BrightInk
                        ? img.samples[i] >= threshold
                        : img.samples[i] <= threshold;
    out.bits[i] = fg ? 1 : 0;
  }
  return out;
}

/// Count 8-connected foreground components.
inline int count_components8(const BinaryImage& img) {
  std::vector<int> label(img.bits.size(), -1);
  int count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < img.bits.size(); ++start) {
    if (!img.bits[start] || label[start] >= 0) continue;
    ++count;
    stack.push_back(start);
    label[start] = count;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(i % img.width);
      const int y = static_cast<int>(i / img.width);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= img.width || yy >= img.height) continue;
          const std::size_t j = static_cast<std::size_t>(yy) * img.width + xx;
          if (img.bits[j] && label[j] < 0) {
            label[j] = count;
            stack.push_back(j);
          }
        }
      }
    }
  }
  return count;
}

}  // namespace hps

#endif  // HPS_IMAGE_HPP
