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

#ifndef HPS_THINNING_HPP
#define HPS_THINNING_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "hps/image.hpp"

namespace hps {

namespace detail {

// Neighborhood order P2..P9: N, NE, E, SE, S, SW, W, NW.
inline std::array<int, 8> zs_neighbors(const BinaryImage& img, int x, int y) {
  return {img.at_or_bg(x, y - 1), img.at_or_bg(x + 1, y - 1),
          img.at_or_bg(x + 1, y), img.at_or_bg(x + 1, y + 1),
          img.at_or_bg(x, y + 1), img.at_or_bg(x - 1, y + 1),
          img.at_or_bg(x - 1, y), img.at_or_bg(x - 1, y - 1)};
}

inline bool zs_deletable(const std::array<int, 8>& n, bool first_pass) {
  int b = 0;
  for (int v : n) b += v;
  if (b < 2 || b > 6) return false;
  int a = 0;
  for (int i = 0; i < 8; ++i)
    if (n[i] == 0 && n[(i + 1) % 8] == 1) ++a;
  if (a != 1) return false;
  // n indices: 0=P2(N) 2=P4(E) 4=P6(S) 6=P8(W)
  if (first_pass)
    return (n[0] * n[2] * n[4]) == 0 && (n[2] * n[4] * n[6]) == 0;
  return (n[0] * n[2] * n[6]) == 0 && (n[0] * n[4] * n[6]) == 0;
}

inline void label_components8(const BinaryImage& img, std::vector<int>& label,
                              int& count) {
  label.assign(img.bits.size(), -1);
  count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < img.bits.size(); ++start) {
    if (!img.bits[start] || label[start] >= 0) continue;
    label[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(i % img.width);
      const int y = static_cast<int>(i / img.width);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= img.width || yy >= img.height)
            continue;
          const std::size_t j = static_cast<std::size_t>(yy) * img.width + xx;
          if (img.bits[j] && label[j] < 0) {
            label[j] = count;
            stack.push_back(j);
          }
        }
    }
    ++count;
  }
}

}  // namespace detail

/// Zhang-Suen thinning: two direction-biased subiterations of parallel
/// deletion, repeated until a full pass removes nothing. Small compact blobs
/// (a 2x2 square is the canonical case) satisfy the deletion conditions at
/// every pixel simultaneously, which would erase the component outright; a
/// per-subiteration guard keeps the scan-order-first pixel of any component
/// that would vanish, so the 8-connected component count is preserved.
inline BinaryImage thin(const BinaryImage& img) {
  BinaryImage cur = img;
  std::vector<std::size_t> marked;
  std::vector<int> label;
  std::vector<int> remaining, hit;

  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int y = 0; y < cur.height; ++y)
        for (int x = 0; x < cur.width; ++x) {
          if (!cur.at(x, y)) continue;
          if (detail::zs_deletable(detail::zs_neighbors(cur, x, y), pass == 0))
            marked.push_back(static_cast<std::size_t>(y) * cur.width + x);
        }
      if (marked.empty()) continue;

      int ncomp = 0;
      detail::label_components8(cur, label, ncomp);
      remaining.assign(ncomp, 0);
      hit.assign(ncomp, 0);
      for (std::size_t i = 0; i < cur.bits.size(); ++i)
        if (cur.bits[i]) ++remaining[label[i]];
      for (std::size_t i : marked) ++hit[label[i]];

      for (std::size_t i : marked) {
        const int c = label[i];
        if (hit[c] == remaining[c]) {
          hit[c] = -1;  // keep this (first in scan order) pixel
          continue;
        }
        cur.bits[i] = 0;
        changed = true;
      }
    }
  }
  return cur;
}

}  // namespace hps

#endif  // HPS_THINNING_HPP
