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

#ifndef HPS_STROKES_HPP
#define HPS_STROKES_HPP

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "hps/geometry.hpp"
#include "hps/image.hpp"

namespace hps {

namespace detail {

// Reduced 8-adjacency for skeleton pixels: orthogonal neighbors always
// connect; a diagonal connects only when neither of the two orthogonal
// cells it cuts across is foreground. Without the reduction every staircase
// corner forms a spurious 3-cycle and the degree-2 path model falls apart.
inline std::vector<std::pair<int, int>> skeleton_neighbors(
    const BinaryImage& img, int x, int y) {
  std::vector<std::pair<int, int>> out;
  static constexpr int ortho[4][2] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
  static constexpr int diag[4][2] = {{-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
  for (const auto& d : ortho)
    if (img.at_or_bg(x + d[0], y + d[1])) out.emplace_back(x + d[0], y + d[1]);
  for (const auto& d : diag) {
    if (!img.at_or_bg(x + d[0], y + d[1])) continue;
    if (img.at_or_bg(x + d[0], y) || img.at_or_bg(x, y + d[1])) continue;
    out.emplace_back(x + d[0], y + d[1]);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  return out;
}

}  // namespace detail

/// Vectorize a thinned skeleton into polyline strokes.
///
/// The skeleton pixels form a graph under reduced 8-adjacency. Pixels of
/// degree != 2 (endpoints, junctions, isolated dots) break the graph into
/// maximal degree-2 chains; each chain becomes one open polyline whose
/// terminal points are the breaking pixels, so junction pixels appear in
/// every incident stroke. Components that are pure cycles (all degree 2)
/// become one closed polyline each. Isolated pixels come out as one-point
/// dot strokes so that every skeleton pixel lands in exactly one stroke.
inline std::vector<Polyline> extract_strokes(const BinaryImage& skeleton) {
  const int w = skeleton.width, h = skeleton.height;
  auto idx = [w](int x, int y) {
    return static_cast<std::size_t>(y) * w + x;
  };

  std::vector<int> degree(skeleton.bits.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (skeleton.at(x, y))
        degree[idx(x, y)] =
            static_cast<int>(detail::skeleton_neighbors(skeleton, x, y).size());

  // Track traversed edges so each chain is walked once.
  auto edge_key = [&](int x0, int y0, int x1, int y1) {
    const std::size_t a = idx(x0, y0), b = idx(x1, y1);
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  std::vector<std::pair<std::size_t, std::size_t>> used_edges;
  auto edge_used = [&](int x0, int y0, int x1, int y1) {
    return std::binary_search(used_edges.begin(), used_edges.end(),
                              edge_key(x0, y0, x1, y1));
  };
  auto mark_edge = [&](int x0, int y0, int x1, int y1) {
    auto k = edge_key(x0, y0, x1, y1);
    used_edges.insert(
        std::lower_bound(used_edges.begin(), used_edges.end(), k), k);
  };

  std::vector<Polyline> strokes;

  auto walk = [&](int sx, int sy, int nx, int ny) {
    Polyline line;
    line.points.push_back({static_cast<double>(sx), static_cast<double>(sy)});
    int px = sx, py = sy, cx = nx, cy = ny;
    mark_edge(px, py, cx, cy);
    while (true) {
      line.points.push_back({static_cast<double>(cx), static_cast<double>(cy)});
      if (degree[idx(cx, cy)] != 2) break;
      const auto nbrs = detail::skeleton_neighbors(skeleton, cx, cy);
      int tx = -1, ty = -1;
      for (const auto& [ax, ay] : nbrs) {
        if (ax == px && ay == py) continue;
        tx = ax;
        ty = ay;
        break;
      }
      if (tx < 0 || edge_used(cx, cy, tx, ty)) break;  // closed loop returns
      mark_edge(cx, cy, tx, ty);
      px = cx;
      py = cy;
      cx = tx;
      cy = ty;
    }
    return line;
  };

  // Chains anchored at non-degree-2 pixels.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!skeleton.at(x, y) || degree[idx(x, y)] == 2) continue;
      if (degree[idx(x, y)] == 0) {
        Polyline dot;
        dot.points.push_back({static_cast<double>(x), static_cast<double>(y)});
        strokes.push_back(std::move(dot));
        continue;
      }
      for (const auto& [nx, ny] : detail::skeleton_neighbors(skeleton, x, y)) {
        if (edge_used(x, y, nx, ny)) continue;
        strokes.push_back(walk(x, y, nx, ny));
      }
    }

  // Leftover pure cycles: every pixel degree 2, no anchor touched them.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!skeleton.at(x, y) || degree[idx(x, y)] != 2) continue;
      const auto nbrs = detail::skeleton_neighbors(skeleton, x, y);
      if (edge_used(x, y, nbrs[0].first, nbrs[0].second) ||
          edge_used(x, y, nbrs[1].first, nbrs[1].second))
        continue;
      Polyline ring = walk(x, y, nbrs[0].first, nbrs[0].second);
      // walk stops when it returns to the start; drop the repeated point.
      if (ring.points.size() > 2 && ring.points.front() == ring.points.back())
        ring.points.pop_back();
      ring.closed = true;
      strokes.push_back(std::move(ring));
    }

  return strokes;
}

namespace detail {

inline void douglas_peucker_rec(const std::vector<Point>& pts, std::size_t lo,
                                std::size_t hi, double eps,
                                std::vector<char>& keep) {
  if (hi <= lo + 1) return;
  double dmax = -1.0;
  std::size_t split = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > dmax) {
      dmax = d;
      split = i;
    }
  }
  // Split at >= eps so that eps = 0 keeps every vertex.
  if (dmax >= eps) {
    keep[split] = 1;
    douglas_peucker_rec(pts, lo, split, eps, keep);
    douglas_peucker_rec(pts, split, hi, eps, keep);
  }
}

}  // namespace detail

/// Ramer-Douglas-Peucker reduction. The result is a subsequence of the
/// input containing both endpoints; every dropped point lies within eps of
/// the simplified chain. Closed polylines are split at the vertex farthest
/// from points[0] and each half is reduced independently.
inline Polyline simplify(const Polyline& line, double eps) {
  require(eps >= 0.0, "simplify: eps must be >= 0");
  if (line.points.size() <= 2) return line;

  const auto& pts = line.points;
  std::vector<char> keep(pts.size(), 0);
  keep.front() = 1;
  keep.back() = 1;

  if (!line.closed) {
    detail::douglas_peucker_rec(pts, 0, pts.size() - 1, eps, keep);
  } else {
    std::size_t far_i = 1;
    double far_d = -1.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double d = distance(pts[0], pts[i]);
      if (d > far_d) {
        far_d = d;
        far_i = i;
      }
    }
    keep[far_i] = 1;
    detail::douglas_peucker_rec(pts, 0, far_i, eps, keep);
    // Second half wraps around; unroll it into a temporary chain.
    std::vector<Point> tail;
    std::vector<std::size_t> tail_idx;
    for (std::size_t i = far_i; i < pts.size(); ++i) {
      tail.push_back(pts[i]);
      tail_idx.push_back(i);
    }
    tail.push_back(pts[0]);
    tail_idx.push_back(0);
    std::vector<char> tail_keep(tail.size(), 0);
    tail_keep.front() = 1;
    tail_keep.back() = 1;
    detail::douglas_peucker_rec(tail, 0, tail.size() - 1, eps, tail_keep);
    for (std::size_t i = 0; i < tail.size(); ++i)
      if (tail_keep[i]) keep[tail_idx[i]] = 1;
  }

  Polyline out;
  out.closed = line.closed;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.points.push_back(pts[i]);
  return out;
}

}  // namespace hps

#endif  // HPS_STROKES_HPP
