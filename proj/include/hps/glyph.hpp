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

#ifndef HPS_GLYPH_HPP
#define HPS_GLYPH_HPP

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hps/geometry.hpp"

namespace hps {

/// Case-normalized concept token ("digit-7", "person", "shirt").
struct ConceptLabel {
  std::string symbol;

  ConceptLabel() = default;
  explicit ConceptLabel(std::string s) {
    require(!s.empty(), "concept label must be non-empty");
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    symbol = std::move(s);
  }

  friend bool operator==(const ConceptLabel& a, const ConceptLabel& b) {
    return a.symbol == b.symbol;
  }
  friend auto operator<=>(const ConceptLabel& a, const ConceptLabel& b) {
    return a.symbol <=> b.symbol;
  }
};

/// Visual entity: digital ink plus an optional conceptual label. The common
/// currency between the vision-facing front end and the reasoning stack.
struct Glyph {
  std::string id;
  std::vector<Polyline> strokes;
  std::optional<ConceptLabel> label;
  Rect bbox;
};

struct Sketch {
  std::vector<Glyph> glyphs;
  int canvas_width = 0;
  int canvas_height = 0;
};

/// One recognizer output: a box, a label, a confidence, and optionally a
/// polygonal mask outline.
struct Detection {
  Rect bbox;
  ConceptLabel label;
  double score = 1.0;
  std::vector<Point> mask;  // optional outline; empty = box only
};

namespace detail {

inline Rect strokes_bbox(const std::vector<Polyline>& strokes) {
  Rect r = strokes.front().bbox();
  for (std::size_t i = 1; i < strokes.size(); ++i)
    r = r.united(strokes[i].bbox());
  return r;
}

}  // namespace detail

inline Glyph glyph_from_strokes(std::vector<Polyline> strokes,
                                std::optional<ConceptLabel> label,
                                std::string id) {
  require(!strokes.empty(), "glyph needs at least one stroke");
  for (const Polyline& s : strokes)
    require(!s.points.empty(), "glyph stroke has no points");
  Glyph g;
  g.id = std::move(id);
  g.bbox = detail::strokes_bbox(strokes);
  g.strokes = std::move(strokes);
  g.label = std::move(label);
  return g;
}

/// A detection becomes a glyph whose ink is its outline: the mask polygon
/// when present, otherwise the four-corner rectangle of the box.
inline Glyph glyph_from_detection(const Detection& d, std::string id) {
  require(d.bbox.width() > 0 && d.bbox.height() > 0,
          "detection bbox has zero area");
  Glyph g;
  g.id = std::move(id);
  g.label = d.label;
  Polyline outline;
  outline.closed = true;
  if (d.mask.size() >= 3) {
    outline.points = d.mask;
    if (outline.points.size() > 1 &&
        outline.points.front() == outline.points.back())
      outline.points.pop_back();
  } else {
    outline.points = {{d.bbox.x0, d.bbox.y0},
                      {d.bbox.x1, d.bbox.y0},
                      {d.bbox.x1, d.bbox.y1},
                      {d.bbox.x0, d.bbox.y1}};
  }
  g.bbox = d.bbox;
  g.strokes.push_back(std::move(outline));
  return g;
}

namespace detail {

inline double min_point_distance(const Polyline& a, const Polyline& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& p : a.points)
    for (const Point& q : b.points) best = std::min(best, distance(p, q));
  return best;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Cluster strokes into glyphs by proximity: strokes whose minimum
/// vertex-to-vertex distance is <= gap end up in the same glyph (transitive
/// closure). Glyph ids are "<prefix>0", "<prefix>1", ... in order of each
/// cluster's first stroke.
inline std::vector<Glyph> group_strokes(const std::vector<Polyline>& strokes,
                                        double gap,
                                        const std::string& id_prefix = "g") {
  require(gap >= 0.0, "group_strokes: gap must be >= 0");
  if (strokes.empty()) return {};

  detail::UnionFind uf(strokes.size());
  for (std::size_t i = 0; i < strokes.size(); ++i)
    for (std::size_t j = i + 1; j < strokes.size(); ++j)
      if (detail::min_point_distance(strokes[i], strokes[j]) <= gap)
        uf.unite(i, j);

  std::vector<std::vector<Polyline>> clusters;
  std::vector<std::size_t> root_to_cluster(strokes.size(),
                                           std::size_t(-1));
  for (std::size_t i = 0; i < strokes.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (root_to_cluster[r] == std::size_t(-1)) {
      root_to_cluster[r] = clusters.size();
      clusters.emplace_back();
    }
    clusters[root_to_cluster[r]].push_back(strokes[i]);
  }

  std::vector<Glyph> glyphs;
  glyphs.reserve(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c)
    glyphs.push_back(glyph_from_strokes(std::move(clusters[c]), std::nullopt,
                                        id_prefix + std::to_string(c)));
  return glyphs;
}

}  // namespace hps

#endif  // HPS_GLYPH_HPP
