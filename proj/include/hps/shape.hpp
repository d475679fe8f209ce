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

#ifndef HPS_SHAPE_HPP
#define HPS_SHAPE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hps/case.hpp"
#include "hps/geometry.hpp"
#include "hps/glyph.hpp"

namespace hps {

enum class ShapeClass { Straight, Curved };
enum class Convexity { Convex, Concave };
enum class Winding { CW, CCW };
enum class RelLength { Short, Medium, Long };

/// Chord direction bucketed into compass quadrants modulo 180 degrees.
enum class Orientation { E, NE, N, NW };

struct ShapeParams {
  double corner_angle = 45.0;     // degrees; turns >= this split segments
  double straightness_tol = 0.05; // max deviation / chord length
  double snap_tol = 2.0;          // px; endpoint clustering for the graph
};

/// One qualitative edge: a polyline piece plus its attributes. `chain` and
/// `index_in_chain` remember where the piece came from so chain adjacency
/// can be emitted later.
struct EdgeSegment {
  Polyline geometry;
  ShapeClass shape_class = ShapeClass::Straight;
  std::optional<Orientation> orientation;
  RelLength rel_length = RelLength::Medium;
  std::optional<Convexity> convexity;
  int chain = -1;
  int index_in_chain = -1;
};

/// A bounded face of the planar edge graph: its boundary segments in
/// traversal order (with the traversal direction per segment), winding,
/// area, and the boundary polygon itself.
struct EdgeCycle {
  std::vector<std::pair<int, bool>> segments;  // (segment id, forward?)
  Winding winding = Winding::CCW;
  double area = 0.0;
  std::vector<Point> boundary;

  bool has_segment(int id) const {
    for (const auto& [s, fwd] : segments)
      if (s == id) return true;
    return false;
  }
};

/// Containment forest over cycles; node i describes cycles[i]. Depth is
/// capped at 3: anything nested deeper is reported at depth 3.
struct CycleTree {
  struct Node {
    int parent = -1;
    int depth = 1;
  };
  std::vector<Node> nodes;
};

// ---------------------------------------------------------------------------
// Segment attributes
// ---------------------------------------------------------------------------

/// Straight iff max perpendicular deviation from the chord, divided by the
/// chord length, stays below tol. Values at the threshold count as curved,
/// and a zero-length chord (closed ring) is curved by convention.
inline ShapeClass classify_shape(const Polyline& geometry, double tol) {
  require(tol > 0.0, "classify_shape: tol must be > 0");
  const Point a = geometry.points.front();
  const Point b = geometry.points.back();
  const double chord = distance(a, b);
  if (chord == 0.0) return ShapeClass::Curved;
  double dmax = 0.0;
  for (const Point& p : geometry.points)
    dmax = std::max(dmax, point_segment_distance(p, a, b));
  return (dmax / chord < tol) ? ShapeClass::Straight : ShapeClass::Curved;
}

inline std::optional<Orientation> chord_orientation(const Polyline& geometry) {
  const Point a = geometry.points.front();
  const Point b = geometry.points.back();
  if (a == b) return std::nullopt;
  // Flip y so the quadrants read as on-screen compass directions.
  double deg = std::atan2(-(b.y - a.y), b.x - a.x) * 180.0 / std::numbers::pi;
  deg = std::fmod(deg + 360.0, 180.0);
  if (deg < 22.5 || deg >= 157.5) return Orientation::E;
  if (deg < 67.5) return Orientation::NE;
  if (deg < 112.5) return Orientation::N;
  return Orientation::NW;
}

/// Tercile labels over arc length: the shortest third Short, the longest
/// third Long, everything else (and a lone segment) Medium.
inline void rel_lengths(std::vector<EdgeSegment>& segs) {
  require(!segs.empty(), "rel_lengths: no segments");
  const std::size_t n = segs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double la = segs[a].geometry.length();
    const double lb = segs[b].geometry.length();
    return la != lb ? la < lb : a < b;
  });
  const std::size_t third = n / 3;
  for (std::size_t rank = 0; rank < n; ++rank) {
    RelLength rl = RelLength::Medium;
    if (rank < third)
      rl = RelLength::Short;
    else if (rank >= n - third)
      rl = RelLength::Long;
    segs[order[rank]].rel_length = rl;
  }
}

/// Convex iff the segment bulges away from the cycle interior. The bulge
/// side is the sign of the mean cross product of the chord direction with
/// the offsets of the interior sample points; the interior side comes from
/// the winding (CCW in shoelace terms keeps the interior on the left of
/// travel).
inline Convexity classify_convexity(const Polyline& traversal_geometry,
                                    Winding winding) {
  const auto& pts = traversal_geometry.points;
  const Point a = pts.front();
  const Point b = pts.back();
  double mean = 0.0;
  int n = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    mean += cross(b - a, pts[i] - a);
    ++n;
  }
  if (n > 0) mean /= n;
  const bool bulges_left = mean > 0.0;
  const bool interior_left = winding == Winding::CCW;
  return (bulges_left == interior_left) ? Convexity::Concave
                                        : Convexity::Convex;
}

// ---------------------------------------------------------------------------
// Edge segmentation
// ---------------------------------------------------------------------------

namespace detail {

inline double turn_degrees(const Point& prev, const Point& at,
                           const Point& next) {
  const Point d1 = at - prev;
  const Point d2 = next - at;
  const double n1 = norm(d1), n2 = norm(d2);
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  const double c = std::clamp(dot(d1, d2) / (n1 * n2), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

inline EdgeSegment make_segment(std::vector<Point> pts, bool closed,
                                const ShapeParams& p) {
  EdgeSegment s;
  s.geometry.points = std::move(pts);
  s.geometry.closed = closed;
  s.shape_class = classify_shape(s.geometry, p.straightness_tol);
  s.orientation = chord_orientation(s.geometry);
  return s;
}

}  // namespace detail

/// Split a simplified polyline at every vertex whose direction change is at
/// least corner_angle degrees. A closed polyline with no corners stays one
/// closed ring segment; otherwise the pieces run corner to corner
/// (cyclically for closed input).
inline std::vector<EdgeSegment> segment_edges(const Polyline& line,
                                              const ShapeParams& p = {}) {
  require(p.corner_angle > 0.0 && p.corner_angle < 180.0,
          "segment_edges: corner_angle out of range");
  const auto& pts = line.points;
  std::vector<EdgeSegment> out;
  if (pts.size() < 2) return out;

  if (!line.closed) {
    std::vector<std::size_t> cuts{0};
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
      if (detail::turn_degrees(pts[i - 1], pts[i], pts[i + 1]) >=
          p.corner_angle)
        cuts.push_back(i);
    cuts.push_back(pts.size() - 1);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      std::vector<Point> piece(pts.begin() + cuts[k],
                               pts.begin() + cuts[k + 1] + 1);
      out.push_back(detail::make_segment(std::move(piece), false, p));
    }
  } else {
    const std::size_t n = pts.size();
    std::vector<std::size_t> corners;
    for (std::size_t i = 0; i < n; ++i)
      if (detail::turn_degrees(pts[(i + n - 1) % n], pts[i],
                               pts[(i + 1) % n]) >= p.corner_angle)
        corners.push_back(i);
    if (corners.empty()) {
      out.push_back(detail::make_segment(pts, true, p));
    } else {
      for (std::size_t k = 0; k < corners.size(); ++k) {
        const std::size_t beg = corners[k];
        const std::size_t end = corners[(k + 1) % corners.size()];
        std::vector<Point> piece;
        for (std::size_t i = beg; i != end; i = (i + 1) % n)
          piece.push_back(pts[i]);
        piece.push_back(pts[end]);
        out.push_back(detail::make_segment(std::move(piece), false, p));
      }
    }
  }

  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].index_in_chain = static_cast<int>(i);
  return out;
}

// ---------------------------------------------------------------------------
// Planar faces
// ---------------------------------------------------------------------------

namespace detail {

struct HalfEdge {
  int seg = -1;
  bool forward = true;
  int from = -1, to = -1;
  double angle = 0.0;
  int rev = -1;
  int next = -1;
};

inline std::vector<Point> oriented_points(const EdgeSegment& s, bool forward) {
  std::vector<Point> pts = s.geometry.points;
  if (!forward) std::reverse(pts.begin(), pts.end());
  return pts;
}

}  // namespace detail

/// Extract the bounded faces of the planar graph formed by the segments.
/// Segment endpoints within snap_tol of each other are fused into one node;
/// faces are traced with the face-on-the-left rule (at each node the
/// outgoing edges are ordered by angle, and the traversal continues on the
/// edge just clockwise of the arrival edge's reverse). Bounded faces come
/// out with positive shoelace area; spur segments that a face walks twice
/// are dropped from its cycle.
inline std::vector<EdgeCycle> find_edge_cycles(
    const std::vector<EdgeSegment>& segments, double snap_tol = 2.0) {
  using detail::HalfEdge;

  std::vector<Point> nodes;
  auto node_for = [&](const Point& p) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (distance(nodes[i], p) <= snap_tol) return static_cast<int>(i);
    nodes.push_back(p);
    return static_cast<int>(nodes.size() - 1);
  };

  std::vector<HalfEdge> hes;
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const auto& pts = segments[si].geometry.points;
    if (pts.size() < 2) {
      if (segments[si].geometry.closed && pts.size() == 1) continue;
      continue;  // dots cannot bound a face
    }
    const bool ring = segments[si].geometry.closed;
    const int u = node_for(pts.front());
    const int v = ring ? u : node_for(pts.back());

    HalfEdge f, r;
    f.seg = r.seg = static_cast<int>(si);
    f.forward = true;
    r.forward = false;
    f.from = u;
    f.to = v;
    r.from = v;
    r.to = u;
    const Point fd = pts[1] - pts[0];
    const Point rd = ring ? pts.back() - pts[0]
                          : pts[pts.size() - 2] - pts.back();
    f.angle = std::atan2(fd.y, fd.x);
    r.angle = std::atan2(rd.y, rd.x);
    f.rev = static_cast<int>(hes.size()) + 1;
    r.rev = static_cast<int>(hes.size());
    hes.push_back(f);
    hes.push_back(r);
  }
  if (hes.empty()) return {};

  // Rotation system: outgoing half-edges per node in CCW angular order.
  std::vector<std::vector<int>> out(nodes.size());
  for (std::size_t h = 0; h < hes.size(); ++h)
    out[hes[h].from].push_back(static_cast<int>(h));
  for (auto& lst : out)
    std::sort(lst.begin(), lst.end(), [&](int a, int b) {
      if (hes[a].angle != hes[b].angle) return hes[a].angle < hes[b].angle;
      if (hes[a].seg != hes[b].seg) return hes[a].seg < hes[b].seg;
      return hes[a].forward && !hes[b].forward;
    });

  for (std::size_t h = 0; h < hes.size(); ++h) {
    const auto& lst = out[hes[h].to];
    const int r = hes[h].rev;
    std::size_t k = 0;
    while (lst[k] != r) ++k;
    hes[h].next = lst[(k + lst.size() - 1) % lst.size()];
  }

  std::vector<EdgeCycle> cycles;
  std::vector<char> visited(hes.size(), 0);
  for (std::size_t start = 0; start < hes.size(); ++start) {
    if (visited[start]) continue;
    std::vector<int> orbit;
    int h = static_cast<int>(start);
    do {
      visited[h] = 1;
      orbit.push_back(h);
      h = hes[h].next;
    } while (h != static_cast<int>(start));

    // Count traversals per segment; a segment walked in both directions is
    // a spur, not part of the face boundary.
    std::vector<int> seg_count;
    for (int e : orbit) {
      if (hes[e].seg >= static_cast<int>(seg_count.size()))
        seg_count.resize(hes[e].seg + 1, 0);
      ++seg_count[hes[e].seg];
    }

    EdgeCycle cyc;
    std::vector<Point> poly;
    for (int e : orbit) {
      if (seg_count[hes[e].seg] > 1) continue;
      cyc.segments.emplace_back(hes[e].seg, hes[e].forward);
      auto pts = detail::oriented_points(segments[hes[e].seg], hes[e].forward);
      const bool ring = segments[hes[e].seg].geometry.closed;
      const std::size_t keep = ring ? pts.size() : pts.size() - 1;
      for (std::size_t i = 0; i < keep; ++i) poly.push_back(pts[i]);
    }
    if (cyc.segments.empty() || poly.size() < 3) continue;

    const double area = signed_area(poly);
    if (area <= 1e-9) continue;  // outer faces trace negative
    cyc.area = area;
    cyc.winding = Winding::CCW;
    cyc.boundary = std::move(poly);
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

/// Containment forest: each cycle's parent is the smallest-area cycle whose
/// boundary strictly contains a representative interior point of it. Depth
/// counts from 1 at the roots and saturates at 3.
inline CycleTree build_cycle_tree(const std::vector<EdgeCycle>& cycles) {
  CycleTree tree;
  tree.nodes.resize(cycles.size());
  std::vector<Point> probes(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i)
    probes[i] = polygon_interior_point(cycles[i].boundary);

  for (std::size_t i = 0; i < cycles.size(); ++i) {
    int best = -1;
    for (std::size_t j = 0; j < cycles.size(); ++j) {
      if (i == j) continue;
      if (cycles[j].area <= cycles[i].area) continue;
      if (!polygon_contains(cycles[j].boundary, probes[i])) continue;
      if (best < 0 || cycles[j].area < cycles[best].area)
        best = static_cast<int>(j);
    }
    tree.nodes[i].parent = best;
  }

  // Depths by walking parent links (forest is acyclic: parents are strictly
  // larger by area).
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    int d = 1;
    for (int p = tree.nodes[i].parent; p >= 0; p = tree.nodes[p].parent) ++d;
    tree.nodes[i].depth = std::min(d, 3);
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Shape analysis + relational encoding
// ---------------------------------------------------------------------------

/// Everything the encoders need to know about one glyph's ink.
struct ShapeAnalysis {
  std::vector<EdgeSegment> segments;
  std::vector<EdgeCycle> cycles;
  CycleTree tree;
};

inline ShapeAnalysis analyze_shape(const Glyph& g, const ShapeParams& p = {}) {
  ShapeAnalysis a;
  int chain = 0;
  for (const Polyline& stroke : g.strokes) {
    auto pieces = segment_edges(stroke, p);
    for (auto& s : pieces) {
      s.chain = chain;
      a.segments.push_back(std::move(s));
    }
    ++chain;
  }
  if (a.segments.empty()) return a;

  rel_lengths(a.segments);
  a.cycles = find_edge_cycles(a.segments, p.snap_tol);
  a.tree = build_cycle_tree(a.cycles);

  // Convexity exists only for curved segments that lie on some cycle.
  for (const EdgeCycle& cyc : a.cycles) {
    for (const auto& [sid, fwd] : cyc.segments) {
      EdgeSegment& s = a.segments[sid];
      if (s.shape_class != ShapeClass::Curved) continue;
      if (s.convexity) continue;  // first containing cycle wins
      Polyline trav;
      trav.points = detail::oriented_points(s, fwd);
      s.convexity = classify_convexity(trav, cyc.winding);
    }
  }
  return a;
}

// Fact vocabulary emitted by encode_shape (all entities are this glyph's
// segments s<i> and cycles c<j>):
//   straight(s) | curved(s)
//   orientE(s) | orientNE(s) | orientN(s) | orientNW(s)
//   shortSeg(s) | mediumSeg(s) | longSeg(s)
//   convex(s) | concave(s)          [curved segments on a cycle]
//   adjacent(s1, s2)   symmetric    [consecutive pieces of one chain]
//   partOf(s, c)
//   contains(c1, c2)                [direct parent-child containment]

inline const char* orientation_functor(Orientation o) {
  switch (o) {
    case Orientation::E: return "orientE";
    case Orientation::NE: return "orientNE";
    case Orientation::N: return "orientN";
    case Orientation::NW: return "orientNW";
  }
  return "orientE";
}

inline const char* rel_length_functor(RelLength r) {
  switch (r) {
    case RelLength::Short: return "shortSeg";
    case RelLength::Medium: return "mediumSeg";
    case RelLength::Long: return "longSeg";
  }
  return "mediumSeg";
}

namespace detail {

/// Emit the shape facts for a subset of the analysis (cycle filter =
/// indices of cycles to include; segment filter likewise). Used whole by
/// encode_shape and sliced by the hierarchical decomposition.
inline CaseDescription encode_shape_subset(const ShapeAnalysis& a,
                                           const std::vector<int>& seg_ids,
                                           const std::vector<int>& cycle_ids,
                                           std::string provenance,
                                           const std::string& prefix = "") {
  CaseDescription c;
  c.provenance = std::move(provenance);

  auto seg_name = [&](int i) { return prefix + "s" + std::to_string(i); };
  auto cyc_name = [&](int i) { return prefix + "c" + std::to_string(i); };

  std::vector<char> seg_in(a.segments.size(), 0);
  for (int i : seg_ids) seg_in[i] = 1;
  std::vector<char> cyc_in(a.cycles.size(), 0);
  for (int i : cycle_ids) cyc_in[i] = 1;

  for (int i : seg_ids) {
    const EdgeSegment& s = a.segments[i];
    c.entities.push_back({seg_name(i), EntityKind::Segment});
    c.expressions.push_back(make_expr(
        s.shape_class == ShapeClass::Straight ? "straight" : "curved",
        {entity_arg(seg_name(i))}));
    if (s.orientation)
      c.expressions.push_back(make_expr(orientation_functor(*s.orientation),
                                        {entity_arg(seg_name(i))}));
    c.expressions.push_back(make_expr(rel_length_functor(s.rel_length),
                                      {entity_arg(seg_name(i))}));
    if (s.convexity)
      c.expressions.push_back(make_expr(
          *s.convexity == Convexity::Convex ? "convex" : "concave",
          {entity_arg(seg_name(i))}));
  }

  // Chain adjacency between consecutive pieces of one stroke.
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    if (!seg_in[i]) continue;
    for (std::size_t j = i + 1; j < a.segments.size(); ++j) {
      if (!seg_in[j]) continue;
      if (a.segments[i].chain != a.segments[j].chain) continue;
      const int di =
          std::abs(a.segments[i].index_in_chain - a.segments[j].index_in_chain);
      if (di == 1)
        c.expressions.push_back(
            make_expr("adjacent",
                      {entity_arg(seg_name(static_cast<int>(i))),
                       entity_arg(seg_name(static_cast<int>(j)))},
                      /*symmetric=*/true));
    }
  }
  // Closed chains wrap: last piece is adjacent to the first.
  {
    std::vector<std::pair<int, int>> chain_span;  // (first idx, last idx)
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
      const int ch = a.segments[i].chain;
      if (ch >= static_cast<int>(chain_span.size()))
        chain_span.resize(ch + 1, {-1, -1});
      if (chain_span[ch].first < 0 ||
          a.segments[i].index_in_chain <
              a.segments[chain_span[ch].first].index_in_chain)
        chain_span[ch].first = static_cast<int>(i);
      if (chain_span[ch].second < 0 ||
          a.segments[i].index_in_chain >
              a.segments[chain_span[ch].second].index_in_chain)
        chain_span[ch].second = static_cast<int>(i);
    }
    for (const auto& [lo, hi] : chain_span) {
      if (lo < 0 || hi < 0 || lo == hi) continue;
      if (!seg_in[lo] || !seg_in[hi]) continue;
      if (a.segments[hi].index_in_chain - a.segments[lo].index_in_chain < 2)
        continue;  // pair already adjacent
      // Wrap adjacency only when the chain came from a closed polyline; the
      // pieces of a closed chain all share the ring, detected by the first
      // piece starting where the last one ends.
      const Point head = a.segments[lo].geometry.points.front();
      const Point tail = a.segments[hi].geometry.points.back();
      if (distance(head, tail) < 1e-9)
        c.expressions.push_back(make_expr(
            "adjacent",
            {entity_arg(seg_name(lo)), entity_arg(seg_name(hi))},
            /*symmetric=*/true));
    }
  }

  for (int j : cycle_ids) {
    c.entities.push_back({cyc_name(j), EntityKind::Cycle});
    for (const auto& [sid, fwd] : a.cycles[j].segments)
      if (seg_in[sid])
        c.expressions.push_back(make_expr(
            "partOf", {entity_arg(seg_name(sid)), entity_arg(cyc_name(j))}));
  }

  for (int j : cycle_ids) {
    const int parent = a.tree.nodes[j].parent;
    if (parent >= 0 && cyc_in[parent])
      c.expressions.push_back(make_expr(
          "contains", {entity_arg(cyc_name(parent)), entity_arg(cyc_name(j))}));
  }

  return canonicalize(c);
}

}  // namespace detail

/// Full relational encoding of one glyph's shape.
inline CaseDescription encode_shape(const Glyph& g, const ShapeParams& p = {},
                                    std::string provenance = "") {
  const ShapeAnalysis a = analyze_shape(g, p);
  std::vector<int> segs(a.segments.size());
  for (std::size_t i = 0; i < segs.size(); ++i) segs[i] = static_cast<int>(i);
  std::vector<int> cycs(a.cycles.size());
  for (std::size_t i = 0; i < cycs.size(); ++i) cycs[i] = static_cast<int>(i);
  return detail::encode_shape_subset(
      a, segs, cycs, provenance.empty() ? g.id : std::move(provenance));
}

}  // namespace hps

#endif  // HPS_SHAPE_HPP
