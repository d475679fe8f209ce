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

#ifndef HPS_RELATIONS_HPP
#define HPS_RELATIONS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hps/case.hpp"
#include "hps/geometry.hpp"
#include "hps/glyph.hpp"

namespace hps {

enum class Rcc8 { DC, EC, PO, TPP, NTPP, TPPi, NTPPi, EQ };

inline const char* to_string(Rcc8 r) {
  switch (r) {
    case Rcc8::DC: return "dc";
    case Rcc8::EC: return "ec";
    case Rcc8::PO: return "po";
    case Rcc8::TPP: return "tpp";
    case Rcc8::NTPP: return "ntpp";
    case Rcc8::TPPi: return "tppi";
    case Rcc8::NTPPi: return "ntppi";
    case Rcc8::EQ: return "eq";
  }
  return "dc";
}

inline Rcc8 rcc8_inverse(Rcc8 r) {
  switch (r) {
    case Rcc8::TPP: return Rcc8::TPPi;
    case Rcc8::NTPP: return Rcc8::NTPPi;
    case Rcc8::TPPi: return Rcc8::TPP;
    case Rcc8::NTPPi: return Rcc8::NTPP;
    default: return r;
  }
}

inline bool rcc8_symmetric(Rcc8 r) {
  return r == Rcc8::DC || r == Rcc8::EC || r == Rcc8::PO || r == Rcc8::EQ;
}

namespace detail {

/// Sample points along the polygon boundary: vertices plus three interior
/// samples per edge. Dense enough to decide containment and partial overlap
/// for pixel-derived regions.
inline std::vector<Point> boundary_samples(const std::vector<Point>& poly) {
  std::vector<Point> out;
  const std::size_t n = poly.size();
  out.reserve(n * 4);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    out.push_back(a);
    for (double t : {0.25, 0.5, 0.75})
      out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
  }
  return out;
}

inline double boundary_boundary_distance(const std::vector<Point>& a,
                                         const std::vector<Point>& b) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = a.size(), m = b.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      best = std::min(best, segment_segment_distance(a[i], a[(i + 1) % n],
                                                     b[j], b[(j + 1) % m]));
  return best;
}

inline bool boundaries_cross(const std::vector<Point>& a,
                             const std::vector<Point>& b) {
  const std::size_t n = a.size(), m = b.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (segments_properly_intersect(a[i], a[(i + 1) % n], b[j],
                                      b[(j + 1) % m]))
        return true;
  return false;
}

inline bool strictly_inside(const std::vector<Point>& poly, const Point& p,
                            double eps) {
  return polygon_contains(poly, p) &&
         polygon_boundary_distance(poly, p) > eps;
}

/// Every sample of `inner`'s boundary lies in or on (within eps of) `outer`
/// and the boundaries do not properly cross. A region hugging the boundary
/// entirely within the eps band counts as inside, which is what lets two
/// near-coincident outlines read as EQ.
inline bool region_inside(const std::vector<Point>& inner,
                          const std::vector<Point>& outer, double eps,
                          bool crossing) {
  if (crossing) return false;
  for (const Point& p : boundary_samples(inner)) {
    if (!polygon_contains(outer, p) &&
        polygon_boundary_distance(outer, p) > eps)
      return false;
  }
  return true;
}

}  // namespace detail

/// RCC8 over two simple polygon regions. eps widens boundaries into bands so
/// pixel-derived outlines can actually touch: EQ when each boundary stays
/// within the other's band, containment splits into TPP/NTPP by boundary
/// contact, interiors overlapping partially is PO, boundary contact alone is
/// EC, and DC otherwise.
inline Rcc8 rcc8_regions(const std::vector<Point>& a,
                         const std::vector<Point>& b, double eps = 1.0) {
  require(a.size() >= 3 && b.size() >= 3, "rcc8: degenerate region");
  require(std::abs(signed_area(a)) > 0 && std::abs(signed_area(b)) > 0,
          "rcc8: zero-area region");
  require(eps >= 0.0, "rcc8: eps must be >= 0");

  const bool crossing = detail::boundaries_cross(a, b);
  const bool a_in_b = detail::region_inside(a, b, eps, crossing);
  const bool b_in_a = detail::region_inside(b, a, eps, crossing);
  const double bdist = detail::boundary_boundary_distance(a, b);
  const bool contact = bdist <= eps;

  if (a_in_b && b_in_a) return Rcc8::EQ;
  if (a_in_b) return contact ? Rcc8::TPP : Rcc8::NTPP;
  if (b_in_a) return contact ? Rcc8::TPPi : Rcc8::NTPPi;

  bool interiors_overlap = crossing;
  if (!interiors_overlap) {
    for (const Point& p : detail::boundary_samples(a))
      if (detail::strictly_inside(b, p, eps)) {
        interiors_overlap = true;
        break;
      }
  }
  if (!interiors_overlap) {
    for (const Point& p : detail::boundary_samples(b))
      if (detail::strictly_inside(a, p, eps)) {
        interiors_overlap = true;
        break;
      }
  }
  if (interiors_overlap) return Rcc8::PO;
  return contact ? Rcc8::EC : Rcc8::DC;
}

/// The region a glyph occupies for topology purposes: its largest closed
/// outline when it has one (detection boxes, masks, ring strokes), else its
/// bounding box.
inline std::vector<Point> glyph_region(const Glyph& g) {
  const Polyline* best = nullptr;
  double best_area = 0.0;
  for (const Polyline& s : g.strokes) {
    if (!s.closed || s.points.size() < 3) continue;
    const double area = std::abs(signed_area(s.points));
    if (area > best_area) {
      best_area = area;
      best = &s;
    }
  }
  if (best) return best->points;
  Rect r = g.bbox;
  // Thin glyphs (a bare horizontal stroke) still need a usable region.
  if (r.width() < 1.0) r.x1 = r.x0 + 1.0;
  if (r.height() < 1.0) r.y1 = r.y0 + 1.0;
  return {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
}

inline Rcc8 rcc8(const Glyph& a, const Glyph& b, double eps = 1.0) {
  return rcc8_regions(glyph_region(a), glyph_region(b), eps);
}

/// Qualitative direction flags; a guard band proportional to the mean
/// extent suppresses unreliable calls near alignment.
struct PositionalRelation {
  bool above = false, below = false, left_of = false, right_of = false;
};

inline PositionalRelation positional(const Glyph& a, const Glyph& b,
                                     double gap_ratio = 0.1) {
  require(gap_ratio >= 0.0, "positional: gap_ratio must be >= 0");
  PositionalRelation r;
  const Point ca = a.bbox.center(), cb = b.bbox.center();
  const double vguard = gap_ratio * (a.bbox.height() + b.bbox.height()) / 2.0;
  const double hguard = gap_ratio * (a.bbox.width() + b.bbox.width()) / 2.0;
  if (ca.y < cb.y - vguard) r.above = true;
  if (ca.y > cb.y + vguard) r.below = true;
  if (ca.x < cb.x - hguard) r.left_of = true;
  if (ca.x > cb.x + hguard) r.right_of = true;
  return r;
}

enum class SizeRelation { MuchSmaller, Smaller, Similar, Larger, MuchLarger };

inline const char* to_string(SizeRelation s) {
  switch (s) {
    case SizeRelation::MuchSmaller: return "muchSmaller";
    case SizeRelation::Smaller: return "smaller";
    case SizeRelation::Similar: return "similar";
    case SizeRelation::Larger: return "larger";
    case SizeRelation::MuchLarger: return "muchLarger";
  }
  return "similar";
}

/// Area-ratio buckets, symmetric in log space so rel(a,b) always mirrors
/// rel(b,a).
inline SizeRelation relative_area_ratio(double ratio) {
  require(ratio > 0.0, "relative_area: areas must be positive");
  if (ratio < 0.25) return SizeRelation::MuchSmaller;
  if (ratio < 0.8) return SizeRelation::Smaller;
  if (ratio <= 1.25) return SizeRelation::Similar;
  if (ratio <= 4.0) return SizeRelation::Larger;
  return SizeRelation::MuchLarger;
}

inline double glyph_area(const Glyph& g) {
  const double a = std::abs(signed_area(glyph_region(g)));
  return std::max(a, 1.0);
}

inline SizeRelation relative_area(const Glyph& a, const Glyph& b) {
  return relative_area_ratio(glyph_area(a) / glyph_area(b));
}

struct SceneParams {
  double rcc8_eps = 1.0;
  double gap_ratio = 0.1;
  double proximity_factor = 2.0;  // keep DC pairs within this x mean diagonal
};

namespace detail {

inline void emit_pair_facts(CaseDescription& c, const Glyph& a,
                            const Glyph& b, Rcc8 rel,
                            const SceneParams& p) {
  c.expressions.push_back(make_expr(to_string(rel),
                                    {entity_arg(a.id), entity_arg(b.id)},
                                    rcc8_symmetric(rel)));
  const PositionalRelation pos = positional(a, b, p.gap_ratio);
  if (pos.above)
    c.expressions.push_back(
        make_expr("above", {entity_arg(a.id), entity_arg(b.id)}));
  if (pos.below)
    c.expressions.push_back(
        make_expr("below", {entity_arg(a.id), entity_arg(b.id)}));
  if (pos.left_of)
    c.expressions.push_back(
        make_expr("leftOf", {entity_arg(a.id), entity_arg(b.id)}));
  if (pos.right_of)
    c.expressions.push_back(
        make_expr("rightOf", {entity_arg(a.id), entity_arg(b.id)}));
  const SizeRelation sz = relative_area(a, b);
  c.expressions.push_back(make_expr(to_string(sz),
                                    {entity_arg(a.id), entity_arg(b.id)},
                                    sz == SizeRelation::Similar));
}

}  // namespace detail

/// Scene encoding: one entity per glyph, isa facts for labels, and pair
/// relations for every ordered pair that is not a far-apart DC pair (far =
/// bbox centers more than proximity_factor x the pair's mean bbox diagonal
/// apart).
inline CaseDescription encode_scene(const Sketch& s,
                                    const SceneParams& p = {},
                                    std::string provenance = "scene") {
  require(!s.glyphs.empty(), "encode_scene: empty sketch");
  CaseDescription c;
  c.provenance = std::move(provenance);

  for (const Glyph& g : s.glyphs) {
    c.entities.push_back({g.id, EntityKind::Glyph});
    if (g.label)
      c.expressions.push_back(
          make_expr("isa:" + g.label->symbol, {entity_arg(g.id)}));
  }

  for (std::size_t i = 0; i < s.glyphs.size(); ++i) {
    for (std::size_t j = 0; j < s.glyphs.size(); ++j) {
      if (i == j) continue;
      const Glyph& a = s.glyphs[i];
      const Glyph& b = s.glyphs[j];
      const Rcc8 rel = rcc8(a, b, p.rcc8_eps);
      if (rel == Rcc8::DC) {
        const double mean_diag = (a.bbox.diagonal() + b.bbox.diagonal()) / 2.0;
        if (distance(a.bbox.center(), b.bbox.center()) >
            p.proximity_factor * mean_diag)
          continue;
      }
      detail::emit_pair_facts(c, a, b, rel, p);
    }
  }
  return canonicalize(c);
}

/// Pair encoding for predicate learning: both glyphs must be labeled, the
/// argument roles are marked with unary facts, and all pair relations are
/// emitted in both directions with no sparsification.
inline CaseDescription encode_pair(const Glyph& subject, const Glyph& object,
                                   const SceneParams& p = {},
                                   std::string provenance = "pair") {
  require(subject.label.has_value() && object.label.has_value(),
          "encode_pair: both glyphs must be labeled");
  CaseDescription c;
  c.provenance = std::move(provenance);
  c.entities.push_back({subject.id, EntityKind::Glyph});
  c.entities.push_back({object.id, EntityKind::Glyph});
  c.expressions.push_back(
      make_expr("isa:" + subject.label->symbol, {entity_arg(subject.id)}));
  c.expressions.push_back(
      make_expr("isa:" + object.label->symbol, {entity_arg(object.id)}));
  c.expressions.push_back(make_expr("subjectRole", {entity_arg(subject.id)}));
  c.expressions.push_back(make_expr("objectRole", {entity_arg(object.id)}));

  detail::emit_pair_facts(c, subject, object, rcc8(subject, object, p.rcc8_eps),
                          p);
  detail::emit_pair_facts(c, object, subject, rcc8(object, subject, p.rcc8_eps),
                          p);
  return canonicalize(c);
}

}  // namespace hps

#endif  // HPS_RELATIONS_HPP
