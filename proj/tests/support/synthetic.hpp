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

// Deterministic synthetic fixtures shared by the unit and acceptance
// suites: handwritten-style digit bitmaps (IDX-serializable), random blobs,
// random flat cases, part-structured glyphs, and relationship scenes.

#ifndef HPS_TESTS_SYNTHETIC_HPP
#define HPS_TESTS_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hps/case.hpp"
#include "hps/geometry.hpp"
#include "hps/glyph.hpp"
#include "hps/image.hpp"

namespace hps_tests {

using namespace hps;

// ---------------------------------------------------------------------------
// IDX writers (the library only reads IDX; tests need to produce it)
// ---------------------------------------------------------------------------

inline void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_idx_images(const std::string& path,
                             const std::vector<GrayImage>& images) {
  std::ofstream out(path, std::ios::binary);
  write_be32(out, 0x00000803);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, images.empty() ? 0 : images[0].height);
  write_be32(out, images.empty() ? 0 : images[0].width);
  for (const GrayImage& img : images)
    out.write(reinterpret_cast<const char*>(img.samples.data()),
              static_cast<std::streamsize>(img.samples.size()));
}

inline void write_idx_labels(const std::string& path,
                             const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  write_be32(out, 0x00000801);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

// ---------------------------------------------------------------------------
// Handwritten-style digits
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Point> arc(Point center, double rx, double ry, double a0,
                              double a1, int steps) {
  std::vector<Point> pts;
  for (int i = 0; i <= steps; ++i) {
    const double t = a0 + (a1 - a0) * i / steps;
    pts.push_back({center.x + rx * std::cos(t), center.y + ry * std::sin(t)});
  }
  return pts;
}

/// Stroke templates per digit on the unit square (y grows down).
inline std::vector<std::vector<Point>> digit_template(int digit) {
  const double pi = std::numbers::pi;
  switch (digit) {
    case 0:
      return {arc({0.5, 0.5}, 0.27, 0.40, 0.0, 2 * pi, 24)};
    case 1:
      return {{{0.5, 0.08}, {0.5, 0.92}}};
    case 2: {
      auto top = arc({0.5, 0.28}, 0.24, 0.20, pi, 2 * pi, 10);
      top.push_back({0.26, 0.90});
      top.push_back({0.78, 0.90});
      return {top};
    }
    case 3: {
      auto upper = arc({0.45, 0.29}, 0.24, 0.21, -0.8 * pi, 0.5 * pi, 10);
      auto lower = arc({0.45, 0.70}, 0.27, 0.22, -0.5 * pi, 0.8 * pi, 10);
      upper.insert(upper.end(), lower.begin(), lower.end());
      return {upper};
    }
    case 4:
      return {{{0.62, 0.08}, {0.24, 0.58}, {0.82, 0.58}},
              {{0.66, 0.34}, {0.66, 0.92}}};
    case 5: {
      std::vector<Point> s{{0.74, 0.10}, {0.30, 0.10}, {0.30, 0.46}};
      auto bowl = arc({0.46, 0.67}, 0.26, 0.22, -0.5 * pi, 0.75 * pi, 10);
      s.insert(s.end(), bowl.begin(), bowl.end());
      return {s};
    }
    case 6: {
      std::vector<Point> s{{0.66, 0.08}, {0.40, 0.38}};
      auto loop = arc({0.50, 0.68}, 0.22, 0.22, -2.1, -2.1 + 2 * pi, 20);
      s.insert(s.end(), loop.begin(), loop.end());
      return {s};
    }
    case 7:
      return {{{0.24, 0.12}, {0.78, 0.12}, {0.42, 0.92}}};
    case 8:
      return {arc({0.5, 0.30}, 0.20, 0.20, 0.0, 2 * pi, 20),
              arc({0.5, 0.70}, 0.24, 0.21, 0.0, 2 * pi, 20)};
    case 9: {
      auto loop = arc({0.47, 0.32}, 0.21, 0.22, 0.0, 2 * pi, 20);
      return {loop, {{0.68, 0.34}, {0.62, 0.92}}};
    }
    default:
      throw std::out_of_range("digit must be 0..9");
  }
}

inline void stamp_disc(GrayImage& img, double cx, double cy, double r) {
  const int x0 = std::max(0, static_cast<int>(cx - r - 1));
  const int x1 = std::min(img.width - 1, static_cast<int>(cx + r + 1));
  const int y0 = std::max(0, static_cast<int>(cy - r - 1));
  const int y1 = std::min(img.height - 1, static_cast<int>(cy + r + 1));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
        img.at(x, y) = 255;
}

}  // namespace detail

struct DigitStyle {
  double rot_sigma = 0.10;     // radians
  double scale_lo = 0.82, scale_hi = 1.0;
  double jitter_sigma = 0.35;  // px, per control point
  double shift = 1.5;          // px, whole-digit translation
  double thickness = 1.1;      // stroke radius, px
  int size = 28;
};

/// One deterministic digit bitmap; (digit, index) seeds the variation.
inline GrayImage render_digit(int digit, unsigned index,
                              const DigitStyle& style = {}) {
  std::seed_seq seq{static_cast<unsigned>(digit), index, 0xD161u};
  std::mt19937 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const double rot = gauss(rng) * style.rot_sigma;
  const double scale =
      style.scale_lo + (style.scale_hi - style.scale_lo) * uni(rng);
  const double dx = (uni(rng) * 2 - 1) * style.shift;
  const double dy = (uni(rng) * 2 - 1) * style.shift;
  const double ca = std::cos(rot), sa = std::sin(rot);
  const double box = style.size - 8.0;

  GrayImage img(style.size, style.size, 0);
  for (const auto& stroke : detail::digit_template(digit)) {
    std::vector<Point> pts;
    for (const Point& p : stroke) {
      // unit -> centered -> rotate/scale -> pixel grid (+ jitter)
      const double ux = (p.x - 0.5) * scale, uy = (p.y - 0.5) * scale;
      const double rx = ux * ca - uy * sa, ry = ux * sa + uy * ca;
      pts.push_back({(rx + 0.5) * box + 4.0 + dx +
                         gauss(rng) * style.jitter_sigma,
                     (ry + 0.5) * box + 4.0 + dy +
                         gauss(rng) * style.jitter_sigma});
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double len = distance(pts[i - 1], pts[i]);
      const int steps = std::max(1, static_cast<int>(len * 2));
      for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        detail::stamp_disc(img, pts[i - 1].x + (pts[i].x - pts[i - 1].x) * t,
                           pts[i - 1].y + (pts[i].y - pts[i - 1].y) * t,
                           style.thickness);
      }
    }
  }
  return img;
}

/// Write a digit dataset as an IDX pair: `count` images per digit class.
inline void write_digit_idx(const std::string& images_path,
                            const std::string& labels_path, int per_class,
                            unsigned index_offset = 0,
                            const DigitStyle& style = {}) {
  std::vector<GrayImage> images;
  std::vector<std::uint8_t> labels;
  for (int n = 0; n < per_class; ++n)
    for (int d = 0; d <= 9; ++d) {
      images.push_back(render_digit(d, index_offset + n, style));
      labels.push_back(static_cast<std::uint8_t>(d));
    }
  write_idx_images(images_path, images);
  write_idx_labels(labels_path, labels);
}

// ---------------------------------------------------------------------------
// Random blobs (geometry suites)
// ---------------------------------------------------------------------------

inline BinaryImage random_blob_image(std::mt19937& rng, int w = 48,
                                     int h = 48) {
  BinaryImage img(w, h);
  std::uniform_int_distribution<int> nblobs(1, 4);
  std::uniform_real_distribution<double> ux(4, w - 5), uy(4, h - 5);
  std::uniform_real_distribution<double> ur(1.5, 9.0);
  std::uniform_real_distribution<double> u01(0, 1);
  const int n = nblobs(rng);
  for (int b = 0; b < n; ++b) {
    const double cx = ux(rng), cy = uy(rng);
    if (u01(rng) < 0.5) {
      const double r = ur(rng);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
            img.set(x, y, true);
    } else {
      const double rw = ur(rng), rh = ur(rng);
      for (int y = std::max(0, int(cy - rh)); y <= std::min(h - 1, int(cy + rh)); ++y)
        for (int x = std::max(0, int(cx - rw)); x <= std::min(w - 1, int(cx + rw)); ++x)
          img.set(x, y, true);
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Random flat cases (SME / retrieval / SAGE suites)
// ---------------------------------------------------------------------------

struct CaseGenOptions {
  int max_exprs = 8;
  int n_entities = 4;
  bool allow_nesting = false;
};

inline CaseDescription random_flat_case(std::mt19937& rng,
                                        const CaseGenOptions& opt = {},
                                        const std::string& prov = "rand") {
  static const std::vector<std::pair<std::string, int>> vocab = {
      {"above", 2},  {"leftOf", 2}, {"touches", 2}, {"inside", 2},
      {"big", 1},    {"small", 1},  {"round", 1},   {"dark", 1}};
  std::uniform_int_distribution<int> nexpr(1, opt.max_exprs);
  std::uniform_int_distribution<int> fpick(0, static_cast<int>(vocab.size()) - 1);
  std::uniform_int_distribution<int> epick(0, opt.n_entities - 1);
  std::uniform_real_distribution<double> u01(0, 1);

  CaseDescription c;
  c.provenance = prov;
  for (int i = 0; i < opt.n_entities; ++i)
    c.entities.push_back({"e" + std::to_string(i), EntityKind::Glyph});

  const int n = nexpr(rng);
  for (int i = 0; i < n; ++i) {
    const auto& [functor, arity] = vocab[fpick(rng)];
    std::vector<ExprArg> args;
    for (int a = 0; a < arity; ++a)
      args.push_back(entity_arg("e" + std::to_string(epick(rng))));
    ExprPtr e = make_expr(functor, std::move(args),
                          functor == "touches");
    if (opt.allow_nesting && u01(rng) < 0.25) {
      std::vector<ExprArg> outer;
      outer.push_back(expr_arg(e));
      e = make_expr("because", std::move(outer));
    }
    c.expressions.push_back(std::move(e));
  }
  return canonicalize(c);
}

// ---------------------------------------------------------------------------
// Part-structured glyphs (hierarchical suites)
// ---------------------------------------------------------------------------

inline Polyline ring_square(Point center, double half) {
  Polyline p;
  p.closed = true;
  p.points = {{center.x - half, center.y - half},
              {center.x + half, center.y - half},
              {center.x + half, center.y + half},
              {center.x - half, center.y + half}};
  return p;
}

inline Polyline ring_circle(Point center, double r, int steps = 24) {
  Polyline p;
  p.closed = true;
  for (int i = 0; i < steps; ++i) {
    const double t = 2 * std::numbers::pi * i / steps;
    p.points.push_back({center.x + r * std::cos(t), center.y + r * std::sin(t)});
  }
  return p;
}

/// Five concepts with identical outer shape (a square) and distinguishing
/// inner parts; `variant` shifts and scales the whole glyph, which leaves
/// every qualitative fact unchanged.
inline Glyph part_concept_glyph(int concept_id, unsigned variant,
                                const std::string& id) {
  std::seed_seq seq{static_cast<unsigned>(concept_id), variant, 0xBEEFu};
  std::mt19937 rng(seq);
  std::uniform_real_distribution<double> u01(0, 1);
  const double s = 1.0 + 2.0 * u01(rng);        // uniform scale
  const double ox = 10.0 + 200.0 * u01(rng);    // translation
  const double oy = 10.0 + 200.0 * u01(rng);

  auto T = [&](Point p) { return Point{ox + s * p.x, oy + s * p.y}; };
  auto tline = [&](Polyline p) {
    for (Point& q : p.points) q = T(q);
    return p;
  };

  std::vector<Polyline> strokes;
  strokes.push_back(tline(ring_square({50, 50}, 48)));
  switch (concept_id) {
    case 0:  // one centered circle
      strokes.push_back(tline(ring_circle({50, 50}, 22)));
      break;
    case 1:  // two squares side by side
      strokes.push_back(tline(ring_square({28, 50}, 13)));
      strokes.push_back(tline(ring_square({72, 50}, 13)));
      break;
    case 2:  // two circles stacked
      strokes.push_back(tline(ring_circle({50, 27}, 13)));
      strokes.push_back(tline(ring_circle({50, 73}, 13)));
      break;
    case 3:  // square next to circle
      strokes.push_back(tline(ring_square({28, 50}, 13)));
      strokes.push_back(tline(ring_circle({72, 50}, 13)));
      break;
    case 4:  // three circles in a row
      strokes.push_back(tline(ring_circle({24, 50}, 9)));
      strokes.push_back(tline(ring_circle({50, 50}, 9)));
      strokes.push_back(tline(ring_circle({76, 50}, 9)));
      break;
    default:
      throw std::out_of_range("concept_id must be 0..4");
  }
  return glyph_from_strokes(std::move(strokes), std::nullopt, id);
}

// ---------------------------------------------------------------------------
// Synthetic relationship scenes (VRD suites)
// ---------------------------------------------------------------------------

struct SyntheticScene {
  std::string image_id;
  std::vector<Detection> detections;
  // (subject index, predicate, object index)
  std::vector<std::tuple<int, std::string, int>> triples;
};

/// Each predicate has a fixed label pair and a fixed qualitative geometry,
/// jittered metrically without crossing any qualitative boundary, so every
/// training case of a predicate is isomorphic and the best prediction for a
/// test pair is analytically known.
inline SyntheticScene synthetic_scene(int predicate_id, unsigned index,
                                      const std::string& image_id) {
  std::seed_seq seq{static_cast<unsigned>(predicate_id), index, 0x5CE4Eu};
  std::mt19937 rng(seq);
  std::uniform_real_distribution<double> u01(0, 1);
  const double jx = 40 * u01(rng), jy = 30 * u01(rng);

  SyntheticScene s;
  s.image_id = image_id;
  auto det = [&](double x0, double y0, double x1, double y1,
                 const std::string& label) {
    Detection d;
    d.bbox = {x0 + jx, y0 + jy, x1 + jx, y1 + jy};
    d.label = ConceptLabel(label);
    d.score = 1.0;
    return d;
  };

  switch (predicate_id) {
    case 0:  // wears: shirt strictly inside person, much smaller
      s.detections.push_back(det(100, 50, 200, 350, "person"));
      s.detections.push_back(det(125, 120, 175, 190, "shirt"));
      s.triples.emplace_back(0, "wears", 1);
      break;
    case 1:  // rides: person overlapping horse from above, smaller
      s.detections.push_back(det(120, 40, 220, 210, "person"));
      s.detections.push_back(det(80, 160, 300, 360, "horse"));
      s.triples.emplace_back(0, "rides", 1);
      break;
    case 2:  // on: lamp disjoint above table, much smaller
      s.detections.push_back(det(150, 40, 200, 100, "lamp"));
      s.detections.push_back(det(60, 130, 320, 330, "table"));
      s.triples.emplace_back(0, "on", 1);
      break;
    case 3:  // nextto: dog beside bike, near-disjoint, similar size
      s.detections.push_back(det(60, 100, 160, 240, "dog"));
      s.detections.push_back(det(185, 95, 290, 245, "bike"));
      s.triples.emplace_back(0, "nextto", 1);
      break;
    default:
      throw std::out_of_range("predicate_id must be 0..3");
  }
  return s;
}

}  // namespace hps_tests

#endif  // HPS_TESTS_SYNTHETIC_HPP
