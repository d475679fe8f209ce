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

#ifndef HPS_PIPELINE_HPP
#define HPS_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "hps/glyph.hpp"
#include "hps/image.hpp"
#include "hps/shape.hpp"
#include "hps/strokes.hpp"
#include "hps/thinning.hpp"

namespace hps {

/// Bitmap-to-ink settings. The defaults are tuned for white-on-black digit
/// bitmaps; dark-on-bright scans flip the polarity.
struct PipelineParams {
  int max_dim = 300;
  int threshold = 128;
  InkPolarity polarity = InkPolarity::BrightInk;
  double simplify_eps = 1.5;
  double group_gap = -1.0;  // < 0: whole image is one glyph
  ShapeParams shape;
};

/// Intermediate products of vectorization, kept around for debugging and
/// the CLI's skeleton dump.
struct VectorizeResult {
  GrayImage resized;
  BinaryImage binary;
  BinaryImage skeleton;
  std::vector<Polyline> strokes;
};

/// resize -> blur -> binarize -> thin -> trace -> simplify.
inline VectorizeResult vectorize_image(const GrayImage& img,
                                       const PipelineParams& p = {}) {
  VectorizeResult r;
  r.resized = resize_below(img, p.max_dim);
  r.binary = binarize(blur(r.resized), p.threshold, p.polarity);
  r.skeleton = thin(r.binary);
  for (const Polyline& stroke : extract_strokes(r.skeleton)) {
    if (stroke.points.size() == 1) {
      r.strokes.push_back(stroke);  // dots have nothing to simplify
      continue;
    }
    r.strokes.push_back(simplify(stroke, p.simplify_eps));
  }
  return r;
}

/// Vectorize a single-object bitmap into one glyph (the MNIST-style path).
inline Glyph glyph_from_image(const GrayImage& img,
                              std::optional<ConceptLabel> label,
                              std::string id, const PipelineParams& p = {}) {
  VectorizeResult r = vectorize_image(img, p);
  require(!r.strokes.empty(), "no ink found in image");
  return glyph_from_strokes(std::move(r.strokes), std::move(label),
                            std::move(id));
}

/// Vectorize a bitmap into a sketch; strokes are grouped into glyphs by
/// proximity when group_gap >= 0, otherwise everything is one glyph.
inline Sketch sketch_from_image(const GrayImage& img,
                                const PipelineParams& p = {},
                                const std::string& id_prefix = "g") {
  VectorizeResult r = vectorize_image(img, p);
  require(!r.strokes.empty(), "no ink found in image");
  Sketch s;
  s.canvas_width = r.resized.width;
  s.canvas_height = r.resized.height;
  if (p.group_gap < 0.0) {
    s.glyphs.push_back(
        glyph_from_strokes(std::move(r.strokes), std::nullopt, id_prefix + "0"));
  } else {
    s.glyphs = group_strokes(r.strokes, p.group_gap, id_prefix);
  }
  return s;
}

}  // namespace hps

#endif  // HPS_PIPELINE_HPP
