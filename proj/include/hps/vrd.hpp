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

#ifndef HPS_VRD_HPP
#define HPS_VRD_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hps/glyph.hpp"
#include "hps/relations.hpp"
#include "hps/sage.hpp"

namespace hps {

/// Ground-truth relation: subject and object detections plus the predicate.
struct RelationTriple {
  Detection subject;
  Detection object;
  ConceptLabel predicate;
  std::string image_id;
};

struct RankedPrediction {
  Rect subject_box;
  Rect object_box;
  ConceptLabel subject_label;
  ConceptLabel object_label;
  ConceptLabel predicate;
  double score = 0.0;
};

/// One training pass: every triple's pair encoding goes into its
/// predicate's pool (created on first sight). Items are examined exactly
/// once.
inline void train_predicates(const std::vector<RelationTriple>& triples,
                             std::map<std::string, GeneralizationPool>& pools,
                             const SceneParams& sp = {},
                             const SmeParams& params = {}) {
  for (const RelationTriple& t : triples) {
    auto [it, created] = pools.try_emplace(t.predicate.symbol);
    if (created) it->second.label = t.predicate;
    const Glyph s = glyph_from_detection(t.subject, "subj");
    const Glyph o = glyph_from_detection(t.object, "obj");
    add_example(it->second, encode_pair(s, o, sp, t.image_id), params);
  }
}

/// Score every ordered detection pair against every predicate pool; each
/// pool contributes its best retrieval. Deterministic order: score
/// descending, then subject index, object index, predicate.
inline std::vector<RankedPrediction> predict(
    const std::vector<Detection>& detections,
    const std::map<std::string, GeneralizationPool>& pools,
    const SceneParams& sp = {}, const SmeParams& params = {}) {
  require(detections.size() >= 2, "predict: need at least two detections");

  struct Scored {
    RankedPrediction pred;
    std::size_t si, oi;
  };
  std::vector<Scored> scored;

  std::vector<std::pair<const std::string*, CaseLibrary>> views;
  for (const auto& [name, pool] : pools)
    if (!pool.empty()) views.emplace_back(&name, pool.library_view());

  for (std::size_t i = 0; i < detections.size(); ++i) {
    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (i == j) continue;
      const Glyph s = glyph_from_detection(detections[i], "subj");
      const Glyph o = glyph_from_detection(detections[j], "obj");
      const CaseDescription pair_case = encode_pair(s, o, sp);
      for (const auto& [name, lib] : views) {
        const auto best = retrieve(pair_case, lib, 3, params);
        if (!best) continue;
        RankedPrediction rp;
        rp.subject_box = detections[i].bbox;
        rp.object_box = detections[j].bbox;
        rp.subject_label = detections[i].label;
        rp.object_label = detections[j].label;
        rp.predicate = ConceptLabel(*name);
        rp.score = best->score;
        scored.push_back({std::move(rp), i, j});
      }
    }
  }

  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.pred.score != b.pred.score) return a.pred.score > b.pred.score;
    if (a.si != b.si) return a.si < b.si;
    if (a.oi != b.oi) return a.oi < b.oi;
    return a.pred.predicate.symbol < b.pred.predicate.symbol;
  });

  std::vector<RankedPrediction> out;
  out.reserve(scored.size());
  for (Scored& s : scored) out.push_back(std::move(s.pred));
  return out;
}

namespace detail {

inline bool same_box(const Rect& a, const Rect& b) {
  return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
}

}  // namespace detail

/// recall@k over per-image prediction lists: the percentage of ground-truth
/// triples whose (subject box, object box, predicate) appears within the
/// top k predictions of their image. No ground truth -> no value.
inline std::optional<double> recall_at_k(
    const std::map<std::string, std::vector<RankedPrediction>>& predictions,
    const std::vector<RelationTriple>& ground_truth, int k) {
  require(k >= 1, "recall_at_k: k must be >= 1");
  if (ground_truth.empty()) return std::nullopt;

  std::size_t matched = 0;
  for (const RelationTriple& gt : ground_truth) {
    auto it = predictions.find(gt.image_id);
    if (it == predictions.end()) continue;
    const auto& preds = it->second;
    const std::size_t top = std::min<std::size_t>(preds.size(), k);
    for (std::size_t i = 0; i < top; ++i) {
      const RankedPrediction& p = preds[i];
      if (p.predicate == gt.predicate &&
          detail::same_box(p.subject_box, gt.subject.bbox) &&
          detail::same_box(p.object_box, gt.object.bbox)) {
        ++matched;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(matched) /
         static_cast<double>(ground_truth.size());
}

}  // namespace hps

#endif  // HPS_VRD_HPP
