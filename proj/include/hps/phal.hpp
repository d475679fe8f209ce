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

#ifndef HPS_PHAL_HPP
#define HPS_PHAL_HPP

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hps/relations.hpp"
#include "hps/sage.hpp"
#include "hps/shape.hpp"

namespace hps {

/// One level of the coarse-to-fine decomposition: the level's own case plus
/// one case per part (cycle) at that level.
struct LevelDescription {
  int level = 1;  // 1..3
  CaseDescription level_case;
  std::vector<CaseDescription> part_cases;
};

/// Per-concept learning state: one pool per decomposition level.
struct HierarchicalConcept {
  ConceptLabel label;
  std::array<GeneralizationPool, 3> pools;

  explicit HierarchicalConcept(ConceptLabel c, double threshold = 0.8,
                               double prune_cutoff = 0.2)
      : label(c) {
    for (int i = 0; i < 3; ++i) {
      pools[i].label = c;
      pools[i].threshold = threshold;
      pools[i].prune_cutoff = prune_cutoff;
    }
  }
};

struct CascadeParams {
  int top_k = 10;  // concepts surviving level 1
  int top_q = 5;   // concepts surviving level 2
  int top_v = 3;   // concepts surviving level 3
  std::array<double, 3> level_weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double distinct_bonus = 0.1;
  int fac_breadth = 3;  // level scores average this many best reminders

  void validate() const {
    require(top_k >= top_q && top_q >= top_v && top_v >= 1,
            "cascade: K >= Q >= V >= 1 required");
  }
};

/// Decompose a glyph by cycle depth. Level i covers the cycles at depth i
/// (with their segments), plus positional and relative-size relations
/// between sibling cycles; each cycle also yields a standalone part case.
/// A glyph with no cycles at all produces a single level-1 description of
/// its open edges.
inline std::vector<LevelDescription> decompose(const Glyph& g,
                                               const ShapeParams& sp = {},
                                               double gap_ratio = 0.1) {
  const ShapeAnalysis a = analyze_shape(g, sp);

  std::vector<LevelDescription> out;
  if (a.cycles.empty()) {
    LevelDescription l1;
    l1.level = 1;
    std::vector<int> segs(a.segments.size());
    for (std::size_t i = 0; i < segs.size(); ++i) segs[i] = static_cast<int>(i);
    l1.level_case = detail::encode_shape_subset(a, segs, {}, g.id + "/L1");
    out.push_back(std::move(l1));
    return out;
  }

  for (int depth = 1; depth <= 3; ++depth) {
    std::vector<int> cycs;
    for (std::size_t i = 0; i < a.cycles.size(); ++i)
      if (a.tree.nodes[i].depth == depth) cycs.push_back(static_cast<int>(i));
    if (cycs.empty()) {
      if (depth == 1) continue;  // nothing at depth 1 cannot happen w/ cycles
      break;                     // deeper levels are empty too
    }

    std::vector<int> segs;
    std::vector<char> seen(a.segments.size(), 0);
    for (int ci : cycs)
      for (const auto& [sid, fwd] : a.cycles[ci].segments)
        if (!seen[sid]) {
          seen[sid] = 1;
          segs.push_back(sid);
        }
    std::sort(segs.begin(), segs.end());

    LevelDescription ld;
    ld.level = depth;
    ld.level_case = detail::encode_shape_subset(
        a, segs, cycs, g.id + "/L" + std::to_string(depth));

    // Inter-part relations between sibling cycles (same parent).
    for (std::size_t x = 0; x < cycs.size(); ++x) {
      for (std::size_t y = 0; y < cycs.size(); ++y) {
        if (x == y) continue;
        const int ci = cycs[x], cj = cycs[y];
        if (a.tree.nodes[ci].parent != a.tree.nodes[cj].parent) continue;
        const std::string ei = "c" + std::to_string(ci);
        const std::string ej = "c" + std::to_string(cj);
        Polyline bi, bj;
        bi.points = a.cycles[ci].boundary;
        bj.points = a.cycles[cj].boundary;
        const Rect ri = bi.bbox(), rj = bj.bbox();
        const Point pi = ri.center(), pj = rj.center();
        const double vg = gap_ratio * (ri.height() + rj.height()) / 2.0;
        const double hg = gap_ratio * (ri.width() + rj.width()) / 2.0;
        auto& exprs = ld.level_case.expressions;
        if (pi.y < pj.y - vg)
          exprs.push_back(make_expr("above", {entity_arg(ei), entity_arg(ej)}));
        if (pi.y > pj.y + vg)
          exprs.push_back(make_expr("below", {entity_arg(ei), entity_arg(ej)}));
        if (pi.x < pj.x - hg)
          exprs.push_back(make_expr("leftOf", {entity_arg(ei), entity_arg(ej)}));
        if (pi.x > pj.x + hg)
          exprs.push_back(
              make_expr("rightOf", {entity_arg(ei), entity_arg(ej)}));
        const SizeRelation sz =
            relative_area_ratio(a.cycles[ci].area / a.cycles[cj].area);
        exprs.push_back(make_expr(to_string(sz),
                                  {entity_arg(ei), entity_arg(ej)},
                                  sz == SizeRelation::Similar));
      }
    }
    ld.level_case = canonicalize(ld.level_case);

    for (int ci : cycs) {
      std::vector<int> part_segs;
      for (const auto& [sid, fwd] : a.cycles[ci].segments)
        part_segs.push_back(sid);
      std::sort(part_segs.begin(), part_segs.end());
      part_segs.erase(std::unique(part_segs.begin(), part_segs.end()),
                      part_segs.end());
      ld.part_cases.push_back(detail::encode_shape_subset(
          a, part_segs, {ci},
          g.id + "/L" + std::to_string(depth) + "/p" + std::to_string(ci)));
    }
    out.push_back(std::move(ld));
  }
  return out;
}

/// Train one labeled glyph into its concept: each present level's case goes
/// to that level's pool.
inline void train(HierarchicalConcept& hc,
                  const std::vector<LevelDescription>& levels,
                  const SmeParams& params = {}) {
  for (const LevelDescription& ld : levels)
    add_example(hc.pools[ld.level - 1], ld.level_case, params);
}

inline void train(HierarchicalConcept& hc, const Glyph& g,
                  const ShapeParams& sp = {}, const SmeParams& params = {}) {
  train(hc, decompose(g, sp), params);
}

struct CascadeStage {
  int level = 1;
  std::vector<std::pair<std::string, double>> scores;  // survivors, desc
};

struct CascadeResult {
  ConceptLabel label;
  double score = 0.0;
  std::vector<CascadeStage> trace;
};

namespace detail {

/// Mean of the best fac_breadth FAC scores of the probe against one pool,
/// 0 for an empty pool.
inline double pool_level_score(const CaseDescription& probe,
                               const GeneralizationPool& pool, int breadth,
                               const SmeParams& params) {
  if (pool.empty()) return 0.0;
  const CaseLibrary lib = pool.library_view();
  const auto ranked = fac(probe, mac(probe, lib, breadth), params);
  double sum = 0.0;
  int n = 0;
  for (const FacResult& r : ranked) {
    if (n == breadth) break;
    sum += r.score;
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

}  // namespace detail

/// Coarse-to-fine classification: level-1 scores pick the top K concepts,
/// level 2 narrows those to Q, level 3 to V; the verdict combines the
/// per-level scores with a bias for probes whose parts retrieve distinct
/// items from the winning concept's pools.
inline CascadeResult classify_cascade(
    const std::vector<LevelDescription>& probe_levels,
    const std::vector<HierarchicalConcept>& concepts,
    const CascadeParams& p = {}, const SmeParams& params = {}) {
  p.validate();
  require(!concepts.empty(), "classify_cascade: no trained concepts");

  const CaseDescription* level_case[3] = {nullptr, nullptr, nullptr};
  for (const LevelDescription& ld : probe_levels)
    level_case[ld.level - 1] = &ld.level_case;

  CascadeResult result;
  std::vector<std::string> survivors;
  for (const HierarchicalConcept& hc : concepts)
    survivors.push_back(hc.label.symbol);
  std::sort(survivors.begin(), survivors.end());

  auto concept_by_name = [&](const std::string& name) {
    for (const HierarchicalConcept& hc : concepts)
      if (hc.label.symbol == name) return &hc;
    throw invariant_violation("cascade: unknown concept " + name);
  };

  std::map<std::string, std::array<double, 3>> level_scores;
  for (const std::string& s : survivors) level_scores[s] = {0.0, 0.0, 0.0};

  const int stage_keep[3] = {p.top_k, p.top_q, p.top_v};
  for (int level = 0; level < 3; ++level) {
    CascadeStage stage;
    stage.level = level + 1;
    if (level_case[level] != nullptr) {
      std::vector<std::pair<std::string, double>> scored;
      for (const std::string& s : survivors) {
        const double sc = detail::pool_level_score(
            *level_case[level], concept_by_name(s)->pools[level],
            p.fac_breadth, params);
        level_scores[s][level] = sc;
        scored.emplace_back(s, sc);
      }
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      if (scored.size() > static_cast<std::size_t>(stage_keep[level]))
        scored.resize(stage_keep[level]);
      survivors.clear();
      for (const auto& [s, sc] : scored) survivors.push_back(s);
      std::sort(survivors.begin(), survivors.end());
      stage.scores = std::move(scored);
    } else {
      // The probe has no description at this level: no evidence, no pruning.
      for (const std::string& s : survivors) stage.scores.emplace_back(s, 0.0);
    }
    result.trace.push_back(std::move(stage));
  }

  // Distinct-retrieval bias: the fraction of probe parts whose best
  // retrieval inside this concept's pools is not shared with another part.
  auto distinct_fraction = [&](const HierarchicalConcept& hc) {
    std::vector<std::string> retrieved;
    std::size_t parts = 0;
    for (const LevelDescription& ld : probe_levels) {
      for (const CaseDescription& part : ld.part_cases) {
        ++parts;
        const GeneralizationPool& pool = hc.pools[ld.level - 1];
        if (pool.empty()) {
          retrieved.push_back("");  // no retrieval; never distinct
          continue;
        }
        const auto best =
            retrieve(part, pool.library_view(), p.fac_breadth, params);
        retrieved.push_back(best ? best->item_id : "");
      }
    }
    if (parts == 0) return 0.0;
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < retrieved.size(); ++i) {
      if (retrieved[i].empty()) continue;
      bool unique = true;
      for (std::size_t j = 0; j < retrieved.size(); ++j)
        if (i != j && retrieved[j] == retrieved[i]) unique = false;
      if (unique) ++distinct;
    }
    return static_cast<double>(distinct) / static_cast<double>(parts);
  };

  std::string best_name;
  double best_score = -1.0;
  CascadeStage final_stage;
  final_stage.level = 3;
  for (const std::string& s : survivors) {
    const auto& ls = level_scores[s];
    double combined = 0.0;
    for (int i = 0; i < 3; ++i) combined += p.level_weights[i] * ls[i];
    if (p.distinct_bonus > 0.0)
      combined += p.distinct_bonus * distinct_fraction(*concept_by_name(s));
    final_stage.scores.emplace_back(s, combined);
    if (combined > best_score ||
        (combined == best_score && s < best_name)) {
      best_score = combined;
      best_name = s;
    }
  }
  std::sort(final_stage.scores.begin(), final_stage.scores.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  result.trace.push_back(std::move(final_stage));

  result.label = ConceptLabel(best_name);
  result.score = best_score;
  return result;
}

}  // namespace hps

#endif  // HPS_PHAL_HPP
