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

#ifndef HPS_SAGE_HPP
#define HPS_SAGE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hps/case.hpp"
#include "hps/glyph.hpp"
#include "hps/retrieval.hpp"
#include "hps/sme.hpp"

namespace hps {

struct GeneralizedEntity {
  std::string id;  // "ge0", "ge1", ...
  EntityKind kind = EntityKind::Skolem;
};

struct GenExpression {
  ExprPtr expr;  // over generalized entities
  int count = 0; // examples whose best mapping aligned this statement
};

/// A probabilistic schema: statements with occurrence counts over
/// generalized entities. probability(statement) = count / n_examples.
struct Generalization {
  std::string id;
  std::vector<GenExpression> expressions;
  std::vector<GeneralizedEntity> entities;
  int n_examples = 0;

  /// The matchable view: expressions weighted by their probabilities.
  CaseDescription as_case() const {
    CaseDescription c;
    c.provenance = id;
    for (const GeneralizedEntity& e : entities)
      c.entities.push_back({e.id, e.kind});
    for (const GenExpression& ge : expressions) {
      c.expressions.push_back(ge.expr);
      c.weights.push_back(static_cast<double>(ge.count) / n_examples);
    }
    return canonicalize(c);
  }

  /// Label alternatives observed for one generalized entity, read off the
  /// surviving isa statements.
  std::map<std::string, int> label_counts(const std::string& entity_id) const {
    std::map<std::string, int> out;
    for (const GenExpression& ge : expressions) {
      if (ge.expr->functor.rfind("isa:", 0) != 0) continue;
      if (ge.expr->args.size() == 1 && ge.expr->args[0].is_entity() &&
          ge.expr->args[0].entity == entity_id)
        out[ge.expr->functor.substr(4)] += ge.count;
    }
    return out;
  }
};

namespace detail {

/// Rewrites an expression through an entity-renaming map; entities missing
/// from the map pass through unchanged.
inline ExprPtr rename_entities(const ExprPtr& e,
                               const std::map<std::string, std::string>& ren) {
  std::vector<ExprArg> args;
  for (const ExprArg& a : e->args) {
    if (a.is_entity()) {
      auto it = ren.find(a.entity);
      args.push_back(entity_arg(it != ren.end() ? it->second : a.entity));
    } else {
      args.push_back(expr_arg(rename_entities(a.sub, ren)));
    }
  }
  return make_expr(e->functor, std::move(args), e->symmetric);
}

inline void sort_gen_expressions(Generalization& g) {
  std::sort(g.expressions.begin(), g.expressions.end(),
            [](const GenExpression& a, const GenExpression& b) {
              return a.expr->key < b.expr->key;
            });
}

}  // namespace detail

/// Form a generalization from two cases whose best mapping clears the pool
/// threshold. Corresponding entities collapse into generalized entities;
/// aligned statements start at count 2, everything else at count 1.
inline Generalization merge_cases(const CaseDescription& a,
                                  const CaseDescription& b, double threshold,
                                  std::string gen_id,
                                  const SmeParams& params = {}) {
  const Mapping m = match(a, b, params).front();
  ensure(m.normalized_score >= threshold,
         "merge_cases called below threshold (caller bug)");

  Generalization g;
  g.id = std::move(gen_id);
  g.n_examples = 2;

  std::map<std::string, std::string> ren_a, ren_b;
  int next = 0;
  auto fresh = [&next]() { return "ge" + std::to_string(next++); };

  for (const Entity& e : a.entities) {
    const std::string ge = fresh();
    ren_a[e.id] = ge;
    g.entities.push_back({ge, e.kind});
    if (const std::string* t = m.target_for_entity(e.id)) ren_b[*t] = ge;
  }
  for (const Entity& e : b.entities) {
    if (ren_b.count(e.id)) continue;
    const std::string ge = fresh();
    ren_b[e.id] = ge;
    g.entities.push_back({ge, e.kind});
  }

  std::map<std::string, std::string> aligned_bt;  // base key -> target key
  for (const auto& [bk, tk] : m.expression_pairs) aligned_bt[bk] = tk;
  std::map<std::string, bool> target_aligned;
  for (const auto& [bk, tk] : m.expression_pairs) target_aligned[tk] = true;

  std::map<std::string, std::size_t> by_key;
  auto add_expr = [&](const ExprPtr& e, int count) {
    auto it = by_key.find(e->key);
    if (it != by_key.end()) {
      // Structurally identical after renaming: fold into one statement,
      // capped at one contribution per source example.
      g.expressions[it->second].count =
          std::min(g.n_examples, g.expressions[it->second].count + count);
      return;
    }
    by_key[e->key] = g.expressions.size();
    g.expressions.push_back({e, count});
  };

  for (const ExprPtr& e : a.expressions)
    add_expr(detail::rename_entities(e, ren_a),
             aligned_bt.count(e->key) ? 2 : 1);
  for (const ExprPtr& e : b.expressions) {
    if (target_aligned.count(e->key)) continue;  // stored via the base side
    add_expr(detail::rename_entities(e, ren_b), 1);
  }

  detail::sort_gen_expressions(g);
  return g;
}

/// Add one more example to a generalization: aligned statement counts grow,
/// novel statements enter at count 1, and statements whose probability
/// falls below prune_cutoff wear away.
inline void assimilate(Generalization& g, const CaseDescription& c,
                       double threshold, double prune_cutoff,
                       const SmeParams& params = {}) {
  const CaseDescription gen_case = g.as_case();
  const Mapping m = match(gen_case, c, params).front();
  ensure(m.normalized_score >= threshold,
         "assimilate called below threshold (caller bug)");

  g.n_examples += 1;

  std::map<std::string, std::string> aligned_bt;
  for (const auto& [bk, tk] : m.expression_pairs) aligned_bt[bk] = tk;
  std::map<std::string, bool> target_aligned;
  for (const auto& [bk, tk] : m.expression_pairs) target_aligned[tk] = true;

  std::map<std::string, std::size_t> by_key;
  for (std::size_t i = 0; i < g.expressions.size(); ++i)
    by_key[g.expressions[i].expr->key] = i;

  std::vector<char> touched(g.expressions.size(), 0);
  for (std::size_t i = 0; i < g.expressions.size(); ++i)
    if (aligned_bt.count(g.expressions[i].expr->key)) {
      g.expressions[i].count += 1;
      touched[i] = 1;
    }

  // Entity renaming for the incoming case: mapped entities take their
  // generalized ids, unmapped ones get fresh generalized entities.
  std::map<std::string, std::string> ren;
  for (const auto& [b, t] : m.entity_pairs) ren[t] = b;
  int next = static_cast<int>(g.entities.size());
  for (const Entity& e : c.entities) {
    if (ren.count(e.id)) continue;
    const std::string ge = "ge" + std::to_string(next++);
    ren[e.id] = ge;
    g.entities.push_back({ge, e.kind});
  }

  for (const ExprPtr& e : c.expressions) {
    if (target_aligned.count(e->key)) continue;
    const ExprPtr r = detail::rename_entities(e, ren);
    auto it = by_key.find(r->key);
    if (it != by_key.end()) {
      // Key collision with an unaligned statement counts as alignment.
      if (!touched[it->second]) {
        g.expressions[it->second].count += 1;
        touched[it->second] = 1;
      }
      continue;
    }
    by_key[r->key] = g.expressions.size();
    g.expressions.push_back({r, 1});
    touched.push_back(1);
  }

  // Wear away infrequent statements.
  std::vector<GenExpression> kept;
  for (const GenExpression& ge : g.expressions)
    if (static_cast<double>(ge.count) / g.n_examples >= prune_cutoff)
      kept.push_back(ge);
  g.expressions = std::move(kept);
  detail::sort_gen_expressions(g);
}

/// Per-concept store of generalizations and outliers, built incrementally.
struct GeneralizationPool {
  ConceptLabel label;
  double threshold = 0.8;
  double prune_cutoff = 0.2;
  std::vector<Generalization> generalizations;
  std::vector<std::pair<std::string, CaseDescription>> outliers;  // (id, case)
  int next_gen = 0;
  int next_outlier = 0;
  int examples_added = 0;

  bool empty() const { return generalizations.empty() && outliers.empty(); }
  std::size_t item_count() const {
    return generalizations.size() + outliers.size();
  }

  /// Retrieval view. Item ids are "<concept>/<local id>" so unions of pools
  /// keep ids unique and deterministic.
  CaseLibrary library_view() const {
    CaseLibrary lib;
    for (const Generalization& g : generalizations)
      lib.add(label.symbol + "/" + g.id, g.as_case(), label.symbol);
    for (const auto& [id, c] : outliers)
      lib.add(label.symbol + "/" + id, c, label.symbol);
    return lib;
  }

  /// Small pools retrieve exhaustively; larger ones fall back to MAC k=5.
  int retrieval_k() const {
    const std::size_t n = item_count();
    return n <= 50 ? static_cast<int>(std::max<std::size_t>(n, 1)) : 5;
  }
};

/// SAGE's incremental step. The new example retrieves within the pool; a
/// hit on an outlier forms a generalization, a hit on a generalization
/// assimilates, and a miss stores a new outlier.
inline void add_example(GeneralizationPool& pool, const CaseDescription& c,
                        const SmeParams& params = {}) {
  pool.examples_added += 1;
  std::optional<FacResult> best;
  if (!pool.empty())
    best = retrieve(c, pool.library_view(), pool.retrieval_k(), params);
  if (best && best->score >= pool.threshold) {
    const std::string local =
        best->item_id.substr(pool.label.symbol.size() + 1);
    if (local[0] == 'o') {
      // Outlier retrieved: remove it and merge the two cases.
      auto it = std::find_if(pool.outliers.begin(), pool.outliers.end(),
                             [&](const auto& o) { return o.first == local; });
      ensure(it != pool.outliers.end(), "retrieved outlier missing from pool");
      const CaseDescription outlier_case = it->second;
      pool.outliers.erase(it);
      pool.generalizations.push_back(
          merge_cases(outlier_case, c, pool.threshold,
                      "g" + std::to_string(pool.next_gen++), params));
    } else {
      auto it = std::find_if(pool.generalizations.begin(),
                             pool.generalizations.end(),
                             [&](const auto& g) { return g.id == local; });
      ensure(it != pool.generalizations.end(),
             "retrieved generalization missing from pool");
      assimilate(*it, c, pool.threshold, pool.prune_cutoff, params);
    }
  } else {
    pool.outliers.emplace_back("o" + std::to_string(pool.next_outlier++), c);
  }
}

struct Classification {
  ConceptLabel label;
  double score = 0.0;
  std::string item_id;  // retrieval the verdict came from
};

/// Union retrieval library over several pools. Build once when classifying
/// many probes; item owners carry the concept labels.
inline CaseLibrary union_library(const std::vector<GeneralizationPool>& pools) {
  CaseLibrary lib;
  for (const GeneralizationPool& pool : pools) {
    for (const Generalization& g : pool.generalizations)
      lib.add(pool.label.symbol + "/" + g.id, g.as_case(),
              pool.label.symbol);
    for (const auto& [id, c] : pool.outliers)
      lib.add(pool.label.symbol + "/" + id, c, pool.label.symbol);
  }
  return lib;
}

inline Classification classify(const CaseDescription& probe,
                               const CaseLibrary& lib, int k = 3,
                               const SmeParams& params = {}) {
  require(!lib.empty(), "classify: all pools are empty");
  const auto best = retrieve(probe, lib, k, params);
  ensure(best.has_value(), "classify: retrieval failed on non-empty library");
  return {ConceptLabel(best->owner), best->score, best->item_id};
}

/// Flat classification: retrieve over the union of all pools; the winning
/// pool's concept is the answer.
inline Classification classify(const CaseDescription& probe,
                               const std::vector<GeneralizationPool>& pools,
                               int k = 3, const SmeParams& params = {}) {
  return classify(probe, union_library(pools), k, params);
}

}  // namespace hps

#endif  // HPS_SAGE_HPP
