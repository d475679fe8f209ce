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

#ifndef HPS_CASE_HPP
#define HPS_CASE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hps/common.hpp"

namespace hps {

enum class EntityKind { Segment, Cycle, Glyph, Skolem };

inline const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::Segment: return "segment";
    case EntityKind::Cycle: return "cycle";
    case EntityKind::Glyph: return "glyph";
    case EntityKind::Skolem: return "skolem";
  }
  return "skolem";
}

inline EntityKind entity_kind_from_string(const std::string& s) {
  if (s == "segment") return EntityKind::Segment;
  if (s == "cycle") return EntityKind::Cycle;
  if (s == "glyph") return EntityKind::Glyph;
  if (s == "skolem") return EntityKind::Skolem;
  throw format_error("unknown entity kind: " + s);
}

struct Entity {
  std::string id;
  EntityKind kind = EntityKind::Skolem;

  friend bool operator==(const Entity& a, const Entity& b) {
    return a.id == b.id && a.kind == b.kind;
  }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Argument slot: either an entity reference or a nested expression.
struct ExprArg {
  std::string entity;  // valid when sub == nullptr
  ExprPtr sub;

  bool is_entity() const { return sub == nullptr; }
};

/// One relational statement. Structural identity is captured by `key`
/// (computed once at construction), so equality is a hash-then-string
/// compare rather than a tree walk.
struct Expr {
  std::string functor;
  bool symmetric = false;
  std::vector<ExprArg> args;
  std::string key;
  std::size_t hash = 0;

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.hash == b.hash && a.key == b.key;
  }
};

namespace detail {

inline const std::string& arg_key(const ExprArg& a) {
  static const std::string empty;
  if (a.is_entity()) return a.entity;
  return a.sub ? a.sub->key : empty;
}

}  // namespace detail

/// Expression factory. Symmetric functors store their arguments in sorted
/// order, which makes structural keys canonical from birth.
inline ExprPtr make_expr(std::string functor, std::vector<ExprArg> args,
                         bool symmetric = false) {
  require(!functor.empty(), "expression functor must be non-empty");
  auto e = std::make_shared<Expr>();
  e->functor = std::move(functor);
  e->symmetric = symmetric;
  if (symmetric)
    std::sort(args.begin(), args.end(), [](const ExprArg& a, const ExprArg& b) {
      return detail::arg_key(a) < detail::arg_key(b);
    });
  e->args = std::move(args);
  e->key = e->functor + "(";
  for (std::size_t i = 0; i < e->args.size(); ++i) {
    if (i) e->key += ",";
    e->key += detail::arg_key(e->args[i]);
  }
  e->key += ")";
  e->hash = std::hash<std::string>{}(e->key);
  return e;
}

inline ExprArg entity_arg(std::string id) { return {std::move(id), nullptr}; }
inline ExprArg expr_arg(ExprPtr sub) { return {{}, std::move(sub)}; }

/// A set of relational statements over entities. `weights`, when non-empty,
/// carries one multiplier per expression (parallel arrays); generalization
/// views use it to express statement probabilities, concrete cases leave it
/// empty (all 1.0).
struct CaseDescription {
  std::string provenance;
  std::vector<Entity> entities;
  std::vector<ExprPtr> expressions;
  std::vector<double> weights;

  double weight(std::size_t i) const {
    return weights.empty() ? 1.0 : weights[i];
  }

  const Entity* find_entity(const std::string& id) const {
    for (const Entity& e : entities)
      if (e.id == id) return &e;
    return nullptr;
  }
};

/// Sparse functor-count vector for the cheap retrieval stage.
struct ContentVector {
  std::map<std::string, double> counts;

  double norm() const {
    double s = 0.0;
    for (const auto& [k, v] : counts) s += v * v;
    return std::sqrt(s);
  }
  bool empty() const { return counts.empty(); }
};

namespace detail {

inline void count_functors(const Expr& e,
                           std::map<std::string, double>& counts) {
  counts[e.functor] += 1.0;
  // Label-carrying functors ("isa:person") also feed the bare family
  // counter so unlabeled probes still overlap labeled cases.
  if (const auto colon = e.functor.find(':'); colon != std::string::npos)
    counts[e.functor.substr(0, colon)] += 1.0;
  for (const ExprArg& a : e.args)
    if (!a.is_entity()) count_functors(*a.sub, counts);
}

}  // namespace detail

inline ContentVector content_vector(const CaseDescription& c) {
  ContentVector v;
  for (const ExprPtr& e : c.expressions) detail::count_functors(*e, v.counts);
  return v;
}

/// Cosine similarity of two count vectors, in [0, 1]; 0 when either is empty.
inline double dot(const ContentVector& a, const ContentVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  double s = 0.0;
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() && ib != b.counts.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s / (a.norm() * b.norm());
}

/// Deterministic normal form: expressions deduplicated and sorted by
/// structural key (weights follow their expressions; a duplicate keeps the
/// first weight), entities sorted by id and deduplicated.
inline CaseDescription canonicalize(const CaseDescription& c) {
  CaseDescription out;
  out.provenance = c.provenance;

  std::vector<std::size_t> order(c.expressions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return c.expressions[a]->key < c.expressions[b]->key;
  });
  const bool weighted = !c.weights.empty();
  for (std::size_t i : order) {
    if (!out.expressions.empty() &&
        out.expressions.back()->key == c.expressions[i]->key)
      continue;
    out.expressions.push_back(c.expressions[i]);
    if (weighted) out.weights.push_back(c.weight(i));
  }

  out.entities = c.entities;
  std::sort(out.entities.begin(), out.entities.end(),
            [](const Entity& a, const Entity& b) { return a.id < b.id; });
  out.entities.erase(std::unique(out.entities.begin(), out.entities.end(),
                                 [](const Entity& a, const Entity& b) {
                                   return a.id == b.id;
                                 }),
                     out.entities.end());
  return out;
}

}  // namespace hps

#endif  // HPS_CASE_HPP
