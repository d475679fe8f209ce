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

#ifndef HPS_SME_HPP
#define HPS_SME_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hps/case.hpp"

namespace hps {

struct SmeParams {
  // Every hypothesis starts at 1.0 (times statement weights); each parent
  // then feeds this fraction of its own score to its arguments, so deeply
  // nested agreement outscores the same number of isolated facts.
  double trickle_down = 0.8;
  int max_mappings = 3;
};

/// One aligned pair. Expression hypotheses pair statements with identical
/// functors; entity hypotheses are induced from aligned argument positions.
struct MatchHypothesis {
  bool is_entity = false;
  std::string base_key;    // entity id or expression structural key
  std::string target_key;
  double score = 0.0;
  std::vector<int> args;   // child hypothesis indices (expression MHs only)
  bool top_level = false;  // pairs two top-level statements
  int base_node = -1;      // indices into the flattened node tables
  int target_node = -1;
};

/// The scored hypothesis forest for one (base, target) pair. Exposed so
/// that independent oracles can enumerate correspondence sets and score
/// them without going through kernel merging.
struct MhGraph {
  std::vector<MatchHypothesis> mhs;
  std::vector<int> roots;  // hypotheses no other hypothesis requires
};

struct Mapping {
  std::vector<std::pair<std::string, std::string>> entity_pairs;
  std::vector<std::pair<std::string, std::string>> expression_pairs;  // keys
  double raw_score = 0.0;
  double normalized_score = 0.0;
  std::vector<ExprPtr> candidate_inferences;

  bool empty() const { return entity_pairs.empty() && expression_pairs.empty(); }

  const std::string* target_for_entity(const std::string& base_id) const {
    for (const auto& [b, t] : entity_pairs)
      if (b == base_id) return &t;
    return nullptr;
  }
};

namespace detail {

/// Flattened view of a case: every statement occurrence (top-level and
/// nested) as one node, with the top-level statement's weight inherited by
/// its subexpressions.
struct CaseNodes {
  struct Node {
    ExprPtr expr;
    double weight = 1.0;
    bool top_level = false;
  };
  std::vector<Node> nodes;

  static CaseNodes build(const CaseDescription& c) {
    CaseNodes out;
    for (std::size_t i = 0; i < c.expressions.size(); ++i)
      add(out, c.expressions[i], c.weight(i), true);
    return out;
  }

private:
  static void add(CaseNodes& out, const ExprPtr& e, double w, bool top) {
    out.nodes.push_back({e, w, top});
    for (const ExprArg& a : e->args)
      if (!a.is_entity()) add(out, a.sub, w, false);
  }
};

struct MhBuilder {
  const CaseNodes& base;
  const CaseNodes& target;
  const SmeParams& params;
  MhGraph graph;
  std::map<std::pair<std::string, std::string>, int> entity_memo;
  // (base node, target node, swapped?) -> hypothesis id, or -1 = failed
  std::map<std::tuple<int, int, bool>, int> expr_memo;

  int entity_mh(const std::string& b, const std::string& t) {
    auto it = entity_memo.find({b, t});
    if (it != entity_memo.end()) return it->second;
    MatchHypothesis mh;
    mh.is_entity = true;
    mh.base_key = b;
    mh.target_key = t;
    graph.mhs.push_back(std::move(mh));
    const int id = static_cast<int>(graph.mhs.size() - 1);
    entity_memo[{b, t}] = id;
    return id;
  }

  /// Align two statement occurrences under the given argument permutation
  /// (swapped only ever applies to symmetric binary functors). Returns the
  /// hypothesis id, or -1 when the argument structures cannot line up.
  int expr_mh(int bn, int tn, bool swapped) {
    const auto memo_key = std::make_tuple(bn, tn, swapped);
    if (auto it = expr_memo.find(memo_key); it != expr_memo.end())
      return it->second;
    expr_memo[memo_key] = -1;  // guards recursion; overwritten on success

    const Expr& be = *base.nodes[bn].expr;
    const Expr& te = *target.nodes[tn].expr;
    if (be.functor != te.functor || be.args.size() != te.args.size())
      return -1;
    if (swapped && (!be.symmetric || be.args.size() != 2)) return -1;

    MatchHypothesis mh;
    mh.base_key = be.key;
    mh.target_key = te.key;
    mh.base_node = bn;
    mh.target_node = tn;
    mh.top_level = base.nodes[bn].top_level && target.nodes[tn].top_level;

    for (std::size_t i = 0; i < be.args.size(); ++i) {
      const ExprArg& ba = be.args[i];
      const ExprArg& ta = te.args[swapped ? be.args.size() - 1 - i : i];
      if (ba.is_entity() != ta.is_entity()) return -1;
      if (ba.is_entity()) {
        mh.args.push_back(entity_mh(ba.entity, ta.entity));
      } else {
        const int bsub = node_index(base, bn, ba.sub);
        const int tsub = node_index(target, tn, ta.sub);
        int child = expr_mh(bsub, tsub, false);
        if (child < 0 && ba.sub->symmetric && ba.sub->args.size() == 2)
          child = expr_mh(bsub, tsub, true);
        if (child < 0) return -1;
        mh.args.push_back(child);
      }
    }

    // A swapped alignment that induces the same child hypotheses as the
    // identity one (both arguments equal on a side) is not a new hypothesis.
    if (swapped) {
      if (auto it = expr_memo.find({bn, tn, false});
          it != expr_memo.end() && it->second >= 0 &&
          graph.mhs[it->second].args == mh.args) {
        expr_memo[memo_key] = it->second;
        return it->second;
      }
    }

    // Internally inconsistent alignments (f(A,A) against f(X,Y)) are no
    // hypotheses at all; they would feed phantom trickle-down otherwise.
    {
      std::map<std::string, std::string> bt, tb;
      std::vector<int> stack(mh.args);
      bool ok = true;
      std::set<int> seen;
      while (ok && !stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        if (!seen.insert(c).second) continue;
        const MatchHypothesis& cm = graph.mhs[c];
        auto itb = bt.find(cm.base_key);
        if (itb != bt.end() && itb->second != cm.target_key) ok = false;
        auto itt = tb.find(cm.target_key);
        if (itt != tb.end() && itt->second != cm.base_key) ok = false;
        bt[cm.base_key] = cm.target_key;
        tb[cm.target_key] = cm.base_key;
        for (int a : cm.args) stack.push_back(a);
      }
      if (!ok) return -1;
    }

    graph.mhs.push_back(std::move(mh));
    const int id = static_cast<int>(graph.mhs.size() - 1);
    expr_memo[memo_key] = id;
    return id;
  }

  // Subexpression occurrences directly follow their parent in the node
  // table; scan forward for the matching pointer.
  static int node_index(const CaseNodes& cn, int parent, const ExprPtr& sub) {
    for (std::size_t i = parent + 1; i < cn.nodes.size(); ++i)
      if (cn.nodes[i].expr == sub) return static_cast<int>(i);
    throw invariant_violation("sme: subexpression node not found");
  }
};

inline MhGraph build_mh_graph(const CaseNodes& base, const CaseNodes& target,
                              const SmeParams& params) {
  MhBuilder b{base, target, params, {}, {}, {}};
  for (std::size_t bn = 0; bn < base.nodes.size(); ++bn) {
    if (!base.nodes[bn].top_level) continue;
    for (std::size_t tn = 0; tn < target.nodes.size(); ++tn) {
      if (!target.nodes[tn].top_level) continue;
      const Expr& be = *base.nodes[bn].expr;
      if (be.functor != target.nodes[tn].expr->functor) continue;
      b.expr_mh(static_cast<int>(bn), static_cast<int>(tn), false);
      if (be.symmetric && be.args.size() == 2)
        b.expr_mh(static_cast<int>(bn), static_cast<int>(tn), true);
    }
  }

  MhGraph g = std::move(b.graph);

  // Scoring: local score first (statement weights multiply), then trickle
  // down in topological order so parents are final before children collect.
  std::vector<int> parent_count(g.mhs.size(), 0);
  for (const MatchHypothesis& mh : g.mhs)
    for (int a : mh.args) ++parent_count[a];
  for (std::size_t i = 0; i < g.mhs.size(); ++i) {
    if (parent_count[i] == 0) g.roots.push_back(static_cast<int>(i));
    MatchHypothesis& mh = g.mhs[i];
    mh.score = mh.is_entity ? 1.0
                            : base.nodes[mh.base_node].weight *
                                  target.nodes[mh.target_node].weight;
  }
  std::deque<int> queue(g.roots.begin(), g.roots.end());
  std::vector<int> pending = parent_count;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    for (int a : g.mhs[i].args) {
      g.mhs[a].score += params.trickle_down * g.mhs[i].score;
      if (--pending[a] == 0) queue.push_back(a);
    }
  }
  return g;
}

/// Closure of one root hypothesis: the root plus everything its arguments
/// transitively require.
inline std::vector<int> kernel_members(const MhGraph& g, int root) {
  std::vector<int> members;
  std::vector<int> stack{root};
  std::set<int> seen;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    if (!seen.insert(i).second) continue;
    members.push_back(i);
    for (int a : g.mhs[i].args) stack.push_back(a);
  }
  std::sort(members.begin(), members.end());
  return members;
}

/// One-to-one bookkeeping for building mappings out of kernels.
struct ConsistencyMaps {
  std::map<std::string, std::string> ent_bt, ent_tb, expr_bt, expr_tb;

  bool compatible(const MatchHypothesis& mh) const {
    const auto& bt = mh.is_entity ? ent_bt : expr_bt;
    const auto& tb = mh.is_entity ? ent_tb : expr_tb;
    if (auto it = bt.find(mh.base_key);
        it != bt.end() && it->second != mh.target_key)
      return false;
    if (auto it = tb.find(mh.target_key);
        it != tb.end() && it->second != mh.base_key)
      return false;
    return true;
  }

  void insert(const MatchHypothesis& mh) {
    auto& bt = mh.is_entity ? ent_bt : expr_bt;
    auto& tb = mh.is_entity ? ent_tb : expr_tb;
    bt[mh.base_key] = mh.target_key;
    tb[mh.target_key] = mh.base_key;
  }
};

struct Kernel {
  int root = -1;
  std::vector<int> members;
  double score = 0.0;
  bool internally_consistent = true;
};

inline std::vector<Kernel> build_kernels(const MhGraph& g) {
  std::vector<Kernel> kernels;
  for (int root : g.roots) {
    Kernel k;
    k.root = root;
    k.members = kernel_members(g, root);
    ConsistencyMaps maps;
    for (int m : k.members) {
      if (!maps.compatible(g.mhs[m])) {
        k.internally_consistent = false;
        break;
      }
      maps.insert(g.mhs[m]);
    }
    if (!k.internally_consistent) continue;
    for (int m : k.members) k.score += g.mhs[m].score;
    kernels.push_back(std::move(k));
  }
  std::sort(kernels.begin(), kernels.end(), [&](const Kernel& a,
                                                const Kernel& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.members.size() != b.members.size())
      return a.members.size() > b.members.size();
    const MatchHypothesis& ra = g.mhs[a.root];
    const MatchHypothesis& rb = g.mhs[b.root];
    if (ra.base_key != rb.base_key) return ra.base_key < rb.base_key;
    return ra.target_key < rb.target_key;
  });
  return kernels;
}

/// Best raw score the greedy kernel merge can reach; the building block for
/// both matching and self-score normalization.
inline double best_raw_score(const MhGraph& g,
                             const std::vector<Kernel>& kernels) {
  ConsistencyMaps maps;
  std::set<int> chosen;
  for (const Kernel& k : kernels) {
    bool ok = true;
    for (int m : k.members)
      if (!maps.compatible(g.mhs[m])) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (int m : k.members) {
      maps.insert(g.mhs[m]);
      chosen.insert(m);
    }
  }
  double raw = 0.0;
  for (int m : chosen) raw += g.mhs[m].score;
  return raw;
}

}  // namespace detail

/// Raw score of a case matched against itself (the best mapping the full
/// matcher finds, statement weights applied on both sides). This is the
/// normalization denominator, so a perfect self-match normalizes to 1.
inline double self_score(const CaseDescription& c, const SmeParams& params = {}) {
  const detail::CaseNodes nodes = detail::CaseNodes::build(c);
  const MhGraph g = detail::build_mh_graph(nodes, nodes, params);
  return detail::best_raw_score(g, detail::build_kernels(g));
}

namespace detail {

inline Mapping assemble_mapping(const MhGraph& g, const std::set<int>& chosen,
                                const CaseDescription& base,
                                const CaseDescription& target) {
  Mapping m;
  ConsistencyMaps maps;
  for (int i : chosen) {
    const MatchHypothesis& mh = g.mhs[i];
    maps.insert(mh);
    m.raw_score += mh.score;
    if (mh.is_entity)
      m.entity_pairs.emplace_back(mh.base_key, mh.target_key);
    else if (mh.top_level)
      m.expression_pairs.emplace_back(mh.base_key, mh.target_key);
  }
  std::sort(m.entity_pairs.begin(), m.entity_pairs.end());
  m.entity_pairs.erase(
      std::unique(m.entity_pairs.begin(), m.entity_pairs.end()),
      m.entity_pairs.end());
  std::sort(m.expression_pairs.begin(), m.expression_pairs.end());
  m.expression_pairs.erase(
      std::unique(m.expression_pairs.begin(), m.expression_pairs.end()),
      m.expression_pairs.end());

  // Candidate inferences: unmapped base statements touching mapped items,
  // projected through the correspondences; unmapped entities become
  // skolems, and projections that merely restate the target are dropped.
  std::set<std::string> target_keys;
  for (const ExprPtr& e : target.expressions) target_keys.insert(e->key);

  auto touches_mapping = [&](const ExprPtr& e, auto&& self) -> bool {
    for (const ExprArg& a : e->args) {
      if (a.is_entity()) {
        if (maps.ent_bt.count(a.entity)) return true;
      } else {
        if (maps.expr_bt.count(a.sub->key)) return true;
        if (self(a.sub, self)) return true;
      }
    }
    return false;
  };
  auto project = [&](const ExprPtr& e, auto&& self) -> ExprPtr {
    std::vector<ExprArg> args;
    for (const ExprArg& a : e->args) {
      if (a.is_entity()) {
        auto it = maps.ent_bt.find(a.entity);
        args.push_back(entity_arg(it != maps.ent_bt.end()
                                      ? it->second
                                      : "skolem:" + a.entity));
      } else {
        args.push_back(expr_arg(self(a.sub, self)));
      }
    }
    return make_expr(e->functor, std::move(args), e->symmetric);
  };

  for (const ExprPtr& e : base.expressions) {
    if (maps.expr_bt.count(e->key)) continue;
    if (!touches_mapping(e, touches_mapping)) continue;
    ExprPtr inf = project(e, project);
    if (!target_keys.count(inf->key)) m.candidate_inferences.push_back(inf);
  }
  return m;
}

}  // namespace detail

/// Structure-mapping match. Builds the hypothesis forest, scores it with
/// trickle-down, forms kernels from the root hypotheses, and greedily
/// merges kernels by descending score into up to max_mappings structurally
/// consistent mappings (the best one first, alternates seeded from the
/// best-scoring kernels the first merge had to skip).
inline std::vector<Mapping> match(const CaseDescription& base,
                                  const CaseDescription& target,
                                  const SmeParams& params = {},
                                  double base_self = -1.0,
                                  double target_self = -1.0) {
  const detail::CaseNodes bn = detail::CaseNodes::build(base);
  const detail::CaseNodes tn = detail::CaseNodes::build(target);
  const MhGraph g = detail::build_mh_graph(bn, tn, params);
  const std::vector<detail::Kernel> kernels = detail::build_kernels(g);

  if (base_self < 0.0) base_self = self_score(base, params);
  if (target_self < 0.0) target_self = self_score(target, params);
  const double denom = std::max(base_self, target_self);

  auto greedy = [&](int seed) {
    detail::ConsistencyMaps maps;
    std::set<int> chosen;
    std::vector<int> skipped;
    auto try_add = [&](const detail::Kernel& k) {
      for (int m : k.members)
        if (!maps.compatible(g.mhs[m])) return false;
      for (int m : k.members) {
        maps.insert(g.mhs[m]);
        chosen.insert(m);
      }
      return true;
    };
    if (seed >= 0) try_add(kernels[seed]);
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      if (static_cast<int>(i) == seed) continue;
      if (!try_add(kernels[i])) skipped.push_back(static_cast<int>(i));
    }
    return std::make_pair(chosen, skipped);
  };

  std::vector<Mapping> out;
  auto push_mapping = [&](const std::set<int>& chosen) {
    Mapping m = detail::assemble_mapping(g, chosen, base, target);
    m.normalized_score =
        denom > 0.0 ? std::min(1.0, m.raw_score / denom) : 0.0;
    for (const Mapping& prev : out)
      if (prev.entity_pairs == m.entity_pairs &&
          prev.expression_pairs == m.expression_pairs)
        return;
    out.push_back(std::move(m));
  };

  const auto [best, skipped] = greedy(-1);
  push_mapping(best);
  for (std::size_t s = 0;
       s < skipped.size() && out.size() < static_cast<std::size_t>(params.max_mappings);
       ++s) {
    if (s >= 2) break;  // at most two alternates
    push_mapping(greedy(skipped[s]).first);
  }

  std::stable_sort(out.begin(), out.end(), [](const Mapping& a,
                                              const Mapping& b) {
    return a.raw_score > b.raw_score;
  });
  if (out.empty()) out.push_back(Mapping{});
  return out;
}

/// Normalized similarity of the best mapping, in [0, 1].
inline double similarity(const CaseDescription& base,
                         const CaseDescription& target,
                         const SmeParams& params = {}) {
  return match(base, target, params).front().normalized_score;
}

}  // namespace hps

#endif  // HPS_SME_HPP
