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

#ifndef HPS_RETRIEVAL_HPP
#define HPS_RETRIEVAL_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hps/case.hpp"
#include "hps/sme.hpp"

namespace hps {

/// One retrievable item. Generalizations enter as their probability-
/// weighted case view, so their expressions carry weights and their
/// self-score (and thus FAC normalization) is probability-weighted too.
struct LibraryItem {
  std::string id;
  CaseDescription item_case;
  ContentVector vector;
  std::string owner;   // pool / concept the item belongs to
  double self = 0.0;   // cached self-score (probability-weighted for
                       // generalization views), used by FAC normalization
};

struct CaseLibrary {
  std::vector<LibraryItem> items;

  void add(std::string id, CaseDescription c, std::string owner = "") {
    for (const LibraryItem& it : items)
      require(it.id != id, "library ids must be unique: " + id);
    LibraryItem item;
    item.id = std::move(id);
    item.vector = content_vector(c);
    item.self = self_score(c);
    item.item_case = std::move(c);
    item.owner = std::move(owner);
    items.push_back(std::move(item));
  }

  bool empty() const { return items.empty(); }
  std::size_t size() const { return items.size(); }
};

struct MacHit {
  const LibraryItem* item = nullptr;
  double cosine = 0.0;
};

/// Cheap stage: rank by content-vector cosine against the probe, return the
/// top k (ties broken by item id, independent of insertion order).
inline std::vector<MacHit> mac(const CaseDescription& probe,
                               const CaseLibrary& lib, int k = 3) {
  require(k >= 1, "mac: k must be >= 1");
  const ContentVector pv = content_vector(probe);
  std::vector<MacHit> hits;
  hits.reserve(lib.items.size());
  for (const LibraryItem& item : lib.items)
    hits.push_back({&item, dot(pv, item.vector)});
  std::sort(hits.begin(), hits.end(), [](const MacHit& a, const MacHit& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.item->id < b.item->id;
  });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(k);
  return hits;
}

struct FacResult {
  const LibraryItem* item = nullptr;  // valid only while the library lives
  std::string item_id;                // owned copies, safe past temporaries
  std::string owner;
  Mapping mapping;
  double score = 0.0;  // normalized structural similarity
};

/// Expensive stage: structure-map each candidate (item as base, probe as
/// target, so candidate inferences project into the probe) and order by
/// normalized score, ties by id. Candidates are independent, so evaluation
/// order cannot change the result.
inline std::vector<FacResult> fac(const CaseDescription& probe,
                                  const std::vector<MacHit>& candidates,
                                  const SmeParams& params = {}) {
  std::vector<FacResult> out;
  out.reserve(candidates.size());
  const double probe_self = self_score(probe, params);
  for (const MacHit& hit : candidates) {
    FacResult r;
    r.item = hit.item;
    r.item_id = hit.item->id;
    r.owner = hit.item->owner;
    r.mapping = match(hit.item->item_case, probe, params, hit.item->self,
                      probe_self)
                    .front();
    r.score = r.mapping.normalized_score;
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FacResult& a, const FacResult& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.item_id < b.item_id;
                   });
  return out;
}

/// MAC then FAC; the single best reminder, or nothing on an empty library.
inline std::optional<FacResult> retrieve(const CaseDescription& probe,
                                         const CaseLibrary& lib, int k = 3,
                                         const SmeParams& params = {}) {
  if (lib.empty()) return std::nullopt;
  auto ranked = fac(probe, mac(probe, lib, k), params);
  if (ranked.empty()) return std::nullopt;
  return ranked.front();
}

}  // namespace hps

#endif  // HPS_RETRIEVAL_HPP
