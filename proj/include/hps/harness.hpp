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

#ifndef HPS_HARNESS_HPP
#define HPS_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hps/config.hpp"
#include "hps/io.hpp"
#include "hps/phal.hpp"
#include "hps/pipeline.hpp"
#include "hps/sage.hpp"

namespace hps {

/// Apply f to every index in [0, n) across `threads` workers; results land
/// by index, so the output is identical to a sequential run.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
  };
  std::vector<std::future<void>> futs;
  const int nw = std::min<int>(threads, static_cast<int>(n));
  futs.reserve(nw);
  for (int t = 0; t < nw; ++t)
    futs.push_back(std::async(std::launch::async, worker));
  for (auto& fu : futs) fu.get();
}

struct EvalReport {
  double accuracy = 0.0;  // percentage
  int correct = 0;
  int total = 0;
  std::map<std::string, std::map<std::string, int>> confusion;  // true -> pred
  std::map<std::string, std::pair<int, int>> per_class;  // correct, total
  int train_items = 0;
  int encoded_count = 0;  // single-pass counters
  int added_count = 0;
  int skipped_unencodable = 0;
  bool phal = false;
  std::string config_echo;
  double wall_seconds = 0.0;  // displayed, never serialized (reports must be
                              // byte-identical across reruns)
};

/// Deterministic serialization of a report. Timing is deliberately omitted.
inline json report_to_json(const EvalReport& r) {
  json j;
  j["accuracy"] = r.accuracy;
  j["correct"] = r.correct;
  j["total"] = r.total;
  json per_class = json::object();
  for (const auto& [label, ct] : r.per_class)
    per_class[label] = {{"correct", ct.first},
                        {"total", ct.second},
                        {"accuracy", ct.second > 0
                                         ? 100.0 * ct.first / ct.second
                                         : 0.0}};
  j["per_class"] = std::move(per_class);
  json confusion = json::object();
  for (const auto& [t, row] : r.confusion) {
    json jr = json::object();
    for (const auto& [p, n] : row) jr[p] = n;
    confusion[t] = std::move(jr);
  }
  j["confusion"] = std::move(confusion);
  j["counters"] = {{"train_items", r.train_items},
                   {"encoded", r.encoded_count},
                   {"added", r.added_count},
                   {"skipped_unencodable", r.skipped_unencodable}};
  j["phal"] = r.phal;
  j["config"] = r.config_echo;
  return j;
}

struct LabeledImage {
  GrayImage image;
  std::string label;
};

namespace detail {

/// Seeded per-class shuffle; picks train_per_class training items per class
/// and up to test_cap extra items per class for testing (used when train
/// and test come from one directory).
struct StratifiedSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline StratifiedSplit stratified_split(const std::vector<LabeledImage>& items,
                                        int train_per_class, int test_cap,
                                        unsigned seed, bool separate_test) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < items.size(); ++i)
    by_class[items[i].label].push_back(i);

  StratifiedSplit split;
  std::size_t ordinal = 0;
  for (auto& [label, idx] : by_class) {
    std::seed_seq sseq{seed, static_cast<unsigned>(ordinal++)};
    std::mt19937 rng(sseq);
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t ntrain =
        separate_test ? 0 : std::min<std::size_t>(train_per_class, idx.size());
    for (std::size_t i = 0; i < ntrain; ++i) split.train.push_back(idx[i]);
    std::size_t ntest = idx.size() - ntrain;
    if (test_cap > 0) ntest = std::min<std::size_t>(ntest, test_cap);
    for (std::size_t i = ntrain; i < ntrain + ntest; ++i)
      split.test.push_back(idx[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

inline std::vector<LabeledImage> load_images(const ExperimentConfig& cfg,
                                             bool test_split) {
  std::vector<LabeledImage> out;
  if (cfg.kind == DatasetKind::Idx) {
    const std::string& imgs = test_split ? cfg.test_images : cfg.images;
    const std::string& labs = test_split ? cfg.test_labels : cfg.labels;
    for (auto& [img, lab] : load_idx(imgs, labs))
      out.push_back({std::move(img), std::to_string(lab)});
  } else if (cfg.kind == DatasetKind::PngDir) {
    for (auto& [img, lab] : load_png_dir(cfg.root))
      out.push_back({std::move(img), lab});
  } else {
    throw invalid_input("run_experiment handles idx and png-dir datasets");
  }
  return out;
}

}  // namespace detail

struct ExperimentOutput {
  EvalReport report;
  std::vector<GeneralizationPool> pools;            // flat path
  std::vector<HierarchicalConcept> concepts;        // phal path
};

/// The training half of an experiment: sample the seeded stratified
/// training subset, encode every item once (in parallel), and feed the
/// pools sequentially in deterministic item order.
inline ExperimentOutput train_pools(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  EvalReport& rep = out.report;
  rep.phal = cfg.phal;
  rep.config_echo = config_to_text(cfg);

  std::vector<LabeledImage> all_train = detail::load_images(cfg, false);
  const auto tr_split = detail::stratified_split(
      all_train, cfg.train_per_class, 0, cfg.seed, false);
  std::vector<LabeledImage> train_items;
  for (std::size_t i : tr_split.train)
    train_items.push_back(std::move(all_train[i]));
  rep.train_items = static_cast<int>(train_items.size());

  const SmeParams sme_params;

  struct EncodedTrain {
    CaseDescription flat;
    std::vector<LevelDescription> levels;
    bool ok = false;
  };
  std::vector<EncodedTrain> encoded(train_items.size());
  std::atomic<int> encode_counter{0};
  parallel_for(train_items.size(), cfg.threads, [&](std::size_t i) {
    encode_counter.fetch_add(1);
    try {
      const Glyph g = glyph_from_image(
          train_items[i].image, ConceptLabel(train_items[i].label),
          "t" + std::to_string(i), cfg.pipeline);
      if (cfg.phal)
        encoded[i].levels = decompose(g, cfg.pipeline.shape);
      else
        encoded[i].flat = encode_shape(g, cfg.pipeline.shape);
      encoded[i].ok = true;
    } catch (const invalid_input&) {
      encoded[i].ok = false;
    }
  });
  rep.encoded_count = encode_counter.load();

  std::map<std::string, std::size_t> pool_of;
  auto pool_for = [&](const std::string& label) -> std::size_t {
    auto it = pool_of.find(label);
    if (it != pool_of.end()) return it->second;
    const std::size_t id = cfg.phal ? out.concepts.size() : out.pools.size();
    if (cfg.phal) {
      out.concepts.emplace_back(ConceptLabel(label), cfg.sage_threshold,
                                cfg.prune_cutoff);
    } else {
      GeneralizationPool p;
      p.label = ConceptLabel(label);
      p.threshold = cfg.sage_threshold;
      p.prune_cutoff = cfg.prune_cutoff;
      out.pools.push_back(std::move(p));
    }
    pool_of[label] = id;
    return id;
  };

  int added = 0;
  for (std::size_t i = 0; i < train_items.size(); ++i) {
    if (!encoded[i].ok) {
      rep.skipped_unencodable += 1;
      continue;
    }
    const std::size_t pid = pool_for(train_items[i].label);
    if (cfg.phal)
      train(out.concepts[pid], encoded[i].levels, sme_params);
    else
      add_example(out.pools[pid], encoded[i].flat, sme_params);
    ++added;
  }
  rep.added_count = added;
  return out;
}

/// One full experiment: train, then classify the test split (in parallel)
/// and assemble the report.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out = train_pools(cfg);
  EvalReport& rep = out.report;
  const SmeParams sme_params;

  std::vector<LabeledImage> test_items;
  {
    std::vector<LabeledImage> all_test = detail::load_images(
        cfg, cfg.kind == DatasetKind::Idx);
    std::map<std::string, int> classes;
    for (const auto& it : all_test) classes[it.label] = 1;
    const int ncls = std::max<int>(1, static_cast<int>(classes.size()));
    const int per_class_cap =
        cfg.test_limit > 0 ? std::max(1, cfg.test_limit / ncls) : 0;
    if (cfg.kind == DatasetKind::Idx) {
      const auto te_split = detail::stratified_split(all_test, 0,
                                                     per_class_cap,
                                                     cfg.seed + 1, true);
      for (std::size_t i : te_split.test)
        test_items.push_back(std::move(all_test[i]));
    } else {
      // Same directory: test items are the ones the training split left out.
      const auto split = detail::stratified_split(
          all_test, cfg.train_per_class, per_class_cap, cfg.seed, false);
      for (std::size_t i : split.test)
        test_items.push_back(std::move(all_test[i]));
    }
  }

  std::optional<CaseLibrary> flat_lib;
  if (!cfg.phal) flat_lib = union_library(out.pools);

  std::vector<std::string> predicted(test_items.size());
  parallel_for(test_items.size(), cfg.threads, [&](std::size_t i) {
    try {
      const Glyph g =
          glyph_from_image(test_items[i].image, std::nullopt,
                           "q" + std::to_string(i), cfg.pipeline);
      if (cfg.phal) {
        const auto levels = decompose(g, cfg.pipeline.shape);
        predicted[i] =
            classify_cascade(levels, out.concepts, cfg.cascade, sme_params)
                .label.symbol;
      } else {
        predicted[i] =
            classify(encode_shape(g, cfg.pipeline.shape), *flat_lib,
                     cfg.mac_k, sme_params)
                .label.symbol;
      }
    } catch (const invalid_input&) {
      predicted[i] = "";  // unencodable or unclassifiable: always wrong
    }
  });

  for (std::size_t i = 0; i < test_items.size(); ++i) {
    const std::string& truth = test_items[i].label;
    rep.confusion[truth][predicted[i]] += 1;
    auto& pc = rep.per_class[truth];
    pc.second += 1;
    if (predicted[i] == truth) {
      pc.first += 1;
      rep.correct += 1;
    }
    rep.total += 1;
  }
  rep.accuracy = rep.total > 0 ? 100.0 * rep.correct / rep.total : 0.0;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

/// Persistence for the hierarchical path: three pool files per concept plus
/// a manifest that records the structure.
inline void save_concepts(const std::string& dir,
                          const std::vector<HierarchicalConcept>& concepts) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json manifest;
  manifest["phal"] = true;
  manifest["concepts"] = json::array();
  for (const HierarchicalConcept& hc : concepts) {
    json cj;
    cj["concept"] = hc.label.symbol;
    cj["levels"] = json::array();
    for (int level = 0; level < 3; ++level) {
      const std::string file = "pool_" + hc.label.symbol + "_L" +
                               std::to_string(level + 1) + ".json";
      save_pool((fs::path(dir) / file).string(), hc.pools[level]);
      cj["levels"].push_back(file);
    }
    manifest["concepts"].push_back(std::move(cj));
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw format_error("cannot write manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

inline std::vector<HierarchicalConcept> load_concepts(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw format_error(dir + ": missing manifest.json");
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw format_error(dir + "/manifest.json: " + e.what());
  }
  if (!manifest.value("phal", false))
    throw format_error(dir + ": manifest is not a hierarchical pool set");
  std::vector<HierarchicalConcept> out;
  for (const json& cj : manifest.value("concepts", json::array())) {
    HierarchicalConcept hc(ConceptLabel(cj.at("concept").get<std::string>()));
    const auto& levels = cj.at("levels");
    for (int level = 0; level < 3; ++level)
      hc.pools[level] =
          load_pool((fs::path(dir) / levels.at(level).get<std::string>())
                        .string());
    out.push_back(std::move(hc));
  }
  return out;
}

/// Human-readable pool listing: generalizations first, statements sorted by
/// probability (descending), entity label alternatives with frequencies.
inline std::string inspect_pool_text(const GeneralizationPool& pool) {
  std::ostringstream out;
  out << "pool \"" << pool.label.symbol << "\"  threshold=" << pool.threshold
      << " prune_cutoff=" << pool.prune_cutoff
      << "  examples=" << pool.examples_added << "\n";
  if (pool.generalizations.empty() && pool.outliers.empty()) {
    out << "  (empty)\n";
    return out.str();
  }
  for (const Generalization& g : pool.generalizations) {
    out << "  generalization " << g.id << " (" << g.n_examples
        << " examples)\n";
    std::vector<const GenExpression*> sorted;
    for (const GenExpression& ge : g.expressions) sorted.push_back(&ge);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](const GenExpression* a, const GenExpression* b) {
                       const double pa = double(a->count) / g.n_examples;
                       const double pb = double(b->count) / g.n_examples;
                       if (pa != pb) return pa > pb;
                       return a->expr->key < b->expr->key;
                     });
    for (const GenExpression* ge : sorted) {
      std::ostringstream p;
      p.precision(2);
      p << std::fixed << (double(ge->count) / g.n_examples);
      out << "    " << p.str() << "  " << ge->expr->key << "\n";
    }
    for (const GeneralizedEntity& e : g.entities) {
      const auto labels = g.label_counts(e.id);
      if (labels.empty()) continue;
      out << "    entity " << e.id << " is most likely";
      std::vector<std::pair<int, std::string>> ranked;
      for (const auto& [l, n] : labels) ranked.emplace_back(-n, l);
      std::sort(ranked.begin(), ranked.end());
      for (const auto& [negn, l] : ranked)
        out << " " << l << "(" << -negn << "/" << g.n_examples << ")";
      out << "\n";
    }
  }
  for (const auto& [id, c] : pool.outliers)
    out << "  outlier " << id << " (" << c.expressions.size()
        << " facts, from " << c.provenance << ")\n";
  return out.str();
}

}  // namespace hps

#endif  // HPS_HARNESS_HPP
