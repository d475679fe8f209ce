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

#ifndef HPS_CONFIG_HPP
#define HPS_CONFIG_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hps/phal.hpp"
#include "hps/pipeline.hpp"

namespace hps {

enum class DatasetKind { Idx, PngDir, VrdJsonl };

/// Every knob of one experiment run. All of it is echoed into the report so
/// results carry their full provenance.
struct ExperimentConfig {
  // [data]
  DatasetKind kind = DatasetKind::Idx;
  std::string images;       // idx: training images file
  std::string labels;       // idx: training labels file
  std::string test_images;  // idx: test images file
  std::string test_labels;  // idx: test labels file
  std::string root;         // png-dir root / vrd jsonl path

  // [pipeline]
  PipelineParams pipeline;

  // [sage]
  double sage_threshold = 0.8;
  double prune_cutoff = 0.2;
  int mac_k = 3;

  // [phal]
  bool phal = false;
  CascadeParams cascade;

  // [experiment]
  int train_per_class = 10;
  int test_limit = 1000;  // 0 = entire test split
  unsigned seed = 7;
  int threads = 4;
  std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// key = value sections: [data], [pipeline], [sage], [phal], [experiment].
/// '#' starts a comment. Unknown keys are an error so typos do not silently
/// fall back to defaults.
inline ExperimentConfig parse_config(std::istream& in,
                                     const std::string& where = "config") {
  ExperimentConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string at = where + ":" + std::to_string(lineno);

    if (line.front() == '[') {
      if (line.back() != ']') throw format_error(at + ": unterminated section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw format_error(at + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    auto as_int = [&] { return std::stoi(val); };
    auto as_double = [&] { return std::stod(val); };
    auto as_bool = [&] {
      if (val == "true" || val == "1" || val == "yes") return true;
      if (val == "false" || val == "0" || val == "no") return false;
      throw format_error(at + ": expected boolean, got " + val);
    };

    try {
      if (section == "data") {
        if (key == "kind") {
          if (val == "idx")
            cfg.kind = DatasetKind::Idx;
          else if (val == "png-dir")
            cfg.kind = DatasetKind::PngDir;
          else if (val == "vrd-jsonl")
            cfg.kind = DatasetKind::VrdJsonl;
          else
            throw format_error(at + ": unknown dataset kind " + val);
        } else if (key == "images")
          cfg.images = val;
        else if (key == "labels")
          cfg.labels = val;
        else if (key == "test_images")
          cfg.test_images = val;
        else if (key == "test_labels")
          cfg.test_labels = val;
        else if (key == "root")
          cfg.root = val;
        else
          throw format_error(at + ": unknown key " + key);
      } else if (section == "pipeline") {
        if (key == "max_dim")
          cfg.pipeline.max_dim = as_int();
        else if (key == "threshold")
          cfg.pipeline.threshold = as_int();
        else if (key == "polarity") {
          if (val == "bright")
            cfg.pipeline.polarity = InkPolarity::BrightInk;
          else if (val == "dark")
            cfg.pipeline.polarity = InkPolarity::DarkInk;
          else
            throw format_error(at + ": polarity must be bright or dark");
        } else if (key == "simplify_eps")
          cfg.pipeline.simplify_eps = as_double();
        else if (key == "group_gap")
          cfg.pipeline.group_gap = as_double();
        else if (key == "corner_angle")
          cfg.pipeline.shape.corner_angle = as_double();
        else if (key == "straightness_tol")
          cfg.pipeline.shape.straightness_tol = as_double();
        else if (key == "snap_tol")
          cfg.pipeline.shape.snap_tol = as_double();
        else
          throw format_error(at + ": unknown key " + key);
      } else if (section == "sage") {
        if (key == "threshold")
          cfg.sage_threshold = as_double();
        else if (key == "prune_cutoff")
          cfg.prune_cutoff = as_double();
        else if (key == "mac_k")
          cfg.mac_k = as_int();
        else
          throw format_error(at + ": unknown key " + key);
      } else if (section == "phal") {
        if (key == "enabled")
          cfg.phal = as_bool();
        else if (key == "k")
          cfg.cascade.top_k = as_int();
        else if (key == "q")
          cfg.cascade.top_q = as_int();
        else if (key == "v")
          cfg.cascade.top_v = as_int();
        else if (key == "w1")
          cfg.cascade.level_weights[0] = as_double();
        else if (key == "w2")
          cfg.cascade.level_weights[1] = as_double();
        else if (key == "w3")
          cfg.cascade.level_weights[2] = as_double();
        else if (key == "distinct_bonus")
          cfg.cascade.distinct_bonus = as_double();
        else
          throw format_error(at + ": unknown key " + key);
      } else if (section == "experiment") {
        if (key == "train_per_class")
          cfg.train_per_class = as_int();
        else if (key == "test_limit")
          cfg.test_limit = as_int();
        else if (key == "seed")
          cfg.seed = static_cast<unsigned>(std::stoul(val));
        else if (key == "threads")
          cfg.threads = as_int();
        else if (key == "out_dir")
          cfg.out_dir = val;
        else
          throw format_error(at + ": unknown key " + key);
      } else {
        throw format_error(at + ": key outside any known section");
      }
    } catch (const std::invalid_argument&) {
      throw format_error(at + ": bad number for " + key + ": " + val);
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open " + path);
  return parse_config(in, path);
}

/// Round-trippable echo of a config, embedded in every report.
inline std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[data]\n";
  out << "kind = "
      << (c.kind == DatasetKind::Idx
              ? "idx"
              : c.kind == DatasetKind::PngDir ? "png-dir" : "vrd-jsonl")
      << "\n";
  if (!c.images.empty()) out << "images = " << c.images << "\n";
  if (!c.labels.empty()) out << "labels = " << c.labels << "\n";
  if (!c.test_images.empty()) out << "test_images = " << c.test_images << "\n";
  if (!c.test_labels.empty()) out << "test_labels = " << c.test_labels << "\n";
  if (!c.root.empty()) out << "root = " << c.root << "\n";
  out << "\n[pipeline]\n";
  out << "max_dim = " << c.pipeline.max_dim << "\n";
  out << "threshold = " << c.pipeline.threshold << "\n";
  out << "polarity = "
      << (c.pipeline.polarity == InkPolarity::BrightInk ? "bright" : "dark")
      << "\n";
  out << "simplify_eps = " << c.pipeline.simplify_eps << "\n";
  out << "group_gap = " << c.pipeline.group_gap << "\n";
  out << "corner_angle = " << c.pipeline.shape.corner_angle << "\n";
  out << "straightness_tol = " << c.pipeline.shape.straightness_tol << "\n";
  out << "snap_tol = " << c.pipeline.shape.snap_tol << "\n";
  out << "\n[sage]\n";
  out << "threshold = " << c.sage_threshold << "\n";
  out << "prune_cutoff = " << c.prune_cutoff << "\n";
  out << "mac_k = " << c.mac_k << "\n";
  out << "\n[phal]\n";
  out << "enabled = " << (c.phal ? "true" : "false") << "\n";
  out << "k = " << c.cascade.top_k << "\n";
  out << "q = " << c.cascade.top_q << "\n";
  out << "v = " << c.cascade.top_v << "\n";
  out << "w1 = " << c.cascade.level_weights[0] << "\n";
  out << "w2 = " << c.cascade.level_weights[1] << "\n";
  out << "w3 = " << c.cascade.level_weights[2] << "\n";
  out << "distinct_bonus = " << c.cascade.distinct_bonus << "\n";
  out << "\n[experiment]\n";
  out << "train_per_class = " << c.train_per_class << "\n";
  out << "test_limit = " << c.test_limit << "\n";
  out << "seed = " << c.seed << "\n";
  out << "threads = " << c.threads << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  return out.str();
}

}  // namespace hps

#endif  // HPS_CONFIG_HPP
