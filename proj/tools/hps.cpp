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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "hps/harness.hpp"
#include "hps/io.hpp"
#include "hps/pipeline.hpp"
#include "hps/relations.hpp"
#include "hps/vrd.hpp"

namespace {

namespace fs = std::filesystem;

hps::PipelineParams pipeline_from_flags(int threshold, const std::string& pol,
                                        double eps, double gap) {
  hps::PipelineParams p;
  p.threshold = threshold;
  p.polarity = pol == "dark" ? hps::InkPolarity::DarkInk
                             : hps::InkPolarity::BrightInk;
  p.simplify_eps = eps;
  p.group_gap = gap;
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw hps::format_error("cannot write " + path);
  out << text;
}

int cmd_vectorize(const std::string& input, const std::string& svg_out,
                  const std::string& skeleton_out,
                  const hps::PipelineParams& params) {
  const hps::GrayImage img = hps::read_image(input);
  const hps::Sketch sketch = hps::sketch_from_image(img, params);
  std::size_t strokes = 0, points = 0;
  for (const hps::Glyph& g : sketch.glyphs)
    for (const hps::Polyline& s : g.strokes) {
      ++strokes;
      points += s.points.size();
    }
  std::printf("%s: %dx%d, %zu glyph(s), %zu stroke(s), %zu points\n",
              input.c_str(), sketch.canvas_width, sketch.canvas_height,
              sketch.glyphs.size(), strokes, points);
  if (!svg_out.empty()) write_text(svg_out, hps::sketch_to_svg(sketch));
  if (!skeleton_out.empty()) {
    const auto r = hps::vectorize_image(img, params);
    hps::write_pgm(skeleton_out, r.skeleton);
  }
  return 0;
}

int cmd_encode(const std::string& input, const std::string& out_path,
               const hps::PipelineParams& params) {
  std::ostringstream out;
  const std::string ext = fs::path(input).extension().string();
  if (ext == ".jsonl") {
    for (const hps::DetectionRecord& rec : hps::read_detection_jsonl(input)) {
      hps::Sketch s;
      s.canvas_width = rec.width;
      s.canvas_height = rec.height;
      for (std::size_t i = 0; i < rec.detections.size(); ++i)
        s.glyphs.push_back(hps::glyph_from_detection(
            rec.detections[i], "d" + std::to_string(i)));
      out << hps::case_to_json(
                 hps::encode_scene(s, {}, rec.image_id))
                 .dump()
          << "\n";
    }
  } else {
    const hps::GrayImage img = hps::read_image(input);
    const hps::Glyph g =
        hps::glyph_from_image(img, std::nullopt, "g0", params);
    out << hps::case_to_json(hps::encode_shape(g, params.shape, input)).dump(2)
        << "\n";
  }
  write_text(out_path, out.str());
  return 0;
}

void save_experiment(const hps::ExperimentConfig& cfg,
                     const hps::ExperimentOutput& out) {
  fs::create_directories(cfg.out_dir);
  if (cfg.phal)
    hps::save_concepts((fs::path(cfg.out_dir) / "pools").string(),
                       out.concepts);
  else
    hps::save_pools((fs::path(cfg.out_dir) / "pools").string(), out.pools);
}

int cmd_train(const std::string& config_path) {
  const hps::ExperimentConfig cfg = hps::load_config(config_path);
  const hps::ExperimentOutput out = hps::train_pools(cfg);
  save_experiment(cfg, out);
  std::printf("trained %d item(s) (%d encoded, %d skipped) -> %s/pools\n",
              out.report.added_count, out.report.encoded_count,
              out.report.skipped_unencodable, cfg.out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& config_path, bool phal_flag, bool trace) {
  hps::ExperimentConfig cfg = hps::load_config(config_path);
  if (phal_flag) cfg.phal = true;
  const hps::ExperimentOutput out = hps::run_experiment(cfg);
  fs::create_directories(cfg.out_dir);
  save_experiment(cfg, out);
  {
    std::ofstream rep(fs::path(cfg.out_dir) / "report.json");
    rep << hps::report_to_json(out.report).dump(2) << "\n";
  }
  if (trace && cfg.phal)
    std::fprintf(stderr,
                 "note: per-item traces are written during classification "
                 "only for probes given via `hps classify --trace`\n");
  std::printf("accuracy %.2f%% (%d/%d), wall %.1fs, report -> %s/report.json\n",
              out.report.accuracy, out.report.correct, out.report.total,
              out.report.wall_seconds, cfg.out_dir.c_str());
  return 0;
}

int cmd_classify(const std::string& pools_dir, const std::string& input,
                 bool trace, const hps::PipelineParams& params) {
  const hps::GrayImage img = hps::read_image(input);
  const hps::Glyph g = hps::glyph_from_image(img, std::nullopt, "probe", params);

  bool phal = false;
  {
    std::ifstream in(fs::path(pools_dir) / "manifest.json");
    if (!in) throw hps::format_error(pools_dir + ": missing manifest.json");
    hps::json manifest;
    in >> manifest;
    phal = manifest.value("phal", false);
  }

  if (phal) {
    const auto concepts = hps::load_concepts(pools_dir);
    const auto levels = hps::decompose(g, params.shape);
    const hps::CascadeResult r = hps::classify_cascade(levels, concepts);
    std::printf("%s %.4f\n", r.label.symbol.c_str(), r.score);
    if (trace)
      for (const hps::CascadeStage& st : r.trace) {
        std::printf("  level %d:", st.level);
        for (const auto& [name, score] : st.scores)
          std::printf(" %s=%.4f", name.c_str(), score);
        std::printf("\n");
      }
  } else {
    const auto pools = hps::load_pools(pools_dir);
    const hps::Classification c =
        hps::classify(hps::encode_shape(g, params.shape), pools);
    std::printf("%s %.4f (from %s)\n", c.label.symbol.c_str(), c.score,
                c.item_id.c_str());
  }
  return 0;
}

int cmd_inspect(const std::string& pool_path) {
  const hps::GeneralizationPool pool = hps::load_pool(pool_path);
  std::cout << hps::inspect_pool_text(pool);
  return 0;
}

// --- vrd subcommands -------------------------------------------------------

std::vector<hps::RelationTriple> collect_triples(
    const std::vector<hps::DetectionRecord>& records) {
  std::vector<hps::RelationTriple> out;
  for (const auto& rec : records)
    out.insert(out.end(), rec.triples.begin(), rec.triples.end());
  return out;
}

int cmd_vrd_train(const std::string& data, const std::string& pools_dir) {
  const auto records = hps::read_detection_jsonl(data);
  std::map<std::string, hps::GeneralizationPool> pools;
  hps::train_predicates(collect_triples(records), pools);
  std::vector<hps::GeneralizationPool> vec;
  for (auto& [name, pool] : pools) vec.push_back(std::move(pool));
  hps::save_pools(pools_dir, vec);
  std::printf("trained %zu predicate pool(s) -> %s\n", vec.size(),
              pools_dir.c_str());
  return 0;
}

std::map<std::string, hps::GeneralizationPool> load_predicate_pools(
    const std::string& dir) {
  std::map<std::string, hps::GeneralizationPool> out;
  for (auto& pool : hps::load_pools(dir))
    out.emplace(pool.label.symbol, std::move(pool));
  return out;
}

int cmd_vrd_predict(const std::string& data, const std::string& pools_dir,
                    const std::string& out_path, int top) {
  const auto pools = load_predicate_pools(pools_dir);
  hps::json out = hps::json::array();
  for (const auto& rec : hps::read_detection_jsonl(data)) {
    if (rec.detections.size() < 2) continue;
    auto preds = hps::predict(rec.detections, pools);
    if (top > 0 && preds.size() > static_cast<std::size_t>(top))
      preds.resize(top);
    hps::json jr;
    jr["image_id"] = rec.image_id;
    jr["predictions"] = hps::json::array();
    for (const auto& p : preds)
      jr["predictions"].push_back(
          {{"subject", {p.subject_box.x0, p.subject_box.y0, p.subject_box.x1,
                        p.subject_box.y1}},
           {"subject_label", p.subject_label.symbol},
           {"predicate", p.predicate.symbol},
           {"object", {p.object_box.x0, p.object_box.y0, p.object_box.x1,
                       p.object_box.y1}},
           {"object_label", p.object_label.symbol},
           {"score", p.score}});
    out.push_back(std::move(jr));
  }
  write_text(out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_vrd_eval(const std::string& train_data, const std::string& test_data,
                 const std::string& out_path) {
  const auto train_records = hps::read_detection_jsonl(train_data);
  std::map<std::string, hps::GeneralizationPool> pools;
  hps::train_predicates(collect_triples(train_records), pools);

  const auto test_records = hps::read_detection_jsonl(test_data);
  std::map<std::string, std::vector<hps::RankedPrediction>> per_image;
  for (const auto& rec : test_records) {
    if (rec.detections.size() < 2) continue;
    per_image[rec.image_id] = hps::predict(rec.detections, pools);
  }
  const auto gt = collect_triples(test_records);

  hps::json metrics;
  auto put = [&](const char* name, int k) {
    const auto r = hps::recall_at_k(per_image, gt, k);
    if (r)
      metrics[name] = *r;
    else
      metrics[name] = "n/a";
  };
  put("recall@1", 1);
  put("recall@50", 50);
  put("recall@100", 100);

  hps::json per_pred = hps::json::object();
  std::map<std::string, std::vector<hps::RelationTriple>> by_pred;
  for (const auto& t : gt) by_pred[t.predicate.symbol].push_back(t);
  for (const auto& [pred, triples] : by_pred) {
    const auto r = hps::recall_at_k(per_image, triples, 100);
    per_pred[pred] = r ? hps::json(*r) : hps::json("n/a");
  }
  metrics["per_predicate_recall@100"] = std::move(per_pred);

  write_text(out_path, metrics.dump(2) + "\n");
  if (!out_path.empty() && out_path != "-")
    std::cout << metrics.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hps: sketch/scene encoding and analogical concept learning"};
  app.require_subcommand(1);

  int threshold = 128;
  std::string polarity = "bright";
  double eps = 1.5, gap = -1.0;
  app.add_option("--threshold", threshold, "binarization threshold (0..255)");
  app.add_option("--polarity", polarity, "ink polarity: bright | dark");
  app.add_option("--simplify-eps", eps, "polyline simplification epsilon, px");
  app.add_option("--group-gap", gap,
                 "stroke grouping gap in px (< 0: single glyph)");

  auto* vectorize = app.add_subcommand("vectorize", "bitmap -> digital ink");
  std::string vec_input, vec_svg, vec_skel;
  vectorize->add_option("input", vec_input, "PGM/PNG image")->required();
  vectorize->add_option("--svg", vec_svg, "write ink as SVG");
  vectorize->add_option("--skeleton", vec_skel, "write skeleton as PGM");

  auto* encode = app.add_subcommand("encode", "bitmap or detection JSONL -> case JSON");
  std::string enc_input, enc_out;
  encode->add_option("input", enc_input, "image or .jsonl detections")->required();
  encode->add_option("--out", enc_out, "output path (default stdout)");

  auto* train = app.add_subcommand("train", "train pools from a config");
  std::string train_cfg;
  train->add_option("--config", train_cfg, "config file")->required();

  auto* classify = app.add_subcommand("classify", "classify one image");
  std::string cls_pools, cls_input;
  bool cls_trace = false;
  classify->add_option("--pools", cls_pools, "pool directory")->required();
  classify->add_option("input", cls_input, "image to classify")->required();
  classify->add_flag("--trace", cls_trace, "print cascade trace");

  auto* eval = app.add_subcommand("eval", "run a full experiment");
  std::string eval_cfg;
  bool eval_phal = false, eval_trace = false;
  eval->add_option("--config", eval_cfg, "config file")->required();
  eval->add_flag("--phal", eval_phal, "hierarchical cascade classification");
  eval->add_flag("--trace", eval_trace, "verbose cascade tracing");

  auto* inspect = app.add_subcommand("inspect", "pretty-print a pool file");
  std::string ins_pool;
  inspect->add_option("pool", ins_pool, "pool JSON file")->required();

  auto* vrd = app.add_subcommand("vrd", "visual relationship detection");
  vrd->require_subcommand(1);
  auto* vrd_train = vrd->add_subcommand("train", "train predicate pools");
  std::string vt_data, vt_pools;
  vrd_train->add_option("--data", vt_data, "detection JSONL with triples")->required();
  vrd_train->add_option("--pools", vt_pools, "output pool directory")->required();
  auto* vrd_predict = vrd->add_subcommand("predict", "rank predicates per image");
  std::string vp_data, vp_pools, vp_out;
  int vp_top = 100;
  vrd_predict->add_option("--data", vp_data, "detection JSONL")->required();
  vrd_predict->add_option("--pools", vp_pools, "pool directory")->required();
  vrd_predict->add_option("--out", vp_out, "output path (default stdout)");
  vrd_predict->add_option("--top", vp_top, "keep this many predictions per image");
  auto* vrd_eval = vrd->add_subcommand("eval", "train + evaluate recall@K");
  std::string ve_train, ve_test, ve_out;
  vrd_eval->add_option("--train", ve_train, "training JSONL")->required();
  vrd_eval->add_option("--test", ve_test, "test JSONL")->required();
  vrd_eval->add_option("--out", ve_out, "metrics output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const hps::PipelineParams params =
        pipeline_from_flags(threshold, polarity, eps, gap);
    if (vectorize->parsed())
      return cmd_vectorize(vec_input, vec_svg, vec_skel, params);
    if (encode->parsed()) return cmd_encode(enc_input, enc_out, params);
    if (train->parsed()) return cmd_train(train_cfg);
    if (classify->parsed())
      return cmd_classify(cls_pools, cls_input, cls_trace, params);
    if (eval->parsed()) return cmd_eval(eval_cfg, eval_phal, eval_trace);
    if (inspect->parsed()) return cmd_inspect(ins_pool);
    if (vrd->parsed()) {
      if (vrd_train->parsed()) return cmd_vrd_train(vt_data, vt_pools);
      if (vrd_predict->parsed())
        return cmd_vrd_predict(vp_data, vp_pools, vp_out, vp_top);
      if (vrd_eval->parsed()) return cmd_vrd_eval(ve_train, ve_test, ve_out);
    }
  } catch (const hps::format_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hps::invalid_input& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hps::invariant_violation& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 1;
}
