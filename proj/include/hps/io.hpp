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

#ifndef HPS_IO_HPP
#define HPS_IO_HPP

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hps/case.hpp"
#include "hps/glyph.hpp"
#include "hps/image.hpp"
#include "hps/sage.hpp"
#include "hps/vrd.hpp"

namespace hps {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// PGM (P5) and PNG
// ---------------------------------------------------------------------------

inline GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path);

  auto next_token = [&in, &path]() {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw format_error(path + ": truncated PGM header");
    return tok;
  };

  if (next_token() != "P5") throw format_error(path + ": not a binary PGM (P5)");
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w < 1 || h < 1) throw format_error(path + ": bad PGM dimensions");
  if (maxval <= 0 || maxval > 255)
    throw format_error(path + ": only 8-bit PGM supported");

  GrayImage img(w, h);
  in.read(reinterpret_cast<char*>(img.samples.data()),
          static_cast<std::streamsize>(img.samples.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.samples.size()))
    throw format_error(path + ": truncated PGM pixel data");
  return img;
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot write " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.samples.data()),
            static_cast<std::streamsize>(img.samples.size()));
}

inline void write_pgm(const std::string& path, const BinaryImage& img) {
  GrayImage g(img.width, img.height);
  for (std::size_t i = 0; i < img.bits.size(); ++i)
    g.samples[i] = img.bits[i] ? 255 : 0;
  write_pgm(path, g);
}

/// 8-bit grayscale view of a PNG file; color and palette images are
/// converted, 16-bit depth is narrowed, alpha is dropped.
inline GrayImage read_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw format_error("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw format_error(path + ": libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw format_error(path + ": PNG decode error");
  }

  png_init_io(png, fp);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_strip_16(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  GrayImage img(w, h);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = img.samples.data() + static_cast<std::size_t>(y) * w;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

/// Dispatch on extension: .pgm or .png.
inline GrayImage read_image(const std::string& path) {
  const std::filesystem::path p(path);
  const std::string ext = p.extension().string();
  if (ext == ".pgm" || ext == ".PGM") return read_pgm(path);
  if (ext == ".png" || ext == ".PNG") return read_png(path);
  throw format_error(path + ": unsupported image format (PGM/PNG only)");
}

// ---------------------------------------------------------------------------
// IDX (MNIST-style) files
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path,
                               std::size_t offset) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4)
    throw format_error(path + ": truncated at byte offset " +
                       std::to_string(offset));
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace detail

inline std::vector<GrayImage> read_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path);
  const std::uint32_t magic = detail::read_be32(in, path, 0);
  if (magic != 0x00000803)
    throw format_error(path + ": bad image magic at byte offset 0 (got " +
                       std::to_string(magic) + ", want 2051)");
  const std::uint32_t count = detail::read_be32(in, path, 4);
  const std::uint32_t rows = detail::read_be32(in, path, 8);
  const std::uint32_t cols = detail::read_be32(in, path, 12);
  if (rows == 0 || cols == 0)
    throw format_error(path + ": zero image dimensions at byte offset 8");

  std::vector<GrayImage> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    GrayImage img(static_cast<int>(cols), static_cast<int>(rows));
    in.read(reinterpret_cast<char*>(img.samples.data()),
            static_cast<std::streamsize>(img.samples.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.samples.size()))
      throw format_error(
          path + ": truncated image data at byte offset " +
          std::to_string(16 + static_cast<std::size_t>(i) * rows * cols));
    out.push_back(std::move(img));
  }
  return out;
}

inline std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path);
  const std::uint32_t magic = detail::read_be32(in, path, 0);
  if (magic != 0x00000801)
    throw format_error(path + ": bad label magic at byte offset 0 (got " +
                       std::to_string(magic) + ", want 2049)");
  const std::uint32_t count = detail::read_be32(in, path, 4);
  std::vector<std::uint8_t> out(count);
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.size()))
    throw format_error(path + ": truncated label data at byte offset 8");
  return out;
}

inline std::vector<std::pair<GrayImage, std::uint8_t>> load_idx(
    const std::string& images_path, const std::string& labels_path) {
  auto images = read_idx_images(images_path);
  auto labels = read_idx_labels(labels_path);
  if (images.size() != labels.size())
    throw format_error("IDX count mismatch: " + std::to_string(images.size()) +
                       " images vs " + std::to_string(labels.size()) +
                       " labels");
  std::vector<std::pair<GrayImage, std::uint8_t>> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i)
    out.emplace_back(std::move(images[i]), labels[i]);
  return out;
}

/// root/<label>/*.png (or .pgm), label = subdirectory name, deterministic
/// lexicographic order. Unreadable files are skipped with a warning on
/// stderr; a class directory with no readable images is an error.
inline std::vector<std::pair<GrayImage, std::string>> load_png_dir(
    const std::string& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw format_error(root + ": not a directory");

  std::vector<std::string> class_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) class_dirs.push_back(entry.path().string());
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty())
    throw format_error(root + ": no class subdirectories");

  std::vector<std::pair<GrayImage, std::string>> out;
  for (const std::string& dir : class_dirs) {
    const std::string label = fs::path(dir).filename().string();
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".png" || ext == ".PNG" || ext == ".pgm" || ext == ".PGM")
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::size_t loaded = 0;
    for (const std::string& f : files) {
      try {
        out.emplace_back(read_image(f), label);
        ++loaded;
      } catch (const format_error& e) {
        std::fprintf(stderr, "warning: skipping %s: %s\n", f.c_str(), e.what());
      }
    }
    if (loaded == 0)
      throw format_error(dir + ": class has no readable images");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Case JSON
// ---------------------------------------------------------------------------

namespace detail {

inline json expr_to_json(const ExprPtr& e) {
  json j;
  j["functor"] = e->functor;
  j["symmetric"] = e->symmetric;
  json args = json::array();
  for (const ExprArg& a : e->args) {
    if (a.is_entity())
      args.push_back(a.entity);
    else
      args.push_back(expr_to_json(a.sub));
  }
  j["args"] = std::move(args);
  return j;
}

inline ExprPtr expr_from_json(const json& j) {
  if (!j.contains("functor") || !j.contains("args"))
    throw format_error("fact object needs functor and args");
  std::vector<ExprArg> args;
  for (const json& a : j.at("args")) {
    if (a.is_string())
      args.push_back(entity_arg(a.get<std::string>()));
    else if (a.is_object())
      args.push_back(expr_arg(expr_from_json(a)));
    else
      throw format_error("fact argument must be an entity id or a fact");
  }
  return make_expr(j.at("functor").get<std::string>(), std::move(args),
                   j.value("symmetric", false));
}

}  // namespace detail

inline json case_to_json(const CaseDescription& c) {
  json j;
  j["provenance"] = c.provenance;
  json ents = json::array();
  for (const Entity& e : c.entities)
    ents.push_back({{"id", e.id}, {"kind", to_string(e.kind)}});
  j["entities"] = std::move(ents);
  json facts = json::array();
  for (const ExprPtr& e : c.expressions)
    facts.push_back(detail::expr_to_json(e));
  j["facts"] = std::move(facts);
  return j;
}

inline CaseDescription case_from_json(const json& j) {
  CaseDescription c;
  c.provenance = j.value("provenance", "");
  for (const json& e : j.value("entities", json::array()))
    c.entities.push_back({e.at("id").get<std::string>(),
                          entity_kind_from_string(
                              e.value("kind", std::string("skolem")))});
  for (const json& f : j.value("facts", json::array()))
    c.expressions.push_back(detail::expr_from_json(f));
  return canonicalize(c);
}

// ---------------------------------------------------------------------------
// Detection JSONL
// ---------------------------------------------------------------------------

/// One image's worth of detection records.
struct DetectionRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<Detection> detections;
  std::vector<RelationTriple> triples;
};

inline DetectionRecord detection_record_from_json(const json& j,
                                                  const std::string& where) {
  DetectionRecord rec;
  try {
    rec.image_id = j.at("image_id").get<std::string>();
    rec.width = j.at("width").get<int>();
    rec.height = j.at("height").get<int>();
    for (const json& d : j.value("detections", json::array())) {
      Detection det;
      const auto& bb = d.at("bbox");
      det.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(),
                  bb.at(2).get<double>(), bb.at(3).get<double>()};
      det.label = ConceptLabel(d.at("label").get<std::string>());
      det.score = d.value("score", 1.0);
      if (det.score < 0.0 || det.score > 1.0)
        throw format_error("score out of [0,1]");
      if (d.contains("mask"))
        for (const json& p : d.at("mask"))
          det.mask.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      rec.detections.push_back(std::move(det));
    }
    for (const json& t : j.value("triples", json::array())) {
      const int si = t.at(0).get<int>();
      const int oi = t.at(2).get<int>();
      if (si < 0 || oi < 0 ||
          si >= static_cast<int>(rec.detections.size()) ||
          oi >= static_cast<int>(rec.detections.size()))
        throw format_error("triple index out of range");
      RelationTriple triple;
      triple.subject = rec.detections[si];
      triple.object = rec.detections[oi];
      triple.predicate = ConceptLabel(t.at(1).get<std::string>());
      triple.image_id = rec.image_id;
      rec.triples.push_back(std::move(triple));
    }
  } catch (const json::exception& e) {
    throw format_error(where + ": " + e.what());
  }
  return rec;
}

inline std::vector<DetectionRecord> read_detection_jsonl(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open " + path);
  std::vector<DetectionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw format_error(path + ":" + std::to_string(lineno) + ": " +
                         e.what());
    }
    out.push_back(detection_record_from_json(
        j, path + ":" + std::to_string(lineno)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pool persistence
// ---------------------------------------------------------------------------

inline json pool_to_json(const GeneralizationPool& pool) {
  json j;
  j["concept"] = pool.label.symbol;
  j["threshold"] = pool.threshold;
  j["prune_cutoff"] = pool.prune_cutoff;
  j["next_gen"] = pool.next_gen;
  j["next_outlier"] = pool.next_outlier;
  j["examples_added"] = pool.examples_added;

  json gens = json::array();
  for (const Generalization& g : pool.generalizations) {
    json gj;
    gj["id"] = g.id;
    gj["n_examples"] = g.n_examples;
    json ents = json::array();
    for (const GeneralizedEntity& e : g.entities) {
      json ej;
      ej["id"] = e.id;
      ej["kind"] = to_string(e.kind);
      json labels = json::object();
      for (const auto& [label, count] : g.label_counts(e.id))
        labels[label] = count;
      ej["labels"] = std::move(labels);
      ents.push_back(std::move(ej));
    }
    gj["entities"] = std::move(ents);
    json exprs = json::array();
    for (const GenExpression& ge : g.expressions) {
      json ej = detail::expr_to_json(ge.expr);
      ej["count"] = ge.count;
      exprs.push_back(std::move(ej));
    }
    gj["expressions"] = std::move(exprs);
    gens.push_back(std::move(gj));
  }
  j["generalizations"] = std::move(gens);

  json outliers = json::array();
  for (const auto& [id, c] : pool.outliers) {
    json oj = case_to_json(c);
    oj["id"] = id;
    outliers.push_back(std::move(oj));
  }
  j["outliers"] = std::move(outliers);
  return j;
}

inline GeneralizationPool pool_from_json(const json& j) {
  GeneralizationPool pool;
  try {
    pool.label = ConceptLabel(j.at("concept").get<std::string>());
    pool.threshold = j.at("threshold").get<double>();
    pool.prune_cutoff = j.at("prune_cutoff").get<double>();
    pool.next_gen = j.value("next_gen", 0);
    pool.next_outlier = j.value("next_outlier", 0);
    pool.examples_added = j.value("examples_added", 0);
    for (const json& gj : j.value("generalizations", json::array())) {
      Generalization g;
      g.id = gj.at("id").get<std::string>();
      g.n_examples = gj.at("n_examples").get<int>();
      for (const json& ej : gj.value("entities", json::array()))
        g.entities.push_back(
            {ej.at("id").get<std::string>(),
             entity_kind_from_string(ej.value("kind", std::string("skolem")))});
      for (const json& ej : gj.value("expressions", json::array()))
        g.expressions.push_back(
            {detail::expr_from_json(ej), ej.at("count").get<int>()});
      pool.generalizations.push_back(std::move(g));
    }
    for (const json& oj : j.value("outliers", json::array()))
      pool.outliers.emplace_back(oj.at("id").get<std::string>(),
                                 case_from_json(oj));
  } catch (const json::exception& e) {
    throw format_error(std::string("pool file: ") + e.what());
  }
  return pool;
}

inline void save_pool(const std::string& path, const GeneralizationPool& pool) {
  std::ofstream out(path);
  if (!out) throw format_error("cannot write " + path);
  out << pool_to_json(pool).dump(2) << "\n";
}

inline GeneralizationPool load_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw format_error(path + ": " + e.what());
  }
  return pool_from_json(j);
}

/// Save one pool file per concept plus a manifest listing them. Content
/// vectors are never persisted; they are recomputed on load.
inline void save_pools(const std::string& dir,
                       const std::vector<GeneralizationPool>& pools) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json manifest;
  manifest["pools"] = json::array();
  for (const GeneralizationPool& pool : pools) {
    const std::string file = "pool_" + pool.label.symbol + ".json";
    save_pool((fs::path(dir) / file).string(), pool);
    manifest["pools"].push_back(file);
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw format_error("cannot write manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

inline std::vector<GeneralizationPool> load_pools(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw format_error(dir + ": missing manifest.json");
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw format_error(dir + "/manifest.json: " + e.what());
  }
  std::vector<GeneralizationPool> pools;
  for (const json& f : manifest.value("pools", json::array()))
    pools.push_back(load_pool((fs::path(dir) / f.get<std::string>()).string()));
  return pools;
}

// ---------------------------------------------------------------------------
// SVG export
// ---------------------------------------------------------------------------

inline std::string sketch_to_svg(const Sketch& s) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << s.canvas_width << "\" height=\"" << s.canvas_height << "\">\n";
  for (const Glyph& g : s.glyphs) {
    const std::string label = g.label ? g.label->symbol : "";
    for (const Polyline& stroke : g.strokes) {
      out << "  <path d=\"";
      for (std::size_t i = 0; i < stroke.points.size(); ++i)
        out << (i == 0 ? "M " : " L ") << stroke.points[i].x << " "
            << stroke.points[i].y;
      if (stroke.closed) out << " Z";
      out << "\" fill=\"none\" stroke=\"black\" data-label=\"" << label
          << "\" data-glyph=\"" << g.id << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hps

#endif  // HPS_IO_HPP
