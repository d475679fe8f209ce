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

#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "hps/glyph.hpp"

using namespace hps;

namespace {

Polyline seg(std::initializer_list<Point> pts) {
  Polyline p;
  p.points = pts;
  return p;
}

}  // namespace

TEST_CASE("concept labels are case-normalized and non-empty") {
  CHECK(ConceptLabel("Person").symbol == "person");
  CHECK(ConceptLabel("DIGIT-7").symbol == "digit-7");
  CHECK_THROWS_AS(ConceptLabel(""), invalid_input);
}

TEST_CASE("glyph_from_strokes computes tight bounding boxes") {
  const Glyph g1 = glyph_from_strokes({seg({{0, 0}, {10, 0}})}, std::nullopt, "a");
  CHECK(g1.bbox == Rect{0, 0, 10, 0});

  const Glyph g2 = glyph_from_strokes(
      {seg({{0, 0}, {5, 5}}), seg({{3, 3}, {9, 1}})}, std::nullopt, "b");
  CHECK(g2.bbox == Rect{0, 0, 9, 5});

  CHECK_THROWS_AS(glyph_from_strokes({}, std::nullopt, "c"), invalid_input);
}

TEST_CASE("glyph bbox equals the pointwise min/max oracle") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-50, 150);
  std::vector<Polyline> strokes;
  double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
  for (int s = 0; s < 50; ++s) {
    Polyline p;
    for (int i = 0; i < 5; ++i) {
      const Point pt{u(rng), u(rng)};
      p.points.push_back(pt);
      x0 = std::min(x0, pt.x);
      y0 = std::min(y0, pt.y);
      x1 = std::max(x1, pt.x);
      y1 = std::max(y1, pt.y);
    }
    strokes.push_back(std::move(p));
  }
  const Glyph g = glyph_from_strokes(std::move(strokes), std::nullopt, "r");
  CHECK(g.bbox == Rect{x0, y0, x1, y1});
}

TEST_CASE("glyph_from_detection uses the box as closed rectangle ink") {
  Detection d;
  d.bbox = {10, 10, 50, 80};
  d.label = ConceptLabel("person");
  const Glyph g = glyph_from_detection(d, "d0");
  REQUIRE(g.strokes.size() == 1);
  CHECK(g.strokes[0].closed);
  CHECK(g.strokes[0].points.size() == 4);
  CHECK(g.label->symbol == "person");
  CHECK(g.bbox == d.bbox);  // exact round trip
}

TEST_CASE("glyph_from_detection rejects zero-area boxes") {
  Detection d;
  d.bbox = {10, 10, 10, 80};
  d.label = ConceptLabel("line");
  CHECK_THROWS_AS(glyph_from_detection(d, "d0"), invalid_input);
}

TEST_CASE("masks become outline ink") {
  Detection d;
  d.bbox = {0, 0, 10, 10};
  d.label = ConceptLabel("blob");
  d.mask = {{0, 0}, {10, 0}, {5, 9}};
  const Glyph g = glyph_from_detection(d, "d0");
  REQUIRE(g.strokes.size() == 1);
  CHECK(g.strokes[0].points.size() == 3);
  CHECK(g.strokes[0].closed);
}

TEST_CASE("group_strokes keeps near strokes together and far ones apart") {
  const auto one = group_strokes({seg({{0, 0}, {5, 0}})}, 5.0);
  CHECK(one.size() == 1);

  const auto two = group_strokes(
      {seg({{0, 0}, {5, 0}}), seg({{105, 0}, {110, 0}})}, 5.0);
  CHECK(two.size() == 2);
}

TEST_CASE("group_strokes equals a union-find oracle over pairwise distances") {
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<Polyline> strokes;
  for (int i = 0; i < 12; ++i)
    strokes.push_back(seg({{u(rng), u(rng)}, {u(rng), u(rng)}}));
  const double gap = 18.0;

  // Oracle: union-find over all-pairs minimum vertex distance.
  std::vector<std::size_t> parent(strokes.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < strokes.size(); ++i)
    for (std::size_t j = i + 1; j < strokes.size(); ++j) {
      double best = 1e18;
      for (const Point& p : strokes[i].points)
        for (const Point& q : strokes[j].points)
          best = std::min(best, distance(p, q));
      if (best <= gap) parent[find(i)] = find(j);
    }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < strokes.size(); ++i) roots.insert(find(i));

  const auto glyphs = group_strokes(strokes, gap);
  CHECK(glyphs.size() == roots.size());

  // Partition: every input stroke appears in exactly one glyph.
  std::size_t total = 0;
  for (const Glyph& g : glyphs) total += g.strokes.size();
  CHECK(total == strokes.size());
}
