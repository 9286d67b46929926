// Copyright 2026 The semflow Authors
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

#include <random>

#include "semflow/canonical.hpp"
#include "support.hpp"

using namespace semflow;
using semflow::testing::brute_force_isomorphic;

namespace {

WiringDiagram chain(const std::vector<std::string>& labels) {
  WiringDiagram d;
  d.inputs = {PortType::unlabeled()};
  d.outputs = {PortType::unlabeled()};
  Endpoint prev = Endpoint::outer_in(0);
  for (size_t i = 0; i < labels.size(); ++i) {
    Box b;
    b.label = labels[i];
    b.inputs = {PortType::unlabeled()};
    b.outputs = {PortType::unlabeled()};
    std::string id = d.add_box(b, "c" + std::to_string(i));
    d.add_wire(prev, Endpoint::box_in(id, 0));
    prev = Endpoint::box_out(id, 0);
  }
  d.add_wire(prev, Endpoint::outer_out(0));
  return d;
}

}  // namespace

TEST_CASE("canonical form is invariant under box renaming") {
  std::mt19937 rng(11);
  for (int i = 0; i < 40; ++i) {
    WiringDiagram d = testing::random_diagram(rng);
    WiringDiagram renamed = testing::rename_boxes(d, rng);
    CHECK(canonicalize(d) == canonicalize(renamed));
  }
}

TEST_CASE("distinct chains get distinct forms") {
  CHECK(canonicalize(chain({"f", "g"})) != canonicalize(chain({"g", "f"})));
  CHECK(canonicalize(chain({"f", "g"})) == canonicalize(chain({"f", "g"})));
}

TEST_CASE("outer ports are fixed, not permuted") {
  // Two inputs crossing into two boxes vs going straight: not isomorphic.
  auto build = [](bool crossed) {
    WiringDiagram d;
    d.inputs = {PortType::unlabeled(), PortType::unlabeled()};
    Box f;
    f.label = "f";
    f.inputs = {PortType::unlabeled()};
    Box g;
    g.label = "g";
    g.inputs = {PortType::unlabeled()};
    d.add_box(f, "f");
    d.add_box(g, "g");
    d.add_wire(Endpoint::outer_in(crossed ? 1 : 0), Endpoint::box_in("f", 0));
    d.add_wire(Endpoint::outer_in(crossed ? 0 : 1), Endpoint::box_in("g", 0));
    return d;
  };
  CHECK_FALSE(is_isomorphic(build(false), build(true)));
}

TEST_CASE("symmetric diagrams need the individualization fallback") {
  // Two interchangeable parallel f boxes fed by one copied source; any
  // 1-WL-equivalent pair must still canonicalize consistently.
  auto diamond = [](const std::string& l1, const std::string& l2) {
    WiringDiagram d;
    d.inputs = {PortType::unlabeled()};
    Box src;
    src.label = "s";
    src.inputs = {PortType::unlabeled()};
    src.outputs = {PortType::unlabeled()};
    Box f1;
    f1.label = l1;
    f1.inputs = {PortType::unlabeled()};
    f1.outputs = {PortType::unlabeled()};
    Box f2 = f1;
    f2.label = l2;
    Box snk;
    snk.label = "t";
    snk.inputs = {PortType::unlabeled(), PortType::unlabeled()};
    snk.outputs = {};
    d.add_box(src, "s");
    d.add_box(f1, "p");
    d.add_box(f2, "q");
    d.add_box(snk, "t");
    d.add_wire(Endpoint::outer_in(0), Endpoint::box_in("s", 0));
    d.add_wire(Endpoint::box_out("s", 0), Endpoint::box_in("p", 0));
    d.add_wire(Endpoint::box_out("s", 0), Endpoint::box_in("q", 0));
    d.add_wire(Endpoint::box_out("p", 0), Endpoint::box_in("t", 0));
    d.add_wire(Endpoint::box_out("q", 0), Endpoint::box_in("t", 1));
    return d;
  };
  WiringDiagram a = diamond("f", "f");
  std::mt19937 rng(12);
  CHECK(canonicalize(a) == canonicalize(testing::rename_boxes(a, rng)));
  CHECK(brute_force_isomorphic(a, diamond("f", "f")));
  CHECK(is_isomorphic(a, diamond("f", "f")));
}

TEST_CASE("canonicalization agrees with permutation search on a corpus") {
  std::mt19937 rng(13);
  std::vector<WiringDiagram> corpus;
  testing::DiagramGen gen;
  gen.min_boxes = 1;
  gen.max_boxes = 6;
  gen.labels = {"f", "g"};  // few labels, more symmetry
  gen.unlabeled_prob = 0.2;
  for (int i = 0; i < 60; ++i) corpus.push_back(testing::random_diagram(rng, gen));

  int pairs = 0, agreements = 0;
  // Renamed copies must be isomorphic.
  for (const auto& d : corpus) {
    WiringDiagram r = testing::rename_boxes(d, rng);
    bool canon = is_isomorphic(d, r);
    bool brute = brute_force_isomorphic(d, r);
    ++pairs;
    agreements += canon == brute && canon ? 1 : 0;
  }
  // Cross pairs, mostly non-isomorphic.
  for (size_t i = 0; i < corpus.size(); ++i)
    for (size_t j = i + 1; j < corpus.size() && pairs < 1000; ++j) {
      bool canon = is_isomorphic(corpus[i], corpus[j]);
      bool brute = brute_force_isomorphic(corpus[i], corpus[j]);
      ++pairs;
      agreements += canon == brute ? 1 : 0;
    }
  REQUIRE(pairs >= 500);
  CHECK(agreements == pairs);
}

TEST_CASE("labeled skeleton collapses paths through blank boxes") {
  // f -> blank -> blank -> g becomes f -> g.
  WiringDiagram d;
  d.inputs = {PortType::unlabeled()};
  auto mk = [&](const std::string& id, std::optional<std::string> label) {
    Box b;
    b.label = label;
    b.inputs = {PortType::unlabeled()};
    b.outputs = {PortType::unlabeled()};
    d.add_box(b, id);
  };
  mk("f", "f");
  mk("u1", std::nullopt);
  mk("u2", std::nullopt);
  mk("g", "g");
  d.add_wire(Endpoint::outer_in(0), Endpoint::box_in("f", 0));
  d.add_wire(Endpoint::box_out("f", 0), Endpoint::box_in("u1", 0));
  d.add_wire(Endpoint::box_out("u1", 0), Endpoint::box_in("u2", 0));
  d.add_wire(Endpoint::box_out("u2", 0), Endpoint::box_in("g", 0));

  WiringDiagram direct;
  direct.inputs = {PortType::unlabeled()};
  {
    Box f;
    f.label = "f";
    f.inputs = {PortType::unlabeled()};
    f.outputs = {PortType::unlabeled()};
    Box g;
    g.label = "g";
    g.inputs = {PortType::unlabeled()};
    g.outputs = {PortType::unlabeled()};
    direct.add_box(f, "a");
    direct.add_box(g, "b");
    direct.add_wire(Endpoint::outer_in(0), Endpoint::box_in("a", 0));
    direct.add_wire(Endpoint::box_out("a", 0), Endpoint::box_in("b", 0));
  }
  CHECK(labeled_isomorphic(d, direct));
  CHECK_FALSE(is_isomorphic(d, direct));
}
