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

#include <memory>
#include <random>

#include "semflow/canonical.hpp"
#include "semflow/diagram.hpp"
#include "support.hpp"

using namespace semflow;
using semflow::testing::brute_force_isomorphic;

namespace {

// One atomic box wired straight through.
WiringDiagram single_box(const std::string& label, int nin, int nout,
                         const std::string& type = "") {
  WiringDiagram d;
  PortType t = type.empty() ? PortType::unlabeled() : PortType::labeled(type);
  d.inputs.assign(nin, t);
  d.outputs.assign(nout, t);
  Box b;
  b.label = label;
  b.inputs = d.inputs;
  b.outputs = d.outputs;
  std::string id = d.add_box(std::move(b), label);
  for (int i = 0; i < nin; ++i)
    d.add_wire(Endpoint::outer_in(i), Endpoint::box_in(id, i));
  for (int i = 0; i < nout; ++i)
    d.add_wire(Endpoint::box_out(id, i), Endpoint::outer_out(i));
  return d;
}

}  // namespace

TEST_CASE("compose identities") {
  auto x = PortType::labeled("x");
  WiringDiagram id1 = identity({x});
  CHECK(is_isomorphic(compose(id1, id1), id1));

  WiringDiagram f = single_box("f", 1, 1, "x");
  WiringDiagram g = single_box("g", 1, 1, "x");
  WiringDiagram fg = compose(f, g);
  CHECK(fg.boxes.size() == 2);
  CHECK(fg.wires.size() == 3);  // in -> f -> g -> out
  CHECK(is_isomorphic(compose(f, id1), f));
  CHECK(is_isomorphic(compose(id1, f), f));
}

TEST_CASE("compose checks arity and types") {
  WiringDiagram f = single_box("f", 1, 2);
  WiringDiagram g = single_box("g", 1, 1);
  CHECK_THROWS_AS(compose(f, g), ArityMismatch);

  WiringDiagram a = single_box("a", 1, 1, "int");
  WiringDiagram b = single_box("b", 1, 1, "str");
  CHECK_THROWS_AS(compose(a, b), TypeMismatch);
  SubtypePreorder p;
  p.add_subtype("int", "str");
  RenderedTypeOrder ord(p);
  CHECK_NOTHROW(compose(a, b, ord));
}

TEST_CASE("compose agrees with a naive wire-gluing oracle") {
  // Oracle: copy both diagrams side by side, then join boundary wires by
  // cross-product, built directly on the public representation.
  auto glue = [](const WiringDiagram& f, const WiringDiagram& g) {
    WiringDiagram r;
    r.inputs = f.inputs;
    r.outputs = g.outputs;
    std::map<std::string, std::string> fm, gm;
    for (const auto& [id, b] : f.boxes) fm[id] = r.add_box(b, "L" + id);
    for (const auto& [id, b] : g.boxes) gm[id] = r.add_box(b, "R" + id);
    auto ren = [](Endpoint e, std::map<std::string, std::string>& m) {
      if (!e.box.empty()) e.box = m[e.box];
      return e;
    };
    for (size_t k = 0; k < f.outputs.size(); ++k) {
      std::vector<Endpoint> srcs, tgts;
      for (const auto& w : f.wires)
        if (w.tgt.kind == Endpoint::Kind::OuterOut && w.tgt.port == (int)k)
          srcs.push_back(ren(w.src, fm));
      for (const auto& w : g.wires)
        if (w.src.kind == Endpoint::Kind::OuterIn && w.src.port == (int)k)
          tgts.push_back(ren(w.tgt, gm));
      for (const auto& s : srcs)
        for (const auto& t : tgts) r.add_wire(s, t);
    }
    for (const auto& w : f.wires)
      if (w.tgt.kind != Endpoint::Kind::OuterOut)
        r.add_wire(ren(w.src, fm), ren(w.tgt, fm));
    for (const auto& w : g.wires)
      if (w.src.kind != Endpoint::Kind::OuterIn)
        r.add_wire(ren(w.src, gm), ren(w.tgt, gm));
    return r;
  };

  std::mt19937 rng(42);
  testing::DiagramGen gen;
  gen.min_boxes = 3;
  gen.max_boxes = 3;
  int done = 0;
  while (done < 6) {
    WiringDiagram f = testing::random_diagram(rng, gen);
    WiringDiagram g = testing::random_diagram(rng, gen);
    if (f.outputs.size() != g.inputs.size()) continue;
    ++done;
    WiringDiagram via_compose = compose(f, g);
    WiringDiagram via_oracle = glue(f, g);
    CHECK(is_isomorphic(via_compose, via_oracle));
    CHECK(brute_force_isomorphic(via_compose, via_oracle));
  }
}

TEST_CASE("product juxtaposes") {
  WiringDiagram f = single_box("f", 1, 1, "x");
  WiringDiagram g = single_box("g", 1, 1, "w");
  CHECK(is_isomorphic(product(empty_diagram(), f), f));
  CHECK(is_isomorphic(product(f, empty_diagram()), f));
  WiringDiagram fg = product(f, g);
  CHECK(fg.boxes.size() == 2);
  CHECK(fg.inputs.size() == 2);
  CHECK(fg.outputs.size() == 2);

  std::mt19937 rng(1);
  for (int i = 0; i < 50; ++i) {
    WiringDiagram a = testing::random_diagram(rng);
    WiringDiagram b = testing::random_diagram(rng);
    CHECK(product(a, b).boxes.size() == a.boxes.size() + b.boxes.size());
  }
}

TEST_CASE("monoidal laws up to isomorphism") {
  std::mt19937 rng(2);
  for (int i = 0; i < 20; ++i) {
    WiringDiagram a = testing::random_diagram(rng);
    WiringDiagram b = testing::random_diagram(rng);
    WiringDiagram c = testing::random_diagram(rng);
    CHECK(is_isomorphic(product(product(a, b), c), product(a, product(b, c))));
  }
  // interchange: (f (x) g) . (h (x) k) iso (f.h) (x) (g.k)
  WiringDiagram f = single_box("f", 1, 1), g = single_box("g", 1, 1);
  WiringDiagram h = single_box("h", 1, 1), k = single_box("k", 1, 1);
  CHECK(is_isomorphic(compose(product(f, g), product(h, k)),
                      product(compose(f, h), compose(g, k))));
}

TEST_CASE("compose associativity up to isomorphism") {
  WiringDiagram f = single_box("f", 1, 1), g = single_box("g", 1, 1),
                h = single_box("h", 1, 1);
  CHECK(is_isomorphic(compose(compose(f, g), h), compose(f, compose(g, h))));
}

TEST_CASE("substitute splices a definition in place of a box") {
  WiringDiagram d = compose(single_box("f", 1, 1), single_box("g", 1, 1));
  std::string gid;
  for (const auto& [id, b] : d.boxes)
    if (b.label == "g") gid = id;

  SECTION("identity substitution") {
    WiringDiagram same = substitute(d, gid, single_box("g", 1, 1));
    CHECK(is_isomorphic(same, d));
  }
  SECTION("one box becomes a chain") {
    WiringDiagram chain =
        compose(single_box("g1", 1, 1), single_box("g2", 1, 1));
    WiringDiagram r = substitute(d, gid, chain);
    CHECK(r.boxes.size() == 3);
    CHECK(r.validate().empty());
  }
  SECTION("unknown box and arity errors") {
    CHECK_THROWS_AS(substitute(d, "nope", single_box("g", 1, 1)), UnknownBox);
    CHECK_THROWS_AS(substitute(d, gid, single_box("g", 2, 1)), ArityMismatch);
  }
}

TEST_CASE("repeated substitution equals one-pass parallel substitution") {
  // Oracle: splice every box's replacement simultaneously by endpoint
  // translation, then compare with the sequential substitute() loop.
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    testing::DiagramGen gen;
    gen.min_boxes = 2;
    gen.max_boxes = 4;
    WiringDiagram d = testing::random_diagram(rng, gen);

    // Replacement for a box: a two-box chain with fitting arity.
    auto replacement = [&](const Box& b) {
      WiringDiagram r;
      r.inputs = b.inputs;
      r.outputs = b.outputs;
      Box first;
      first.label = "pre";
      first.inputs = b.inputs;
      first.outputs.assign(1, PortType::unlabeled());
      Box second;
      second.label = "post";
      second.inputs.assign(1, PortType::unlabeled());
      second.outputs = b.outputs;
      std::string i1 = r.add_box(first, "pre");
      std::string i2 = r.add_box(second, "post");
      for (int p = 0; p < (int)b.inputs.size(); ++p)
        r.add_wire(Endpoint::outer_in(p), Endpoint::box_in(i1, p));
      r.add_wire(Endpoint::box_out(i1, 0), Endpoint::box_in(i2, 0));
      for (int p = 0; p < (int)b.outputs.size(); ++p)
        r.add_wire(Endpoint::box_out(i2, p), Endpoint::outer_out(p));
      return r;
    };

    // Sequential.
    WiringDiagram seq = d;
    std::vector<std::string> ids;
    for (const auto& [id, b] : d.boxes) ids.push_back(id);
    for (const auto& id : ids) seq = substitute(seq, id, replacement(d.box(id)));

    // One-pass oracle.
    WiringDiagram par;
    par.inputs = d.inputs;
    par.outputs = d.outputs;
    std::map<std::string, std::pair<std::string, std::string>> names;
    for (const auto& [id, b] : d.boxes) {
      Box first;
      first.label = "pre";
      first.inputs = b.inputs;
      first.outputs.assign(1, PortType::unlabeled());
      Box second;
      second.label = "post";
      second.inputs.assign(1, PortType::unlabeled());
      second.outputs = b.outputs;
      std::string i1 = par.add_box(first, id + "pre");
      std::string i2 = par.add_box(second, id + "post");
      par.add_wire(Endpoint::box_out(i1, 0), Endpoint::box_in(i2, 0));
      names[id] = {i1, i2};
    }
    for (const auto& w : d.wires) {
      Endpoint s = w.src, t = w.tgt;
      if (s.kind == Endpoint::Kind::BoxOut) s.box = names[s.box].second;
      if (t.kind == Endpoint::Kind::BoxIn) t.box = names[t.box].first;
      par.add_wire(s, t);
    }
    CHECK(is_isomorphic(seq, par));
  }
}

TEST_CASE("flatten inlines nested boxes") {
  WiringDiagram inner = compose(single_box("a", 1, 1), single_box("b", 1, 1));
  WiringDiagram outer;
  outer.inputs = inner.inputs;
  outer.outputs = inner.outputs;
  Box nested;
  nested.inner = std::make_shared<WiringDiagram>(inner);
  nested.inputs = inner.inputs;
  nested.outputs = inner.outputs;
  std::string nid = outer.add_box(nested, "call");
  outer.add_wire(Endpoint::outer_in(0), Endpoint::box_in(nid, 0));
  outer.add_wire(Endpoint::box_out(nid, 0), Endpoint::outer_out(0));
  Box extra;
  extra.label = "c";
  extra.inputs = {};
  extra.outputs = {};
  outer.add_box(extra, "c");

  WiringDiagram flat = flatten(outer);
  CHECK(flat.boxes.size() == 3);
  for (const auto& [id, b] : flat.boxes) CHECK_FALSE(b.nested());
  CHECK(is_isomorphic(flatten(flat), flat));

  // Depth 2: 2 + 3 boxes -> 5 atomic boxes.
  WiringDiagram mid;
  mid.inputs = outer.inputs;
  mid.outputs = outer.outputs;
  Box deep;
  deep.inner = std::make_shared<WiringDiagram>(outer);
  deep.inputs = outer.inputs;
  deep.outputs = outer.outputs;
  std::string did = mid.add_box(deep, "deep");
  mid.add_wire(Endpoint::outer_in(0), Endpoint::box_in(did, 0));
  mid.add_wire(Endpoint::box_out(did, 0), Endpoint::outer_out(0));
  WiringDiagram two = compose(mid, single_box("d", 1, 1));
  two = product(two, single_box("e", 0, 0));
  CHECK(flatten(two).boxes.size() == 5);
}

TEST_CASE("flatten is idempotent on random nested diagrams") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    WiringDiagram inner = testing::random_diagram(rng);
    WiringDiagram host = testing::random_diagram(rng);
    // Wrap inner as a nested box glued onto fresh outer ports of host.
    Box nested;
    nested.inner = std::make_shared<WiringDiagram>(inner);
    nested.inputs = inner.inputs;
    nested.outputs = inner.outputs;
    std::string nid = host.add_box(nested, "nest");
    for (int p = 0; p < (int)inner.inputs.size(); ++p) {
      host.inputs.push_back(inner.inputs[p]);
      host.add_wire(Endpoint::outer_in((int)host.inputs.size() - 1),
                    Endpoint::box_in(nid, p));
    }
    WiringDiagram once = flatten(host);
    CHECK(is_isomorphic(flatten(once), once));
    CHECK(once.boxes.size() == host.boxes.size() - 1 + inner.boxes.size());
  }
}

TEST_CASE("encapsulate replaces a convex set by one unlabeled box") {
  // f -> g -> h with g,h encapsulated.
  WiringDiagram d = compose(
      compose(single_box("f", 1, 1), single_box("g", 1, 1)),
      single_box("h", 1, 1));
  std::set<std::string> gh;
  for (const auto& [id, b] : d.boxes)
    if (b.label != "f") gh.insert(id);
  WiringDiagram r = encapsulate(d, gh);
  CHECK(r.boxes.size() == 2);
  int blanks = 0;
  for (const auto& [id, b] : r.boxes) blanks += b.unlabeled() ? 1 : 0;
  CHECK(blanks == 1);
  CHECK(r.validate().empty());

  SECTION("errors") {
    CHECK_THROWS_AS(encapsulate(d, {}), EmptySubset);
    CHECK_THROWS_AS(encapsulate(d, {"zzz"}), UnknownBox);
  }
  SECTION("single unlabeled box round-trips") {
    std::string blank_id;
    for (const auto& [id, b] : r.boxes)
      if (b.unlabeled()) blank_id = id;
    WiringDiagram again = encapsulate(r, {blank_id});
    CHECK(is_isomorphic(again, r));
  }
}

TEST_CASE("encapsulate rejects non-convex sets") {
  // f -> g -> h and f -> h directly; {f, h} is non-convex.
  WiringDiagram d;
  d.inputs = {PortType::unlabeled()};
  Box f, g, h;
  f.label = "f";
  f.inputs = {PortType::unlabeled()};
  f.outputs = {PortType::unlabeled(), PortType::unlabeled()};
  g.label = "g";
  g.inputs = {PortType::unlabeled()};
  g.outputs = {PortType::unlabeled()};
  h.label = "h";
  h.inputs = {PortType::unlabeled(), PortType::unlabeled()};
  h.outputs = {};
  d.add_box(f, "f");
  d.add_box(g, "g");
  d.add_box(h, "h");
  d.add_wire(Endpoint::outer_in(0), Endpoint::box_in("f", 0));
  d.add_wire(Endpoint::box_out("f", 0), Endpoint::box_in("g", 0));
  d.add_wire(Endpoint::box_out("f", 1), Endpoint::box_in("h", 0));
  d.add_wire(Endpoint::box_out("g", 0), Endpoint::box_in("h", 1));
  CHECK_THROWS_AS(encapsulate(d, {"f", "h"}), NonConvexSubset);
  CHECK_NOTHROW(encapsulate(d, {"f", "g"}));
  CHECK_NOTHROW(encapsulate(d, {"f", "g", "h"}));
}

TEST_CASE("encapsulate boundary ports match a brute-force edge scan") {
  std::mt19937 rng(5);
  int done = 0;
  while (done < 40) {
    testing::DiagramGen gen;
    gen.min_boxes = 3;
    gen.max_boxes = 7;
    WiringDiagram d = testing::random_diagram(rng, gen);
    std::vector<std::string> ids;
    for (const auto& [id, b] : d.boxes) ids.push_back(id);
    std::shuffle(ids.begin(), ids.end(), rng);
    int take = std::uniform_int_distribution<int>(1, (int)ids.size())(rng);
    std::set<std::string> subset(ids.begin(), ids.begin() + take);
    WiringDiagram r;
    try {
      r = encapsulate(d, subset);
    } catch (const NonConvexSubset&) {
      continue;
    }
    ++done;

    // Edge scan on the original diagram.
    int in_cut = 0;
    std::set<Endpoint> out_srcs;
    auto inside = [&](const Endpoint& e) {
      return !e.box.empty() && subset.count(e.box) > 0;
    };
    for (const auto& w : d.wires) {
      if (!inside(w.src) && inside(w.tgt)) in_cut++;
      if (inside(w.src) && !inside(w.tgt)) out_srcs.insert(w.src);
    }
    std::string blank_id;
    for (const auto& [id, b] : r.boxes)
      if (!d.boxes.count(id) || subset.count(id)) blank_id = id;
    const Box& blank = r.box(blank_id);
    CHECK((int)blank.inputs.size() == in_cut);
    CHECK(blank.outputs.size() == out_srcs.size());
    CHECK(r.validate().empty());
    CHECK(r.acyclic());

    // Re-encapsulating the produced box is the identity up to iso.
    CHECK(is_isomorphic(encapsulate(r, {blank_id}), r));
  }
}

TEST_CASE("element values ride along the operations") {
  WiringDiagram f = single_box("f", 1, 1, "x");
  std::string fid = f.boxes.begin()->first;
  f.elements[Endpoint::box_out(fid, 0)] = ElementValue{"obj1", "42", "int"};
  WiringDiagram g = single_box("g", 1, 1, "x");
  WiringDiagram fg = compose(f, g);
  bool found = false;
  for (const auto& [e, v] : fg.elements) found |= v.object_id == "obj1";
  CHECK(found);

  // Substitution migrates the boxed value onto the replacement's producer.
  WiringDiagram repl = compose(single_box("u", 1, 1), single_box("v", 1, 1));
  std::string gid;
  for (const auto& [id, b] : fg.boxes)
    if (b.label == "g") gid = id;
  fg.elements[Endpoint::box_out(gid, 0)] = ElementValue{"obj2", "7", "int"};
  WiringDiagram sub = substitute(fg, gid, repl);
  bool obj2_on_v = false;
  for (const auto& [e, v] : sub.elements)
    if (v.object_id == "obj2" && e.kind == Endpoint::Kind::BoxOut)
      obj2_on_v |= sub.box(e.box).label == "v";
  CHECK(obj2_on_v);
}

TEST_CASE("validate reports malformed diagrams") {
  WiringDiagram d = single_box("f", 1, 1);
  CHECK(d.validate().empty());
  d.add_wire(Endpoint::outer_in(0), Endpoint::box_in(d.boxes.begin()->first, 0));
  CHECK_FALSE(d.validate().empty());  // double-wired input
}
