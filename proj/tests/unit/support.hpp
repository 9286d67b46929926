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

// Test-only generators and brute-force oracles. The oracles deliberately do
// not share code with the implementation paths they check.

#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "semflow/diagram.hpp"
#include "semflow/ontology.hpp"

namespace semflow::testing {

inline std::string fixture(const std::string& rel) {
  return std::string(SEMFLOW_FIXTURES) + "/" + rel;
}

// --- brute-force isomorphism oracle --------------------------------------

inline bool boxes_match(const Box& a, const Box& b) {
  return a.label == b.label && a.inputs == b.inputs && a.outputs == b.outputs &&
         a.nested() == b.nested();
}

/// Tries every label-compatible bijection between box sets and checks the
/// wire sets. Only for flat diagrams of a handful of boxes.
inline bool brute_force_isomorphic(const WiringDiagram& a,
                                   const WiringDiagram& b) {
  if (a.inputs != b.inputs || a.outputs != b.outputs) return false;
  if (a.boxes.size() != b.boxes.size() || a.wires.size() != b.wires.size())
    return false;
  std::vector<std::string> ia, ib;
  for (const auto& [id, box] : a.boxes) ia.push_back(id);
  for (const auto& [id, box] : b.boxes) ib.push_back(id);
  std::set<Wire> wb(b.wires.begin(), b.wires.end());
  std::vector<int> perm(ib.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (size_t i = 0; i < ia.size() && ok; ++i)
      ok = boxes_match(a.boxes.at(ia[i]), b.boxes.at(ib[perm[i]]));
    if (!ok) continue;
    std::map<std::string, std::string> m;
    for (size_t i = 0; i < ia.size(); ++i) m[ia[i]] = ib[perm[i]];
    std::set<Wire> mapped;
    for (const auto& w : a.wires) {
      Wire v = w;
      if (!v.src.box.empty()) v.src.box = m[v.src.box];
      if (!v.tgt.box.empty()) v.tgt.box = m[v.tgt.box];
      mapped.insert(v);
    }
    if (mapped == wb) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return a.boxes.empty() && std::set<Wire>(a.wires.begin(), a.wires.end()) == wb;
}

// --- random flat diagrams -------------------------------------------------

struct DiagramGen {
  int min_boxes = 1, max_boxes = 6;
  std::vector<std::string> labels = {"f", "g", "h"};
  double unlabeled_prob = 0.0;
  double from_outer_prob = 0.35;
  double outer_out_prob = 0.4;
  int max_in = 3, max_out = 2;
};

inline WiringDiagram random_diagram(std::mt19937& rng,
                                    const DiagramGen& g = DiagramGen{}) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> nboxes(g.min_boxes, g.max_boxes);
  WiringDiagram d;
  std::vector<Endpoint> sources;  // available producers, in creation order
  int n = nboxes(rng);
  for (int i = 0; i < n; ++i) {
    Box b;
    if (coin(rng) >= g.unlabeled_prob)
      b.label = g.labels[std::uniform_int_distribution<size_t>(
          0, g.labels.size() - 1)(rng)];
    int nin = std::uniform_int_distribution<int>(0, g.max_in)(rng);
    int nout = std::uniform_int_distribution<int>(0, g.max_out)(rng);
    b.inputs.assign(nin, PortType::unlabeled());
    b.outputs.assign(nout, PortType::unlabeled());
    std::string id = d.add_box(std::move(b), "n" + std::to_string(i));
    for (int p = 0; p < nin; ++p) {
      if (sources.empty() || coin(rng) < g.from_outer_prob) {
        int port = (int)d.inputs.size();
        d.inputs.push_back(PortType::unlabeled());
        d.add_wire(Endpoint::outer_in(port), Endpoint::box_in(id, p));
      } else {
        const Endpoint& s = sources[std::uniform_int_distribution<size_t>(
            0, sources.size() - 1)(rng)];
        d.add_wire(s, Endpoint::box_in(id, p));
      }
    }
    for (int p = 0; p < nout; ++p) sources.push_back(Endpoint::box_out(id, p));
  }
  // A few sources become outer outputs.
  for (const auto& s : sources)
    if (coin(rng) < g.outer_out_prob) {
      int port = (int)d.outputs.size();
      d.outputs.push_back(PortType::unlabeled());
      d.add_wire(s, Endpoint::outer_out(port));
    }
  return d;
}

/// Same diagram with fresh random box ids.
inline WiringDiagram rename_boxes(const WiringDiagram& d, std::mt19937& rng) {
  std::vector<std::string> ids;
  for (const auto& [id, b] : d.boxes) ids.push_back(id);
  std::vector<int> perm(ids.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::map<std::string, std::string> m;
  for (size_t i = 0; i < ids.size(); ++i)
    m[ids[i]] = "r" + std::to_string(perm[i]) + "x";
  WiringDiagram out;
  out.inputs = d.inputs;
  out.outputs = d.outputs;
  for (const auto& [id, b] : d.boxes) out.boxes.emplace(m[id], b);
  for (auto w : d.wires) {
    if (!w.src.box.empty()) w.src.box = m[w.src.box];
    if (!w.tgt.box.empty()) w.tgt.box = m[w.tgt.box];
    out.wires.push_back(w);
  }
  for (auto [e, v] : d.elements) {
    if (!e.box.empty()) e.box = m[e.box];
    out.elements[e] = v;
  }
  return out;
}

// --- subtype closure oracle ----------------------------------------------

/// Floyd–Warshall-style boolean closure over an adjacency matrix.
inline std::vector<std::vector<bool>> closure_oracle(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) m[i][i] = true;
  for (const auto& [a, b] : edges) m[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (m[i][k] && m[k][j]) m[i][j] = true;
  return m;
}

// --- test ontology for terms ----------------------------------------------

/// Small free ontology whose generators chain well: basic types a..d with
/// a couple of subtypes and generators between them.
inline Ontology chain_ontology() {
  Ontology o;
  for (const char* t : {"a", "b", "c", "d", "asup", "bsup"}) {
    TypeConcept tc;
    tc.id = t;
    o.types.emplace(t, tc);
  }
  o.types.at("a").supertypes = {"asup"};
  o.types.at("b").supertypes = {"bsup"};
  auto add = [&](const std::string& id, ObType dom, ObType cod) {
    FunctionConcept f;
    f.id = id;
    f.dom = std::move(dom);
    f.cod = std::move(cod);
    o.functions.emplace(id, f);
  };
  ObType a = ObType::basic("a"), b = ObType::basic("b"), c = ObType::basic("c"),
         d = ObType::basic("d");
  add("fab", a, b);
  add("fbc", b, c);
  add("fcd", c, d);
  add("fda", d, a);
  add("faa", a, a);
  add("fba", b, a);
  add("pair", ObType::product({a, b}), c);
  add("split", c, ObType::product({a, b}));
  add("mk", ObType::unit(), a);
  o.link();
  return o;
}

}  // namespace semflow::testing
