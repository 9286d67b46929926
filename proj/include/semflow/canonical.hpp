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

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semflow/diagram.hpp"

namespace semflow {

std::string canonicalize(const WiringDiagram& d);

namespace detail {

// Canonical labeling by iterative color refinement seeded with (label,
// port types), with individualization-refinement on ties. Colors are
// interned exactly (no hashing), so equal canonical strings really do
// describe equal structures.
class Canonicalizer {
 public:
  explicit Canonicalizer(const WiringDiagram& d) : d_(d) {
    for (const auto& [id, b] : d.boxes) {
      index_[id] = (int)ids_.size();
      ids_.push_back(id);
    }
    n_ = (int)ids_.size();
    in_adj_.resize(n_);
    out_adj_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const Box& b = d.box(ids_[i]);
      in_adj_[i].resize(b.inputs.size());
      out_adj_[i].resize(b.outputs.size());
    }
    for (const auto& w : d.wires) {
      if (w.tgt.kind == Endpoint::Kind::BoxIn)
        in_adj_[index_.at(w.tgt.box)][w.tgt.port].push_back(w.src);
      if (w.src.kind == Endpoint::Kind::BoxOut)
        out_adj_[index_.at(w.src.box)][w.src.port].push_back(w.tgt);
    }
  }

  std::string run() {
    std::vector<int> colors(n_);
    {
      std::map<std::string, std::vector<int>> groups;
      for (int i = 0; i < n_; ++i) groups[seed_signature(i)].push_back(i);
      int c = 0;
      for (auto& [sig, members] : groups) {
        for (int i : members) colors[i] = c;
        ++c;
      }
    }
    refine(colors);
    return search(colors);
  }

 private:
  std::string seed_signature(int i) const {
    const Box& b = d_.box(ids_[i]);
    std::string s;
    if (b.nested())
      s = "N{" + canonicalize(*b.inner) + "}";
    else if (b.label)
      s = "A{" + *b.label + "}";
    else
      s = "U";
    s += "(";
    for (const auto& p : b.inputs) s += p.is_unlabeled() ? "?;" : p.text() + ";";
    s += ")(";
    for (const auto& p : b.outputs) s += p.is_unlabeled() ? "?;" : p.text() + ";";
    s += ")";
    return s;
  }

  std::string peer_token(const Endpoint& e, const std::vector<int>& colors,
                         bool) const {
    switch (e.kind) {
      case Endpoint::Kind::OuterIn:
        return "I" + std::to_string(e.port);
      case Endpoint::Kind::OuterOut:
        return "O" + std::to_string(e.port);
      default:
        return "c" + std::to_string(colors[index_.at(e.box)]) + "." +
               std::to_string(e.port);
    }
  }

  void refine(std::vector<int>& colors) const {
    if (n_ == 0) return;
    int distinct = 1 + *std::max_element(colors.begin(), colors.end());
    for (;;) {
      std::map<std::string, std::vector<int>> groups;
      for (int i = 0; i < n_; ++i) {
        std::string sig = std::to_string(colors[i]) + "|";
        for (const auto& port : in_adj_[i]) {
          std::vector<std::string> toks;
          for (const auto& e : port) toks.push_back(peer_token(e, colors, true));
          std::sort(toks.begin(), toks.end());
          for (const auto& t : toks) sig += t + ",";
          sig += ";";
        }
        sig += "|";
        for (const auto& port : out_adj_[i]) {
          std::vector<std::string> toks;
          for (const auto& e : port)
            toks.push_back(peer_token(e, colors, false));
          std::sort(toks.begin(), toks.end());
          for (const auto& t : toks) sig += t + ",";
          sig += ";";
        }
        groups[sig].push_back(i);
      }
      int c = 0;
      for (auto& [sig, members] : groups) {
        for (int i : members) colors[i] = c;
        ++c;
      }
      if (c == distinct) return;
      distinct = c;
    }
  }

  std::string search(std::vector<int> colors) const {
    // Find the first color class with more than one member.
    std::map<int, std::vector<int>> classes;
    for (int i = 0; i < n_; ++i) classes[colors[i]].push_back(i);
    const std::vector<int>* tied = nullptr;
    for (const auto& [c, members] : classes)
      if (members.size() > 1) {
        tied = &members;
        break;
      }
    if (!tied) return emit(colors);
    std::string best;
    for (int pick : *tied) {
      std::vector<int> branch = colors;
      branch[pick] = n_;  // individualize
      refine(branch);
      std::string s = search(std::move(branch));
      if (best.empty() || s < best) best = s;
    }
    return best;
  }

  std::string emit(const std::vector<int>& colors) const {
    std::vector<int> order(n_);
    for (int i = 0; i < n_; ++i) order[colors[i]] = i;
    std::vector<int> rank(n_);
    for (int c = 0; c < n_; ++c) rank[order[c]] = c;

    std::string s = "in[";
    for (const auto& p : d_.inputs) s += (p.is_unlabeled() ? "?" : p.text()) + ";";
    s += "]out[";
    for (const auto& p : d_.outputs)
      s += (p.is_unlabeled() ? "?" : p.text()) + ";";
    s += "]\n";
    for (int c = 0; c < n_; ++c) s += "b" + std::to_string(c) + "=" +
                                      seed_signature(order[c]) + "\n";
    auto ep = [&](const Endpoint& e) -> std::string {
      switch (e.kind) {
        case Endpoint::Kind::OuterIn:
          return "I" + std::to_string(e.port);
        case Endpoint::Kind::OuterOut:
          return "O" + std::to_string(e.port);
        case Endpoint::Kind::BoxIn:
          return "b" + std::to_string(rank[index_.at(e.box)]) + "i" +
                 std::to_string(e.port);
        case Endpoint::Kind::BoxOut:
          return "b" + std::to_string(rank[index_.at(e.box)]) + "o" +
                 std::to_string(e.port);
      }
      return {};
    };
    std::vector<std::string> ws;
    for (const auto& w : d_.wires) ws.push_back(ep(w.src) + ">" + ep(w.tgt));
    std::sort(ws.begin(), ws.end());
    for (const auto& w : ws) s += w + "\n";
    return s;
  }

  const WiringDiagram& d_;
  std::vector<std::string> ids_;
  std::map<std::string, int> index_;
  int n_ = 0;
  std::vector<std::vector<std::vector<Endpoint>>> in_adj_, out_adj_;
};

}  // namespace detail

/// Canonical form: equal strings iff the diagrams are isomorphic by a
/// box bijection preserving labels, port order and types, and wiring,
/// fixing outer ports. Nested boxes are canonicalized recursively.
/// Element values are excluded.
inline std::string canonicalize(const WiringDiagram& d) {
  return detail::Canonicalizer(d).run();
}

inline bool is_isomorphic(const WiringDiagram& a, const WiringDiagram& b) {
  if (a.boxes.size() != b.boxes.size() || a.wires.size() != b.wires.size() ||
      a.inputs.size() != b.inputs.size() ||
      a.outputs.size() != b.outputs.size())
    return false;
  return canonicalize(a) == canonicalize(b);
}

/// The labeled sub-structure of a flat diagram: labeled boxes plus the
/// wiring among them, with every path through unlabeled boxes collapsed
/// to a single edge (an unlabeled box conservatively connects each of its
/// inputs to each of its outputs). Port types, outer ports, and the
/// unlabeled boxes themselves are forgotten. The result is a diagram in
/// shape only: box inputs may have several incoming edges.
inline WiringDiagram labeled_skeleton(const WiringDiagram& diagram) {
  WiringDiagram d = flatten(diagram);

  // Sources of each wire target, looking backwards through unlabeled boxes.
  std::map<std::string, std::vector<Endpoint>> unlabeled_sources;
  std::map<Endpoint, std::vector<Endpoint>> into;  // target -> wire sources
  for (const auto& w : d.wires) into[w.tgt].push_back(w.src);

  std::function<std::vector<Endpoint>(const Endpoint&)> labeled_srcs =
      [&](const Endpoint& src) -> std::vector<Endpoint> {
    if (src.kind == Endpoint::Kind::OuterIn) return {};
    const Box& b = d.box(src.box);
    if (!b.unlabeled()) return {src};
    auto memo = unlabeled_sources.find(src.box);
    if (memo != unlabeled_sources.end()) return memo->second;
    unlabeled_sources[src.box] = {};  // guard (graph is acyclic anyway)
    std::set<Endpoint> acc;
    for (int p = 0; p < (int)b.inputs.size(); ++p) {
      auto it = into.find(Endpoint::box_in(src.box, p));
      if (it == into.end()) continue;
      for (const auto& s : it->second)
        for (const auto& ls : labeled_srcs(s)) acc.insert(ls);
    }
    std::vector<Endpoint> out(acc.begin(), acc.end());
    unlabeled_sources[src.box] = out;
    return out;
  };

  WiringDiagram skel;
  std::map<std::string, std::pair<int, int>> arity;  // max used port + 1
  std::set<Wire> edges;
  for (const auto& [id, b] : d.boxes) {
    if (b.unlabeled()) continue;
    arity[id] = {0, 0};
  }
  for (const auto& [id, b] : d.boxes) {
    if (b.unlabeled()) continue;
    for (int p = 0; p < (int)b.inputs.size(); ++p) {
      auto it = into.find(Endpoint::box_in(id, p));
      if (it == into.end()) continue;
      for (const auto& s : it->second)
        for (const auto& ls : labeled_srcs(s)) {
          edges.insert({ls, Endpoint::box_in(id, p)});
          arity[id].first = std::max(arity[id].first, p + 1);
          arity[ls.box].second = std::max(arity[ls.box].second, ls.port + 1);
        }
    }
  }
  for (const auto& [id, io] : arity) {
    Box nb;
    nb.label = d.box(id).label;
    nb.inputs.assign(io.first, PortType::unlabeled());
    nb.outputs.assign(io.second, PortType::unlabeled());
    skel.boxes.emplace(id, std::move(nb));
  }
  for (const auto& e : edges) skel.add_wire(e.src, e.tgt);
  return skel;
}

/// Isomorphism of labeled sub-structures: the "modulo the blank boxes"
/// comparison.
inline bool labeled_isomorphic(const WiringDiagram& a, const WiringDiagram& b) {
  return canonicalize(labeled_skeleton(a)) == canonicalize(labeled_skeleton(b));
}

}  // namespace semflow
