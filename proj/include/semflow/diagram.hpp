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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "semflow/errors.hpp"
#include "semflow/types.hpp"

namespace semflow {

/// A port's type reference: a label (ontology type expression or concrete
/// type name) or the unknown type.
struct PortType {
  std::optional<std::string> label;

  static PortType unlabeled() { return {}; }
  static PortType labeled(std::string s) {
    PortType p;
    p.label = std::move(s);
    return p;
  }
  bool is_unlabeled() const { return !label.has_value(); }
  std::string text() const { return label.value_or(""); }

  bool operator==(const PortType& o) const { return label == o.label; }
  bool operator!=(const PortType& o) const { return !(*this == o); }
};

/// Wires are compatible when either end is unlabeled or the source type is
/// a subtype of the target type under the active order.
inline bool port_compatible(const PortType& src, const PortType& tgt,
                            const TypeOrder& ord) {
  if (src.is_unlabeled() || tgt.is_unlabeled()) return true;
  return ord.leq(*src.label, *tgt.label);
}

/// One end of a wire. OuterIn and BoxOut are sources; BoxIn and OuterOut
/// are targets.
struct Endpoint {
  enum class Kind { OuterIn, OuterOut, BoxIn, BoxOut };
  Kind kind = Kind::OuterIn;
  std::string box;  // empty for outer endpoints
  int port = 0;

  static Endpoint outer_in(int p) { return {Kind::OuterIn, "", p}; }
  static Endpoint outer_out(int p) { return {Kind::OuterOut, "", p}; }
  static Endpoint box_in(std::string b, int p) {
    return {Kind::BoxIn, std::move(b), p};
  }
  static Endpoint box_out(std::string b, int p) {
    return {Kind::BoxOut, std::move(b), p};
  }

  bool is_source() const {
    return kind == Kind::OuterIn || kind == Kind::BoxOut;
  }

  auto tie() const { return std::tie(kind, box, port); }
  bool operator==(const Endpoint& o) const { return tie() == o.tie(); }
  bool operator!=(const Endpoint& o) const { return tie() != o.tie(); }
  bool operator<(const Endpoint& o) const { return tie() < o.tie(); }

  std::string text() const {
    switch (kind) {
      case Kind::OuterIn:
        return "in:" + std::to_string(port);
      case Kind::OuterOut:
        return "out:" + std::to_string(port);
      case Kind::BoxIn:
        return box + ".in:" + std::to_string(port);
      case Kind::BoxOut:
        return box + ".out:" + std::to_string(port);
    }
    return {};
  }
};

struct Wire {
  Endpoint src, tgt;
  bool operator==(const Wire& o) const { return src == o.src && tgt == o.tgt; }
  bool operator<(const Wire& o) const {
    return std::tie(src, tgt) < std::tie(o.src, o.tgt);
  }
};

/// An observed runtime value riding on a source endpoint. Identity is the
/// object id; value_repr is display-only and never compared.
struct ElementValue {
  std::string object_id;
  std::optional<std::string> value_repr;
  std::optional<std::string> concrete_type;
};

/// Where a raw-graph box came from: enough of the §4.1 function key to
/// resolve annotations later.
struct CallKey {
  std::string language;
  std::string package;
  std::string name;
  std::string kind;  // function | method | getter | setter | operator
  std::vector<std::string> lineage;
};

class WiringDiagram;

/// A box: atomic (optional display label) or nested (inner diagram whose
/// outer ports equal this box's ports).
struct Box {
  std::optional<std::string> label;
  std::shared_ptr<const WiringDiagram> inner;  // nested iff non-null
  std::vector<PortType> inputs, outputs;
  std::optional<CallKey> call;          // raw graphs only
  std::vector<std::string> arg_names;   // aligned with inputs; may be empty
  std::optional<std::string> provenance;  // audit note; never serialized

  bool nested() const { return inner != nullptr; }
  bool unlabeled() const { return !nested() && !label.has_value(); }
};

/// A wiring diagram: the syntax of a morphism in a cartesian category.
/// Boxes are function calls, wires are typed values; copying and deleting
/// are implicit as fan-out >= 0 from source endpoints, while box inputs and
/// outer outputs take exactly one incoming wire. Diagrams are value types;
/// every operation below returns a new diagram.
class WiringDiagram {
 public:
  std::vector<PortType> inputs, outputs;
  std::map<std::string, Box> boxes;
  std::vector<Wire> wires;
  std::map<Endpoint, ElementValue> elements;

  const Box& box(const std::string& id) const {
    auto it = boxes.find(id);
    if (it == boxes.end()) throw UnknownBox(id);
    return it->second;
  }

  std::string add_box(Box b, const std::string& hint = "b") {
    std::string id = hint;
    int n = 1;
    while (boxes.count(id)) id = hint + "_" + std::to_string(++n);
    boxes.emplace(id, std::move(b));
    return id;
  }

  void add_wire(Endpoint src, Endpoint tgt) {
    wires.push_back({std::move(src), std::move(tgt)});
  }

  const PortType& port_type(const Endpoint& e) const {
    switch (e.kind) {
      case Endpoint::Kind::OuterIn:
        return inputs.at(e.port);
      case Endpoint::Kind::OuterOut:
        return outputs.at(e.port);
      case Endpoint::Kind::BoxIn:
        return box(e.box).inputs.at(e.port);
      case Endpoint::Kind::BoxOut:
        return box(e.box).outputs.at(e.port);
    }
    throw Error("bad endpoint");
  }

  /// Box dependency edges induced by wires (deduplicated).
  std::set<std::pair<std::string, std::string>> box_edges() const {
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& w : wires)
      if (w.src.kind == Endpoint::Kind::BoxOut &&
          w.tgt.kind == Endpoint::Kind::BoxIn && w.src.box != w.tgt.box)
        edges.emplace(w.src.box, w.tgt.box);
    return edges;
  }

  /// Kahn topological order with box-id tie-break. Throws if cyclic.
  std::vector<std::string> topo_order() const {
    auto edges = box_edges();
    std::map<std::string, int> indeg;
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [id, b] : boxes) indeg[id] = 0;
    for (const auto& [a, b] : edges) {
      indeg[b]++;
      succ[a].push_back(b);
    }
    std::set<std::string> ready;
    for (const auto& [id, d] : indeg)
      if (d == 0) ready.insert(id);
    std::vector<std::string> order;
    while (!ready.empty()) {
      std::string id = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(id);
      for (const auto& s : succ[id])
        if (--indeg[s] == 0) ready.insert(s);
    }
    if (order.size() != boxes.size())
      throw Error("diagram contains a cycle");
    return order;
  }

  bool acyclic() const {
    try {
      topo_order();
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  /// Structural validation. Returns human-readable problems; empty if the
  /// diagram is well-formed under the given type order.
  std::vector<std::string> validate(
      const TypeOrder& ord = TypeOrder()) const {
    std::vector<std::string> out;
    auto endpoint_ok = [&](const Endpoint& e) -> bool {
      switch (e.kind) {
        case Endpoint::Kind::OuterIn:
          return e.port >= 0 && e.port < (int)inputs.size();
        case Endpoint::Kind::OuterOut:
          return e.port >= 0 && e.port < (int)outputs.size();
        case Endpoint::Kind::BoxIn: {
          auto it = boxes.find(e.box);
          return it != boxes.end() && e.port >= 0 &&
                 e.port < (int)it->second.inputs.size();
        }
        case Endpoint::Kind::BoxOut: {
          auto it = boxes.find(e.box);
          return it != boxes.end() && e.port >= 0 &&
                 e.port < (int)it->second.outputs.size();
        }
      }
      return false;
    };
    std::map<Endpoint, int> incoming;
    for (const auto& w : wires) {
      if (!endpoint_ok(w.src) || !w.src.is_source())
        out.push_back("bad wire source " + w.src.text());
      if (!endpoint_ok(w.tgt) || w.tgt.is_source())
        out.push_back("bad wire target " + w.tgt.text());
      if (endpoint_ok(w.src) && endpoint_ok(w.tgt)) {
        incoming[w.tgt]++;
        if (!port_compatible(port_type(w.src), port_type(w.tgt), ord))
          out.push_back("wire type invalid: " + port_type(w.src).text() +
                        " -> " + port_type(w.tgt).text() + " at " +
                        w.tgt.text());
      }
    }
    for (const auto& [id, b] : boxes) {
      for (int p = 0; p < (int)b.inputs.size(); ++p) {
        int n = incoming.count(Endpoint::box_in(id, p))
                    ? incoming[Endpoint::box_in(id, p)]
                    : 0;
        if (n != 1)
          out.push_back("box input " + id + ".in:" + std::to_string(p) +
                        " has " + std::to_string(n) + " incoming wires");
      }
      if (b.nested()) {
        if (b.inner->inputs != b.inputs || b.inner->outputs != b.outputs)
          out.push_back("nested box " + id +
                        " ports differ from inner diagram");
        auto inner = b.inner->validate(ord);
        for (auto& msg : inner) out.push_back(id + ": " + msg);
      }
    }
    for (int p = 0; p < (int)outputs.size(); ++p) {
      int n = incoming.count(Endpoint::outer_out(p))
                  ? incoming[Endpoint::outer_out(p)]
                  : 0;
      if (n != 1)
        out.push_back("outer output " + std::to_string(p) + " has " +
                      std::to_string(n) + " incoming wires");
    }
    for (const auto& [e, v] : elements)
      if (!endpoint_ok(e) || !e.is_source())
        out.push_back("element on bad endpoint " + e.text());
    if (!acyclic()) out.push_back("diagram contains a cycle");
    return out;
  }
};

/// The identity diagram on a port list: no boxes, straight-through wires.
inline WiringDiagram identity(const std::vector<PortType>& ports) {
  WiringDiagram d;
  d.inputs = ports;
  d.outputs = ports;
  for (int i = 0; i < (int)ports.size(); ++i)
    d.add_wire(Endpoint::outer_in(i), Endpoint::outer_out(i));
  return d;
}

/// The empty diagram, unit of the monoidal product.
inline WiringDiagram empty_diagram() { return WiringDiagram{}; }

namespace detail {

/// Copies `src`'s boxes into `dst`, renaming on collision. Returns the
/// id translation map.
inline std::map<std::string, std::string> merge_boxes(
    WiringDiagram& dst, const WiringDiagram& src) {
  std::map<std::string, std::string> rename;
  for (const auto& [id, b] : src.boxes) rename[id] = dst.add_box(b, id);
  return rename;
}

inline Endpoint rename_endpoint(
    const Endpoint& e, const std::map<std::string, std::string>& rename) {
  if (e.box.empty()) return e;
  Endpoint r = e;
  r.box = rename.at(e.box);
  return r;
}

}  // namespace detail

/// Sequential composition: first f, then g. Requires |f.outputs| ==
/// |g.inputs| and pairwise subtype-compatible boundary types.
inline WiringDiagram compose(const WiringDiagram& f, const WiringDiagram& g,
                             const TypeOrder& ord = TypeOrder()) {
  if (f.outputs.size() != g.inputs.size())
    throw ArityMismatch("compose: " + std::to_string(f.outputs.size()) +
                        " outputs vs " + std::to_string(g.inputs.size()) +
                        " inputs");
  for (size_t k = 0; k < f.outputs.size(); ++k)
    if (!port_compatible(f.outputs[k], g.inputs[k], ord))
      throw TypeMismatch((int)k, f.outputs[k].text(), g.inputs[k].text());

  WiringDiagram r;
  r.inputs = f.inputs;
  r.outputs = g.outputs;
  auto fmap = detail::merge_boxes(r, f);
  auto gmap = detail::merge_boxes(r, g);

  // Source feeding f's outer output k.
  std::vector<Endpoint> junction(f.outputs.size());
  for (const auto& w : f.wires) {
    if (w.tgt.kind == Endpoint::Kind::OuterOut)
      junction[w.tgt.port] = detail::rename_endpoint(w.src, fmap);
    else
      r.add_wire(detail::rename_endpoint(w.src, fmap),
                 detail::rename_endpoint(w.tgt, fmap));
  }
  for (const auto& w : g.wires) {
    Endpoint src = w.src.kind == Endpoint::Kind::OuterIn
                       ? junction[w.src.port]
                       : detail::rename_endpoint(w.src, gmap);
    r.add_wire(src, detail::rename_endpoint(w.tgt, gmap));
  }
  for (const auto& [e, v] : f.elements)
    r.elements[detail::rename_endpoint(e, fmap)] = v;
  for (const auto& [e, v] : g.elements) {
    if (e.kind == Endpoint::Kind::OuterIn) {
      Endpoint at = junction[e.port];
      if (!r.elements.count(at)) r.elements[at] = v;  // f's side wins
    } else {
      r.elements[detail::rename_endpoint(e, gmap)] = v;
    }
  }
  return r;
}

/// Monoidal product: side-by-side juxtaposition.
inline WiringDiagram product(const WiringDiagram& f, const WiringDiagram& g) {
  WiringDiagram r;
  r.inputs = f.inputs;
  r.inputs.insert(r.inputs.end(), g.inputs.begin(), g.inputs.end());
  r.outputs = f.outputs;
  r.outputs.insert(r.outputs.end(), g.outputs.begin(), g.outputs.end());
  auto fmap = detail::merge_boxes(r, f);
  auto gmap = detail::merge_boxes(r, g);
  int in_shift = (int)f.inputs.size(), out_shift = (int)f.outputs.size();
  auto shift = [&](Endpoint e,
                   const std::map<std::string, std::string>& m) -> Endpoint {
    e = detail::rename_endpoint(e, m);
    if (&m == &gmap) {
      if (e.kind == Endpoint::Kind::OuterIn) e.port += in_shift;
      if (e.kind == Endpoint::Kind::OuterOut) e.port += out_shift;
    }
    return e;
  };
  for (const auto& w : f.wires) r.add_wire(shift(w.src, fmap), shift(w.tgt, fmap));
  for (const auto& w : g.wires) r.add_wire(shift(w.src, gmap), shift(w.tgt, gmap));
  for (const auto& [e, v] : f.elements) r.elements[shift(e, fmap)] = v;
  for (const auto& [e, v] : g.elements) r.elements[shift(e, gmap)] = v;
  return r;
}

namespace detail {

inline WiringDiagram substitute_impl(const WiringDiagram& d,
                                     const std::string& box_id,
                                     const WiringDiagram& repl,
                                     const TypeOrder* check) {
  const Box& b = d.box(box_id);
  if (b.inputs.size() != repl.inputs.size() ||
      b.outputs.size() != repl.outputs.size())
    throw ArityMismatch("substitute: box " + box_id + " has " +
                        std::to_string(b.inputs.size()) + "/" +
                        std::to_string(b.outputs.size()) +
                        " ports, replacement " +
                        std::to_string(repl.inputs.size()) + "/" +
                        std::to_string(repl.outputs.size()));

  // Wires around the substituted box.
  std::vector<Endpoint> in_src(b.inputs.size());
  std::vector<std::vector<Endpoint>> out_tgts(b.outputs.size());
  WiringDiagram r;
  r.inputs = d.inputs;
  r.outputs = d.outputs;
  for (const auto& [id, bx] : d.boxes)
    if (id != box_id) r.boxes.emplace(id, bx);
  auto rmap = merge_boxes(r, repl);

  std::vector<Wire> untouched;
  for (const auto& w : d.wires) {
    bool into = w.tgt.kind == Endpoint::Kind::BoxIn && w.tgt.box == box_id;
    bool from = w.src.kind == Endpoint::Kind::BoxOut && w.src.box == box_id;
    if (into) {
      in_src[w.tgt.port] = w.src;
      if (check &&
          !port_compatible(d.port_type(w.src), repl.inputs[w.tgt.port],
                           *check))
        throw TypeMismatch(w.tgt.port, d.port_type(w.src).text(),
                           repl.inputs[w.tgt.port].text());
    } else if (from) {
      out_tgts[w.src.port].push_back(w.tgt);
    } else {
      untouched.push_back(w);
    }
  }
  for (const auto& w : untouched) r.add_wire(w.src, w.tgt);

  // Splice replacement wires. A replacement wire into outer output j is
  // rerouted to every consumer of the box's output j; a wire from outer
  // input k picks up the source feeding the box's input k.
  std::vector<Endpoint> out_src(b.outputs.size());
  for (const auto& w : repl.wires) {
    Endpoint src = w.src.kind == Endpoint::Kind::OuterIn
                       ? in_src[w.src.port]
                       : rename_endpoint(w.src, rmap);
    if (w.tgt.kind == Endpoint::Kind::OuterOut) {
      out_src[w.tgt.port] = src;
      for (const auto& t : out_tgts[w.tgt.port]) r.add_wire(src, t);
    } else {
      r.add_wire(src, rename_endpoint(w.tgt, rmap));
    }
  }

  for (const auto& [e, v] : d.elements) {
    if (e.kind == Endpoint::Kind::BoxOut && e.box == box_id)
      r.elements[out_src[e.port]] = v;  // observed value migrates, and wins
    else
      r.elements[e] = v;
  }
  for (const auto& [e, v] : repl.elements) {
    Endpoint at = e.kind == Endpoint::Kind::OuterIn ? in_src[e.port]
                                                    : rename_endpoint(e, rmap);
    if (!r.elements.count(at)) r.elements[at] = v;
  }
  return r;
}

}  // namespace detail

/// Replaces a box by a whole diagram, splicing boundary wires.
inline WiringDiagram substitute(const WiringDiagram& d,
                                const std::string& box_id,
                                const WiringDiagram& replacement,
                                const TypeOrder& ord = TypeOrder()) {
  return detail::substitute_impl(d, box_id, replacement, &ord);
}

/// Replaces every nested box, recursively, by its inner diagram.
inline WiringDiagram flatten(const WiringDiagram& d) {
  WiringDiagram r = d;
  for (;;) {
    std::string nested_id;
    for (const auto& [id, b] : r.boxes)
      if (b.nested()) {
        nested_id = id;
        break;
      }
    if (nested_id.empty()) return r;
    WiringDiagram inner = flatten(*r.boxes.at(nested_id).inner);
    r = detail::substitute_impl(r, nested_id, inner, nullptr);
  }
}

/// Replaces a convex set of boxes by a single unlabeled box. Boundary
/// wires become the new box's ports in a deterministic order (sorted by
/// external endpoint, outer ports first, then box id and port index);
/// output ports are grouped per internal source port, so fan-out through
/// the boundary is preserved. Internal wires and internal element values
/// are discarded.
inline WiringDiagram encapsulate(const WiringDiagram& d,
                                 const std::set<std::string>& box_ids) {
  if (box_ids.empty()) throw EmptySubset();
  for (const auto& id : box_ids) d.box(id);

  // Convexity: no path may leave the set and re-enter it.
  auto edges = d.box_edges();
  std::map<std::string, std::vector<std::string>> succ, pred;
  for (const auto& [a, b] : edges) {
    succ[a].push_back(b);
    pred[b].push_back(a);
  }
  auto reach = [&](const std::map<std::string, std::vector<std::string>>& adj) {
    std::set<std::string> seen;
    std::vector<std::string> stack(box_ids.begin(), box_ids.end());
    while (!stack.empty()) {
      std::string x = stack.back();
      stack.pop_back();
      auto it = adj.find(x);
      if (it == adj.end()) continue;
      for (const auto& y : it->second)
        if (!box_ids.count(y) && seen.insert(y).second) stack.push_back(y);
    }
    return seen;
  };
  std::set<std::string> after = reach(succ), before = reach(pred);
  for (const auto& x : after)
    if (before.count(x))
      throw NonConvexSubset("box " + x +
                            " lies on a path leaving and re-entering the set");

  auto inside = [&](const Endpoint& e) {
    return !e.box.empty() && box_ids.count(e.box) > 0;
  };
  // Sort key for an external endpoint: outer ports first by index, then
  // boxes by id and port. Box ids survive encapsulation, which keeps this
  // order stable under re-encapsulation.
  auto ext_key = [](const Endpoint& e) {
    return std::make_tuple(e.box.empty() ? 0 : 1, e.box, e.port);
  };

  struct InCut {
    Wire w;
  };
  std::vector<Wire> in_cut;
  std::map<Endpoint, std::vector<Endpoint>> out_groups;  // internal src -> tgts
  std::vector<Wire> kept;
  for (const auto& w : d.wires) {
    bool s = inside(w.src), t = inside(w.tgt);
    if (s && t) continue;  // internal, discarded
    if (!s && t)
      in_cut.push_back(w);
    else if (s && !t)
      out_groups[w.src].push_back(w.tgt);
    else
      kept.push_back(w);
  }
  std::sort(in_cut.begin(), in_cut.end(), [&](const Wire& a, const Wire& b) {
    return std::make_tuple(ext_key(a.src), a.tgt.box, a.tgt.port) <
           std::make_tuple(ext_key(b.src), b.tgt.box, b.tgt.port);
  });
  std::vector<std::pair<Endpoint, std::vector<Endpoint>>> out_ports(
      out_groups.begin(), out_groups.end());
  for (auto& [src, tgts] : out_ports)
    std::sort(tgts.begin(), tgts.end(),
              [&](const Endpoint& a, const Endpoint& b) {
                return ext_key(a) < ext_key(b);
              });
  std::sort(out_ports.begin(), out_ports.end(),
            [&](const auto& a, const auto& b) {
              return std::make_tuple(ext_key(a.second.front()), a.first) <
                     std::make_tuple(ext_key(b.second.front()), b.first);
            });

  Box nb;
  {
    std::string prov;
    for (const auto& id : box_ids) {
      const Box& m = d.box(id);
      std::string part = m.provenance
                             ? *m.provenance
                             : (m.label ? *m.label : std::string());
      if (!part.empty()) {
        if (!prov.empty()) prov += "+";
        prov += part;
      }
    }
    if (!prov.empty()) nb.provenance = prov;
  }
  for (const auto& c : in_cut) nb.inputs.push_back(d.port_type(c.tgt));
  for (const auto& [src, tgts] : out_ports)
    nb.outputs.push_back(d.port_type(src));

  WiringDiagram r;
  r.inputs = d.inputs;
  r.outputs = d.outputs;
  for (const auto& [id, b] : d.boxes)
    if (!box_ids.count(id)) r.boxes.emplace(id, b);
  std::string nid = *box_ids.begin();
  r.boxes.emplace(nid, std::move(nb));

  for (const auto& w : kept) r.add_wire(w.src, w.tgt);
  for (int k = 0; k < (int)in_cut.size(); ++k)
    r.add_wire(in_cut[k].src, Endpoint::box_in(nid, k));
  for (int j = 0; j < (int)out_ports.size(); ++j)
    for (const auto& t : out_ports[j].second)
      r.add_wire(Endpoint::box_out(nid, j), t);

  for (const auto& [e, v] : d.elements) {
    if (!inside(e)) {
      r.elements[e] = v;
      continue;
    }
    for (int j = 0; j < (int)out_ports.size(); ++j)
      if (out_ports[j].first == e) {
        r.elements[Endpoint::box_out(nid, j)] = v;  // boundary value kept
        break;
      }
  }
  return r;
}

}  // namespace semflow
