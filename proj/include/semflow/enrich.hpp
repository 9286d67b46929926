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
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semflow/canonical.hpp"
#include "semflow/diagram.hpp"
#include "semflow/ontology.hpp"

namespace semflow {

enum class Strictness { Strict, Lenient };

struct EnrichmentReport {
  int expanded_boxes = 0;
  int unannotated_boxes = 0;
  int contracted_groups = 0;
  int type_hits = 0;
  int type_misses = 0;
  int skipped_expansions = 0;  // lenient-mode slot or type failures
  std::vector<std::vector<std::string>> contracted;  // provenance per group

  nlohmann::json to_json() const {
    nlohmann::json j{{"expanded_boxes", expanded_boxes},
                     {"unannotated_boxes", unannotated_boxes},
                     {"contracted_groups", contracted_groups},
                     {"type_hits", type_hits},
                     {"type_misses", type_misses},
                     {"skipped_expansions", skipped_expansions}};
    j["contracted"] = contracted;
    return j;
  }
};

namespace enrich_detail {

// Resolves an annotation slot against a raw box's ports: by name when the
// slot names one and the box carries argument names, else by 1-based
// position. A name and position that disagree is a slot mismatch.
inline int resolve_input_slot(const SlotRef& slot, const Box& box,
                              const std::string& ann_key) {
  int by_name = -1;
  if (slot.name) {
    for (int i = 0; i < (int)box.arg_names.size(); ++i)
      if (box.arg_names[i] == *slot.name) {
        by_name = i;
        break;
      }
  }
  int by_pos = -1;
  if (slot.position) {
    int p = *slot.position - 1;
    if (p >= 0 && p < (int)box.inputs.size()) by_pos = p;
  }
  if (by_name >= 0 && by_pos >= 0 && by_name != by_pos)
    throw SlotMismatch("annotation " + ann_key + ": slot name '" +
                       *slot.name + "' and position " +
                       std::to_string(*slot.position) +
                       " resolve to different ports");
  if (by_name >= 0) return by_name;
  if (by_pos >= 0) return by_pos;
  throw SlotMismatch("annotation " + ann_key + ": slot " +
                     (slot.name ? "'" + *slot.name + "'"
                                : "#" + std::to_string(slot.position.value_or(0))) +
                     " does not resolve on the box");
}

inline int resolve_output_slot(const SlotRef& slot, const Box& box,
                               const std::string& ann_key) {
  if (slot.position) {
    int p = *slot.position - 1;
    if (p >= 0 && p < (int)box.outputs.size()) return p;
  }
  throw SlotMismatch("annotation " + ann_key + ": output slot #" +
                     std::to_string(slot.position.value_or(0)) +
                     " does not resolve on the box");
}

// Splices an annotation's definition diagram in place of a raw box,
// aligning concrete ports to definition ports through the slot map.
// Unreferenced inputs are discarded (their wires deleted); an unreferenced
// but consumed output is a slot mismatch.
inline void splice_annotated(WiringDiagram& d, const std::string& box_id,
                             const FunctionAnnotation& ann,
                             const WiringDiagram& defn, const Ontology& o) {
  const Box box = d.box(box_id);  // copy; we mutate d
  const std::string key = ann.key();

  if (ann.input_slots.size() != defn.inputs.size() ||
      ann.output_slots.size() != defn.outputs.size())
    throw SlotMismatch("annotation " + key + ": slot lists do not match the "
                       "definition's ports");
  std::vector<int> in_map(ann.input_slots.size());
  for (size_t j = 0; j < ann.input_slots.size(); ++j)
    in_map[j] = resolve_input_slot(ann.input_slots[j], box, key);
  std::vector<int> out_map(ann.output_slots.size());
  for (size_t j = 0; j < ann.output_slots.size(); ++j) {
    out_map[j] = resolve_output_slot(ann.output_slots[j], box, key);
    for (size_t i = 0; i < j; ++i)
      if (out_map[i] == out_map[j])
        throw SlotMismatch("annotation " + key +
                           ": two output slots map the same box output");
  }

  // Functoriality at the box: annotated concrete input types must be
  // subtypes of the definition ports; outputs must be comparable.
  for (size_t j = 0; j < in_map.size(); ++j) {
    const PortType& concrete = box.inputs[in_map[j]];
    if (concrete.is_unlabeled()) continue;
    const TypeAnnotation* ta =
        o.type_annotation(ann.language, *concrete.label);
    if (!ta) continue;
    ObType port = ObType::parse(defn.inputs[j].text());
    if (!o.preorder().leq(ta->abstract, port))
      throw TypeConflict("annotation " + key + ": input " + *concrete.label +
                         " is annotated " + ta->abstract.render() +
                         ", not a subtype of definition port " + port.render());
  }
  for (size_t j = 0; j < out_map.size(); ++j) {
    const PortType& concrete = box.outputs[out_map[j]];
    if (concrete.is_unlabeled()) continue;
    const TypeAnnotation* ta =
        o.type_annotation(ann.language, *concrete.label);
    if (!ta) continue;
    ObType port = ObType::parse(defn.outputs[j].text());
    if (!o.preorder().leq(ta->abstract, port) &&
        !o.preorder().leq(port, ta->abstract))
      throw TypeConflict("annotation " + key + ": output " + *concrete.label +
                         " is annotated " + ta->abstract.render() +
                         ", incomparable with definition port " +
                         port.render());
  }

  // Boundary wires of the box in d.
  std::vector<Endpoint> in_src(box.inputs.size());
  std::vector<bool> has_src(box.inputs.size(), false);
  std::vector<std::vector<Endpoint>> out_tgts(box.outputs.size());
  std::vector<Wire> rest;
  for (const auto& w : d.wires) {
    if (w.tgt.kind == Endpoint::Kind::BoxIn && w.tgt.box == box_id) {
      in_src[w.tgt.port] = w.src;
      has_src[w.tgt.port] = true;
    } else if (w.src.kind == Endpoint::Kind::BoxOut && w.src.box == box_id) {
      out_tgts[w.src.port].push_back(w.tgt);
    } else {
      rest.push_back(w);
    }
  }
  std::vector<bool> out_covered(box.outputs.size(), false);
  for (int q : out_map) out_covered[q] = true;
  for (int q = 0; q < (int)box.outputs.size(); ++q)
    if (!out_covered[q] && !out_tgts[q].empty())
      throw SlotMismatch("annotation " + key + ": box output " +
                         std::to_string(q + 1) +
                         " is consumed but not mapped by any output slot");
  for (size_t j = 0; j < in_map.size(); ++j)
    if (!has_src[in_map[j]])
      throw SlotMismatch("annotation " + key + ": box input " +
                         std::to_string(in_map[j] + 1) + " has no wire");

  d.boxes.erase(box_id);
  d.wires = std::move(rest);
  std::map<std::string, std::string> rename;
  for (const auto& [id, b] : defn.boxes) rename[id] = d.add_box(b, box_id);

  auto embed = [&](const Endpoint& e) -> Endpoint {
    if (e.kind == Endpoint::Kind::OuterIn)
      return in_src[in_map[e.port]];  // definition input -> box port source
    Endpoint r = e;
    r.box = rename.at(e.box);
    return r;
  };

  std::vector<Endpoint> defn_out_src(defn.outputs.size());
  for (const auto& w : defn.wires) {
    Endpoint src = embed(w.src);
    if (w.tgt.kind == Endpoint::Kind::OuterOut) {
      defn_out_src[w.tgt.port] = src;
      for (const auto& t : out_tgts[out_map[w.tgt.port]]) d.add_wire(src, t);
    } else {
      Endpoint tgt = w.tgt;
      tgt.box = rename.at(tgt.box);
      d.add_wire(src, tgt);
    }
  }

  // Observed values migrate onto the definition's producing endpoints.
  std::map<Endpoint, ElementValue> kept;
  for (const auto& [e, v] : d.elements) {
    if (e.kind == Endpoint::Kind::BoxOut && e.box == box_id) {
      for (size_t j = 0; j < out_map.size(); ++j)
        if (out_map[j] == e.port) kept[defn_out_src[j]] = v;
    } else {
      kept[e] = v;
    }
  }
  d.elements = std::move(kept);
}

inline bool looks_abstract(const Ontology& o, const Box& b) {
  if (!b.label) return true;  // already blank
  if (o.functions.count(*b.label)) return true;
  return b.label->rfind("(curry", 0) == 0 || b.label->rfind("(uncurry", 0) == 0;
}

}  // namespace enrich_detail

/// Expansion stage: every box with a resolvable annotation is replaced by
/// its abstract definition; unannotated boxes lose their concrete labels
/// (kept as a provenance note) and their ports are retyped — source-side
/// ports take the concrete type's annotation when one exists, target-side
/// ports become unknown. Boxes without call metadata whose labels are
/// already ontology concepts are left alone, so enrichment is stable.
inline WiringDiagram expand(const WiringDiagram& raw, const Ontology& o,
                            EnrichmentReport* report = nullptr,
                            Strictness strictness = Strictness::Strict) {
  WiringDiagram d = raw;
  EnrichmentReport local;
  EnrichmentReport& rep = report ? *report : local;

  // Outer-port languages must be read off the raw boxes before their call
  // keys are consumed by expansion.
  std::vector<std::optional<std::string>> outer_in_lang(d.inputs.size());
  for (const auto& w : d.wires) {
    if (w.src.kind != Endpoint::Kind::OuterIn) continue;
    if (w.tgt.kind != Endpoint::Kind::BoxIn) continue;
    const Box& b = d.box(w.tgt.box);
    if (b.call && !outer_in_lang[w.src.port])
      outer_in_lang[w.src.port] = b.call->language;
  }

  auto annotate_port = [&](PortType& p, const std::string& language) {
    if (p.is_unlabeled()) return;
    const TypeAnnotation* ta = o.type_annotation(language, *p.label);
    if (ta) {
      p = PortType::labeled(ta->abstract.render());
      rep.type_hits++;
    } else {
      p = PortType::unlabeled();
      rep.type_misses++;
    }
  };

  std::vector<std::string> original_ids;
  for (const auto& [id, b] : d.boxes) original_ids.push_back(id);
  for (const auto& id : original_ids) {
    Box& b = d.boxes.at(id);
    if (!b.call) {
      if (!enrich_detail::looks_abstract(o, b)) {
        b.provenance = b.label;
        b.label.reset();
        rep.unannotated_boxes++;
        for (auto& p : b.inputs) p = PortType::unlabeled();
        for (auto& p : b.outputs) p = PortType::unlabeled();
      }
      continue;
    }
    const FunctionAnnotation* ann = o.resolve_annotation(*b.call);
    bool expanded = false;
    if (ann && ann->definition) {
      try {
        WiringDiagram defn = term_to_diagram(*ann->definition, o);
        enrich_detail::splice_annotated(d, id, *ann, defn, o);
        rep.expanded_boxes++;
        expanded = true;
      } catch (const Error&) {
        if (strictness == Strictness::Strict) throw;
        rep.skipped_expansions++;
      }
    }
    if (!expanded) {
      Box& bb = d.boxes.at(id);  // re-fetch; splice may have failed midway? no: throws before mutating
      std::string language = bb.call->language;
      bb.provenance = bb.label;
      bb.label.reset();
      bb.call.reset();
      bb.arg_names.clear();
      rep.unannotated_boxes++;
      for (auto& p : bb.inputs) p = PortType::unlabeled();
      for (auto& p : bb.outputs) annotate_port(p, language);
    }
  }

  // Outer inputs with no language context (already-enriched diagrams) are
  // left as they are; outer outputs are targets and become unknown.
  for (int k = 0; k < (int)d.inputs.size(); ++k)
    if (outer_in_lang[k]) annotate_port(d.inputs[k], *outer_in_lang[k]);
  for (auto& p : d.outputs) p = PortType::unlabeled();
  return d;
}

/// Contraction stage: every maximal connected subdiagram of unlabeled
/// boxes is encapsulated by a single unlabeled box. A connected component
/// that is not convex is split along topological rank into convex pieces
/// first, so the result stays acyclic.
inline WiringDiagram contract(const WiringDiagram& expanded,
                              EnrichmentReport* report = nullptr) {
  WiringDiagram d = expanded;
  EnrichmentReport local;
  EnrichmentReport& rep = report ? *report : local;

  std::set<std::string> blank;
  for (const auto& [id, b] : d.boxes)
    if (b.unlabeled()) blank.insert(id);
  if (blank.empty()) return d;

  // Connected components of the unlabeled subgraph (wires in either
  // direction count as adjacency).
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& w : d.wires)
    if (w.src.kind == Endpoint::Kind::BoxOut &&
        w.tgt.kind == Endpoint::Kind::BoxIn && blank.count(w.src.box) &&
        blank.count(w.tgt.box)) {
      adj[w.src.box].insert(w.tgt.box);
      adj[w.tgt.box].insert(w.src.box);
    }
  std::vector<std::vector<std::string>> components;
  std::set<std::string> seen;
  for (const auto& id : blank) {
    if (seen.count(id)) continue;
    std::vector<std::string> comp, stack{id};
    seen.insert(id);
    while (!stack.empty()) {
      std::string x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (const auto& y : adj[x])
        if (seen.insert(y).second) stack.push_back(y);
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }

  auto convex = [&](const WiringDiagram& g, const std::set<std::string>& s) {
    try {
      (void)encapsulate(g, s);
      return true;
    } catch (const NonConvexSubset&) {
      return false;
    }
  };

  for (const auto& comp : components) {
    // Greedy coarsest-first convex partition in topological order.
    std::vector<std::string> order = d.topo_order();
    std::map<std::string, int> rank;
    for (int i = 0; i < (int)order.size(); ++i) rank[order[i]] = i;
    std::vector<std::string> members = comp;
    std::sort(members.begin(), members.end(),
              [&](const std::string& a, const std::string& b) {
                return std::make_pair(rank[a], a) < std::make_pair(rank[b], b);
              });
    std::vector<std::set<std::string>> parts;
    for (const auto& m : members) {
      bool placed = false;
      if (!parts.empty()) {
        std::set<std::string> candidate = parts.back();
        candidate.insert(m);
        if (convex(d, candidate)) {
          parts.back() = std::move(candidate);
          placed = true;
        }
      }
      if (!placed) parts.push_back({m});
    }
    for (const auto& part : parts) {
      std::vector<std::string> prov;
      for (const auto& id : part) {
        const Box& b = d.box(id);
        prov.push_back(b.provenance.value_or(""));
      }
      d = encapsulate(d, part);
      rep.contracted_groups++;
      rep.contracted.push_back(std::move(prov));
    }
  }
  return d;
}

/// Semantic enrichment: functorial expansion of annotated code followed by
/// contraction of maximal connected unannotated regions.
inline std::pair<WiringDiagram, EnrichmentReport> enrich(
    const WiringDiagram& raw, const Ontology& o,
    Strictness strictness = Strictness::Strict) {
  EnrichmentReport report;
  WiringDiagram flat = flatten(raw);
  WiringDiagram expanded = expand(flat, o, &report, strictness);
  WiringDiagram contracted = contract(expanded, &report);
  return {std::move(contracted), std::move(report)};
}

}  // namespace semflow
