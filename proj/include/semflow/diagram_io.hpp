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
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "semflow/diagram.hpp"

namespace semflow {

namespace io {

using json = nlohmann::json;

inline json port_to_json(const PortType& p) {
  if (p.is_unlabeled()) return json{{"unlabeled", true}};
  return json{{"label", *p.label}};
}

inline PortType port_from_json(const json& j) {
  if (j.contains("label")) return PortType::labeled(j.at("label"));
  if (j.contains("unlabeled") && j.at("unlabeled").get<bool>())
    return PortType::unlabeled();
  throw ParseError("port type", j.dump());
}

inline json endpoint_to_json(const Endpoint& e) {
  json j;
  switch (e.kind) {
    case Endpoint::Kind::OuterIn:
      j["kind"] = "outer_in";
      break;
    case Endpoint::Kind::OuterOut:
      j["kind"] = "outer_out";
      break;
    case Endpoint::Kind::BoxIn:
      j["kind"] = "box_in";
      j["box"] = e.box;
      break;
    case Endpoint::Kind::BoxOut:
      j["kind"] = "box_out";
      j["box"] = e.box;
      break;
  }
  j["port"] = e.port;
  return j;
}

inline Endpoint endpoint_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  int port = j.at("port").get<int>();
  if (kind == "outer_in") return Endpoint::outer_in(port);
  if (kind == "outer_out") return Endpoint::outer_out(port);
  if (kind == "box_in") return Endpoint::box_in(j.at("box"), port);
  if (kind == "box_out") return Endpoint::box_out(j.at("box"), port);
  throw ParseError("endpoint", "unknown kind '" + kind + "'");
}

inline json diagram_to_json(const WiringDiagram& d);

inline json box_to_json(const Box& b) {
  json j;
  j["kind"] = b.nested() ? "nested" : "atomic";
  if (b.label) j["label"] = *b.label;
  if (b.nested()) j["inner"] = diagram_to_json(*b.inner);
  j["inputs"] = json::array();
  for (const auto& p : b.inputs) j["inputs"].push_back(port_to_json(p));
  j["outputs"] = json::array();
  for (const auto& p : b.outputs) j["outputs"].push_back(port_to_json(p));
  if (b.call) {
    json c{{"language", b.call->language},
           {"package", b.call->package},
           {"name", b.call->name},
           {"kind", b.call->kind}};
    if (!b.call->lineage.empty()) c["lineage"] = b.call->lineage;
    j["call"] = std::move(c);
  }
  if (!b.arg_names.empty()) j["argnames"] = b.arg_names;
  return j;
}

inline Box box_from_json(const json& j);

inline WiringDiagram diagram_from_json(const json& j) {
  WiringDiagram d;
  for (const auto& p : j.at("inputs")) d.inputs.push_back(port_from_json(p));
  for (const auto& p : j.at("outputs")) d.outputs.push_back(port_from_json(p));
  if (j.contains("boxes"))
    for (const auto& [id, bj] : j.at("boxes").items())
      d.boxes.emplace(id, box_from_json(bj));
  if (j.contains("wires"))
    for (const auto& wj : j.at("wires"))
      d.add_wire(endpoint_from_json(wj.at("src")),
                 endpoint_from_json(wj.at("tgt")));
  if (j.contains("elements"))
    for (const auto& ej : j.at("elements")) {
      ElementValue v;
      v.object_id = ej.at("object_id").get<std::string>();
      if (ej.contains("value_repr"))
        v.value_repr = ej.at("value_repr").get<std::string>();
      if (ej.contains("concrete_type"))
        v.concrete_type = ej.at("concrete_type").get<std::string>();
      d.elements[endpoint_from_json(ej.at("endpoint"))] = std::move(v);
    }
  return d;
}

inline Box box_from_json(const json& j) {
  Box b;
  const std::string kind = j.at("kind").get<std::string>();
  if (j.contains("label")) b.label = j.at("label").get<std::string>();
  for (const auto& p : j.at("inputs")) b.inputs.push_back(port_from_json(p));
  for (const auto& p : j.at("outputs")) b.outputs.push_back(port_from_json(p));
  if (kind == "nested") {
    b.inner =
        std::make_shared<WiringDiagram>(diagram_from_json(j.at("inner")));
  } else if (kind != "atomic") {
    throw ParseError("box", "unknown kind '" + kind + "'");
  }
  if (j.contains("call")) {
    CallKey c;
    const auto& cj = j.at("call");
    c.language = cj.at("language").get<std::string>();
    c.package = cj.at("package").get<std::string>();
    c.name = cj.at("name").get<std::string>();
    c.kind = cj.at("kind").get<std::string>();
    if (cj.contains("lineage"))
      for (const auto& l : cj.at("lineage"))
        c.lineage.push_back(l.get<std::string>());
    b.call = std::move(c);
  }
  if (j.contains("argnames"))
    for (const auto& a : j.at("argnames"))
      b.arg_names.push_back(a.get<std::string>());
  return b;
}

inline json diagram_to_json(const WiringDiagram& d) {
  json j;
  j["inputs"] = json::array();
  for (const auto& p : d.inputs) j["inputs"].push_back(port_to_json(p));
  j["outputs"] = json::array();
  for (const auto& p : d.outputs) j["outputs"].push_back(port_to_json(p));
  j["boxes"] = json::object();
  for (const auto& [id, b] : d.boxes) j["boxes"][id] = box_to_json(b);
  std::vector<Wire> ws = d.wires;
  std::sort(ws.begin(), ws.end());
  j["wires"] = json::array();
  for (const auto& w : ws)
    j["wires"].push_back(
        json{{"src", endpoint_to_json(w.src)}, {"tgt", endpoint_to_json(w.tgt)}});
  j["elements"] = json::array();
  for (const auto& [e, v] : d.elements) {
    json ej{{"endpoint", endpoint_to_json(e)}, {"object_id", v.object_id}};
    if (v.value_repr) ej["value_repr"] = *v.value_repr;
    if (v.concrete_type) ej["concrete_type"] = *v.concrete_type;
    j["elements"].push_back(std::move(ej));
  }
  return j;
}

}  // namespace io

inline std::string serialize_diagram(const WiringDiagram& d) {
  return io::diagram_to_json(d).dump(2) + "\n";
}

inline WiringDiagram parse_diagram(const std::string& text,
                                   const std::string& where = "diagram") {
  io::json j;
  try {
    j = io::json::parse(text);
    return io::diagram_from_json(j);
  } catch (const io::json::exception& e) {
    throw ParseError(where, e.what());
  }
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// DOT export: one digraph, boxes as nodes labeled with their display name
/// (blank for unlabeled boxes), wires as edges labeled with the source
/// port's type label. Nested boxes are inlined first. Node and edge order
/// is deterministic.
inline std::string to_dot(const WiringDiagram& diagram,
                          const std::string& name = "semflow") {
  WiringDiagram d = flatten(diagram);
  std::string out = "digraph \"" + detail::dot_escape(name) + "\" {\n";
  out += "  rankdir=TB;\n  node [shape=box];\n";
  for (int i = 0; i < (int)d.inputs.size(); ++i)
    out += "  \"in:" + std::to_string(i) + "\" [shape=point];\n";
  for (int i = 0; i < (int)d.outputs.size(); ++i)
    out += "  \"out:" + std::to_string(i) + "\" [shape=point];\n";
  for (const auto& [id, b] : d.boxes)
    out += "  \"" + detail::dot_escape(id) + "\" [label=\"" +
           detail::dot_escape(b.label.value_or("")) + "\"];\n";
  auto node = [](const Endpoint& e) {
    switch (e.kind) {
      case Endpoint::Kind::OuterIn:
        return "in:" + std::to_string(e.port);
      case Endpoint::Kind::OuterOut:
        return "out:" + std::to_string(e.port);
      default:
        return e.box;
    }
  };
  std::vector<std::string> edges;
  for (const auto& w : d.wires)
    edges.push_back("  \"" + detail::dot_escape(node(w.src)) + "\" -> \"" +
                    detail::dot_escape(node(w.tgt)) + "\" [label=\"" +
                    detail::dot_escape(d.port_type(w.src).text()) + "\"];\n");
  std::sort(edges.begin(), edges.end());
  for (const auto& e : edges) out += e;
  out += "}\n";
  return out;
}

}  // namespace semflow
