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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semflow/ontology.hpp"

namespace semflow {

namespace io {

using json = nlohmann::json;

// --- type expressions ---------------------------------------------------
// A type expression is a string in the "a*b"/"[a,b]"/"1" grammar, an array
// (product of its entries), or an object {"product": [...]}, {"hom": [d, c]}
// or {"unit": true}.

inline ObType type_from_json(const json& j) {
  if (j.is_string()) return ObType::parse(j.get<std::string>());
  if (j.is_array()) {
    std::vector<ObType> parts;
    for (const auto& p : j) parts.push_back(type_from_json(p));
    return ObType::product(std::move(parts));
  }
  if (j.is_object()) {
    if (j.contains("unit")) return ObType::unit();
    if (j.contains("product")) {
      std::vector<ObType> parts;
      for (const auto& p : j.at("product")) parts.push_back(type_from_json(p));
      return ObType::product(std::move(parts));
    }
    if (j.contains("hom")) {
      const auto& h = j.at("hom");
      return ObType::hom(type_from_json(h.at(0)), type_from_json(h.at(1)));
    }
  }
  throw ParseError("type expression", j.dump());
}

inline json type_to_json(const ObType& t) { return t.render(); }

// --- morphism terms -----------------------------------------------------

inline MorTerm term_from_json(const json& j) {
  if (j.is_string()) return MorTerm::generator(j.get<std::string>());
  if (!j.is_object() || j.size() != 1)
    throw ParseError("morphism term", j.dump());
  const std::string op = j.begin().key();
  const json& arg = j.begin().value();
  if (op == "generator") return MorTerm::generator(arg.get<std::string>());
  if (op == "id") return MorTerm::id(type_from_json(arg));
  if (op == "compose" || op == "product") {
    std::vector<MorTerm> children;
    for (const auto& c : arg) children.push_back(term_from_json(c));
    return op == "compose" ? MorTerm::compose(std::move(children))
                           : MorTerm::product(std::move(children));
  }
  if (op == "copy") return MorTerm::copy(type_from_json(arg));
  if (op == "delete") return MorTerm::del(type_from_json(arg));
  if (op == "braid")
    return MorTerm::braid(type_from_json(arg.at(0)), type_from_json(arg.at(1)));
  if (op == "coerce")
    return MorTerm::coerce(type_from_json(arg.at(0)),
                           type_from_json(arg.at(1)));
  if (op == "curry" || op == "uncurry") {
    MorTerm body = term_from_json(arg.at("term"));
    ObType w = type_from_json(arg.at("w"));
    ObType x = type_from_json(arg.at("x"));
    ObType y = type_from_json(arg.at("y"));
    return op == "curry" ? MorTerm::curry(std::move(body), w, x, y)
                         : MorTerm::uncurry(std::move(body), w, x, y);
  }
  throw ParseError("morphism term", "unknown operation '" + op + "'");
}

inline json term_to_json(const MorTerm& t) {
  using K = MorTerm::Kind;
  switch (t.kind()) {
    case K::Generator:
      return json{{"generator", t.generator_id()}};
    case K::Id:
      return json{{"id", type_to_json(t.types()[0])}};
    case K::Compose:
    case K::Product: {
      json arr = json::array();
      for (const auto& c : t.children()) arr.push_back(term_to_json(c));
      return json{{t.kind() == K::Compose ? "compose" : "product", arr}};
    }
    case K::Braid:
      return json{{"braid", {type_to_json(t.types()[0]),
                             type_to_json(t.types()[1])}}};
    case K::Copy:
      return json{{"copy", type_to_json(t.types()[0])}};
    case K::Delete:
      return json{{"delete", type_to_json(t.types()[0])}};
    case K::Coerce:
      return json{{"coerce", {type_to_json(t.types()[0]),
                              type_to_json(t.types()[1])}}};
    case K::Curry:
    case K::Uncurry: {
      json body{{"term", term_to_json(t.children()[0])},
                {"w", type_to_json(t.types()[0])},
                {"x", type_to_json(t.types()[1])},
                {"y", type_to_json(t.types()[2])}};
      return json{{t.kind() == K::Curry ? "curry" : "uncurry", body}};
    }
  }
  return {};
}

// --- documents ----------------------------------------------------------

inline bool valid_concept_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'))
      return false;
  return true;
}

inline void read_document(Ontology& o, const json& doc,
                          const std::string& where) {
  if (!doc.is_object() || !doc.contains("schema"))
    throw ParseError(where, "document without a \"schema\" field");
  const std::string schema = doc.at("schema").get<std::string>();
  if (schema == "concept") {
    const std::string kind = doc.at("kind").get<std::string>();
    const std::string id = doc.at("id").get<std::string>();
    if (!valid_concept_id(id))
      throw ParseError(where, "concept id '" + id + "' is not [a-z0-9-]+");
    if (kind == "type") {
      if (o.types.count(id)) throw DuplicateId(id);
      TypeConcept t;
      t.id = id;
      if (doc.contains("supertypes"))
        for (const auto& s : doc.at("supertypes"))
          t.supertypes.push_back(s.get<std::string>());
      if (doc.contains("description"))
        t.description = doc.at("description").get<std::string>();
      o.types.emplace(id, std::move(t));
    } else if (kind == "function") {
      if (o.functions.count(id)) throw DuplicateId(id);
      FunctionConcept f;
      f.id = id;
      f.dom = doc.contains("dom") ? type_from_json(doc.at("dom"))
                                  : ObType::unit();
      f.cod = doc.contains("cod") ? type_from_json(doc.at("cod"))
                                  : ObType::unit();
      if (doc.contains("subfunctions_of"))
        for (const auto& s : doc.at("subfunctions_of"))
          f.subfunctions_of.push_back(s.get<std::string>());
      if (doc.contains("definition"))
        f.definition = term_from_json(doc.at("definition"));
      if (doc.contains("description"))
        f.description = doc.at("description").get<std::string>();
      o.functions.emplace(id, std::move(f));
    } else {
      throw ParseError(where, "unknown concept kind '" + kind + "'");
    }
  } else if (schema == "annotation") {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "type") {
      TypeAnnotation a;
      a.language = doc.at("language").get<std::string>();
      a.package = doc.at("package").get<std::string>();
      a.concrete_name = doc.at("concrete_name").get<std::string>();
      a.abstract = type_from_json(doc.at("abstract"));
      for (const auto& prev : o.type_annotations)
        if (prev.language == a.language &&
            prev.concrete_name == a.concrete_name)
          throw DuplicateId(a.language + ":" + a.concrete_name);
      o.type_annotations.push_back(std::move(a));
    } else if (kind == "function" || kind == "method" || kind == "getter" ||
               kind == "setter" || kind == "operator") {
      FunctionAnnotation a;
      a.kind = kind;
      a.language = doc.at("language").get<std::string>();
      a.package = doc.at("package").get<std::string>();
      a.concrete_function = doc.at("concrete_function").get<std::string>();
      if (doc.contains("owner_type"))
        a.owner_type = doc.at("owner_type").get<std::string>();
      auto read_slots = [&](const char* field, std::vector<SlotRef>& out) {
        if (!doc.contains(field)) return;
        for (const auto& s : doc.at(field)) {
          SlotRef r;
          if (s.contains("name")) r.name = s.at("name").get<std::string>();
          if (s.contains("position")) r.position = s.at("position").get<int>();
          if (s.contains("mutated")) r.mutated = s.at("mutated").get<bool>();
          out.push_back(std::move(r));
        }
      };
      read_slots("input_slots", a.input_slots);
      read_slots("output_slots", a.output_slots);
      if (doc.contains("definition"))
        a.definition = term_from_json(doc.at("definition"));
      for (const auto& prev : o.function_annotations)
        if (prev.key() == a.key()) throw DuplicateId(a.key());
      o.function_annotations.push_back(std::move(a));
    } else {
      throw ParseError(where, "unknown annotation kind '" + kind + "'");
    }
  } else if (schema == "equation") {
    o.equations.push_back(
        {term_from_json(doc.at("lhs")), term_from_json(doc.at("rhs"))});
  } else {
    throw ParseError(where, "unknown schema '" + schema + "'");
  }
}

}  // namespace io

/// Loads and links an ontology from JSON files (single documents or arrays
/// of documents). Throws on structural problems and on error-severity
/// validation diagnostics.
inline Ontology load_ontology(const std::vector<std::string>& paths) {
  Ontology o;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    io::json j;
    try {
      in >> j;
    } catch (const io::json::exception& e) {
      throw ParseError(path, e.what());
    }
    try {
      if (j.is_array())
        for (const auto& doc : j) io::read_document(o, doc, path);
      else
        io::read_document(o, j, path);
    } catch (const io::json::exception& e) {
      throw ParseError(path, e.what());
    }
  }
  o.link();
  for (const auto& d : o.validate()) {
    if (d.severity != Diagnostic::Severity::Error) continue;
    if (d.cls == "unresolved-reference") throw UnresolvedReference(d.message);
    if (d.cls == "functoriality") throw FunctorialityViolation(d.message);
    if (d.cls == "ill-typed") throw IllTypedTerm(d.message);
    throw FunctorialityViolation(d.message);
  }
  return o;
}

/// Deterministic re-serialization: one JSON array holding every concept,
/// annotation, and equation, keys sorted. load(serialize(o)) == o.
inline std::string serialize_ontology(const Ontology& o) {
  io::json arr = io::json::array();
  for (const auto& [id, t] : o.types) {
    io::json d{{"schema", "concept"}, {"kind", "type"}, {"id", id}};
    if (!t.supertypes.empty()) d["supertypes"] = t.supertypes;
    if (t.description) d["description"] = *t.description;
    arr.push_back(std::move(d));
  }
  for (const auto& [id, f] : o.functions) {
    io::json d{{"schema", "concept"},
               {"kind", "function"},
               {"id", id},
               {"dom", io::type_to_json(f.dom)},
               {"cod", io::type_to_json(f.cod)}};
    if (!f.subfunctions_of.empty()) d["subfunctions_of"] = f.subfunctions_of;
    if (f.definition) d["definition"] = io::term_to_json(*f.definition);
    if (f.description) d["description"] = *f.description;
    arr.push_back(std::move(d));
  }
  for (const auto& a : o.type_annotations) {
    arr.push_back(io::json{{"schema", "annotation"},
                           {"kind", "type"},
                           {"language", a.language},
                           {"package", a.package},
                           {"concrete_name", a.concrete_name},
                           {"abstract", io::type_to_json(a.abstract)}});
  }
  for (const auto& a : o.function_annotations) {
    io::json d{{"schema", "annotation"},
               {"kind", a.kind},
               {"language", a.language},
               {"package", a.package},
               {"concrete_function", a.concrete_function}};
    if (a.owner_type) d["owner_type"] = *a.owner_type;
    auto slots = [](const std::vector<SlotRef>& refs) {
      io::json out = io::json::array();
      for (const auto& r : refs) {
        io::json s = io::json::object();
        if (r.name) s["name"] = *r.name;
        if (r.position) s["position"] = *r.position;
        if (r.mutated) s["mutated"] = true;
        out.push_back(std::move(s));
      }
      return out;
    };
    d["input_slots"] = slots(a.input_slots);
    d["output_slots"] = slots(a.output_slots);
    if (a.definition) d["definition"] = io::term_to_json(*a.definition);
    arr.push_back(std::move(d));
  }
  for (const auto& eq : o.equations)
    arr.push_back(io::json{{"schema", "equation"},
                           {"lhs", io::term_to_json(eq.lhs)},
                           {"rhs", io::term_to_json(eq.rhs)}});
  return arr.dump(2) + "\n";
}

}  // namespace semflow
