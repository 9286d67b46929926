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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semflow/canonical.hpp"
#include "semflow/terms.hpp"

namespace semflow {

struct Diagnostic {
  enum class Severity { Info, Warning, Error };
  Severity severity = Severity::Error;
  std::string cls;  // e.g. "subtype-cycle", "functoriality", "ill-typed"
  std::string message;
};

struct TypeConcept {
  std::string id;
  std::vector<std::string> supertypes;
  std::optional<std::string> description;
};

struct FunctionConcept {
  std::string id;
  ObType dom, cod;
  std::vector<std::string> subfunctions_of;
  std::optional<MorTerm> definition;  // compound concepts
  std::optional<std::string> description;
};

struct TypeAnnotation {
  std::string language, package, concrete_name;
  ObType abstract;
};

/// Binds one definition port to a concrete argument or output: by slot
/// name when given, else by 1-based position.
struct SlotRef {
  std::optional<std::string> name;
  std::optional<int> position;
  bool mutated = false;
};

struct FunctionAnnotation {
  std::string language, package, concrete_function;
  std::string kind;  // function | method | getter | setter | operator
  std::optional<std::string> owner_type;
  std::vector<SlotRef> input_slots, output_slots;
  std::optional<MorTerm> definition;

  std::string key() const {
    return language + ":" + package + ":" + kind + ":" + concrete_function +
           (owner_type ? "@" + *owner_type : "");
  }
};

struct MorEquation {
  MorTerm lhs, rhs;
};

/// A finite presentation of the ontology: type and function concepts with
/// basic subtype/subfunction generators, plus the annotations partially
/// defining the functor from concrete code. Immutable and shareable after
/// linking.
class Ontology : public GeneratorEnv {
 public:
  std::map<std::string, TypeConcept> types;
  std::map<std::string, FunctionConcept> functions;
  std::vector<TypeAnnotation> type_annotations;
  std::vector<FunctionAnnotation> function_annotations;
  std::vector<MorEquation> equations;

  /// Recomputes closures and lookup indexes after concepts change.
  void link() {
    preorder_ = SubtypePreorder();
    for (const auto& [id, t] : types)
      for (const auto& s : t.supertypes) preorder_.add_subtype(id, s);
    preorder_.close();

    subfn_reach_.clear();
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& [id, f] : functions)
      for (const auto& s : f.subfunctions_of) adj[id].insert(s);
    for (const auto& [id, succ] : adj) {
      std::set<std::string>& out = subfn_reach_[id];
      std::vector<std::string> stack(succ.begin(), succ.end());
      while (!stack.empty()) {
        std::string x = stack.back();
        stack.pop_back();
        if (!out.insert(x).second) continue;
        auto it = adj.find(x);
        if (it != adj.end())
          for (const auto& y : it->second)
            if (!out.count(y)) stack.push_back(y);
      }
    }

    type_ann_index_.clear();
    for (size_t i = 0; i < type_annotations.size(); ++i) {
      const auto& a = type_annotations[i];
      type_ann_index_[a.language + ":" + a.concrete_name] = i;
    }
  }

  std::optional<std::pair<ObType, ObType>> generator_signature(
      const std::string& id) const override {
    auto it = functions.find(id);
    if (it == functions.end()) return std::nullopt;
    return std::make_pair(it->second.dom, it->second.cod);
  }

  const SubtypePreorder& preorder() const override { return preorder_; }

  const TypeAnnotation* type_annotation(const std::string& language,
                                        const std::string& concrete) const {
    auto it = type_ann_index_.find(language + ":" + concrete);
    if (it == type_ann_index_.end()) return nullptr;
    return &type_annotations[it->second];
  }

  /// Resolution per §-style superclass walk: plain functions and operators
  /// match exactly on (language, package, name, kind); methods, getters and
  /// setters walk the concrete type lineage most-specific-first and return
  /// the first annotation whose owner matches.
  const FunctionAnnotation* resolve_annotation(const CallKey& call) const {
    bool member = call.kind == "method" || call.kind == "getter" ||
                  call.kind == "setter";
    if (!member) {
      const FunctionAnnotation* found = nullptr;
      for (const auto& a : function_annotations) {
        if (a.language != call.language || a.package != call.package ||
            a.kind != call.kind || a.concrete_function != call.name)
          continue;
        if (found)
          throw AmbiguousAnnotation("two annotations match " + call.name);
        found = &a;
      }
      return found;
    }
    for (const auto& cls : call.lineage) {
      const FunctionAnnotation* found = nullptr;
      for (const auto& a : function_annotations) {
        if (a.language != call.language || a.package != call.package ||
            a.kind != call.kind || a.concrete_function != call.name)
          continue;
        if (!a.owner_type || *a.owner_type != cls) continue;
        if (found)
          throw AmbiguousAnnotation("two annotations match " + call.name +
                                    " on " + cls);
        found = &a;
      }
      if (found) return found;
    }
    return nullptr;
  }

  /// Declared subfunction relation (reflexive-transitive closure of basic
  /// declarations) plus the type side conditions.
  bool check_subfunction(const std::string& f, const std::string& fp) const {
    auto fi = functions.find(f);
    auto gi = functions.find(fp);
    if (fi == functions.end()) throw UnknownFunctionConcept(f);
    if (gi == functions.end()) throw UnknownFunctionConcept(fp);
    bool declared = f == fp;
    if (!declared) {
      auto it = subfn_reach_.find(f);
      declared = it != subfn_reach_.end() && it->second.count(fp) > 0;
    }
    return declared && preorder_.leq(fi->second.dom, gi->second.dom) &&
           preorder_.leq(fi->second.cod, gi->second.cod);
  }

  /// Re-checks every invariant of the presentation. Empty iff valid.
  std::vector<Diagnostic> validate() const {
    std::vector<Diagnostic> out;
    auto err = [&](const std::string& cls, const std::string& msg) {
      out.push_back({Diagnostic::Severity::Error, cls, msg});
    };

    std::set<std::string> reported_cycles;
    for (const auto& [id, t] : types) {
      for (const auto& s : t.supertypes)
        if (!types.count(s))
          err("unresolved-reference", "type " + id + " names unknown supertype " + s);
      for (const auto& other : preorder_.equivalent_to(id)) {
        std::string pair = id < other ? id + "~" + other : other + "~" + id;
        if (reported_cycles.insert(pair).second)
          out.push_back({Diagnostic::Severity::Info, "subtype-cycle",
                         "types " + pair + " are mutual subtypes"});
      }
    }

    auto basics_exist = [&](const ObType& t, const std::string& where,
                            auto&& self) -> void {
      switch (t.kind()) {
        case ObType::Kind::Basic:
          if (!types.count(t.basic_id()))
            err("unresolved-reference",
                where + " names unknown type " + t.basic_id());
          break;
        case ObType::Kind::Product:
          for (const auto& p : t.parts()) self(p, where, self);
          break;
        case ObType::Kind::Hom:
          self(t.hom_dom(), where, self);
          self(t.hom_cod(), where, self);
          break;
        default:
          break;
      }
    };

    for (const auto& [id, f] : functions) {
      basics_exist(f.dom, "function " + id, basics_exist);
      basics_exist(f.cod, "function " + id, basics_exist);
      for (const auto& s : f.subfunctions_of) {
        auto it = functions.find(s);
        if (it == functions.end()) {
          err("unresolved-reference",
              "function " + id + " names unknown subfunction parent " + s);
          continue;
        }
        if (!preorder_.leq(f.dom, it->second.dom) ||
            !preorder_.leq(f.cod, it->second.cod))
          err("subfunction-types",
              "subfunction " + id + " <= " + s + " fails the type side conditions");
      }
      if (f.definition) {
        try {
          MorSignature s = infer_type(*f.definition, *this);
          auto equiv = [&](const ObType& a, const ObType& b) {
            return preorder_.leq(a, b) && preorder_.leq(b, a);
          };
          if (!equiv(s.dom, f.dom) || !equiv(s.cod, f.cod))
            err("ill-typed", "definition of " + id + " has signature " +
                                 s.dom.render() + " -> " + s.cod.render() +
                                 ", declared " + f.dom.render() + " -> " +
                                 f.cod.render());
        } catch (const Error& e) {
          err("ill-typed", "definition of " + id + ": " + e.what());
        }
      }
    }

    for (const auto& a : type_annotations)
      basics_exist(a.abstract, "type annotation " + a.concrete_name,
                   basics_exist);

    for (const auto& a : function_annotations) {
      if (!a.definition) {
        err("ill-typed", "annotation " + a.key() + " has no definition");
        continue;
      }
      try {
        MorSignature s = infer_type(*a.definition, *this);
        size_t nin = s.dom.splay().size(), nout = s.cod.splay().size();
        if (a.input_slots.size() != nin)
          err("functoriality",
              "annotation " + a.key() + " has " +
                  std::to_string(a.input_slots.size()) + " input slots for " +
                  std::to_string(nin) + " definition inputs");
        if (a.output_slots.size() != nout)
          err("functoriality",
              "annotation " + a.key() + " has " +
                  std::to_string(a.output_slots.size()) +
                  " output slots for " + std::to_string(nout) +
                  " definition outputs");
        // The owner type's annotation, when present, must be compatible
        // with the first definition port (the self slot).
        if (a.owner_type && a.input_slots.size() == nin && nin > 0) {
          const TypeAnnotation* ta = type_annotation(a.language, *a.owner_type);
          if (ta && !preorder_.leq(ta->abstract, s.dom.splay().front()))
            err("functoriality",
                "annotation " + a.key() + ": owner type " + *a.owner_type +
                    " is annotated " + ta->abstract.render() +
                    " which is not a subtype of the definition port " +
                    s.dom.splay().front().render());
        }
      } catch (const Error& e) {
        err("ill-typed", "annotation " + a.key() + ": " + e.what());
      }
    }

    for (const auto& eq : equations) {
      try {
        MorSignature l = infer_type(eq.lhs, *this);
        MorSignature r = infer_type(eq.rhs, *this);
        if (l.dom != r.dom || l.cod != r.cod)
          err("ill-typed", "equation sides have different signatures");
      } catch (const Error& e) {
        err("ill-typed", std::string("equation: ") + e.what());
      }
    }
    return out;
  }

 private:
  SubtypePreorder preorder_;
  std::map<std::string, std::set<std::string>> subfn_reach_;
  std::map<std::string, size_t> type_ann_index_;
};

/// Decides term equality by diagram normal form. Sound and complete in the
/// free cartesian fragment; conservative when curry/uncurry boxes appear.
/// Refuses ontologies with user-declared morphism equations.
inline bool terms_equal(const MorTerm& a, const MorTerm& b, const Ontology& o) {
  if (!o.equations.empty()) throw UnsupportedEquations();
  MorSignature sa = infer_type(a, o), sb = infer_type(b, o);
  if (sa.dom != sb.dom || sa.cod != sb.cod)
    throw TypeMismatch(-1, sa.dom.render() + "->" + sa.cod.render(),
                       sb.dom.render() + "->" + sb.cod.render());
  return is_isomorphic(term_to_diagram(a, o), term_to_diagram(b, o));
}

}  // namespace semflow
