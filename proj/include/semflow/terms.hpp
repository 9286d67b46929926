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

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semflow/diagram.hpp"
#include "semflow/types.hpp"

namespace semflow {

/// A morphism expression of the ontology language.
class MorTerm {
 public:
  enum class Kind {
    Generator,
    Id,
    Compose,
    Product,
    Braid,
    Copy,
    Delete,
    Coerce,
    Curry,
    Uncurry
  };

  static MorTerm generator(std::string id) {
    MorTerm t(Kind::Generator);
    t.id_ = std::move(id);
    return t;
  }
  static MorTerm id(ObType x) {
    MorTerm t(Kind::Id);
    t.types_ = {std::move(x)};
    return t;
  }
  static MorTerm compose(std::vector<MorTerm> children) {
    if (children.empty())
      throw IllTypedTerm("compose requires at least one term");
    if (children.size() == 1) return std::move(children.front());
    MorTerm t(Kind::Compose);
    t.children_ = std::move(children);
    return t;
  }
  static MorTerm product(std::vector<MorTerm> children) {
    if (children.empty())
      throw IllTypedTerm("product requires at least one term");
    if (children.size() == 1) return std::move(children.front());
    MorTerm t(Kind::Product);
    t.children_ = std::move(children);
    return t;
  }
  static MorTerm braid(ObType x, ObType y) {
    MorTerm t(Kind::Braid);
    t.types_ = {std::move(x), std::move(y)};
    return t;
  }
  static MorTerm copy(ObType x) {
    MorTerm t(Kind::Copy);
    t.types_ = {std::move(x)};
    return t;
  }
  static MorTerm del(ObType x) {
    MorTerm t(Kind::Delete);
    t.types_ = {std::move(x)};
    return t;
  }
  static MorTerm coerce(ObType from, ObType to) {
    MorTerm t(Kind::Coerce);
    t.types_ = {std::move(from), std::move(to)};
    return t;
  }
  static MorTerm curry(MorTerm body, ObType w, ObType x, ObType y) {
    MorTerm t(Kind::Curry);
    t.children_.push_back(std::move(body));
    t.types_ = {std::move(w), std::move(x), std::move(y)};
    return t;
  }
  static MorTerm uncurry(MorTerm body, ObType w, ObType x, ObType y) {
    MorTerm t(Kind::Uncurry);
    t.children_.push_back(std::move(body));
    t.types_ = {std::move(w), std::move(x), std::move(y)};
    return t;
  }

  Kind kind() const { return kind_; }
  const std::string& generator_id() const { return id_; }
  const std::vector<MorTerm>& children() const { return children_; }
  const std::vector<ObType>& types() const { return types_; }

  /// Compact S-expression rendering; also the label of opaque curry and
  /// uncurry boxes, so it must be deterministic.
  std::string render() const {
    switch (kind_) {
      case Kind::Generator:
        return id_;
      case Kind::Id:
        return "(id " + types_[0].render() + ")";
      case Kind::Compose:
      case Kind::Product: {
        std::string s = kind_ == Kind::Compose ? "(compose" : "(product";
        for (const auto& c : children_) s += " " + c.render();
        return s + ")";
      }
      case Kind::Braid:
        return "(braid " + types_[0].render() + " " + types_[1].render() + ")";
      case Kind::Copy:
        return "(copy " + types_[0].render() + ")";
      case Kind::Delete:
        return "(delete " + types_[0].render() + ")";
      case Kind::Coerce:
        return "(coerce " + types_[0].render() + " " + types_[1].render() +
               ")";
      case Kind::Curry:
      case Kind::Uncurry: {
        std::string s = kind_ == Kind::Curry ? "(curry " : "(uncurry ";
        return s + children_[0].render() + " " + types_[0].render() + " " +
               types_[1].render() + " " + types_[2].render() + ")";
      }
    }
    return {};
  }

 private:
  explicit MorTerm(Kind k) : kind_(k) {}
  Kind kind_;
  std::string id_;
  std::vector<MorTerm> children_;
  std::vector<ObType> types_;
};

/// Generator signatures plus the active subtype preorder; implemented by
/// Ontology.
class GeneratorEnv {
 public:
  virtual ~GeneratorEnv() = default;
  virtual std::optional<std::pair<ObType, ObType>> generator_signature(
      const std::string& id) const = 0;
  virtual const SubtypePreorder& preorder() const = 0;
};

struct MorSignature {
  ObType dom, cod;
};

/// Domain and codomain of a term. Composition checks cod_i <= dom_{i+1}
/// under the preorder; coercions require their declared subtyping.
inline MorSignature infer_type(const MorTerm& t, const GeneratorEnv& env) {
  using K = MorTerm::Kind;
  switch (t.kind()) {
    case K::Generator: {
      auto sig = env.generator_signature(t.generator_id());
      if (!sig) throw UnknownGenerator(t.generator_id());
      return {sig->first, sig->second};
    }
    case K::Id:
      return {t.types()[0], t.types()[0]};
    case K::Compose: {
      std::vector<MorSignature> sigs;
      for (const auto& c : t.children()) sigs.push_back(infer_type(c, env));
      for (size_t i = 0; i + 1 < sigs.size(); ++i)
        if (!env.preorder().leq(sigs[i].cod, sigs[i + 1].dom))
          throw CompositionTypeError((int)i, sigs[i].cod.render(),
                                     sigs[i + 1].dom.render());
      return {sigs.front().dom, sigs.back().cod};
    }
    case K::Product: {
      std::vector<ObType> doms, cods;
      for (const auto& c : t.children()) {
        auto s = infer_type(c, env);
        doms.push_back(s.dom);
        cods.push_back(s.cod);
      }
      return {ObType::product(doms), ObType::product(cods)};
    }
    case K::Braid:
      return {ObType::product({t.types()[0], t.types()[1]}),
              ObType::product({t.types()[1], t.types()[0]})};
    case K::Copy:
      return {t.types()[0], ObType::product({t.types()[0], t.types()[0]})};
    case K::Delete:
      return {t.types()[0], ObType::unit()};
    case K::Coerce: {
      if (!env.preorder().leq(t.types()[0], t.types()[1]))
        throw IllTypedTerm("coercion " + t.types()[0].render() + " -> " +
                           t.types()[1].render() +
                           " is not a declared subtyping");
      return {t.types()[0], t.types()[1]};
    }
    case K::Curry: {
      auto s = infer_type(t.children()[0], env);
      ObType expected = ObType::product({t.types()[0], t.types()[1]});
      if (s.dom != expected || s.cod != t.types()[2])
        throw IllTypedTerm("curry body has signature " + s.dom.render() +
                           " -> " + s.cod.render() + ", expected " +
                           expected.render() + " -> " + t.types()[2].render());
      return {t.types()[0], ObType::hom(t.types()[1], t.types()[2])};
    }
    case K::Uncurry: {
      auto s = infer_type(t.children()[0], env);
      ObType expected_cod = ObType::hom(t.types()[1], t.types()[2]);
      if (s.dom != t.types()[0] || s.cod != expected_cod)
        throw IllTypedTerm("uncurry body has signature " + s.dom.render() +
                           " -> " + s.cod.render() + ", expected " +
                           t.types()[0].render() + " -> " +
                           expected_cod.render());
      return {ObType::product({t.types()[0], t.types()[1]}), t.types()[2]};
    }
  }
  throw IllTypedTerm("unreachable");
}

namespace detail {

inline std::vector<PortType> splay_ports(const ObType& t) {
  std::vector<PortType> out;
  for (const auto& p : t.splay()) out.push_back(PortType::labeled(p.render()));
  return out;
}

}  // namespace detail

/// Normalizes a term to its wiring diagram: copy and delete become fan-out
/// and fan-out zero, braids become wire crossings, coercions vanish into
/// subtype-compatible wires. Curry and uncurry stay opaque atomic boxes
/// labeled by their rendered term.
inline WiringDiagram term_to_diagram(const MorTerm& t, const GeneratorEnv& env) {
  using K = MorTerm::Kind;
  MorSignature sig = infer_type(t, env);
  switch (t.kind()) {
    case K::Generator: {
      WiringDiagram d;
      d.inputs = detail::splay_ports(sig.dom);
      d.outputs = detail::splay_ports(sig.cod);
      Box b;
      b.label = t.generator_id();
      b.inputs = d.inputs;
      b.outputs = d.outputs;
      std::string id = d.add_box(std::move(b));
      for (int i = 0; i < (int)d.inputs.size(); ++i)
        d.add_wire(Endpoint::outer_in(i), Endpoint::box_in(id, i));
      for (int i = 0; i < (int)d.outputs.size(); ++i)
        d.add_wire(Endpoint::box_out(id, i), Endpoint::outer_out(i));
      return d;
    }
    case K::Id:
      return identity(detail::splay_ports(sig.dom));
    case K::Compose: {
      RenderedTypeOrder ord(env.preorder());
      WiringDiagram d = term_to_diagram(t.children()[0], env);
      for (size_t i = 1; i < t.children().size(); ++i)
        d = compose(d, term_to_diagram(t.children()[i], env), ord);
      return d;
    }
    case K::Product: {
      WiringDiagram d = term_to_diagram(t.children()[0], env);
      for (size_t i = 1; i < t.children().size(); ++i)
        d = product(d, term_to_diagram(t.children()[i], env));
      return d;
    }
    case K::Braid: {
      auto xs = detail::splay_ports(t.types()[0]);
      auto ys = detail::splay_ports(t.types()[1]);
      WiringDiagram d;
      d.inputs = xs;
      d.inputs.insert(d.inputs.end(), ys.begin(), ys.end());
      d.outputs = ys;
      d.outputs.insert(d.outputs.end(), xs.begin(), xs.end());
      for (int i = 0; i < (int)xs.size(); ++i)
        d.add_wire(Endpoint::outer_in(i),
                   Endpoint::outer_out((int)ys.size() + i));
      for (int i = 0; i < (int)ys.size(); ++i)
        d.add_wire(Endpoint::outer_in((int)xs.size() + i),
                   Endpoint::outer_out(i));
      return d;
    }
    case K::Copy: {
      auto xs = detail::splay_ports(t.types()[0]);
      WiringDiagram d;
      d.inputs = xs;
      d.outputs = xs;
      d.outputs.insert(d.outputs.end(), xs.begin(), xs.end());
      for (int i = 0; i < (int)xs.size(); ++i) {
        d.add_wire(Endpoint::outer_in(i), Endpoint::outer_out(i));
        d.add_wire(Endpoint::outer_in(i),
                   Endpoint::outer_out((int)xs.size() + i));
      }
      return d;
    }
    case K::Delete: {
      WiringDiagram d;
      d.inputs = detail::splay_ports(t.types()[0]);
      return d;
    }
    case K::Coerce: {
      WiringDiagram d;
      d.inputs = detail::splay_ports(t.types()[0]);
      d.outputs = detail::splay_ports(t.types()[1]);
      for (int i = 0; i < (int)d.inputs.size(); ++i)
        d.add_wire(Endpoint::outer_in(i), Endpoint::outer_out(i));
      return d;
    }
    case K::Curry:
    case K::Uncurry: {
      // Opaque: one atomic box whose label is the rendered term.
      WiringDiagram d;
      d.inputs = detail::splay_ports(sig.dom);
      d.outputs = detail::splay_ports(sig.cod);
      Box b;
      b.label = t.render();
      b.inputs = d.inputs;
      b.outputs = d.outputs;
      std::string id = d.add_box(std::move(b));
      for (int i = 0; i < (int)d.inputs.size(); ++i)
        d.add_wire(Endpoint::outer_in(i), Endpoint::box_in(id, i));
      for (int i = 0; i < (int)d.outputs.size(); ++i)
        d.add_wire(Endpoint::box_out(id, i), Endpoint::outer_out(i));
      return d;
    }
  }
  throw IllTypedTerm("unreachable");
}

}  // namespace semflow
