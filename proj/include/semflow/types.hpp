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
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semflow/errors.hpp"

namespace semflow {

/// A type expression of the ontology language: a basic (named) type, the
/// unit type, a flattened product, or a function (internal hom) type.
///
/// Products are kept in normal form: nested products are flattened, unit
/// factors are dropped, the empty product is the unit type and a singleton
/// product is its single factor.
class ObType {
 public:
  enum class Kind { Basic, Unit, Product, Hom };

  ObType() : kind_(Kind::Unit) {}

  static ObType basic(std::string id) {
    ObType t;
    t.kind_ = Kind::Basic;
    t.id_ = std::move(id);
    return t;
  }

  static ObType unit() { return ObType(); }

  static ObType product(std::vector<ObType> parts) {
    std::vector<ObType> flat;
    for (auto& p : parts) {
      if (p.kind_ == Kind::Unit) continue;
      if (p.kind_ == Kind::Product) {
        for (auto& q : p.children_) flat.push_back(std::move(q));
      } else {
        flat.push_back(std::move(p));
      }
    }
    if (flat.empty()) return unit();
    if (flat.size() == 1) return std::move(flat.front());
    ObType t;
    t.kind_ = Kind::Product;
    t.children_ = std::move(flat);
    return t;
  }

  static ObType hom(ObType dom, ObType cod) {
    ObType t;
    t.kind_ = Kind::Hom;
    t.children_.push_back(std::move(dom));
    t.children_.push_back(std::move(cod));
    return t;
  }

  Kind kind() const { return kind_; }
  const std::string& basic_id() const { return id_; }
  const std::vector<ObType>& parts() const { return children_; }
  const ObType& hom_dom() const { return children_[0]; }
  const ObType& hom_cod() const { return children_[1]; }

  bool operator==(const ObType& other) const {
    return kind_ == other.kind_ && id_ == other.id_ &&
           children_ == other.children_;
  }
  bool operator!=(const ObType& other) const { return !(*this == other); }

  /// Splays a type into the port list it occupies in a wiring diagram:
  /// unit contributes no port, a product one port per factor, and basic or
  /// hom types exactly one port.
  std::vector<ObType> splay() const {
    switch (kind_) {
      case Kind::Unit:
        return {};
      case Kind::Product: {
        std::vector<ObType> out;
        for (const auto& p : children_) {
          auto sub = p.splay();
          out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
      }
      default:
        return {*this};
    }
  }

  /// Text form: basic ids verbatim, "1" for unit, "a*b" for products and
  /// "[a,b]" for homs. Inverse of parse().
  std::string render() const {
    switch (kind_) {
      case Kind::Basic:
        return id_;
      case Kind::Unit:
        return "1";
      case Kind::Product: {
        std::string s;
        for (size_t i = 0; i < children_.size(); ++i) {
          if (i) s += "*";
          s += children_[i].render();
        }
        return s;
      }
      case Kind::Hom:
        return "[" + children_[0].render() + "," + children_[1].render() + "]";
    }
    return {};
  }

  static ObType parse(const std::string& text) {
    size_t pos = 0;
    ObType t = parse_product(text, pos);
    if (pos != text.size())
      throw ParseError("type expression", "trailing input in '" + text + "'");
    return t;
  }

 private:
  static ObType parse_product(const std::string& s, size_t& pos) {
    std::vector<ObType> parts;
    parts.push_back(parse_atom(s, pos));
    while (pos < s.size() && s[pos] == '*') {
      ++pos;
      parts.push_back(parse_atom(s, pos));
    }
    return product(std::move(parts));
  }

  static ObType parse_atom(const std::string& s, size_t& pos) {
    if (pos >= s.size())
      throw ParseError("type expression", "unexpected end of '" + s + "'");
    if (s[pos] == '[') {
      ++pos;
      ObType dom = parse_product(s, pos);
      if (pos >= s.size() || s[pos] != ',')
        throw ParseError("type expression", "expected ',' in '" + s + "'");
      ++pos;
      ObType cod = parse_product(s, pos);
      if (pos >= s.size() || s[pos] != ']')
        throw ParseError("type expression", "expected ']' in '" + s + "'");
      ++pos;
      return hom(std::move(dom), std::move(cod));
    }
    size_t start = pos;
    while (pos < s.size() && s[pos] != '*' && s[pos] != ',' && s[pos] != ']' &&
           s[pos] != '[')
      ++pos;
    std::string id = s.substr(start, pos - start);
    if (id.empty())
      throw ParseError("type expression", "empty type name in '" + s + "'");
    if (id == "1") return unit();
    return basic(std::move(id));
  }

  Kind kind_;
  std::string id_;
  std::vector<ObType> children_;  // product parts, or {dom, cod} for hom
};

/// The subtype preorder. Generated by declared pairs between basic types;
/// reflexive-transitive closure is computed once, then lifted structurally
/// to products (componentwise) and homs (contravariant domain, covariant
/// codomain).
class SubtypePreorder {
 public:
  void add_subtype(const std::string& sub, const std::string& super) {
    generators_.emplace_back(sub, super);
    closed_ = false;
  }

  const std::vector<std::pair<std::string, std::string>>& generators() const {
    return generators_;
  }

  void close() {
    reach_.clear();
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& [a, b] : generators_) adj[a].insert(b);
    for (const auto& [a, succ] : adj) {
      // depth-first reachability from a
      std::set<std::string>& out = reach_[a];
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
    closed_ = true;
  }

  bool basic_leq(const std::string& a, const std::string& b) const {
    if (a == b) return true;
    if (!closed_) const_cast<SubtypePreorder*>(this)->close();
    auto it = reach_.find(a);
    return it != reach_.end() && it->second.count(b) > 0;
  }

  bool leq(const ObType& a, const ObType& b) const {
    using K = ObType::Kind;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case K::Unit:
        return true;
      case K::Basic:
        return basic_leq(a.basic_id(), b.basic_id());
      case K::Product: {
        if (a.parts().size() != b.parts().size()) return false;
        for (size_t i = 0; i < a.parts().size(); ++i)
          if (!leq(a.parts()[i], b.parts()[i])) return false;
        return true;
      }
      case K::Hom:
        return leq(b.hom_dom(), a.hom_dom()) && leq(a.hom_cod(), b.hom_cod());
    }
    return false;
  }

  /// Basic types equivalent to but distinct from `id` (subtype cycles).
  std::set<std::string> equivalent_to(const std::string& id) const {
    std::set<std::string> out;
    if (!closed_) const_cast<SubtypePreorder*>(this)->close();
    auto it = reach_.find(id);
    if (it == reach_.end()) return out;
    for (const auto& other : it->second)
      if (other != id && basic_leq(other, id)) out.insert(other);
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> generators_;
  std::map<std::string, std::set<std::string>> reach_;
  bool closed_ = true;
};

/// Order used to validate wire types. Diagram port labels are strings; the
/// trivial order (exact equality) fits raw concrete-typed diagrams, while
/// the ontology supplies an order that parses labels as type expressions.
class TypeOrder {
 public:
  virtual ~TypeOrder() = default;
  virtual bool leq(const std::string& a, const std::string& b) const {
    return a == b;
  }
};

/// Lifts a SubtypePreorder to rendered type labels.
class RenderedTypeOrder : public TypeOrder {
 public:
  explicit RenderedTypeOrder(const SubtypePreorder& p) : preorder_(p) {}
  bool leq(const std::string& a, const std::string& b) const override {
    if (a == b) return true;
    try {
      return preorder_.leq(ObType::parse(a), ObType::parse(b));
    } catch (const ParseError&) {
      return false;  // concrete labels that are not type expressions
    }
  }

 private:
  const SubtypePreorder& preorder_;
};

}  // namespace semflow
