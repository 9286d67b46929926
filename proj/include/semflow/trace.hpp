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

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semflow/errors.hpp"

namespace semflow {

/// One recorded argument or return payload.
struct TraceValue {
  std::string slot;  // argument slot name; empty for returns
  std::optional<std::string> object_id;
  std::string concrete_type;
  std::optional<std::string> value_repr;
};

struct TraceFunction {
  std::string language;
  std::string package;
  std::string name;
  std::string kind;  // function | method | getter | setter | operator | attribute
  std::vector<std::string> lineage;  // concrete type lineage of the owner
  std::optional<std::string> display;
};

/// One of the five recorded program events: a call is about to begin, a
/// call returned, a variable was accessed, assigned, or deleted.
struct TraceEvent {
  enum class Kind { CallBegin, CallReturn, Access, Assign, Delete };
  Kind kind = Kind::CallBegin;

  // call-begin
  long long call_id = 0;
  TraceFunction function;
  bool user_defined = false;
  std::vector<TraceValue> args;
  std::optional<TraceValue> self;  // surface form; homogenization inlines it

  // call-return
  std::vector<TraceValue> returns;
  std::vector<std::string> mutated;

  // access / assign / delete
  std::string name;
  std::optional<std::string> object_id;
};

namespace trace_detail {

using json = nlohmann::json;

inline TraceValue value_from_json(const json& j, const std::string& where) {
  TraceValue v;
  if (j.contains("slot")) v.slot = j.at("slot").get<std::string>();
  if (j.contains("object_id") && !j.at("object_id").is_null())
    v.object_id = j.at("object_id").get<std::string>();
  if (!j.contains("concrete_type"))
    throw ParseError(where, "value without concrete_type");
  v.concrete_type = j.at("concrete_type").get<std::string>();
  if (j.contains("value_repr"))
    v.value_repr = j.at("value_repr").get<std::string>();
  return v;
}

}  // namespace trace_detail

/// Parses a line-delimited JSON trace. The first line must be the header
/// {"trace_version": 1}. Verifies call-begin/call-return stack discipline.
inline std::vector<TraceEvent> parse_trace(std::istream& in) {
  using trace_detail::json;
  std::vector<TraceEvent> events;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  std::vector<long long> open;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where, e.what());
    }
    if (!header_seen) {
      if (!j.is_object() || !j.contains("trace_version"))
        throw ParseError(where, "missing trace_version header");
      if (j.at("trace_version").get<int>() != 1)
        throw ParseError(where, "unsupported trace_version");
      header_seen = true;
      continue;
    }
    if (!j.is_object() || !j.contains("event"))
      throw ParseError(where, "event line without \"event\" field");
    const std::string kind = j.at("event").get<std::string>();
    TraceEvent e;
    try {
      if (kind == "call-begin") {
        e.kind = TraceEvent::Kind::CallBegin;
        e.call_id = j.at("call_id").get<long long>();
        const auto& f = j.at("function");
        e.function.language = f.at("language").get<std::string>();
        e.function.package = f.at("package").get<std::string>();
        e.function.name = f.at("name").get<std::string>();
        e.function.kind = f.at("kind").get<std::string>();
        if (f.contains("lineage"))
          for (const auto& l : f.at("lineage"))
            e.function.lineage.push_back(l.get<std::string>());
        if (f.contains("display"))
          e.function.display = f.at("display").get<std::string>();
        if (j.contains("user_defined"))
          e.user_defined = j.at("user_defined").get<bool>();
        if (j.contains("args"))
          for (const auto& a : j.at("args"))
            e.args.push_back(trace_detail::value_from_json(a, where));
        if (j.contains("self"))
          e.self = trace_detail::value_from_json(j.at("self"), where);
        open.push_back(e.call_id);
      } else if (kind == "call-return") {
        e.kind = TraceEvent::Kind::CallReturn;
        e.call_id = j.at("call_id").get<long long>();
        if (j.contains("returns"))
          for (const auto& r : j.at("returns"))
            e.returns.push_back(trace_detail::value_from_json(r, where));
        if (j.contains("mutated"))
          for (const auto& m : j.at("mutated"))
            e.mutated.push_back(m.get<std::string>());
        if (open.empty() || open.back() != e.call_id)
          throw NestingViolation(where + ": call-return " +
                                 std::to_string(e.call_id) +
                                 " does not match the innermost open call");
        open.pop_back();
      } else if (kind == "access" || kind == "assign") {
        e.kind = kind == "access" ? TraceEvent::Kind::Access
                                  : TraceEvent::Kind::Assign;
        e.name = j.at("name").get<std::string>();
        if (j.contains("object_id") && !j.at("object_id").is_null())
          e.object_id = j.at("object_id").get<std::string>();
      } else if (kind == "delete") {
        e.kind = TraceEvent::Kind::Delete;
        e.name = j.at("name").get<std::string>();
      } else {
        throw UnknownEventKind(kind);
      }
    } catch (const json::exception& ex) {
      throw ParseError(where, ex.what());
    }
    events.push_back(std::move(e));
  }
  if (!open.empty())
    throw NestingViolation("trace ends with " + std::to_string(open.size()) +
                           " unreturned call(s)");
  return events;
}

/// §4.2-style homogenization: methods, getters and setters gain a leading
/// `self` slot; attribute reads become getter calls named after the
/// attribute; special operators are renamed to their canonical functional
/// aliases. Idempotent.
inline TraceEvent method_homogenize(TraceEvent e) {
  if (e.kind != TraceEvent::Kind::CallBegin) return e;
  if (e.function.kind == "attribute") e.function.kind = "getter";
  if (e.self) {
    TraceValue self = *e.self;
    if (self.slot.empty()) self.slot = "self";
    e.args.insert(e.args.begin(), std::move(self));
    e.self.reset();
  }
  if (e.function.kind == "operator") {
    static const std::map<std::string, std::string> aliases = {
        {"*", "mul"},    {"-", "sub"},    {"+", "add"},    {"/", "div"},
        {"[]", "getitem"}, {"[]=", "setitem"}, {"+=", "iadd"},
        {".", "getattr"}, {".=", "setattr"}, {"[::]", "slice"}};
    auto it = aliases.find(e.function.name);
    if (it != aliases.end()) e.function.name = it->second;
  }
  return e;
}

}  // namespace semflow
