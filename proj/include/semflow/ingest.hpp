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

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semflow/diagram.hpp"
#include "semflow/trace.hpp"

namespace semflow {

namespace ingest_detail {

inline PortType concrete_port(const std::string& type_name) {
  return type_name.empty() ? PortType::unlabeled()
                           : PortType::labeled(type_name);
}

// Per-frame provenance: the diagram under construction, the variable table
// mapping names to source endpoints (and the bound object id, so mutation
// can re-point the variable), the object table mapping object ids to their
// most recent producer, and the queue of sources passed to the enclosing
// expression (returns and variable accesses).
struct VarBinding {
  Endpoint source;
  std::optional<std::string> object_id;
};

struct Frame {
  WiringDiagram diagram;
  std::map<std::string, VarBinding> vars;
  std::map<std::string, Endpoint> objects;
  std::deque<std::pair<std::optional<std::string>, Endpoint>> pending;
};

struct OpenCall {
  long long id;
  bool user_defined;
  std::string box_id;  // in the parent frame's diagram
  std::vector<TraceValue> args;
};

}  // namespace ingest_detail

/// Folds a homogenized event stream into the raw flow graph. Library
/// calls become atomic boxes; user-defined calls become nested boxes, the
/// nesting mirroring the call stack. Argument sources resolve through the
/// object table first, then through values passed from accesses and
/// returns, and otherwise become fresh outer input ports.
inline WiringDiagram build_raw_graph(const std::vector<TraceEvent>& events) {
  using ingest_detail::Frame;
  using ingest_detail::OpenCall;

  std::vector<Frame> frames(1);
  std::vector<OpenCall> calls;
  int box_seq = 0;

  auto resolve_arg = [](Frame& fr, const TraceValue& arg) -> Endpoint {
    if (arg.object_id) {
      auto it = fr.objects.find(*arg.object_id);
      if (it != fr.objects.end()) return it->second;
    }
    for (auto it = fr.pending.begin(); it != fr.pending.end(); ++it) {
      if (it->first == arg.object_id) {
        Endpoint e = it->second;
        fr.pending.erase(it);
        return e;
      }
    }
    // Fresh outer input: an object never produced within this frame.
    int port = (int)fr.diagram.inputs.size();
    fr.diagram.inputs.push_back(ingest_detail::concrete_port(arg.concrete_type));
    Endpoint e = Endpoint::outer_in(port);
    if (arg.object_id) {
      fr.objects[*arg.object_id] = e;
      fr.diagram.elements[e] =
          ElementValue{*arg.object_id, arg.value_repr, arg.concrete_type};
    }
    return e;
  };

  for (const TraceEvent& raw_event : events) {
    TraceEvent e = method_homogenize(raw_event);
    switch (e.kind) {
      case TraceEvent::Kind::CallBegin: {
        Frame& fr = frames.back();
        std::vector<Endpoint> sources;
        for (const auto& arg : e.args) sources.push_back(resolve_arg(fr, arg));
        fr.pending.clear();

        Box b;
        b.label = e.function.display ? *e.function.display : e.function.name;
        b.call = CallKey{e.function.language, e.function.package,
                         e.function.name, e.function.kind, e.function.lineage};
        for (const auto& arg : e.args) {
          b.inputs.push_back(ingest_detail::concrete_port(arg.concrete_type));
          b.arg_names.push_back(arg.slot);
        }
        std::string id = "b" + std::to_string(++box_seq);
        fr.diagram.boxes.emplace(id, std::move(b));
        for (int k = 0; k < (int)sources.size(); ++k)
          fr.diagram.add_wire(sources[k], Endpoint::box_in(id, k));
        calls.push_back({e.call_id, e.user_defined, id, e.args});

        if (e.user_defined) {
          Frame inner;
          for (int k = 0; k < (int)e.args.size(); ++k) {
            const auto& arg = e.args[k];
            inner.diagram.inputs.push_back(
                ingest_detail::concrete_port(arg.concrete_type));
            Endpoint ep = Endpoint::outer_in(k);
            if (arg.object_id) inner.objects[*arg.object_id] = ep;
            if (!arg.slot.empty())
              inner.vars[arg.slot] = ingest_detail::VarBinding{ep, arg.object_id};
          }
          frames.push_back(std::move(inner));
        }
        break;
      }

      case TraceEvent::Kind::CallReturn: {
        if (calls.empty() || calls.back().id != e.call_id) {
          bool known = false;
          for (const auto& c : calls) known = known || c.id == e.call_id;
          if (!known) throw DanglingReturn(e.call_id);
          throw NestingViolation("call-return " + std::to_string(e.call_id) +
                                 " does not match the innermost open call");
        }
        OpenCall call = calls.back();
        calls.pop_back();

        // Output ports: return payloads first, then mutated arguments (in
        // slot order) whose ids are not already among the returns.
        std::vector<TraceValue> outputs = e.returns;
        for (const auto& arg : call.args) {
          if (!arg.object_id) continue;
          bool was_mutated = false;
          for (const auto& m : e.mutated) was_mutated |= m == *arg.object_id;
          if (!was_mutated) continue;
          bool already = false;
          for (const auto& r : outputs)
            already |= r.object_id && *r.object_id == *arg.object_id;
          if (already) continue;
          TraceValue extra;
          extra.object_id = arg.object_id;
          extra.concrete_type = arg.concrete_type;
          outputs.push_back(std::move(extra));
        }

        if (call.user_defined) {
          Frame inner = std::move(frames.back());
          frames.pop_back();
          for (const auto& out : outputs) {
            TraceValue v = out;
            Endpoint src = resolve_arg(inner, v);
            int port = (int)inner.diagram.outputs.size();
            inner.diagram.outputs.push_back(
                ingest_detail::concrete_port(out.concrete_type));
            inner.diagram.add_wire(src, Endpoint::outer_out(port));
          }
          Frame& fr = frames.back();
          Box& b = fr.diagram.boxes.at(call.box_id);
          b.inner = std::make_shared<WiringDiagram>(std::move(inner.diagram));
          for (const auto& out : outputs)
            b.outputs.push_back(ingest_detail::concrete_port(out.concrete_type));
        } else {
          Frame& fr = frames.back();
          Box& b = fr.diagram.boxes.at(call.box_id);
          for (const auto& out : outputs)
            b.outputs.push_back(ingest_detail::concrete_port(out.concrete_type));
        }

        Frame& fr = frames.back();
        for (int j = 0; j < (int)outputs.size(); ++j) {
          Endpoint ep = Endpoint::box_out(call.box_id, j);
          const TraceValue& out = outputs[j];
          if (out.object_id) {
            fr.objects[*out.object_id] = ep;
            fr.diagram.elements[ep] =
                ElementValue{*out.object_id, out.value_repr, out.concrete_type};
            // A mutated object re-points every variable bound to it.
            bool was_mutated = false;
            for (const auto& m : e.mutated)
              was_mutated |= m == *out.object_id;
            if (was_mutated)
              for (auto& [name, binding] : fr.vars)
                if (binding.object_id == out.object_id) binding.source = ep;
          }
        }
        for (int j = 0; j < (int)e.returns.size(); ++j)
          fr.pending.emplace_back(e.returns[j].object_id,
                                  Endpoint::box_out(call.box_id, j));
        break;
      }

      case TraceEvent::Kind::Access: {
        Frame& fr = frames.back();
        auto vit = fr.vars.find(e.name);
        if (vit != fr.vars.end()) {
          fr.pending.emplace_back(e.object_id, vit->second.source);
        } else if (e.object_id) {
          auto oit = fr.objects.find(*e.object_id);
          if (oit != fr.objects.end())
            fr.pending.emplace_back(e.object_id, oit->second);
        }
        break;
      }

      case TraceEvent::Kind::Assign: {
        Frame& fr = frames.back();
        std::optional<Endpoint> from_pending;
        for (auto it = fr.pending.begin(); it != fr.pending.end(); ++it) {
          if (it->first == e.object_id) {
            from_pending = it->second;
            fr.pending.erase(it);
            break;
          }
        }
        if (e.object_id && fr.objects.count(*e.object_id)) {
          fr.vars[e.name] =
              ingest_detail::VarBinding{fr.objects[*e.object_id], e.object_id};
        } else if (from_pending) {
          fr.vars[e.name] = ingest_detail::VarBinding{*from_pending, e.object_id};
          if (e.object_id) fr.objects[*e.object_id] = *from_pending;
        } else if (!e.object_id && !fr.pending.empty()) {
          fr.vars[e.name] =
              ingest_detail::VarBinding{fr.pending.front().second, std::nullopt};
          fr.pending.pop_front();
        } else {
          fr.vars.erase(e.name);  // unknown provenance
        }
        break;
      }

      case TraceEvent::Kind::Delete:
        frames.back().vars.erase(e.name);
        break;
    }
  }

  if (!calls.empty())
    throw NestingViolation("event stream ends inside an open call");

  // Variables still bound at the end of the program become the diagram's
  // outer outputs, in name order.
  Frame& top = frames.front();
  for (const auto& [name, binding] : top.vars) {
    int port = (int)top.diagram.outputs.size();
    top.diagram.outputs.push_back(top.diagram.port_type(binding.source));
    top.diagram.add_wire(binding.source, Endpoint::outer_out(port));
  }
  return std::move(frames.front().diagram);
}

}  // namespace semflow
