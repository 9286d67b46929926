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

#include <stdexcept>
#include <string>

namespace semflow {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Diagram construction and operations.

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class TypeMismatch : public Error {
 public:
  TypeMismatch(int index, const std::string& source, const std::string& target)
      : Error("type mismatch at port " + std::to_string(index) + ": " +
              source + " is not a subtype of " + target),
        index(index),
        source(source),
        target(target) {}
  int index;
  std::string source, target;
};

class UnknownBox : public Error {
 public:
  explicit UnknownBox(const std::string& id) : Error("unknown box: " + id) {}
};

class NonConvexSubset : public Error {
 public:
  using Error::Error;
};

class EmptySubset : public Error {
 public:
  EmptySubset() : Error("cannot encapsulate an empty box set") {}
};

// Ontology language.

class UnknownGenerator : public Error {
 public:
  explicit UnknownGenerator(const std::string& id)
      : Error("unknown function concept: " + id) {}
};

class CompositionTypeError : public Error {
 public:
  CompositionTypeError(int position, const std::string& cod,
                       const std::string& dom)
      : Error("composition error at position " + std::to_string(position) +
              ": " + cod + " is not a subtype of " + dom),
        position(position) {}
  int position;
};

class IllTypedTerm : public Error {
 public:
  using Error::Error;
};

class UnknownFunctionConcept : public Error {
 public:
  explicit UnknownFunctionConcept(const std::string& id)
      : Error("unknown function concept: " + id) {}
};

class UnsupportedEquations : public Error {
 public:
  UnsupportedEquations()
      : Error("ontology declares morphism equations; term equality is only "
              "decided for free ontologies") {}
};

// Loading and validation.

class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what) {}
};

class UnresolvedReference : public Error {
 public:
  explicit UnresolvedReference(const std::string& id)
      : Error("unresolved reference: " + id) {}
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id) {}
};

class FunctorialityViolation : public Error {
 public:
  using Error::Error;
};

class AmbiguousAnnotation : public Error {
 public:
  using Error::Error;
};

// Trace ingestion.

class UnknownEventKind : public Error {
 public:
  explicit UnknownEventKind(const std::string& kind)
      : Error("unknown trace event kind: " + kind) {}
};

class NestingViolation : public Error {
 public:
  using Error::Error;
};

class DanglingReturn : public Error {
 public:
  explicit DanglingReturn(long long call_id)
      : Error("call-return without matching call-begin: call_id " +
              std::to_string(call_id)) {}
};

// Semantic enrichment.

class SlotMismatch : public Error {
 public:
  using Error::Error;
};

class TypeConflict : public Error {
 public:
  using Error::Error;
};

}  // namespace semflow
