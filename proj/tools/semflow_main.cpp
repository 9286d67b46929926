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

// semflow: turn execution trace logs into raw flow graphs and enrich them
// against an ontology into semantic flow graphs.
//
//   semflow validate --ontology concepts.json annotations.json
//   semflow raw trace.jsonl --out raw.json [--format json|dot]
//   semflow enrich raw.json --ontology ... --out semantic.json [--strict]
//   semflow iso a.json b.json [--labeled-only]
//
// Exit codes: 0 ok, 1 semantic failure (validation, non-isomorphism,
// strict-mode expansion failure), 2 I/O or parse failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semflow/canonical.hpp"
#include "semflow/diagram_io.hpp"
#include "semflow/enrich.hpp"
#include "semflow/ingest.hpp"
#include "semflow/ontology_io.hpp"
#include "semflow/trace.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<std::string> ontology_paths(std::vector<std::string> given) {
  if (!given.empty()) return given;
  const char* env = std::getenv("SEMFLOW_ONTOLOGY_PATH");
  if (!env) return {};
  std::vector<std::string> out;
  std::stringstream ss(env);
  std::string part;
  while (std::getline(ss, part, ':')) {
    if (part.empty()) continue;
    if (fs::is_directory(part)) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(part))
        if (e.path().extension() == ".json") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(part);
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw semflow::ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw semflow::ParseError(path, "cannot open file for writing");
  out << content;
}

bool looks_like_trace(const std::string& text) {
  auto end = text.find('\n');
  std::string first = text.substr(0, end);
  return first.find("trace_version") != std::string::npos;
}

semflow::WiringDiagram load_input(const std::string& path) {
  std::string text = read_file(path);
  if (looks_like_trace(text)) {
    std::stringstream ss(text);
    auto events = semflow::parse_trace(ss);
    return semflow::build_raw_graph(events);
  }
  return semflow::parse_diagram(text, path);
}

const char* severity_name(semflow::Diagnostic::Severity s) {
  switch (s) {
    case semflow::Diagnostic::Severity::Info:
      return "info";
    case semflow::Diagnostic::Severity::Warning:
      return "warning";
    default:
      return "error";
  }
}

int cmd_validate(const std::vector<std::string>& paths, bool strict) {
  semflow::Ontology o;
  try {
    for (const auto& path : paths) {
      std::ifstream in(path);
      if (!in) throw semflow::ParseError(path, "cannot open file");
      nlohmann::json j;
      in >> j;
      if (j.is_array())
        for (const auto& doc : j) semflow::io::read_document(o, doc, path);
      else
        semflow::io::read_document(o, j, path);
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  o.link();
  auto diagnostics = o.validate();
  bool failed = false;
  for (const auto& d : diagnostics) {
    std::cout << severity_name(d.severity) << " [" << d.cls << "] "
              << d.message << "\n";
    failed |= d.severity == semflow::Diagnostic::Severity::Error ||
              (strict && d.severity == semflow::Diagnostic::Severity::Warning);
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic flow graphs from execution traces"};
  app.require_subcommand(1);

  std::vector<std::string> ontology;
  std::string out_path, format = "json";
  bool strict = false, labeled_only = false;

  auto* validate = app.add_subcommand("validate", "validate an ontology");
  validate->add_option("--ontology", ontology, "ontology JSON files")
      ->expected(-1);
  validate->add_flag("--strict", strict, "warnings fail too");

  std::string trace_path;
  auto* raw = app.add_subcommand("raw", "trace log to raw flow graph");
  raw->add_option("input", trace_path, "trace file (JSON lines)")->required();
  raw->add_option("--out", out_path, "output path (default stdout)");
  raw->add_option("--format", format, "json or dot")
      ->check(CLI::IsMember({"json", "dot"}));

  std::string enrich_input;
  auto* enrich_cmd =
      app.add_subcommand("enrich", "semantic enrichment of a flow graph");
  enrich_cmd->add_option("input", enrich_input, "trace or diagram file")
      ->required();
  enrich_cmd->add_option("--ontology", ontology, "ontology JSON files")
      ->expected(-1);
  enrich_cmd->add_option("--out", out_path, "output path (default stdout)");
  enrich_cmd->add_option("--format", format, "json or dot")
      ->check(CLI::IsMember({"json", "dot"}));
  enrich_cmd->add_flag("--strict", strict,
                       "expansion failures are fatal (default lenient)");

  std::string iso_a, iso_b;
  auto* iso = app.add_subcommand("iso", "test two diagrams for isomorphism");
  iso->add_option("a", iso_a)->required();
  iso->add_option("b", iso_b)->required();
  iso->add_flag("--labeled-only", labeled_only,
                "compare the labeled sub-structure only");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(ontology_paths(ontology), strict);

    if (raw->parsed()) {
      semflow::WiringDiagram d = load_input(trace_path);
      write_file(out_path, format == "dot" ? semflow::to_dot(d)
                                           : semflow::serialize_diagram(d));
      return 0;
    }

    if (enrich_cmd->parsed()) {
      semflow::WiringDiagram d = load_input(enrich_input);
      semflow::Ontology o = semflow::load_ontology(ontology_paths(ontology));
      auto strictness = strict ? semflow::Strictness::Strict
                               : semflow::Strictness::Lenient;
      try {
        auto [semantic, report] = semflow::enrich(d, o, strictness);
        std::cerr << report.to_json().dump(2) << "\n";
        write_file(out_path, format == "dot"
                                 ? semflow::to_dot(semantic)
                                 : semflow::serialize_diagram(semantic));
      } catch (const semflow::SlotMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      } catch (const semflow::TypeConflict& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
      return 0;
    }

    if (iso->parsed()) {
      semflow::WiringDiagram a = load_input(iso_a);
      semflow::WiringDiagram b = load_input(iso_b);
      bool same = labeled_only ? semflow::labeled_isomorphic(a, b)
                               : semflow::is_isomorphic(a, b);
      return same ? 0 : 1;
    }
  } catch (const semflow::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const semflow::UnknownEventKind& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const semflow::NestingViolation& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const semflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
