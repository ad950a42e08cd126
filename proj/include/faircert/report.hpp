//
// Copyright 2026 The FairCert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstdio>
#include <optional>
#include <string>

#include <json.hpp>

#include "faircert/driver.hpp"
#include "faircert/model_io.hpp"
#include "faircert/version.hpp"

namespace faircert {

/// Structured run record: RunReport + verdict + witness + configuration
/// echo + tool/schema versions. Serialization is canonical (fixed key
/// order); timing fields are omitted when include_timing is false so
/// deterministic reruns emit byte-identical documents.
struct ReportDocument {
  int schema_version = kSchemaVersion;
  std::string tool_version = kToolVersion;
  std::string command; // subcommand that produced the report
  RunReport report;
  std::string outcome; // "unfair" | "fair" | "unknown" | "witness" | "none" | ...
  std::optional<Witness> witness;
  std::optional<Certificate> certificate;
  bool include_timing = true;

  bool operator==(const ReportDocument &o) const {
    return schema_version == o.schema_version && tool_version == o.tool_version &&
           command == o.command && outcome == o.outcome && render() == o.render();
  }

  std::string render() const;
};

namespace detail {

inline std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", s);
  return buf;
}

} // namespace detail

inline std::string ReportDocument::render() const {
  detail::Json doc;
  doc["schema_version"] = schema_version;
  doc["tool_version"] = tool_version;
  doc["command"] = command;

  detail::Json config;
  config["strategy"] = report.strategy;
  config["backend"] = report.backend;
  config["mode"] = report.mode;
  config["rng_seed"] = report.rng_seed;
  config["deterministic"] = report.deterministic;
  doc["config"] = std::move(config);

  detail::Json run;
  run["uw"] = uw_name(report.uw);
  run["fq"] = report.fq;
  run["n_test"] = report.n_test;
  run["n_sat"] = report.n_sat;
  run["n_unsat"] = report.n_unsat;
  if (include_timing)
    run["elapsed_s"] = detail::format_seconds(report.elapsed_s);
  doc["result"] = std::move(run);

  doc["outcome"] = outcome;
  if (witness) {
    detail::Json w;
    w["phi"] = detail::rat_vector_json(witness->phi);
    w["phi_prime"] = detail::rat_vector_json(witness->phi_prime);
    w["label"] = witness->label;
    w["label_prime"] = witness->label_prime;
    doc["witness"] = std::move(w);
  }
  if (certificate) {
    detail::Json c;
    c["closed_edges"] = certificate->closed_edges;
    c["no_solution_edges"] = certificate->no_solution_edges;
    c["unsat_constraints"] = certificate->unsat_constraints;
    c["region_queries"] = certificate->region_queries;
    doc["certificate"] = std::move(c);
  }
  return doc.dump(2) + "\n";
}

/// Parses a report document back into a ReportDocument (lossless for the
/// fields it owns; used by the golden-file stability suite).
inline ReportDocument parse_report(std::string_view raw) {
  detail::Json doc = detail::Json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error("malformed-document", "report: not valid JSON");
  ReportDocument out;
  out.schema_version = detail::require_field(doc, "schema_version", "report").get<int>();
  out.tool_version = detail::require_field(doc, "tool_version", "report").get<std::string>();
  out.command = detail::require_field(doc, "command", "report").get<std::string>();
  const detail::Json &config = detail::require_field(doc, "config", "report");
  out.report.strategy = detail::require_field(config, "strategy", "report.config").get<std::string>();
  out.report.backend = detail::require_field(config, "backend", "report.config").get<std::string>();
  out.report.mode = detail::require_field(config, "mode", "report.config").get<std::string>();
  out.report.rng_seed =
      detail::require_field(config, "rng_seed", "report.config").get<std::uint64_t>();
  out.report.deterministic =
      detail::require_field(config, "deterministic", "report.config").get<bool>();
  const detail::Json &run = detail::require_field(doc, "result", "report");
  std::string uw = detail::require_field(run, "uw", "report.result").get<std::string>();
  out.report.uw = uw == "Y" ? UwFlag::yes : uw == "N" ? UwFlag::no : UwFlag::unknown;
  out.report.fq = detail::require_field(run, "fq", "report.result").get<std::uint64_t>();
  out.report.n_test = detail::require_field(run, "n_test", "report.result").get<std::uint64_t>();
  out.report.n_sat = detail::require_field(run, "n_sat", "report.result").get<std::uint64_t>();
  out.report.n_unsat = detail::require_field(run, "n_unsat", "report.result").get<std::uint64_t>();
  if (run.contains("elapsed_s"))
    out.report.elapsed_s = std::stod(run["elapsed_s"].get<std::string>());
  else
    out.include_timing = false;
  out.outcome = detail::require_field(doc, "outcome", "report").get<std::string>();
  if (doc.contains("witness")) {
    const detail::Json &w = doc["witness"];
    Witness wit;
    for (const auto &x : detail::require_field(w, "phi", "report.witness"))
      wit.phi.push_back(rat_from_string(x.get<std::string>()));
    for (const auto &x : detail::require_field(w, "phi_prime", "report.witness"))
      wit.phi_prime.push_back(rat_from_string(x.get<std::string>()));
    wit.label = detail::require_field(w, "label", "report.witness").get<int>();
    wit.label_prime = detail::require_field(w, "label_prime", "report.witness").get<int>();
    out.witness = std::move(wit);
  }
  if (doc.contains("certificate")) {
    const detail::Json &c = doc["certificate"];
    Certificate cert;
    cert.closed_edges =
        detail::require_field(c, "closed_edges", "report.certificate").get<std::uint64_t>();
    cert.no_solution_edges =
        detail::require_field(c, "no_solution_edges", "report.certificate").get<std::uint64_t>();
    cert.unsat_constraints =
        detail::require_field(c, "unsat_constraints", "report.certificate").get<std::uint64_t>();
    cert.region_queries =
        detail::require_field(c, "region_queries", "report.certificate").get<std::uint64_t>();
    out.certificate = cert;
  }
  return out;
}

/// One-line summary mirroring the indicator table row shape.
inline std::string summary_line(const RunReport &r) {
  return std::string("UW=") + uw_name(r.uw) + " FQ=" + std::to_string(r.fq) +
         " #test=" + std::to_string(r.n_test) + " #sat=" + std::to_string(r.n_sat) +
         " #unsat=" + std::to_string(r.n_unsat) + " Time=" + detail::format_seconds(r.elapsed_s) +
         "s";
}

} // namespace faircert
