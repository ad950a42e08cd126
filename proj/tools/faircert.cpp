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

// faircert command line: discriminatory instance checking, fairness
// verification on the dual network, dual-model emission, bias estimation
// and execution-tree dumps for fully connected ReLU networks with a
// thresholded binary output.
//
// Exit codes: 0 fair / no witness found, 1 witness found, 2 unknown or
// timeout, 3 usage error, 4 input or runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faircert/dataset.hpp"
#include "faircert/faircert.hpp"

namespace {

using namespace faircert;

constexpr int kExitNoWitness = 0;
constexpr int kExitWitness = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitInput = 4;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("read-failure", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("write-failure", "cannot open '" + path + "' for writing");
  out << content;
  if (!out)
    throw Error("write-failure", "failed writing '" + path + "'");
}

std::vector<Rat> parse_instance(const std::string &text) {
  std::vector<Rat> values;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      values.push_back(rat_from_string(cur));
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty())
    values.push_back(rat_from_string(cur));
  return values;
}

SolverConfig parse_backend(const std::string &spec) {
  SolverConfig config;
  if (spec.empty() || spec == "internal")
    return config;
  if (spec == "smtlib" || spec.rfind("smtlib=", 0) == 0) {
    config.backend = SolverConfig::Backend::smtlib;
    if (spec.size() > 7 && spec[6] == '=')
      config.command = spec.substr(7);
    if (config.command.empty()) {
      const char *env = std::getenv("FAIRCERT_SMT_SOLVER");
      if (!env || !*env)
        throw Error("bad-argument",
                    "--backend smtlib needs a command: use smtlib=<cmd> or set FAIRCERT_SMT_SOLVER");
      config.command = env;
    }
    return config;
  }
  throw Error("bad-argument", "unknown backend '" + spec + "' (expected internal or smtlib=<cmd>)");
}

struct CommonFlags {
  std::string model_path;
  std::vector<int> pa;
  double timeout_s = 1800;
  double per_solve_s = 60;
  std::uint64_t max_dequeues = 0; // 0 = unlimited
  std::string strategy = "fifo";
  std::string backend = "internal";
  std::string report_path;
  bool no_timestamp = false;
};

void add_common(CLI::App *cmd, CommonFlags &flags, bool with_solver) {
  cmd->add_option("--model", flags.model_path, "model document (JSON)")->required();
  cmd->add_option("--pa", flags.pa,
                  "protected attribute indices (defaults to the model's `protected` list)")
      ->delimiter(',');
  if (with_solver) {
    cmd->add_option("--timeout-s", flags.timeout_s, "wall-clock budget in seconds");
    cmd->add_option("--per-solve-s", flags.per_solve_s, "per-constraint solver deadline in seconds");
    cmd->add_option("--max-dequeues", flags.max_dequeues, "dequeue budget (0 = unlimited)");
    cmd->add_option("--strategy", flags.strategy, "queue strategy: fifo (dequeue) or lifo (pop)")
        ->check(CLI::IsMember({"fifo", "lifo"}));
    cmd->add_option("--backend", flags.backend, "solver backend: internal or smtlib=<command>");
  }
  cmd->add_option("--report", flags.report_path, "write the report document to this path");
  cmd->add_flag("--no-timestamp", flags.no_timestamp,
                "omit timing from the report document (byte-stable reruns)");
}

Budget make_budget(const CommonFlags &flags) {
  Budget b;
  b.wall = std::chrono::milliseconds(static_cast<std::int64_t>(flags.timeout_s * 1000));
  b.per_solve = std::chrono::milliseconds(static_cast<std::int64_t>(flags.per_solve_s * 1000));
  if (flags.max_dequeues > 0)
    b.max_dequeues = flags.max_dequeues;
  return b;
}

DriverOptions make_options(const CommonFlags &flags) {
  DriverOptions opts;
  opts.strategy = flags.strategy == "lifo" ? QueueStrategy::lifo : QueueStrategy::fifo;
  opts.solver = parse_backend(flags.backend);
  return opts;
}

std::vector<int> effective_pa(const CommonFlags &flags, const ModelSpec &model) {
  return flags.pa.empty() ? model.protected_attrs : flags.pa;
}

void emit_report_document(const CommonFlags &flags, ReportDocument doc) {
  doc.include_timing = !flags.no_timestamp;
  std::cout << summary_line(doc.report) << "\n";
  std::cout << "outcome: " << doc.outcome << "\n";
  if (doc.witness) {
    auto render = [](const std::vector<Rat> &v) {
      std::string s = "(";
      for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + rat_to_string(v[i]);
      return s + ")";
    };
    std::cout << "witness: (" << render(doc.witness->phi) << ", " << render(doc.witness->phi_prime)
              << ") labels " << doc.witness->label << " vs " << doc.witness->label_prime << "\n";
  }
  if (!flags.report_path.empty())
    write_file(flags.report_path, doc.render());
}

int run_check(const CommonFlags &flags, const std::string &data_path, unsigned jobs,
              bool deterministic) {
  ModelSpec model = load_model(read_file(flags.model_path));
  DatasetTable data = parse_dataset(read_file(data_path), model);
  std::vector<int> pa = effective_pa(flags, model);

  DatasetResult result = check_dataset(model, data.rows, pa, make_budget(flags), jobs,
                                       deterministic, make_options(flags));
  for (const auto &[index, message] : result.errors)
    std::cerr << "instance " << index << ": " << message << "\n";

  ReportDocument doc;
  doc.command = "check";
  doc.report = result.aggregate;
  doc.outcome = result.kind == DatasetResult::Kind::witness ? "witness"
                : result.kind == DatasetResult::Kind::none  ? "none"
                                                            : "unknown";
  doc.witness = result.witness;
  emit_report_document(flags, std::move(doc));
  switch (result.kind) {
  case DatasetResult::Kind::witness:
    return kExitWitness;
  case DatasetResult::Kind::none:
    return kExitNoWitness;
  default:
    return kExitUnknown;
  }
}

int run_verify(const CommonFlags &flags, std::uint64_t rng_seed, const std::string &seed_instance,
               const std::string &mode_name) {
  std::string raw = read_file(flags.model_path);
  ModelSpec model;
  std::vector<int> pa;
  if (is_dual_document(raw)) {
    DualModelSpec dual = load_dual(raw);
    model = extract_base(dual);
    pa = flags.pa.empty() ? dual.net.protected_attrs : flags.pa;
  } else {
    model = load_model(raw);
    pa = effective_pa(flags, model);
  }

  std::optional<std::vector<Rat>> seed;
  if (!seed_instance.empty())
    seed = parse_instance(seed_instance);
  VerifyMode mode = mode_name == "paper" ? VerifyMode::paper : VerifyMode::region_query;

  FairnessResult result =
      verify_fairness(model, pa, seed, make_budget(flags), mode, make_options(flags), rng_seed);

  ReportDocument doc;
  doc.command = "verify";
  doc.report = result.report;
  doc.outcome = outcome_name(result.verdict.outcome);
  doc.witness = result.verdict.witness;
  doc.certificate = result.verdict.certificate;
  emit_report_document(flags, std::move(doc));
  switch (result.verdict.outcome) {
  case Outcome::unfair:
    return kExitWitness;
  case Outcome::fair:
    return kExitNoWitness;
  default:
    return kExitUnknown;
  }
}

int run_dual(const CommonFlags &flags, const std::string &out_path) {
  ModelSpec model = load_model(read_file(flags.model_path));
  std::vector<int> pa = effective_pa(flags, model);
  DualModelSpec dual = build_dual(model, pa);
  std::string doc = serialize_dual(dual);
  if (out_path.empty())
    std::cout << doc;
  else
    write_file(out_path, doc);
  return kExitNoWitness;
}

int run_bias(const CommonFlags &flags, const std::string &data_path, std::uint64_t rounds,
             std::uint64_t per_round, std::uint64_t rng_seed) {
  ModelSpec model = load_model(read_file(flags.model_path));
  DatasetTable data = parse_dataset(read_file(data_path), model);
  std::vector<int> pa = effective_pa(flags, model);
  Rat bias = bias_estimate(model, data.rows, pa, rounds, per_round, rng_seed);
  std::cout << "Bias(%) = " << rat_to_string(bias) << "\n";
  return kExitNoWitness;
}

int run_trace(const CommonFlags &flags, const std::string &input_text, const std::string &mode_name,
              const std::string &out_path) {
  std::string raw = read_file(flags.model_path);
  std::string doc;
  int code = kExitNoWitness;
  if (mode_name == "fairness") {
    ModelSpec model;
    std::vector<int> pa;
    if (is_dual_document(raw)) {
      DualModelSpec dual = load_dual(raw);
      model = extract_base(dual);
      pa = flags.pa.empty() ? dual.net.protected_attrs : flags.pa;
    } else {
      model = load_model(raw);
      pa = effective_pa(flags, model);
    }
    std::optional<std::vector<Rat>> seed;
    if (!input_text.empty())
      seed = parse_instance(input_text);
    FairnessResult result =
        verify_fairness(model, pa, seed, make_budget(flags), VerifyMode::region_query,
                        make_options(flags));
    DualModelSpec dual = build_dual(model, pa);
    doc = serialize_tree(result.tree, dual.net);
    code = result.verdict.outcome == Outcome::unfair    ? kExitWitness
           : result.verdict.outcome == Outcome::unknown ? kExitUnknown
                                                        : kExitNoWitness;
  } else {
    ModelSpec model = load_model(raw);
    std::vector<int> pa = effective_pa(flags, model);
    if (input_text.empty())
      throw Error("bad-argument", "trace needs --input in instance mode");
    InstanceResult result =
        check_instance(model, parse_instance(input_text), pa, make_budget(flags),
                       make_options(flags));
    doc = serialize_tree(result.tree, model);
    code = result.outcome == InstanceOutcome::witness           ? kExitWitness
           : result.outcome == InstanceOutcome::budget_exceeded ? kExitUnknown
                                                                : kExitNoWitness;
  }
  if (out_path.empty())
    std::cout << doc;
  else
    write_file(out_path, doc);
  return code;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"faircert: concolic individual-fairness testing and verification for ReLU networks"};
  app.set_version_flag("--version", std::string("faircert ") + faircert::kToolVersion +
                                        " (schema " + std::to_string(faircert::kSchemaVersion) +
                                        ")");
  app.require_subcommand(1);

  CommonFlags check_flags;
  std::string check_data;
  unsigned check_jobs = 1;
  bool check_deterministic = false;
  CLI::App *check = app.add_subcommand("check", "discriminatory instance checking over a dataset");
  add_common(check, check_flags, true);
  check->add_option("--data", check_data, "dataset CSV with a header row")->required();
  check->add_option("--jobs", check_jobs, "worker threads");
  check->add_flag("--deterministic", check_deterministic,
                  "strictly first-in-dataset-order witness; output independent of --jobs");

  CommonFlags verify_flags;
  std::uint64_t verify_seed = 0;
  std::string verify_seed_instance;
  std::string verify_mode = "region-query";
  CLI::App *verify = app.add_subcommand("verify", "fairness verification on the dual network");
  add_common(verify, verify_flags, true);
  verify->add_option("--seed", verify_seed, "RNG seed for the random concolic seed input");
  verify->add_option("--seed-instance", verify_seed_instance,
                     "explicit seed instance, comma-separated attribute values");
  verify->add_option("--mode", verify_mode, "verification mode")
      ->check(CLI::IsMember({"paper", "region-query"}));

  CommonFlags dual_flags;
  std::string dual_out;
  CLI::App *dual = app.add_subcommand("dual", "emit the dual (2-copy) model document");
  add_common(dual, dual_flags, false);
  dual->add_option("--out", dual_out, "output path (default: stdout)");

  CommonFlags bias_flags;
  std::string bias_data;
  std::uint64_t bias_rounds = 100, bias_per_round = 100, bias_seed = 0;
  CLI::App *bias = app.add_subcommand("bias", "bias percentage estimate by random PA alteration");
  add_common(bias, bias_flags, false);
  bias->add_option("--data", bias_data, "dataset CSV with a header row")->required();
  bias->add_option("--rounds", bias_rounds, "number of sampling rounds");
  bias->add_option("--per-round", bias_per_round, "samples per round");
  bias->add_option("--rng-seed", bias_seed, "sampling RNG seed");

  CommonFlags trace_flags;
  std::string trace_input, trace_mode = "instance", trace_out;
  CLI::App *trace = app.add_subcommand("trace", "dump the execution tree document for one run");
  add_common(trace, trace_flags, true);
  trace->add_option("--input", trace_input, "instance values, comma-separated");
  trace->add_option("--trace-mode", trace_mode, "instance (PA symbolic) or fairness (dual, all symbolic)")
      ->check(CLI::IsMember({"instance", "fairness"}));
  trace->add_option("--out", trace_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3; // 0 for --help/--version, 3 for usage errors
  }

  try {
    if (check->parsed())
      return run_check(check_flags, check_data, check_jobs, check_deterministic);
    if (verify->parsed())
      return run_verify(verify_flags, verify_seed, verify_seed_instance, verify_mode);
    if (dual->parsed())
      return run_dual(dual_flags, dual_out);
    if (bias->parsed())
      return run_bias(bias_flags, bias_data, bias_rounds, bias_per_round, bias_seed);
    if (trace->parsed())
      return run_trace(trace_flags, trace_input, trace_mode, trace_out);
  } catch (const faircert::Error &e) {
    std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
