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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "faircert/dual.hpp"
#include "faircert/explore.hpp"
#include "faircert/model.hpp"
#include "faircert/smtlib.hpp"

namespace faircert {

// ---- run configuration ----

struct Budget {
  std::chrono::milliseconds wall{1'800'000}; // 1800 s wall clock
  std::uint64_t max_dequeues = std::numeric_limits<std::uint64_t>::max();
  std::chrono::milliseconds per_solve{60'000};
};

struct DriverOptions {
  QueueStrategy strategy = QueueStrategy::fifo;
  SolverConfig solver;
  std::atomic<bool> *cancel = nullptr; // cooperative cancellation, polled between dequeues
};

// ---- results ----

enum class UwFlag { yes, no, unknown };

inline const char *uw_name(UwFlag f) {
  switch (f) {
  case UwFlag::yes:
    return "Y";
  case UwFlag::no:
    return "N";
  case UwFlag::unknown:
    return "Unk";
  }
  return "?";
}

/// The per-run indicator set: UW, FQ, #test, #sat, #unsat, Time, plus the
/// configuration echoes needed to reproduce the run.
struct RunReport {
  UwFlag uw = UwFlag::unknown;
  std::uint64_t fq = 0;     // queue size after the first forward pass
  std::uint64_t n_test = 0; // seed plus every solver model re-executed
  std::uint64_t n_sat = 0;
  std::uint64_t n_unsat = 0;
  double elapsed_s = 0;
  std::string strategy = "fifo";
  std::string backend = "internal";
  std::string mode;
  std::uint64_t rng_seed = 0;
  bool deterministic = false;
};

/// Validated unfairness witness. Constructed only through make_witness,
/// which machine-checks all four conditions: (i) both inputs inside the
/// attribute box, (ii) some protected value differs, (iii) all
/// non-protected values equal, (iv) the predicted labels differ under
/// fresh concrete forward passes.
struct Witness {
  std::vector<Rat> phi;
  std::vector<Rat> phi_prime;
  int label = 0;
  int label_prime = 0;
};

inline Witness make_witness(const ModelSpec &model, const std::vector<int> &pa,
                            std::vector<Rat> phi, std::vector<Rat> phi_prime) {
  check_input(model, phi);
  check_input(model, phi_prime);
  std::set<int> pa_set(pa.begin(), pa.end());
  bool pa_differs = false;
  for (int i = 0; i < model.attribute_count(); ++i) {
    bool equal = phi[static_cast<std::size_t>(i)] == phi_prime[static_cast<std::size_t>(i)];
    if (pa_set.count(i)) {
      if (!equal)
        pa_differs = true;
    } else if (!equal) {
      throw Error("invalid-witness",
                  "non-protected attribute " + std::to_string(i) + " differs");
    }
  }
  if (!pa_differs)
    throw Error("invalid-witness", "no protected attribute differs");
  Witness w;
  w.label = predict(model, phi);
  w.label_prime = predict(model, phi_prime);
  if (w.label == w.label_prime)
    throw Error("invalid-witness", "labels agree; not a discriminatory pair");
  w.phi = std::move(phi);
  w.phi_prime = std::move(phi_prime);
  return w;
}

enum class Outcome { unfair, fair, unknown };

inline const char *outcome_name(Outcome o) {
  switch (o) {
  case Outcome::unfair:
    return "unfair";
  case Outcome::fair:
    return "fair";
  case Outcome::unknown:
    return "unknown";
  }
  return "?";
}

struct Certificate {
  std::uint64_t closed_edges = 0;      // explored + no-solution edges of T
  std::uint64_t no_solution_edges = 0;
  std::uint64_t unsat_constraints = 0;
  std::uint64_t region_queries = 0; // direct label-difference queries posed
};

struct Verdict {
  Outcome outcome = Outcome::unknown;
  std::optional<Witness> witness;
  std::optional<Certificate> certificate; // present for fair verdicts
};

// ---- deterministic sampling ----

/// Thin deterministic uniform sampler (rejection sampling over
/// mt19937_64), so seeded runs reproduce regardless of platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n <= 1)
      return 0;
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

private:
  std::mt19937_64 gen_;
};

inline constexpr std::uint64_t kRealSampleGrid = 1000;

/// Uniform draw from one attribute's domain: integers uniform on lattice
/// points, reals uniform on a kRealSampleGrid+1 point grid over the box.
inline Rat sample_attribute(const AttributeSpec &attr, Rng &rng) {
  if (attr.kind == AttrKind::integer) {
    mpz_class range_z = Rat(attr.upper - attr.lower).get_num();
    if (!range_z.fits_ulong_p())
      throw Error("domain-violation", "attribute '" + attr.name + "' domain too large to sample");
    std::uint64_t range = range_z.get_ui();
    return Rat(attr.lower + Rat(static_cast<unsigned long>(rng.below(range + 1))));
  }
  std::uint64_t k = rng.below(kRealSampleGrid + 1);
  return Rat(attr.lower +
             Rat(static_cast<unsigned long>(k)) * (attr.upper - attr.lower) / kRealSampleGrid);
}

inline std::vector<Rat> draw_uniform_instance(const std::vector<AttributeSpec> &attributes,
                                              Rng &rng) {
  std::vector<Rat> v;
  v.reserve(attributes.size());
  for (const auto &a : attributes)
    v.push_back(sample_attribute(a, rng));
  return v;
}

/// Uniform draw over the domain minus the current value; used by the
/// resampling bias estimate, which requires the altered value to
/// actually differ.
inline Rat sample_different_value(const AttributeSpec &attr, const Rat &original, Rng &rng) {
  if (attr.lower == attr.upper)
    throw Error("degenerate-pa-domain",
                "attribute '" + attr.name + "' has a single-value domain");
  if (attr.kind == AttrKind::integer) {
    mpz_class range_z = Rat(attr.upper - attr.lower).get_num();
    if (!range_z.fits_ulong_p())
      throw Error("domain-violation", "attribute '" + attr.name + "' domain too large to sample");
    std::uint64_t range = range_z.get_ui();
    std::uint64_t offset = Rat(original - attr.lower).get_num().get_ui();
    std::uint64_t j = rng.below(range); // domain size is range+1; skip the original
    if (j >= offset)
      ++j;
    return Rat(attr.lower + Rat(static_cast<unsigned long>(j)));
  }
  std::uint64_t k = rng.below(kRealSampleGrid + 1);
  Rat value(attr.lower +
            Rat(static_cast<unsigned long>(k)) * (attr.upper - attr.lower) / kRealSampleGrid);
  if (value == original) {
    k = (k + 1) % (kRealSampleGrid + 1);
    value = Rat(attr.lower +
                Rat(static_cast<unsigned long>(k)) * (attr.upper - attr.lower) / kRealSampleGrid);
  }
  return value;
}

// ---- constraint assembly ----

namespace detail {

/// Prefix literals conjoined with the attribute box; in fairness mode also
/// the PA-disequality split (one disjunction of 2*|PA| alternatives,
/// tightened to +/-1 margins for integer attributes since LRA has no
/// native !=).
inline ConstraintSystem make_system(const std::vector<BranchLiteral> &literals,
                                    const std::vector<AttributeSpec> &attributes,
                                    const std::set<int> &mask,
                                    const std::vector<std::pair<int, int>> *diseq_pairs) {
  ConstraintSystem sys;
  for (const auto &lit : literals)
    sys.atoms.push_back(atom_of_literal(lit.expr, lit.polarity));
  for (int var : mask) {
    const AttributeSpec &a = attributes[static_cast<std::size_t>(var)];
    sys.bounds[var] = VarBounds{a.lower, a.upper, a.kind == AttrKind::integer};
  }
  if (diseq_pairs && !diseq_pairs->empty()) {
    std::vector<LinearAtom> clause;
    for (const auto &[p, dup] : *diseq_pairs) {
      bool integral = attributes[static_cast<std::size_t>(p)].kind == AttrKind::integer;
      SymExpr fwd = SymExpr::variable(dup);
      fwd.add_scaled(SymExpr::variable(p), Rat(-1));
      SymExpr rev = SymExpr::variable(p);
      rev.add_scaled(SymExpr::variable(dup), Rat(-1));
      if (integral) {
        fwd.constant = -1; // x' - x - 1 >= 0, i.e. x <= x' - 1
        rev.constant = -1;
        clause.push_back(LinearAtom{std::move(fwd), Relation::ge});
        clause.push_back(LinearAtom{std::move(rev), Relation::ge});
      } else {
        clause.push_back(LinearAtom{std::move(fwd), Relation::gt});
        clause.push_back(LinearAtom{std::move(rev), Relation::gt});
      }
    }
    sys.disjunctions.push_back(std::move(clause));
  }
  return sys;
}

inline std::chrono::milliseconds remaining_ms(std::chrono::steady_clock::time_point deadline) {
  auto rem = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return rem.count() > 0 ? rem : std::chrono::milliseconds(0);
}

} // namespace detail

// ---- discriminatory instance checking ----

enum class InstanceOutcome { witness, exhausted, budget_exceeded };

inline const char *instance_outcome_name(InstanceOutcome o) {
  switch (o) {
  case InstanceOutcome::witness:
    return "witness";
  case InstanceOutcome::exhausted:
    return "exhausted";
  case InstanceOutcome::budget_exceeded:
    return "budget_exceeded";
  }
  return "?";
}

struct InstanceResult {
  InstanceOutcome outcome = InstanceOutcome::budget_exceeded;
  std::optional<Witness> witness;
  RunReport report;
  ExecTree tree;
};

/// Concolic search for a discriminatory counterpart of `phi`: the
/// protected attributes become symbolic, everything else stays frozen to
/// phi's values, and branch flips are solved over the protected box.
/// `exhausted` certifies that no PA perturbation of phi changes the label.
inline InstanceResult check_instance(const ModelSpec &model, const std::vector<Rat> &phi,
                                     const std::vector<int> &pa, const Budget &budget,
                                     const DriverOptions &opts = {}) {
  if (pa.empty())
    throw Error("empty-pa", "at least one protected attribute index is required");
  for (int p : pa)
    if (p < 0 || p >= model.attribute_count())
      throw Error("index-out-of-range", "protected attribute index " + std::to_string(p));

  auto start = std::chrono::steady_clock::now();
  auto deadline = start + budget.wall;
  InstanceResult result;
  result.report.strategy = strategy_name(opts.strategy);
  result.report.backend = opts.solver.description();
  result.report.mode = "instance";

  int seed_label = predict(model, phi);
  std::set<int> mask(pa.begin(), pa.end());

  WorkQueue q;
  q.strategy = opts.strategy;
  ExecTree &t = result.tree;
  exploration(model, phi, mask, q, t);
  result.report.fq = q.size();
  result.report.n_test = 1;

  std::uint64_t dequeues = 0;
  for (;;) {
    if (opts.cancel && opts.cancel->load()) {
      result.outcome = InstanceOutcome::budget_exceeded;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline || dequeues >= budget.max_dequeues) {
      result.outcome = InstanceOutcome::budget_exceeded;
      break;
    }
    std::optional<PathConstraint> target = next_target(q);
    if (!target) {
      // exhausted only if every edge got a definite resolution; an edge
      // still marked unknown (solver failure) blocks the certificate
      // unless a later trace explored it concretely.
      bool degraded = t.count_status(EdgeStatus::unknown) > 0;
      result.outcome = degraded ? InstanceOutcome::budget_exceeded : InstanceOutcome::exhausted;
      break;
    }
    ++dequeues;

    ConstraintSystem sys = detail::make_system(target->literals, model.attributes, mask, nullptr);
    auto per_solve = std::min(budget.per_solve, detail::remaining_ms(deadline));
    SolveResult res = solve_with(opts.solver, sys, per_solve);
    if (res.status == SolveStatus::unknown) {
      t.edge(target->node, target->polarity).status = EdgeStatus::unknown;
      continue;
    }
    if (res.status == SolveStatus::unsat) {
      ++result.report.n_unsat;
      t.edge(target->node, target->polarity).status = EdgeStatus::no_solution;
      continue;
    }
    ++result.report.n_sat;

    std::vector<Rat> phi_prime = phi;
    for (int p : pa)
      phi_prime[static_cast<std::size_t>(p)] = res.model.at(p);
    ++result.report.n_test;
    ExplorationResult expl = exploration(model, phi_prime, mask, q, t, false, &*target);
    if (expl.run.labels[0] != seed_label) {
      result.witness = make_witness(model, pa, phi, phi_prime);
      result.outcome = InstanceOutcome::witness;
      break;
    }
  }

  result.report.uw = result.outcome == InstanceOutcome::witness ? UwFlag::yes
                     : result.outcome == InstanceOutcome::exhausted ? UwFlag::no
                                                                    : UwFlag::unknown;
  result.report.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---- fairness verification on the dual network ----

enum class VerifyMode { paper, region_query };

inline const char *verify_mode_name(VerifyMode m) {
  return m == VerifyMode::paper ? "paper" : "region-query";
}

struct FairnessResult {
  Verdict verdict;
  RunReport report;
  ExecTree tree;
  std::vector<Rat> seed; // dual seed actually used
};

/// Fairness verification: build the dual network, make every dual
/// attribute symbolic, and explore. mode=paper mirrors the classic concolic loop.s
/// concrete-label termination; mode=region_query additionally poses, for
/// every explored activation region, the direct query
///   region ∧ (z>0 ∧ z'<=0 ∨ z<=0 ∧ z'>0) ∧ PA-disequality
/// so the fair verdict does not depend on output-threshold sites alone.
/// Fair verdicts are sound for ReLU + threshold-output models.
inline FairnessResult verify_fairness(const ModelSpec &model, const std::vector<int> &pa,
                                      std::optional<std::vector<Rat>> seed_instance,
                                      const Budget &budget,
                                      VerifyMode mode = VerifyMode::region_query,
                                      const DriverOptions &opts = {},
                                      std::uint64_t rng_seed = 0) {
  auto start = std::chrono::steady_clock::now();
  auto deadline = start + budget.wall;

  FairnessResult result;
  result.report.strategy = strategy_name(opts.strategy);
  result.report.backend = opts.solver.description();
  result.report.mode = verify_mode_name(mode);
  result.report.rng_seed = rng_seed;

  DualModelSpec dual = build_dual(model, pa);

  std::vector<Rat> seed_base;
  if (seed_instance) {
    seed_base = *seed_instance;
    check_input(model, seed_base);
  } else {
    Rng rng(rng_seed);
    seed_base = draw_uniform_instance(model.attributes, rng);
  }
  result.seed = split_input(dual, seed_base, {});

  std::set<int> mask;
  for (int i = 0; i < static_cast<int>(dual.net.attributes.size()); ++i)
    mask.insert(i);

  WorkQueue q;
  q.strategy = opts.strategy;
  ExecTree &t = result.tree;

  Certificate cert;
  std::uint64_t region_unknowns = 0;
  std::set<std::string> seen_regions;

  // Direct per-region unfairness query (region_query mode). Returns a
  // validated witness if one exists inside the trace's activation region.
  auto pose_region_queries = [&](const ConcolicResult &run) -> std::optional<Witness> {
    std::string key;
    for (const auto &lit : run.trace.literals) {
      if (lit.kind != BranchKind::relu)
        continue;
      key += std::to_string(lit.site.layer) + ":" + std::to_string(lit.site.neuron) + ":" +
             std::to_string(lit.site.copy) + (lit.polarity ? "+" : "-") + ";";
    }
    if (!seen_regions.insert(key).second)
      return std::nullopt;

    std::vector<BranchLiteral> region;
    for (const auto &lit : run.trace.literals)
      if (lit.kind == BranchKind::relu)
        region.push_back(lit);

    SymExpr z1 = run.logits[0].symbolic;
    z1.constant -= dual.net.threshold;
    SymExpr z2 = run.logits[1].symbolic;
    z2.constant -= dual.net.threshold;

    for (int side = 0; side < 2; ++side) {
      ConstraintSystem sys =
          detail::make_system(region, dual.net.attributes, mask, &dual.pa_mapping);
      sys.atoms.push_back(LinearAtom{side == 0 ? z1 : z2, Relation::gt});
      sys.atoms.push_back(LinearAtom{side == 0 ? z2 : z1, Relation::le});
      ++cert.region_queries;
      auto per_solve = std::min(budget.per_solve, detail::remaining_ms(deadline));
      SolveResult res = solve_with(opts.solver, sys, per_solve);
      if (res.status == SolveStatus::unknown) {
        ++region_unknowns;
        continue;
      }
      if (res.status == SolveStatus::unsat)
        continue;
      std::vector<Rat> input(dual.net.attributes.size());
      for (int v : mask)
        input[static_cast<std::size_t>(v)] = res.model.at(v);
      ++result.report.n_test;
      DualOutput out = dual_output(dual, input);
      if (out.merged != 1)
        throw Error("concolic-divergence",
                    "region query model does not change the label concretely");
      auto [w_phi, w_phi_prime] = unsplit_input(dual, input);
      return make_witness(model, pa, std::move(w_phi), std::move(w_phi_prime));
    }
    return std::nullopt;
  };

  auto finish = [&](Outcome outcome, std::optional<Witness> witness) {
    result.verdict.outcome = outcome;
    result.verdict.witness = std::move(witness);
    if (outcome == Outcome::fair) {
      cert.no_solution_edges = t.count_status(EdgeStatus::no_solution);
      cert.closed_edges = t.count_status(EdgeStatus::explored) + cert.no_solution_edges;
      cert.unsat_constraints = result.report.n_unsat;
      result.verdict.certificate = cert;
    }
    result.report.uw = outcome == Outcome::unfair  ? UwFlag::yes
                       : outcome == Outcome::fair ? UwFlag::no
                                                   : UwFlag::unknown;
    result.report.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  ExplorationResult first = exploration(dual.net, result.seed, mask, q, t, true);
  result.report.fq = q.size();
  result.report.n_test = 1;
  if (first.run.labels[0] != first.run.labels[1]) {
    auto [w_phi, w_phi_prime] = unsplit_input(dual, result.seed);
    return finish(Outcome::unfair,
                  make_witness(model, pa, std::move(w_phi), std::move(w_phi_prime)));
  }
  if (mode == VerifyMode::region_query) {
    if (auto w = pose_region_queries(first.run))
      return finish(Outcome::unfair, std::move(*w));
  }

  std::uint64_t dequeues = 0;
  for (;;) {
    if (opts.cancel && opts.cancel->load())
      return finish(Outcome::unknown, std::nullopt);
    if (std::chrono::steady_clock::now() >= deadline || dequeues >= budget.max_dequeues)
      return finish(Outcome::unknown, std::nullopt);
    std::optional<PathConstraint> target = next_target(q);
    if (!target) {
      bool degraded = region_unknowns > 0 || t.count_status(EdgeStatus::unknown) > 0;
      return finish(degraded ? Outcome::unknown : Outcome::fair, std::nullopt);
    }
    ++dequeues;

    ConstraintSystem sys =
        detail::make_system(target->literals, dual.net.attributes, mask, &dual.pa_mapping);
    auto per_solve = std::min(budget.per_solve, detail::remaining_ms(deadline));
    SolveResult res = solve_with(opts.solver, sys, per_solve);
    if (res.status == SolveStatus::unknown) {
      t.edge(target->node, target->polarity).status = EdgeStatus::unknown;
      continue;
    }
    if (res.status == SolveStatus::unsat) {
      ++result.report.n_unsat;
      t.edge(target->node, target->polarity).status = EdgeStatus::no_solution;
      continue;
    }
    ++result.report.n_sat;

    std::vector<Rat> input(dual.net.attributes.size());
    for (int v : mask)
      input[static_cast<std::size_t>(v)] = res.model.at(v);
    ++result.report.n_test;
    ExplorationResult expl = exploration(dual.net, input, mask, q, t, true, &*target);
    if (expl.run.labels[0] != expl.run.labels[1]) {
      auto [w_phi, w_phi_prime] = unsplit_input(dual, input);
      return finish(Outcome::unfair,
                    make_witness(model, pa, std::move(w_phi), std::move(w_phi_prime)));
    }
    if (mode == VerifyMode::region_query) {
      if (auto w = pose_region_queries(expl.run))
        return finish(Outcome::unfair, std::move(*w));
    }
  }
}

// ---- dataset sweep over a whole dataset ----

struct DatasetResult {
  enum class Kind { witness, none, unknown };
  Kind kind = Kind::unknown;
  std::optional<Witness> witness;
  std::optional<std::size_t> witness_index;
  RunReport aggregate;
  std::vector<std::pair<std::size_t, std::string>> errors; // per-instance failures
};

/// Runs check_instance over every dataset row, fanning out to `workers`
/// threads. In deterministic mode the result is the first-in-dataset-order
/// witness and the aggregate covers exactly the instances a sequential
/// sweep would have processed, so workers=1 and workers=N produce
/// identical reports. In parallel mode the first witness across workers
/// wins and cancels the rest cooperatively.
inline DatasetResult check_dataset(const ModelSpec &model,
                                   const std::vector<std::vector<Rat>> &dataset,
                                   const std::vector<int> &pa, const Budget &budget,
                                   unsigned workers = 1, bool deterministic = true,
                                   const DriverOptions &opts = {}) {
  auto start = std::chrono::steady_clock::now();
  auto deadline = start + budget.wall;
  const std::size_t n = dataset.size();

  DatasetResult result;
  result.aggregate.strategy = strategy_name(opts.strategy);
  result.aggregate.backend = opts.solver.description();
  result.aggregate.mode = "dataset";
  result.aggregate.deterministic = deterministic;

  std::vector<std::optional<InstanceResult>> outcomes(n);
  std::vector<std::optional<std::string>> failures(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best_witness{n};
  std::atomic<bool> cancel{false};
  std::mutex mu;

  auto worker_fn = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n)
        return;
      if (deterministic) {
        if (i > best_witness.load())
          continue; // a strictly earlier witness already exists
      } else if (cancel.load()) {
        return;
      }
      Budget inst_budget = budget;
      inst_budget.wall = detail::remaining_ms(deadline);
      DriverOptions inst_opts = opts;
      if (!deterministic)
        inst_opts.cancel = &cancel;
      try {
        InstanceResult r = check_instance(model, dataset[i], pa, inst_budget, inst_opts);
        bool found = r.outcome == InstanceOutcome::witness;
        {
          std::lock_guard<std::mutex> lock(mu);
          outcomes[i] = std::move(r);
        }
        if (found) {
          std::size_t cur = best_witness.load();
          while (i < cur && !best_witness.compare_exchange_weak(cur, i)) {
          }
          if (!deterministic)
            cancel.store(true);
        }
      } catch (const Error &e) {
        std::lock_guard<std::mutex> lock(mu);
        failures[i] = std::string(e.kind()) + ": " + e.what();
      }
    }
  };

  unsigned thread_count = workers == 0 ? 1 : workers;
  if (thread_count <= 1 && deterministic) {
    // Sequential fast path: stop right after the first witness.
    for (std::size_t i = 0; i < n; ++i) {
      Budget inst_budget = budget;
      inst_budget.wall = detail::remaining_ms(deadline);
      try {
        InstanceResult r = check_instance(model, dataset[i], pa, inst_budget, opts);
        bool found = r.outcome == InstanceOutcome::witness;
        outcomes[i] = std::move(r);
        if (found) {
          best_witness.store(i);
          break;
        }
      } catch (const Error &e) {
        failures[i] = std::string(e.kind()) + ": " + e.what();
      }
    }
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < thread_count; ++w)
      pool.emplace_back(worker_fn);
    for (auto &th : pool)
      th.join();
  }

  std::size_t witness_at = best_witness.load();
  std::size_t counted_end = witness_at < n ? witness_at + 1 : n;

  bool all_exhausted = true;
  bool any_failure = false;
  for (std::size_t i = 0; i < counted_end; ++i) {
    if (failures[i]) {
      result.errors.emplace_back(i, *failures[i]);
      any_failure = true;
      continue;
    }
    if (!outcomes[i]) {
      any_failure = true; // skipped instance past a witness in parallel mode
      continue;
    }
    const RunReport &r = outcomes[i]->report;
    if (i == 0)
      result.aggregate.fq = r.fq;
    result.aggregate.n_test += r.n_test;
    result.aggregate.n_sat += r.n_sat;
    result.aggregate.n_unsat += r.n_unsat;
    if (outcomes[i]->outcome != InstanceOutcome::exhausted &&
        outcomes[i]->outcome != InstanceOutcome::witness)
      all_exhausted = false;
  }

  if (witness_at < n) {
    result.kind = DatasetResult::Kind::witness;
    result.witness = outcomes[witness_at]->witness;
    result.witness_index = witness_at;
    result.aggregate.uw = UwFlag::yes;
  } else if (all_exhausted && !any_failure) {
    result.kind = DatasetResult::Kind::none;
    result.aggregate.uw = UwFlag::no;
  } else {
    result.kind = DatasetResult::Kind::unknown;
    result.aggregate.uw = UwFlag::unknown;
  }
  for (std::size_t i = counted_end; i < n; ++i)
    if (failures[i])
      result.errors.emplace_back(i, *failures[i]);

  result.aggregate.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---- resampling bias estimate ----

/// Repeatedly samples `per_round` dataset rows per round, alters every
/// protected value to a uniformly random different in-domain value, and
/// averages the label-flip ratio over `rounds`; returned as an exact
/// percentage. Deterministic for a fixed rng_seed.
inline Rat bias_estimate(const ModelSpec &model, const std::vector<std::vector<Rat>> &dataset,
                         const std::vector<int> &pa, std::uint64_t rounds = 100,
                         std::uint64_t per_round = 100, std::uint64_t rng_seed = 0) {
  if (dataset.empty())
    throw Error("empty-dataset", "bias estimate requires a nonempty dataset");
  if (pa.empty())
    throw Error("empty-pa", "at least one protected attribute index is required");
  if (rounds == 0 || per_round == 0)
    throw Error("bad-argument", "rounds and per-round counts must be positive");
  for (int p : pa) {
    if (p < 0 || p >= model.attribute_count())
      throw Error("index-out-of-range", "protected attribute index " + std::to_string(p));
    const AttributeSpec &a = model.attributes[static_cast<std::size_t>(p)];
    if (a.lower == a.upper)
      throw Error("degenerate-pa-domain", "attribute '" + a.name + "' has a single-value domain");
  }

  Rng rng(rng_seed);
  Rat ratio_sum(0);
  for (std::uint64_t r = 0; r < rounds; ++r) {
    std::uint64_t flips = 0;
    for (std::uint64_t k = 0; k < per_round; ++k) {
      const std::vector<Rat> &row = dataset[rng.below(dataset.size())];
      std::vector<Rat> altered = row;
      for (int p : pa)
        altered[static_cast<std::size_t>(p)] = sample_different_value(
            model.attributes[static_cast<std::size_t>(p)], row[static_cast<std::size_t>(p)], rng);
      if (predict(model, row) != predict(model, altered))
        ++flips;
    }
    ratio_sum += Rat(flips, per_round);
  }
  return Rat(100 * ratio_sum / rounds);
}

} // namespace faircert
