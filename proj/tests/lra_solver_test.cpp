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

#include <catch_amalgamated.hpp>

#include <chrono>

#include "faircert/simplex.hpp"

#include "support/test_support.hpp"

using namespace faircert;
using namespace testsupport;

namespace {

constexpr std::chrono::milliseconds kDeadline{10'000};

ConstraintSystem paper_system() {
  // x - y > 0 over x, y, x' in [0,10], all integral
  ConstraintSystem sys;
  LinearAtom a{SymExpr::variable(0), Relation::gt};
  a.expr.add_scaled(SymExpr::variable(1), Rat(-1));
  sys.atoms.push_back(a);
  for (int v : {0, 1, 2})
    sys.bounds[v] = VarBounds{Rat(0), Rat(10), true};
  return sys;
}

} // namespace

TEST_CASE("x - y > 0 over an integral box is sat with a valid model") {
  ConstraintSystem sys = paper_system();
  SolveResult res = solve(sys, kDeadline);
  REQUIRE(res.status == SolveStatus::sat);
  CHECK(check_assignment(sys, res.model));
  CHECK(res.model.size() == 3); // models cover every bounded variable
}

TEST_CASE("x > 0 && x <= 0 is unsat") {
  ConstraintSystem sys;
  sys.atoms.push_back({SymExpr::variable(0), Relation::gt});
  sys.atoms.push_back({SymExpr::variable(0), Relation::le});
  sys.bounds[0] = VarBounds{Rat(-5), Rat(5), false};
  CHECK(solve(sys, kDeadline).status == SolveStatus::unsat);
}

TEST_CASE("check_assignment evaluates strictness exactly") {
  ConstraintSystem sys;
  LinearAtom a{SymExpr::variable(0), Relation::gt};
  a.expr.add_scaled(SymExpr::variable(1), Rat(-1));
  sys.atoms.push_back(a);
  sys.bounds[0] = VarBounds{Rat(0), Rat(10), false};
  sys.bounds[1] = VarBounds{Rat(0), Rat(10), false};
  CHECK(check_assignment(sys, {{0, Rat(1)}, {1, Rat(0)}}));
  CHECK(!check_assignment(sys, {{0, Rat(0)}, {1, Rat(0)}}));
  CHECK_THROWS_AS(check_assignment(sys, {{0, Rat(1)}}), Error);
}

TEST_CASE("500 random integral systems agree with grid enumeration") {
  Rng rng(2027);
  int sat_count = 0, unsat_count = 0;
  for (int i = 0; i < 500; ++i) {
    ConstraintSystem sys = random_system(rng);
    SolveResult res = solve(sys, kDeadline);
    REQUIRE(res.status != SolveStatus::unknown);
    bool oracle_sat = grid_enumerate_sat(sys);
    INFO("system " << i);
    CHECK((res.status == SolveStatus::sat) == oracle_sat);
    if (res.status == SolveStatus::sat) {
      ++sat_count;
      CHECK(check_assignment(sys, res.model));
    } else {
      ++unsat_count;
    }
  }
  // both outcomes must actually occur for the sweep to mean anything
  CHECK(sat_count > 50);
  CHECK(unsat_count > 50);
}

TEST_CASE("strict atoms stay strict by a positive margin after concretization") {
  Rng rng(2028);
  SystemConfig cfg;
  cfg.with_disjunctions = false;
  for (int i = 0; i < 200; ++i) {
    ConstraintSystem sys = random_system(rng, cfg);
    // relax integrality so delta concretization is actually exercised
    for (auto &[v, b] : sys.bounds)
      b.integral = false;
    SolveResult res = solve(sys, kDeadline);
    if (res.status != SolveStatus::sat)
      continue;
    for (const auto &atom : sys.atoms) {
      Rat v = atom.expr.eval(res.model);
      if (atom.relation == Relation::gt)
        CHECK(v > 0);
      if (atom.relation == Relation::lt)
        CHECK(v < 0);
    }
  }
}

TEST_CASE("identical systems solve to identical models across reruns") {
  Rng rng(2029);
  for (int i = 0; i < 50; ++i) {
    ConstraintSystem sys = random_system(rng);
    SolveResult first = solve(sys, kDeadline);
    for (int rerun = 0; rerun < 2; ++rerun) {
      SolveResult again = solve(sys, kDeadline);
      CHECK(again.status == first.status);
      CHECK(again.model == first.model);
      CHECK(again.stats.pivots == first.stats.pivots);
    }
  }
}

TEST_CASE("unknown happens only via the deadline") {
  // a big feasible system under a zero deadline
  ConstraintSystem sys;
  for (int v = 0; v < 12; ++v)
    sys.bounds[v] = VarBounds{Rat(-50), Rat(50), true};
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    LinearAtom a;
    for (int v = 0; v < 12; ++v)
      a.expr.coeffs[v] = Rat(static_cast<long>(rng.below(7)) - 3);
    a.expr.constant = Rat(static_cast<long>(rng.below(21)) - 10);
    a.relation = i % 2 ? Relation::ge : Relation::le;
    sys.atoms.push_back(a);
  }
  SolveResult res = solve(sys, std::chrono::milliseconds(0));
  CHECK(res.status == SolveStatus::unknown);
  CHECK(res.diagnostic == "deadline");

  SolveResult full = solve(sys, kDeadline);
  CHECK(full.status != SolveStatus::unknown);
}

TEST_CASE("PA-disequality style disjunctions are honored") {
  // x and x' both in [0,3] integral, one disjunction forcing them apart
  ConstraintSystem sys;
  sys.bounds[0] = VarBounds{Rat(0), Rat(3), true};
  sys.bounds[1] = VarBounds{Rat(0), Rat(3), true};
  LinearAtom lt{SymExpr::variable(1), Relation::ge};
  lt.expr.add_scaled(SymExpr::variable(0), Rat(-1));
  lt.expr.constant = Rat(-1); // x' - x - 1 >= 0
  LinearAtom gt{SymExpr::variable(0), Relation::ge};
  gt.expr.add_scaled(SymExpr::variable(1), Rat(-1));
  gt.expr.constant = Rat(-1); // x - x' - 1 >= 0
  sys.disjunctions.push_back({lt, gt});

  SolveResult res = solve(sys, kDeadline);
  REQUIRE(res.status == SolveStatus::sat);
  CHECK(res.model.at(0) != res.model.at(1));

  // pinning both variables to the same point makes it unsat
  LinearAtom eq0{SymExpr::variable(0), Relation::eq};
  eq0.expr.constant = Rat(-2);
  LinearAtom eq1{SymExpr::variable(1), Relation::eq};
  eq1.expr.constant = Rat(-2);
  sys.atoms.push_back(eq0);
  sys.atoms.push_back(eq1);
  CHECK(solve(sys, kDeadline).status == SolveStatus::unsat);
}

TEST_CASE("integrality is enforced by branch and bound") {
  // 2x = 1 has a rational solution but no integral one
  ConstraintSystem sys;
  LinearAtom a{SymExpr::variable(0), Relation::eq};
  a.expr.scale(Rat(2));
  a.expr.constant = Rat(-1);
  sys.bounds[0] = VarBounds{Rat(-5), Rat(5), true};
  sys.atoms.push_back(a);
  CHECK(solve(sys, kDeadline).status == SolveStatus::unsat);
  sys.bounds[0].integral = false;
  SolveResult res = solve(sys, kDeadline);
  REQUIRE(res.status == SolveStatus::sat);
  CHECK(res.model.at(0) == Rat(1, 2));
}

TEST_CASE("missing bounds are a checked error") {
  ConstraintSystem sys;
  LinearAtom a{SymExpr::variable(3), Relation::gt};
  sys.atoms.push_back(a);
  try {
    solve(sys, kDeadline);
    FAIL("expected unbounded-variable");
  } catch (const Error &e) {
    CHECK(e.kind() == "unbounded-variable");
  }
}

TEST_CASE("constant atoms decide immediately") {
  ConstraintSystem sys;
  sys.bounds[0] = VarBounds{Rat(0), Rat(1), false};
  LinearAtom tautology{SymExpr::constant_of(Rat(1)), Relation::gt};
  sys.atoms.push_back(tautology);
  CHECK(solve(sys, kDeadline).status == SolveStatus::sat);
  LinearAtom contradiction{SymExpr::constant_of(Rat(-1)), Relation::ge};
  sys.atoms.push_back(contradiction);
  CHECK(solve(sys, kDeadline).status == SolveStatus::unsat);
}
