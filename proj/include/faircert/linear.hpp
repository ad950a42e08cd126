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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "faircert/errors.hpp"
#include "faircert/sym_expr.hpp"

namespace faircert {

/// expr relation 0, e.g. {x - y, gt} is x - y > 0.
enum class Relation { gt, ge, lt, le, eq };

inline const char *relation_name(Relation r) {
  switch (r) {
  case Relation::gt:
    return ">";
  case Relation::ge:
    return ">=";
  case Relation::lt:
    return "<";
  case Relation::le:
    return "<=";
  case Relation::eq:
    return "=";
  }
  return "?";
}

struct LinearAtom {
  SymExpr expr;
  Relation relation = Relation::gt;

  bool operator==(const LinearAtom &) const = default;
};

/// Negation of a branch literal, ¬(e > 0) ≡ e ≤ 0.
inline LinearAtom atom_of_literal(const SymExpr &expr, bool polarity) {
  return LinearAtom{expr, polarity ? Relation::gt : Relation::le};
}

struct VarBounds {
  Rat lower{0};
  Rat upper{0};
  bool integral = false;
};

/// Conjunction of affine atoms over box-bounded variables, optionally with
/// integrality flags and disjunctive clauses (each inner list is one
/// disjunction of atoms; the PA-disequality split is encoded this way
/// since LRA has no native !=).
struct ConstraintSystem {
  std::vector<LinearAtom> atoms;
  std::map<int, VarBounds> bounds;
  std::vector<std::vector<LinearAtom>> disjunctions;
};

enum class SolveStatus { sat, unsat, unknown };

inline const char *solve_status_name(SolveStatus s) {
  switch (s) {
  case SolveStatus::sat:
    return "sat";
  case SolveStatus::unsat:
    return "unsat";
  case SolveStatus::unknown:
    return "unknown";
  }
  return "?";
}

struct SolveStats {
  std::uint64_t pivots = 0;
  double elapsed_s = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::unknown;
  std::map<int, Rat> model; // present iff status == sat
  SolveStats stats;
  std::string diagnostic; // set on unknown
};

inline bool atom_holds(const LinearAtom &atom, const std::map<int, Rat> &model) {
  Rat v = atom.expr.eval(model);
  switch (atom.relation) {
  case Relation::gt:
    return v > 0;
  case Relation::ge:
    return v >= 0;
  case Relation::lt:
    return v < 0;
  case Relation::le:
    return v <= 0;
  case Relation::eq:
    return v == 0;
  }
  return false;
}

/// Independent validator: true iff `model` satisfies every atom, every
/// bound, every integrality flag, and at least one atom of each
/// disjunction, all under exact rational evaluation.
inline bool check_assignment(const ConstraintSystem &system, const std::map<int, Rat> &model) {
  for (const auto &[var, b] : system.bounds) {
    auto it = model.find(var);
    if (it == model.end())
      throw Error("missing-variable", "model misses variable " + std::to_string(var));
    if (it->second < b.lower || it->second > b.upper)
      return false;
    if (b.integral && !rat_is_integral(it->second))
      return false;
  }
  for (const auto &atom : system.atoms)
    if (!atom_holds(atom, model))
      return false;
  for (const auto &clause : system.disjunctions) {
    bool any = false;
    for (const auto &atom : clause)
      if (atom_holds(atom, model)) {
        any = true;
        break;
      }
    if (!any)
      return false;
  }
  return true;
}

} // namespace faircert
