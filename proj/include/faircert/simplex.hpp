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

#include <algorithm>
#include <chrono>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "faircert/delta_rational.hpp"
#include "faircert/linear.hpp"

// Internal decision procedure for conjunctions of affine inequalities over
// bounded real/integer variables: a bound-propagating simplex over
// delta-rationals (strict bounds carry a +/-delta component) with Bland's
// anti-cycling rule, wrapped by depth-first branch-and-bound for
// integrality and a depth-first case split for disjunctions. Every rule is
// deterministic, so identical inputs yield identical results.

namespace faircert {

namespace detail {

class Simplex {
public:
  Simplex(std::chrono::steady_clock::time_point deadline, SolveStats &stats)
      : deadline_(deadline), stats_(stats) {}

  int add_var() {
    lower_.emplace_back();
    upper_.emplace_back();
    assign_.emplace_back();
    row_of_.push_back(-1);
    for (auto &row : rows_)
      row.emplace_back(0);
    return static_cast<int>(assign_.size()) - 1;
  }

  /// Adds a definition row var = sum coeffs[j] * x_j. All referenced
  /// variables must still be nonbasic (rows are only added before check()).
  void add_row(int var, const std::vector<std::pair<int, Rat>> &coeffs) {
    std::vector<Rat> row(assign_.size(), Rat(0));
    DeltaRat value;
    for (const auto &[j, c] : coeffs) {
      row[static_cast<std::size_t>(j)] = c;
      value += c * assign_[static_cast<std::size_t>(j)];
    }
    rows_.push_back(std::move(row));
    basic_of_row_.push_back(var);
    row_of_[static_cast<std::size_t>(var)] = static_cast<int>(rows_.size()) - 1;
    assign_[static_cast<std::size_t>(var)] = std::move(value);
  }

  bool assert_lower(int x, const DeltaRat &c) {
    auto xi = static_cast<std::size_t>(x);
    if (upper_[xi] && c > *upper_[xi])
      return false;
    if (!lower_[xi] || c > *lower_[xi]) {
      lower_[xi] = c;
      if (row_of_[xi] == -1 && assign_[xi] < c)
        update(x, c);
    }
    return true;
  }

  bool assert_upper(int x, const DeltaRat &c) {
    auto xi = static_cast<std::size_t>(x);
    if (lower_[xi] && c < *lower_[xi])
      return false;
    if (!upper_[xi] || c < *upper_[xi]) {
      upper_[xi] = c;
      if (row_of_[xi] == -1 && assign_[xi] > c)
        update(x, c);
    }
    return true;
  }

  SolveStatus check() {
    const int n = static_cast<int>(assign_.size());
    for (;;) {
      if (std::chrono::steady_clock::now() >= deadline_)
        return SolveStatus::unknown;

      // Bland's rule: smallest-index violating basic variable.
      int b = -1;
      bool below = false;
      for (int x = 0; x < n; ++x) {
        auto xi = static_cast<std::size_t>(x);
        if (row_of_[xi] == -1)
          continue;
        if (lower_[xi] && assign_[xi] < *lower_[xi]) {
          b = x;
          below = true;
          break;
        }
        if (upper_[xi] && assign_[xi] > *upper_[xi]) {
          b = x;
          below = false;
          break;
        }
      }
      if (b == -1)
        return SolveStatus::sat;

      const auto &row = rows_[static_cast<std::size_t>(row_of_[static_cast<std::size_t>(b)])];
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        auto ji = static_cast<std::size_t>(j);
        if (row_of_[ji] != -1)
          continue;
        const Rat &a = row[ji];
        if (a == 0)
          continue;
        bool can_increase = !upper_[ji] || assign_[ji] < *upper_[ji];
        bool can_decrease = !lower_[ji] || assign_[ji] > *lower_[ji];
        bool suitable = below ? ((a > 0 && can_increase) || (a < 0 && can_decrease))
                              : ((a < 0 && can_increase) || (a > 0 && can_decrease));
        if (suitable) {
          enter = j;
          break;
        }
      }
      if (enter == -1)
        return SolveStatus::unsat;

      auto bi = static_cast<std::size_t>(b);
      pivot_and_update(row_of_[bi], enter, below ? *lower_[bi] : *upper_[bi]);
      ++stats_.pivots;
    }
  }

  /// Concretizes delta to half the minimum slack bound derived from all
  /// assignment/bound pairs, then returns the variable values as plain
  /// rationals. Call only after check() returned sat.
  Rat concretization_delta() const {
    Rat bound(1);
    for (std::size_t x = 0; x < assign_.size(); ++x) {
      const DeltaRat &v = assign_[x];
      if (lower_[x]) {
        const DeltaRat &l = *lower_[x];
        if (v.inf < l.inf && v.real > l.real)
          bound = std::min(bound, Rat((v.real - l.real) / (l.inf - v.inf)));
      }
      if (upper_[x]) {
        const DeltaRat &u = *upper_[x];
        if (v.inf > u.inf && v.real < u.real)
          bound = std::min(bound, Rat((u.real - v.real) / (v.inf - u.inf)));
      }
    }
    return Rat(bound / 2);
  }

  Rat value_at(int var, const Rat &delta) const {
    return assign_[static_cast<std::size_t>(var)].at(delta);
  }

private:
  void update(int j, const DeltaRat &v) {
    auto ji = static_cast<std::size_t>(j);
    DeltaRat diff = v - assign_[ji];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rat &c = rows_[r][ji];
      if (c != 0)
        assign_[static_cast<std::size_t>(basic_of_row_[r])] += c * diff;
    }
    assign_[ji] = v;
  }

  void pivot_and_update(int r, int enter, const DeltaRat &v) {
    auto ri = static_cast<std::size_t>(r);
    int b = basic_of_row_[ri];
    auto bi = static_cast<std::size_t>(b);
    auto ei = static_cast<std::size_t>(enter);
    Rat a = rows_[ri][ei];

    DeltaRat theta = Rat(1 / a) * (v - assign_[bi]);
    assign_[bi] = v;
    assign_[ei] += theta;
    for (std::size_t r2 = 0; r2 < rows_.size(); ++r2) {
      if (r2 == ri)
        continue;
      const Rat &c = rows_[r2][ei];
      if (c != 0)
        assign_[static_cast<std::size_t>(basic_of_row_[r2])] += c * theta;
    }

    // Rewrite row r so that `enter` becomes basic: enter = (b - rest) / a.
    std::vector<Rat> &row = rows_[ri];
    Rat inv = 1 / a;
    for (auto &c : row)
      c *= -inv;
    row[ei] = 0;
    row[bi] = inv;
    basic_of_row_[ri] = enter;
    row_of_[ei] = r;
    row_of_[bi] = -1;

    for (std::size_t r2 = 0; r2 < rows_.size(); ++r2) {
      if (r2 == ri)
        continue;
      Rat c = rows_[r2][ei];
      if (c == 0)
        continue;
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0)
          rows_[r2][j] += c * row[j];
      rows_[r2][ei] = 0;
    }
  }

  std::chrono::steady_clock::time_point deadline_;
  SolveStats &stats_;
  std::vector<std::optional<DeltaRat>> lower_, upper_;
  std::vector<DeltaRat> assign_;
  std::vector<int> row_of_; // var -> row index, -1 when nonbasic
  std::vector<std::vector<Rat>> rows_;
  std::vector<int> basic_of_row_;
};

struct DenseMap {
  std::vector<int> ext_ids;      // dense -> external variable id
  std::map<int, int> dense_of;   // external -> dense
};

inline Relation flip_relation(Relation r) {
  switch (r) {
  case Relation::gt:
    return Relation::lt;
  case Relation::ge:
    return Relation::le;
  case Relation::lt:
    return Relation::gt;
  case Relation::le:
    return Relation::ge;
  case Relation::eq:
    return Relation::eq;
  }
  return r;
}

inline bool constant_relation_holds(const Rat &v, Relation r) {
  switch (r) {
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

/// Solves the LRA relaxation of base atoms + extra atoms over the system's
/// box. On sat, fills `model_out` with concretized rational values for
/// every external variable.
inline SolveStatus solve_relaxation(const ConstraintSystem &system, const DenseMap &dm,
                                    const std::vector<const LinearAtom *> &atoms,
                                    std::chrono::steady_clock::time_point deadline,
                                    SolveStats &stats, std::map<int, Rat> &model_out) {
  Simplex simplex(deadline, stats);
  for (int ext : dm.ext_ids) {
    int idx = simplex.add_var();
    const VarBounds &b = system.bounds.at(ext);
    if (!simplex.assert_lower(idx, DeltaRat(b.lower)) ||
        !simplex.assert_upper(idx, DeltaRat(b.upper)))
      return SolveStatus::unsat;
  }

  for (const LinearAtom *atom : atoms) {
    std::vector<std::pair<int, Rat>> terms;
    for (const auto &[ext, c] : atom->expr.coeffs)
      terms.emplace_back(dm.dense_of.at(ext), c);
    Rat rhs = -atom->expr.constant;

    if (terms.empty()) {
      if (!constant_relation_holds(atom->expr.constant, atom->relation))
        return SolveStatus::unsat;
      continue;
    }

    int target;
    Relation rel = atom->relation;
    Rat bound;
    if (terms.size() == 1) {
      target = terms[0].first;
      bound = rhs / terms[0].second;
      if (terms[0].second < 0)
        rel = flip_relation(rel);
    } else {
      target = simplex.add_var();
      simplex.add_row(target, terms);
      bound = rhs;
    }

    bool ok = true;
    switch (rel) {
    case Relation::gt:
      ok = simplex.assert_lower(target, DeltaRat(bound, Rat(1)));
      break;
    case Relation::ge:
      ok = simplex.assert_lower(target, DeltaRat(bound));
      break;
    case Relation::lt:
      ok = simplex.assert_upper(target, DeltaRat(bound, Rat(-1)));
      break;
    case Relation::le:
      ok = simplex.assert_upper(target, DeltaRat(bound));
      break;
    case Relation::eq:
      ok = simplex.assert_lower(target, DeltaRat(bound)) &&
           simplex.assert_upper(target, DeltaRat(bound));
      break;
    }
    if (!ok)
      return SolveStatus::unsat;
  }

  SolveStatus status = simplex.check();
  if (status != SolveStatus::sat)
    return status;

  Rat delta = simplex.concretization_delta();
  model_out.clear();
  for (std::size_t i = 0; i < dm.ext_ids.size(); ++i)
    model_out[dm.ext_ids[i]] = simplex.value_at(static_cast<int>(i), delta);
  return SolveStatus::sat;
}

/// Depth-first branch-and-bound over the integer variables; branching on
/// the most fractional value, nearest side first. branch_storage is a
/// deque so pushing does not invalidate pointers held in `atoms`.
inline SolveStatus solve_bnb(const ConstraintSystem &system, const DenseMap &dm,
                             std::vector<const LinearAtom *> &atoms,
                             std::deque<LinearAtom> &branch_storage,
                             std::chrono::steady_clock::time_point deadline, SolveStats &stats,
                             std::map<int, Rat> &model_out) {
  std::map<int, Rat> relaxed;
  SolveStatus status = solve_relaxation(system, dm, atoms, deadline, stats, relaxed);
  if (status != SolveStatus::sat)
    return status;

  int branch_var = -1;
  Rat branch_value, best_score;
  for (const auto &[ext, b] : system.bounds) {
    if (!b.integral)
      continue;
    const Rat &v = relaxed.at(ext);
    if (rat_is_integral(v))
      continue;
    Rat frac = v - rat_floor(v);
    Rat score = abs(frac - Rat(1, 2));
    if (branch_var == -1 || score < best_score) {
      branch_var = ext;
      branch_value = v;
      best_score = score;
    }
  }
  if (branch_var == -1) {
    model_out = std::move(relaxed);
    return SolveStatus::sat;
  }

  Rat floor_v = rat_floor(branch_value);
  LinearAtom low{SymExpr::variable(branch_var), Relation::le};
  low.expr.constant = -floor_v;
  LinearAtom high{SymExpr::variable(branch_var), Relation::ge};
  high.expr.constant = -(floor_v + 1);
  bool low_first = branch_value - floor_v < Rat(1, 2);

  bool saw_unknown = false;
  for (int side = 0; side < 2; ++side) {
    const LinearAtom &chosen = (side == 0) == low_first ? low : high;
    branch_storage.push_back(chosen);
    atoms.push_back(&branch_storage.back());
    SolveStatus st = solve_bnb(system, dm, atoms, branch_storage, deadline, stats, model_out);
    atoms.pop_back();
    branch_storage.pop_back();
    if (st == SolveStatus::sat)
      return st;
    if (st == SolveStatus::unknown)
      saw_unknown = true;
  }
  return saw_unknown ? SolveStatus::unknown : SolveStatus::unsat;
}

inline std::string atom_key(const LinearAtom &atom) {
  std::string key = std::string(relation_name(atom.relation)) + "|" +
                    rat_to_string(atom.expr.constant);
  for (const auto &[var, c] : atom.expr.coeffs)
    key += "|" + std::to_string(var) + ":" + rat_to_string(c);
  return key;
}

} // namespace detail

/// Decides a ConstraintSystem exactly. sat models satisfy all atoms,
/// bounds, integrality flags, and one alternative per disjunction; unsat
/// means no rational (resp. integral) point of the box satisfies the
/// system; unknown only on deadline expiry, never as a shortcut.
inline SolveResult solve(const ConstraintSystem &system, std::chrono::milliseconds deadline) {
  auto start = std::chrono::steady_clock::now();
  auto deadline_tp = start + deadline;
  SolveResult result;

  auto require_bounds = [&](const LinearAtom &atom) {
    for (const auto &[var, c] : atom.expr.coeffs)
      if (!system.bounds.count(var))
        throw Error("unbounded-variable",
                    "variable " + std::to_string(var) + " has no declared bounds");
  };
  for (const auto &atom : system.atoms)
    require_bounds(atom);
  for (const auto &clause : system.disjunctions)
    for (const auto &atom : clause)
      require_bounds(atom);

  detail::DenseMap dm;
  for (const auto &[ext, b] : system.bounds) {
    dm.dense_of[ext] = static_cast<int>(dm.ext_ids.size());
    dm.ext_ids.push_back(ext);
  }

  std::vector<const LinearAtom *> atoms;
  for (const auto &atom : system.atoms)
    atoms.push_back(&atom);

  std::deque<LinearAtom> branch_storage;

  // Depth-first case split over disjunction alternatives; unsat outcomes
  // are memoized on the chosen-atom set so repeated combinations are not
  // re-solved.
  std::set<std::string> failed;
  std::vector<std::string> chosen_keys;

  auto dfs = [&](auto &&self, std::size_t idx) -> SolveStatus {
    if (std::chrono::steady_clock::now() >= deadline_tp)
      return SolveStatus::unknown;
    if (idx == system.disjunctions.size())
      return detail::solve_bnb(system, dm, atoms, branch_storage, deadline_tp, result.stats,
                               result.model);
    bool branch_unknown = false;
    for (const auto &alt : system.disjunctions[idx]) {
      chosen_keys.push_back(detail::atom_key(alt));
      std::vector<std::string> sorted_keys = chosen_keys;
      std::sort(sorted_keys.begin(), sorted_keys.end());
      std::string memo_key;
      for (const auto &k : sorted_keys)
        memo_key += k + ";";
      if (failed.count(memo_key)) {
        chosen_keys.pop_back();
        continue;
      }
      atoms.push_back(&alt);
      SolveStatus st = self(self, idx + 1);
      atoms.pop_back();
      if (st == SolveStatus::sat) {
        chosen_keys.pop_back();
        return st;
      }
      if (st == SolveStatus::unknown)
        branch_unknown = true;
      else
        failed.insert(memo_key);
      chosen_keys.pop_back();
    }
    return branch_unknown ? SolveStatus::unknown : SolveStatus::unsat;
  };

  result.status = dfs(dfs, 0);
  if (result.status == SolveStatus::unknown)
    result.diagnostic = "deadline";
  if (result.status == SolveStatus::sat && !check_assignment(system, result.model))
    throw Error("solver-internal", "sat model failed exact re-validation");
  if (result.status != SolveStatus::sat)
    result.model.clear();

  result.stats.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

} // namespace faircert
