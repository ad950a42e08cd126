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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "faircert/errors.hpp"
#include "faircert/rational.hpp"

namespace faircert {

/// Affine expression over symbolic input variables: constant + sum of
/// coefficient * variable. Canonical form: zero coefficients are never
/// stored. Affinity is closed under everything the network does to a
/// value (ReLU's false branch yields the constant 0, its true branch is
/// the identity), so degree never exceeds one.
struct SymExpr {
  Rat constant{0};
  std::map<int, Rat> coeffs; // variable id -> coefficient, no zeros

  static SymExpr constant_of(Rat c) {
    SymExpr e;
    e.constant = std::move(c);
    return e;
  }

  static SymExpr variable(int id) {
    SymExpr e;
    e.coeffs.emplace(id, 1);
    return e;
  }

  bool is_constant() const { return coeffs.empty(); }

  /// *this += k * other
  void add_scaled(const SymExpr &other, const Rat &k) {
    if (k == 0)
      return;
    constant += k * other.constant;
    for (const auto &[var, c] : other.coeffs) {
      auto it = coeffs.find(var);
      if (it == coeffs.end()) {
        coeffs.emplace(var, Rat(k * c));
      } else {
        it->second += k * c;
        if (it->second == 0)
          coeffs.erase(it);
      }
    }
  }

  SymExpr &operator+=(const SymExpr &o) {
    add_scaled(o, Rat(1));
    return *this;
  }
  SymExpr &operator-=(const SymExpr &o) {
    add_scaled(o, Rat(-1));
    return *this;
  }
  friend SymExpr operator-(SymExpr a, const SymExpr &b) { return a -= b; }

  void scale(const Rat &k) {
    if (k == 0) {
      constant = 0;
      coeffs.clear();
      return;
    }
    constant *= k;
    for (auto &[var, c] : coeffs)
      c *= k;
  }

  /// Evaluate with variable ids indexing into `values`.
  Rat eval(const std::vector<Rat> &values) const {
    Rat acc = constant;
    for (const auto &[var, c] : coeffs)
      acc += c * values.at(static_cast<std::size_t>(var));
    return acc;
  }

  /// Evaluate under an explicit binding; throws on a missing variable.
  Rat eval(const std::map<int, Rat> &binding) const {
    Rat acc = constant;
    for (const auto &[var, c] : coeffs) {
      auto it = binding.find(var);
      if (it == binding.end())
        throw Error("missing-variable", "no value bound for variable " + std::to_string(var));
      acc += c * it->second;
    }
    return acc;
  }

  std::string to_string(const std::function<std::string(int)> &name) const {
    std::string out;
    for (const auto &[var, c] : coeffs) {
      if (out.empty()) {
        if (c == -1)
          out += "-";
        else if (c != 1)
          out += rat_to_string(c) + "*";
      } else {
        out += c < 0 ? " - " : " + ";
        Rat a = abs(c);
        if (a != 1)
          out += rat_to_string(a) + "*";
      }
      out += name(var);
    }
    if (out.empty())
      return rat_to_string(constant);
    if (constant != 0) {
      out += constant < 0 ? " - " : " + ";
      out += rat_to_string(Rat(abs(constant)));
    }
    return out;
  }

  bool operator==(const SymExpr &) const = default;
};

/// Paired concrete value and symbolic expression; the invariant that the
/// symbolic half evaluates to the concrete half at the seed binding is
/// maintained by construction in the concolic interpreter.
struct ConcolicScalar {
  Rat concrete{0};
  SymExpr symbolic;
};

} // namespace faircert
