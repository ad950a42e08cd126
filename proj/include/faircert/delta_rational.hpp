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

#include <compare>

#include "faircert/rational.hpp"

namespace faircert {

/// Number of the form real + inf * delta, where delta is a positive
/// infinitesimal. Lets the simplex treat strict inequalities exactly:
/// x > c becomes x >= c + delta. Comparison is lexicographic.
struct DeltaRat {
  Rat real{0};
  Rat inf{0};

  DeltaRat() = default;
  DeltaRat(Rat b) : real(std::move(b)) {}
  DeltaRat(Rat b, Rat d) : real(std::move(b)), inf(std::move(d)) {}

  friend bool operator==(const DeltaRat &a, const DeltaRat &b) {
    return a.real == b.real && a.inf == b.inf;
  }
  friend std::strong_ordering operator<=>(const DeltaRat &a, const DeltaRat &b) {
    if (int c = cmp(a.real, b.real); c != 0)
      return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    int c = cmp(a.inf, b.inf);
    if (c == 0)
      return std::strong_ordering::equal;
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  DeltaRat &operator+=(const DeltaRat &o) {
    real += o.real;
    inf += o.inf;
    return *this;
  }
  DeltaRat &operator-=(const DeltaRat &o) {
    real -= o.real;
    inf -= o.inf;
    return *this;
  }
  friend DeltaRat operator+(DeltaRat a, const DeltaRat &b) { return a += b; }
  friend DeltaRat operator-(DeltaRat a, const DeltaRat &b) { return a -= b; }
  friend DeltaRat operator*(const Rat &k, const DeltaRat &v) {
    return DeltaRat(Rat(k * v.real), Rat(k * v.inf));
  }

  /// Concretization at a fixed positive rational delta.
  Rat at(const Rat &delta) const { return Rat(real + inf * delta); }
};

} // namespace faircert
