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

#include "faircert/delta_rational.hpp"
#include "faircert/rational.hpp"
#include "faircert/sym_expr.hpp"

#include "support/test_support.hpp"

using namespace faircert;

TEST_CASE("rational parsing covers integer, decimal and fraction forms") {
  CHECK(rat_from_string("42") == Rat(42));
  CHECK(rat_from_string("-7") == Rat(-7));
  CHECK(rat_from_string("+3") == Rat(3));
  CHECK(rat_from_string("1.25") == Rat(5, 4));
  CHECK(rat_from_string("-0.5") == Rat(-1, 2));
  CHECK(rat_from_string("0.125") == Rat(1, 8));
  CHECK(rat_from_string("7/3") == Rat(7, 3));
  CHECK(rat_from_string("-6/4") == Rat(-3, 2));
}

TEST_CASE("rational parsing rejects malformed literals") {
  for (const char *bad : {"", "-", "1.2.3", "1/0", "x", "1e3", "1.", ".5", "--2", "1/-2"}) {
    CHECK_THROWS_AS(rat_from_string(bad), Error);
  }
}

TEST_CASE("rational rendering is canonical and exact") {
  CHECK(rat_to_string(Rat(42)) == "42");
  CHECK(rat_to_string(Rat(-5, 4)) == "-1.25");
  CHECK(rat_to_string(Rat(1, 8)) == "0.125");
  CHECK(rat_to_string(Rat(1, 10)) == "0.1");
  CHECK(rat_to_string(Rat(1, 3)) == "1/3");
  CHECK(rat_to_string(Rat(-7, 6)) == "-7/6");
}

TEST_CASE("rational render/parse round-trips on random rationals") {
  Rng rng(2026);
  for (int i = 0; i < 2000; ++i) {
    long num = static_cast<long>(rng.below(20001)) - 10000;
    long den = 1 + static_cast<long>(rng.below(64));
    Rat r(num, den);
    r.canonicalize();
    CHECK(rat_from_string(rat_to_string(r)) == r);
  }
}

TEST_CASE("floor and ceil behave on negatives") {
  CHECK(rat_floor(Rat(-3, 2)) == Rat(-2));
  CHECK(rat_ceil(Rat(-3, 2)) == Rat(-1));
  CHECK(rat_floor(Rat(7, 2)) == Rat(3));
  CHECK(rat_ceil(Rat(7, 2)) == Rat(4));
  CHECK(rat_floor(Rat(4)) == Rat(4));
}

TEST_CASE("delta rationals order lexicographically") {
  DeltaRat a(Rat(1), Rat(0));
  DeltaRat b(Rat(1), Rat(1));
  DeltaRat c(Rat(2), Rat(-5));
  CHECK(a < b);
  CHECK(b < c);
  CHECK(a.at(Rat(1, 100)) == Rat(1));
  CHECK(b.at(Rat(1, 100)) == Rat(101, 100));
  DeltaRat d = b - a;
  CHECK(d == DeltaRat(Rat(0), Rat(1)));
  CHECK(Rat(-2) * b == DeltaRat(Rat(-2), Rat(-2)));
}

TEST_CASE("symbolic expressions keep canonical form") {
  SymExpr e = SymExpr::variable(0);
  e.add_scaled(SymExpr::variable(1), Rat(-1));
  CHECK(e.coeffs.size() == 2);
  e.add_scaled(SymExpr::variable(1), Rat(1)); // cancels
  CHECK(e.coeffs.size() == 1);
  CHECK(!e.coeffs.count(1));
  e.scale(Rat(0));
  CHECK(e.is_constant());
  CHECK(e.constant == 0);
}

TEST_CASE("symbolic evaluation matches a manual computation") {
  SymExpr e = SymExpr::variable(0);
  e.add_scaled(SymExpr::variable(2), Rat(-3, 2));
  e.constant = Rat(7);
  std::vector<Rat> vals = {Rat(2), Rat(99), Rat(4)};
  CHECK(e.eval(vals) == Rat(2) - Rat(3, 2) * Rat(4) + Rat(7));
  std::map<int, Rat> binding = {{0, Rat(2)}, {2, Rat(4)}};
  CHECK(e.eval(binding) == Rat(3));
  binding.erase(2);
  CHECK_THROWS_AS(e.eval(binding), Error);
}

TEST_CASE("expression rendering reads like the tree labels") {
  SymExpr e = SymExpr::variable(0);
  e.add_scaled(SymExpr::variable(1), Rat(-1));
  auto name = [](int v) { return v == 0 ? std::string("x") : std::string("y"); };
  CHECK(e.to_string(name) == "x - y");
  e.constant = Rat(3, 2);
  CHECK(e.to_string(name) == "x - y + 1.5");
  SymExpr c = SymExpr::constant_of(Rat(-5));
  CHECK(c.to_string(name) == "-5");
}
