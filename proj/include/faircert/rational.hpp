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

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

#include "faircert/errors.hpp"

namespace faircert {

/// Exact rational number. Everything on the verification path is computed
/// over Rat; floating point never enters model evaluation or solving.
using Rat = mpq_class;

inline bool rat_is_integral(const Rat &r) { return r.get_den() == 1; }

inline Rat rat_floor(const Rat &r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return Rat(q);
}

inline Rat rat_ceil(const Rat &r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return Rat(q);
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  return true;
}

} // namespace detail

/// Parses "42", "-1.25", "+0.5" or "p/q" into an exact rational.
/// Decimal strings are exact by construction (denominator a power of ten);
/// no floating-point intermediary is ever involved.
inline Rat rat_from_string(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty())
    throw Error("malformed-number", "empty numeric literal: '" + std::string(text) + "'");

  Rat value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den))
      throw Error("malformed-number", "bad fraction literal: '" + std::string(text) + "'");
    mpz_class p(std::string(num), 10), q(std::string(den), 10);
    if (q == 0)
      throw Error("malformed-number", "zero denominator: '" + std::string(text) + "'");
    value = Rat(p, q);
    value.canonicalize();
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ipart = s.substr(0, dot);
    std::string_view fpart = s.substr(dot + 1);
    if (!detail::all_digits(ipart) || !detail::all_digits(fpart))
      throw Error("malformed-number", "bad decimal literal: '" + std::string(text) + "'");
    mpz_class scaled(std::string(ipart) + std::string(fpart), 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fpart.size());
    value = Rat(scaled, den);
    value.canonicalize();
  } else {
    if (!detail::all_digits(s))
      throw Error("malformed-number", "bad integer literal: '" + std::string(text) + "'");
    value = Rat(mpz_class(std::string(s), 10));
  }
  if (negative)
    value = -value;
  return value;
}

/// Canonical rendering, the inverse of rat_from_string on its own output:
/// integers as "n", denominators of the form 2^a*5^b as exact decimals,
/// everything else as the reduced fraction "p/q".
inline std::string rat_to_string(const Rat &r) {
  if (rat_is_integral(r))
    return r.get_num().get_str();

  mpz_class den = r.get_den();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 2);
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 5);
    ++fives;
  }
  if (den != 1)
    return r.get_num().get_str() + "/" + r.get_den().get_str();

  unsigned long digits = twos > fives ? twos : fives;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = r.get_num() * scale / r.get_den();

  bool negative = scaled < 0;
  if (negative)
    scaled = -scaled;
  std::string body = scaled.get_str();
  if (body.size() <= digits)
    body.insert(0, digits - body.size() + 1, '0');
  std::string out = body.substr(0, body.size() - digits) + "." + body.substr(body.size() - digits);
  while (out.back() == '0')
    out.pop_back();
  return (negative ? "-" : "") + out;
}

} // namespace faircert
