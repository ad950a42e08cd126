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

// Minimal SMT-LIB v2 solver process used by the test suite: reads the
// subset of QF_LRA/QF_LIRA scripts the bridge emits, decides them with the
// library's own simplex, and answers sat/unsat plus a get-value response.
// Modes for error-path testing: --garbage prints nonsense, --lie answers
// sat with an off-model assignment, --silent prints nothing.

#include <chrono>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "faircert/simplex.hpp"
#include "faircert/smtlib.hpp"

using namespace faircert;

namespace {

struct Script {
  ConstraintSystem system;
  std::vector<int> value_order;
};

int var_id(const std::string &name) {
  if (name.size() < 2 || name[0] != 'v')
    throw Error("protocol-parse", "unexpected variable '" + name + "'");
  return std::stoi(name.substr(1));
}

bool is_number_atom(const std::string &s) {
  if (s.empty())
    return false;
  char c = s[0];
  return (c >= '0' && c <= '9') || ((c == '-' || c == '+') && s.size() > 1);
}

SymExpr eval_term(const smtlib::Sexpr &e) {
  if (e.is_atom) {
    if (is_number_atom(e.atom))
      return SymExpr::constant_of(rat_from_string(e.atom));
    return SymExpr::variable(var_id(e.atom));
  }
  if (e.items.empty() || !e.items[0].is_atom)
    throw Error("protocol-parse", "bad term");
  const std::string &op = e.items[0].atom;
  if (op == "to_real")
    return eval_term(e.items[1]);
  if (op == "-") {
    SymExpr out = eval_term(e.items[1]);
    if (e.items.size() == 2) {
      out.scale(Rat(-1));
      return out;
    }
    for (std::size_t i = 2; i < e.items.size(); ++i)
      out.add_scaled(eval_term(e.items[i]), Rat(-1));
    return out;
  }
  if (op == "+") {
    SymExpr out = SymExpr::constant_of(Rat(0));
    for (std::size_t i = 1; i < e.items.size(); ++i)
      out += eval_term(e.items[i]);
    return out;
  }
  if (op == "*") {
    // at most one non-constant factor in the emitted subset
    SymExpr sym;
    bool have_sym = false;
    Rat k(1);
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      SymExpr f = eval_term(e.items[i]);
      if (f.is_constant()) {
        k *= f.constant;
      } else if (have_sym) {
        throw Error("protocol-parse", "nonlinear product");
      } else {
        sym = f;
        have_sym = true;
      }
    }
    if (!have_sym)
      return SymExpr::constant_of(k);
    sym.scale(k);
    return sym;
  }
  if (op == "/") {
    SymExpr a = eval_term(e.items[1]);
    SymExpr b = eval_term(e.items[2]);
    if (!b.is_constant() || b.constant == 0)
      throw Error("protocol-parse", "bad division");
    a.scale(Rat(1 / b.constant));
    return a;
  }
  throw Error("protocol-parse", "unsupported operator '" + op + "'");
}

LinearAtom eval_atom(const smtlib::Sexpr &e) {
  if (e.is_atom || e.items.size() != 3 || !e.items[0].is_atom)
    throw Error("protocol-parse", "bad atom");
  const std::string &rel = e.items[0].atom;
  LinearAtom atom;
  atom.expr = eval_term(e.items[1]);
  atom.expr -= eval_term(e.items[2]);
  if (rel == ">")
    atom.relation = Relation::gt;
  else if (rel == ">=")
    atom.relation = Relation::ge;
  else if (rel == "<")
    atom.relation = Relation::lt;
  else if (rel == "<=")
    atom.relation = Relation::le;
  else if (rel == "=")
    atom.relation = Relation::eq;
  else
    throw Error("protocol-parse", "unsupported relation '" + rel + "'");
  return atom;
}

Script parse_script(const std::string &text) {
  Script script;
  // Synthetic wide box; the genuine bounds arrive as asserted atoms, these
  // only keep the simplex search bounded.
  const Rat wide(1000000000);
  std::size_t i = 0;
  smtlib::Sexpr form;
  while (smtlib::detail::parse_sexpr(text, i, form)) {
    if (form.is_atom || form.items.empty() || !form.items[0].is_atom)
      continue;
    const std::string &head = form.items[0].atom;
    if (head == "declare-const") {
      int id = var_id(form.items[1].atom);
      script.system.bounds[id] = VarBounds{Rat(-wide), wide, form.items[2].atom == "Int"};
    } else if (head == "assert") {
      const smtlib::Sexpr &body = form.items[1];
      if (!body.is_atom && !body.items.empty() && body.items[0].is_atom &&
          body.items[0].atom == "or") {
        std::vector<LinearAtom> clause;
        for (std::size_t k = 1; k < body.items.size(); ++k)
          clause.push_back(eval_atom(body.items[k]));
        script.system.disjunctions.push_back(std::move(clause));
      } else {
        script.system.atoms.push_back(eval_atom(body));
      }
    } else if (head == "get-value") {
      for (const auto &v : form.items[1].items)
        script.value_order.push_back(var_id(v.atom));
    }
  }
  return script;
}

std::string render_value(const Rat &r) {
  if (rat_is_integral(r)) {
    if (r < 0)
      return "(- " + Rat(-r).get_num().get_str() + ")";
    return r.get_num().get_str();
  }
  std::string body = "(/ " + Rat(abs(r)).get_num().get_str() + " " + r.get_den().get_str() + ")";
  if (r < 0)
    return "(- " + body + ")";
  return body;
}

} // namespace

int main(int argc, char **argv) {
  std::string mode = argc > 1 ? argv[1] : "";
  std::ostringstream buffer;
  buffer << std::cin.rdbuf();
  std::string input = buffer.str();

  if (mode == "--garbage") {
    std::cout << "flibbertigibbet ((((\n";
    return 0;
  }
  if (mode == "--silent")
    return 0;

  try {
    Script script = parse_script(input);
    if (mode == "--lie") {
      std::cout << "sat\n(";
      for (std::size_t k = 0; k < script.value_order.size(); ++k)
        std::cout << (k ? " " : "") << "(" << smtlib::var_name(script.value_order[k])
                  << " 999999999)";
      std::cout << ")\n";
      return 0;
    }
    SolveResult res = solve(script.system, std::chrono::milliseconds(60000));
    if (res.status == SolveStatus::unsat) {
      std::cout << "unsat\n";
      return 0;
    }
    if (res.status == SolveStatus::unknown) {
      std::cout << "unknown\n";
      return 0;
    }
    std::cout << "sat\n(";
    for (std::size_t k = 0; k < script.value_order.size(); ++k) {
      int id = script.value_order[k];
      std::cout << (k ? " " : "") << "(" << smtlib::var_name(id) << " "
                << render_value(res.model.at(id)) << ")";
    }
    std::cout << ")\n";
  } catch (const std::exception &e) {
    std::cout << "(error \"" << e.what() << "\")\n";
    return 1;
  }
  return 0;
}
