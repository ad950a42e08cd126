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

#include <cctype>
#include <chrono>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "faircert/linear.hpp"
#include "faircert/simplex.hpp"

// Bridge to an external SMT solver over SMT-LIB v2 text on the process's
// standard input/output. One (set-logic ...) per session; models are
// requested with a single get-value over all variables and re-validated
// with check_assignment before acceptance. z3 must be configured as
// "z3 -in" since it only reads a script from stdin with that flag.

namespace faircert {

namespace smtlib {

inline std::string var_name(int id) { return "v" + std::to_string(id); }

/// Renders a rational as an SMT-LIB Int literal.
inline std::string int_literal(const Rat &r) {
  std::string s = r.get_num().get_str();
  if (r < 0)
    return "(- " + s.substr(1) + ")";
  return s;
}

/// Renders a rational as an SMT-LIB Real literal.
inline std::string real_literal(const Rat &r) {
  Rat a = abs(r);
  std::string body;
  if (rat_is_integral(a))
    body = a.get_num().get_str() + ".0";
  else
    body = "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
  if (r < 0)
    return "(- " + body + ")";
  return body;
}

namespace detail {

inline bool pure_integer_atom(const ConstraintSystem &sys, const LinearAtom &atom) {
  for (const auto &[var, c] : atom.expr.coeffs)
    if (!sys.bounds.at(var).integral)
      return false;
  return true;
}

/// Renders `expr relation 0`. Atoms over integer variables only are scaled
/// by the least common denominator and emitted in Int arithmetic; anything
/// else is emitted in Real arithmetic with integer variables coerced via
/// to_real.
inline std::string render_atom(const ConstraintSystem &sys, const LinearAtom &atom) {
  bool pure_int = pure_integer_atom(sys, atom);
  std::string sum;
  int terms = 0;

  if (pure_int) {
    mpz_class lcm = atom.expr.constant.get_den();
    for (const auto &[var, c] : atom.expr.coeffs)
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den().get_mpz_t());
    Rat scale(lcm);
    for (const auto &[var, c] : atom.expr.coeffs) {
      sum += " (* " + int_literal(Rat(c * scale)) + " " + var_name(var) + ")";
      ++terms;
    }
    Rat k = atom.expr.constant * scale;
    if (k != 0 || terms == 0) {
      sum += " " + int_literal(k);
      ++terms;
    }
  } else {
    for (const auto &[var, c] : atom.expr.coeffs) {
      std::string v = var_name(var);
      if (sys.bounds.at(var).integral)
        v = "(to_real " + v + ")";
      sum += " (* " + real_literal(c) + " " + v + ")";
      ++terms;
    }
    if (atom.expr.constant != 0 || terms == 0) {
      sum += " " + real_literal(atom.expr.constant);
      ++terms;
    }
  }

  std::string body = terms > 1 ? "(+" + sum + ")" : sum.substr(1);
  std::string zero = pure_int ? "0" : "0.0";
  return "(" + std::string(relation_name(atom.relation)) + " " + body + " " + zero + ")";
}

} // namespace detail

/// Emits a complete SMT-LIB v2 script for the system: logic selection
/// (QF_LIRA when any variable is integral, else QF_LRA), declarations,
/// box bounds, atoms, or-terms for disjunctions, check-sat and a get-value
/// over every variable.
inline std::string emit_script(const ConstraintSystem &sys) {
  bool any_int = false;
  for (const auto &[var, b] : sys.bounds)
    if (b.integral)
      any_int = true;

  std::string script;
  script += "(set-logic " + std::string(any_int ? "QF_LIRA" : "QF_LRA") + ")\n";
  for (const auto &[var, b] : sys.bounds)
    script += "(declare-const " + var_name(var) + (b.integral ? " Int" : " Real") + ")\n";
  for (const auto &[var, b] : sys.bounds) {
    if (b.integral) {
      script += "(assert (>= " + var_name(var) + " " + int_literal(b.lower) + "))\n";
      script += "(assert (<= " + var_name(var) + " " + int_literal(b.upper) + "))\n";
    } else {
      script += "(assert (>= " + var_name(var) + " " + real_literal(b.lower) + "))\n";
      script += "(assert (<= " + var_name(var) + " " + real_literal(b.upper) + "))\n";
    }
  }
  for (const auto &atom : sys.atoms)
    script += "(assert " + detail::render_atom(sys, atom) + ")\n";
  for (const auto &clause : sys.disjunctions) {
    std::string body;
    for (const auto &atom : clause)
      body += " " + detail::render_atom(sys, atom);
    if (clause.size() == 1)
      script += "(assert" + body + ")\n";
    else
      script += "(assert (or" + body + "))\n";
  }
  script += "(check-sat)\n";
  std::string names;
  for (const auto &[var, b] : sys.bounds)
    names += " " + var_name(var);
  script += "(get-value (" + names.substr(1) + "))\n";
  script += "(exit)\n";
  return script;
}

// ---- s-expression reading ----

struct Sexpr {
  std::string atom; // set when leaf
  std::vector<Sexpr> items;
  bool is_atom = false;
};

namespace detail {

inline void skip_ws(std::string_view s, std::size_t &i) {
  while (i < s.size()) {
    if (s[i] == ';') { // comment to end of line
      while (i < s.size() && s[i] != '\n')
        ++i;
    } else if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else {
      break;
    }
  }
}

inline bool parse_sexpr(std::string_view s, std::size_t &i, Sexpr &out) {
  skip_ws(s, i);
  if (i >= s.size())
    return false;
  if (s[i] == '(') {
    ++i;
    out.is_atom = false;
    out.items.clear();
    for (;;) {
      skip_ws(s, i);
      if (i >= s.size())
        return false;
      if (s[i] == ')') {
        ++i;
        return true;
      }
      Sexpr child;
      if (!parse_sexpr(s, i, child))
        return false;
      out.items.push_back(std::move(child));
    }
  }
  if (s[i] == ')')
    return false;
  std::size_t start = i;
  if (s[i] == '"') { // quoted string (e.g. error messages)
    ++i;
    while (i < s.size() && s[i] != '"')
      ++i;
    if (i < s.size())
      ++i;
  } else {
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
           s[i] != ')')
      ++i;
  }
  out.is_atom = true;
  out.atom = std::string(s.substr(start, i - start));
  return true;
}

} // namespace detail

/// Evaluates a numeric value term: numerals, decimals, (- x), (/ p q) and
/// nestings thereof, as printed by z3 and cvc5 model output.
inline Rat eval_value_term(const Sexpr &e) {
  if (e.is_atom)
    return rat_from_string(e.atom);
  if (e.items.empty())
    throw Error("protocol-parse", "empty value term");
  const Sexpr &head = e.items[0];
  if (!head.is_atom)
    throw Error("protocol-parse", "bad value term head");
  if (head.atom == "-" && e.items.size() == 2)
    return Rat(-eval_value_term(e.items[1]));
  if (head.atom == "-" && e.items.size() == 3)
    return Rat(eval_value_term(e.items[1]) - eval_value_term(e.items[2]));
  if (head.atom == "/" && e.items.size() == 3) {
    Rat d = eval_value_term(e.items[2]);
    if (d == 0)
      throw Error("protocol-parse", "division by zero in value term");
    return Rat(eval_value_term(e.items[1]) / d);
  }
  if (head.atom == "+" && e.items.size() == 3)
    return Rat(eval_value_term(e.items[1]) + eval_value_term(e.items[2]));
  if (head.atom == "*" && e.items.size() == 3)
    return Rat(eval_value_term(e.items[1]) * eval_value_term(e.items[2]));
  if (head.atom == "to_real" && e.items.size() == 2)
    return eval_value_term(e.items[1]);
  throw Error("protocol-parse", "unsupported value term '" + head.atom + "'");
}

struct ProcessResult {
  bool spawn_failed = false;
  bool timed_out = false;
  int exit_code = -1;
  std::string output;
};

/// Runs `argv` feeding `input` on stdin and collecting stdout until EOF or
/// the deadline; on deadline expiry the process is killed.
inline ProcessResult run_process(const std::vector<std::string> &argv, const std::string &input,
                                 std::chrono::milliseconds deadline) {
  ProcessResult result;
  if (argv.empty()) {
    result.spawn_failed = true;
    return result;
  }

  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    result.spawn_failed = true;
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) {
    result.spawn_failed = true;
    return result;
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char *> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto &a : argv)
      cargv.push_back(const_cast<char *>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);

  // Write the whole script, ignoring SIGPIPE from a solver that exited.
  signal(SIGPIPE, SIG_IGN);
  std::size_t written = 0;
  while (written < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
    if (n <= 0)
      break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  auto deadline_tp = std::chrono::steady_clock::now() + deadline;
  char buf[4096];
  for (;;) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline_tp - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (pr == 0) {
      result.timed_out = true;
      break;
    }
    if (pr < 0)
      break;
    ssize_t n = read(out_pipe[0], buf, sizeof buf);
    if (n <= 0)
      break;
    result.output.append(buf, static_cast<std::size_t>(n));
  }
  close(out_pipe[0]);

  if (result.timed_out)
    kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  if (result.exit_code == 127)
    result.spawn_failed = true;
  return result;
}

inline std::vector<std::string> split_command(const std::string &command) {
  std::vector<std::string> argv;
  std::string cur;
  for (char c : command) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        argv.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    argv.push_back(cur);
  return argv;
}

} // namespace smtlib

/// Decides `system` with an external SMT-LIB v2 solver process given by
/// `command` (program plus arguments, whitespace separated). Spawn,
/// protocol and validation failures all degrade to unknown with a
/// diagnostic; they never produce a wrong sat/unsat. sat models are parsed
/// from decimal and (/ p q) forms and re-validated with check_assignment
/// before acceptance.
inline SolveResult solve_external(const ConstraintSystem &system,
                                  std::chrono::milliseconds deadline,
                                  const std::string &command) {
  auto start = std::chrono::steady_clock::now();
  SolveResult result;
  auto fail = [&](const std::string &why) {
    result.status = SolveStatus::unknown;
    result.model.clear();
    result.diagnostic = why;
    result.stats.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  std::vector<std::string> argv = smtlib::split_command(command);
  if (argv.empty())
    return fail("process-spawn: empty solver command");

  std::string script = smtlib::emit_script(system);
  smtlib::ProcessResult proc = smtlib::run_process(argv, script, deadline);
  if (proc.spawn_failed)
    return fail("process-spawn: could not run '" + command + "'");
  if (proc.timed_out)
    return fail("deadline");

  std::size_t i = 0;
  smtlib::detail::skip_ws(proc.output, i);
  std::size_t start_tok = i;
  while (i < proc.output.size() &&
         !std::isspace(static_cast<unsigned char>(proc.output[i])) && proc.output[i] != '(')
    ++i;
  std::string status_tok = proc.output.substr(start_tok, i - start_tok);

  if (status_tok == "unsat") {
    result.status = SolveStatus::unsat;
  } else if (status_tok == "unknown") {
    return fail("solver reported unknown");
  } else if (status_tok == "sat") {
    smtlib::Sexpr values;
    if (!smtlib::detail::parse_sexpr(proc.output, i, values) || values.is_atom)
      return fail("protocol-parse: missing get-value response");
    std::map<int, Rat> model;
    try {
      for (const smtlib::Sexpr &pair : values.items) {
        if (pair.is_atom || pair.items.size() != 2 || !pair.items[0].is_atom)
          throw Error("protocol-parse", "malformed get-value pair");
        const std::string &name = pair.items[0].atom;
        if (name.size() < 2 || name[0] != 'v')
          throw Error("protocol-parse", "unexpected variable name '" + name + "'");
        int var = std::stoi(name.substr(1));
        model[var] = smtlib::eval_value_term(pair.items[1]);
      }
    } catch (const Error &e) {
      return fail(std::string("protocol-parse: ") + e.what());
    } catch (const std::exception &e) {
      return fail(std::string("protocol-parse: ") + e.what());
    }
    for (const auto &[var, b] : system.bounds)
      if (!model.count(var))
        return fail("protocol-parse: model misses variable " + smtlib::var_name(var));
    bool ok = false;
    try {
      ok = check_assignment(system, model);
    } catch (const Error &e) {
      return fail(std::string("validation: ") + e.what());
    }
    if (!ok)
      return fail("validation: external model rejected by exact re-check");
    result.status = SolveStatus::sat;
    result.model = std::move(model);
  } else {
    return fail("protocol-parse: unrecognized solver output");
  }

  result.stats.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// Backend selection shared by the drivers: the internal simplex or an
/// external SMT-LIB process.
struct SolverConfig {
  enum class Backend { internal, smtlib };
  Backend backend = Backend::internal;
  std::string command; // solver command line for Backend::smtlib

  std::string description() const {
    return backend == Backend::internal ? "internal" : "smtlib=" + command;
  }
};

inline SolveResult solve_with(const SolverConfig &config, const ConstraintSystem &system,
                              std::chrono::milliseconds deadline) {
  if (config.backend == SolverConfig::Backend::smtlib)
    return solve_external(system, deadline, config.command);
  return solve(system, deadline);
}

} // namespace faircert
