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

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "faircert/concolic.hpp"
#include "faircert/errors.hpp"
#include "faircert/model.hpp"

namespace faircert {

enum class EdgeStatus { unexplored, pending, explored, no_solution, unknown };

inline const char *edge_status_name(EdgeStatus s) {
  switch (s) {
  case EdgeStatus::unexplored:
    return "unexplored";
  case EdgeStatus::pending:
    return "pending";
  case EdgeStatus::explored:
    return "explored";
  case EdgeStatus::no_solution:
    return "no_solution";
  case EdgeStatus::unknown:
    return "unknown";
  }
  return "?";
}

struct LeafRecord {
  std::vector<Rat> input;
  std::vector<int> labels;
};

/// Explored-prefix tree T. Each internal node carries one branch site and
/// its condition; each polarity edge leads to the subtree of executions
/// that took that side. Edges pick up a status as exploration proceeds;
/// leaves carry the (input, output) records of finished executions.
struct ExecTree {
  struct Edge {
    EdgeStatus status = EdgeStatus::unexplored;
    int child = -1;
    std::vector<LeafRecord> leaves;
  };
  struct Node {
    Site site;
    BranchKind kind = BranchKind::relu;
    SymExpr expr;
    Edge edges[2]; // index 0: polarity false, 1: polarity true
  };

  std::vector<Node> nodes;
  int root = -1;
  std::vector<LeafRecord> root_leaves; // executions with an empty trace

  Edge &edge(int node, bool polarity) { return nodes[static_cast<std::size_t>(node)].edges[polarity ? 1 : 0]; }
  const Edge &edge(int node, bool polarity) const {
    return nodes[static_cast<std::size_t>(node)].edges[polarity ? 1 : 0];
  }

  std::size_t count_status(EdgeStatus s) const {
    std::size_t n = 0;
    for (const auto &node : nodes)
      for (const auto &e : node.edges)
        if (e.status == s)
          ++n;
    return n;
  }
};

/// Pending path constraint: the literal prefix of an executed trace with
/// the last literal's polarity flipped, plus the tree edge it targets.
/// Attribute-domain constraints (and, in fairness mode, the PA-disequality
/// split) are conjoined at solve time.
struct PathConstraint {
  std::vector<BranchLiteral> literals;
  int node = -1;
  bool polarity = false;
};

enum class QueueStrategy { fifo, lifo };

inline const char *strategy_name(QueueStrategy s) {
  return s == QueueStrategy::fifo ? "fifo" : "lifo";
}

/// Pending-constraint queue Q. Every entry corresponds to a pending edge
/// of the companion ExecTree; dequeuing transfers ownership of that edge's
/// resolution to the caller.
struct WorkQueue {
  std::deque<PathConstraint> entries;
  QueueStrategy strategy = QueueStrategy::fifo;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct ExplorationResult {
  ConcolicResult run;
  std::size_t enqueued = 0;
};

/// Runs one concolic forward pass from `seed`, inserts the trace into T,
/// and enqueues one flipped-suffix constraint per trace literal whose
/// alternate edge is still unvisited (prefix-deduplicated against T).
///
/// When `expect` is set, the trace's leading literals are checked against
/// the constraint that produced `seed` (same sites, same polarities, with
/// the final one flipped); a mismatch means concolic execution diverged
/// from the solver's model and is reported as an internal error.
inline ExplorationResult exploration(const ModelSpec &m, const std::vector<Rat> &seed,
                                     const std::set<int> &mask, WorkQueue &q, ExecTree &t,
                                     bool dual_copies = false,
                                     const PathConstraint *expect = nullptr) {
  ExplorationResult out;
  out.run = concolic_forward(m, seed, mask, dual_copies);
  const std::vector<BranchLiteral> &lits = out.run.trace.literals;

  if (expect) {
    if (lits.size() < expect->literals.size())
      throw Error("concolic-divergence", "re-executed trace shorter than its path constraint");
    for (std::size_t i = 0; i < expect->literals.size(); ++i) {
      if (lits[i].site != expect->literals[i].site ||
          lits[i].polarity != expect->literals[i].polarity)
        throw Error("concolic-divergence",
                    "re-executed trace diverged from its path constraint at literal " +
                        std::to_string(i));
    }
  }

  LeafRecord leaf{seed, out.run.labels};
  if (lits.empty()) {
    for (const auto &existing : t.root_leaves)
      if (existing.input == leaf.input)
        return out;
    t.root_leaves.push_back(std::move(leaf));
    return out;
  }

  int cur = t.root;
  if (cur == -1) {
    t.nodes.push_back(ExecTree::Node{lits[0].site, lits[0].kind, lits[0].expr, {}});
    cur = t.root = 0;
  }
  for (std::size_t i = 0; i < lits.size(); ++i) {
    ExecTree::Node &node = t.nodes[static_cast<std::size_t>(cur)];
    if (node.site != lits[i].site)
      throw Error("concolic-divergence", "trace reached a tree node with a different site");

    ExecTree::Edge &alt = t.edge(cur, !lits[i].polarity);
    if (alt.status == EdgeStatus::unexplored) {
      PathConstraint pc;
      pc.literals.assign(lits.begin(), lits.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      pc.literals.back().polarity = !pc.literals.back().polarity;
      pc.node = cur;
      pc.polarity = !lits[i].polarity;
      q.entries.push_back(std::move(pc));
      alt.status = EdgeStatus::pending;
      ++out.enqueued;
    }

    // Walking an edge makes it explored. If the edge was pending, its
    // queue entry is now redundant (this very trace covers one path of the
    // constraint's region and enqueues the rest) and is dropped to keep
    // the queue/tree bijection. An unsat-marked edge can never be reached
    // by a concrete execution; seeing one means a solver lied.
    {
      EdgeStatus prior = t.edge(cur, lits[i].polarity).status;
      if (prior == EdgeStatus::no_solution)
        throw Error("concolic-divergence",
                    "execution crossed an edge previously proved unsatisfiable");
      if (prior == EdgeStatus::pending) {
        for (auto it = q.entries.begin(); it != q.entries.end(); ++it)
          if (it->node == cur && it->polarity == lits[i].polarity) {
            q.entries.erase(it);
            break;
          }
      }
    }
    // Re-acquire edge references after any node insertion: push_back can
    // reallocate the node vector.
    t.edge(cur, lits[i].polarity).status = EdgeStatus::explored;
    if (i + 1 < lits.size()) {
      if (t.edge(cur, lits[i].polarity).child == -1) {
        t.nodes.push_back(ExecTree::Node{lits[i + 1].site, lits[i + 1].kind, lits[i + 1].expr, {}});
        t.edge(cur, lits[i].polarity).child = static_cast<int>(t.nodes.size()) - 1;
      }
      cur = t.edge(cur, lits[i].polarity).child;
    } else {
      ExecTree::Edge &taken = t.edge(cur, lits[i].polarity);
      bool seen = false;
      for (const auto &existing : taken.leaves)
        if (existing.input == leaf.input)
          seen = true;
      if (!seen)
        taken.leaves.push_back(std::move(leaf));
    }
  }
  return out;
}

/// Dequeues the next path constraint per strategy; empty means the queue
/// is exhausted (in fairness mode, the certificate condition).
inline std::optional<PathConstraint> next_target(WorkQueue &q) {
  if (q.entries.empty())
    return std::nullopt;
  PathConstraint pc;
  if (q.strategy == QueueStrategy::fifo) {
    pc = std::move(q.entries.front());
    q.entries.pop_front();
  } else {
    pc = std::move(q.entries.back());
    q.entries.pop_back();
  }
  return pc;
}

} // namespace faircert
