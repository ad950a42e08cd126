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
#include <set>
#include <string>
#include <vector>

#include "faircert/model.hpp"
#include "faircert/sym_expr.hpp"

namespace faircert {

enum class BranchKind { relu, output_threshold };

/// Neuron address of a branch site. `copy` distinguishes the two halves of
/// a dual network (always 0 for base models).
struct Site {
  int layer = 0;
  int neuron = 0;
  int copy = 0;

  auto operator<=>(const Site &) const = default;

  std::string to_string() const {
    std::string s = "n" + std::to_string(layer + 1) + "," + std::to_string(neuron + 1);
    if (copy == 1)
      s += "'";
    return s;
  }
};

/// One branch decision: the affine condition expr > 0 together with the
/// polarity it took on this execution (true iff expr > 0 held).
struct BranchLiteral {
  SymExpr expr;
  bool polarity = false;
  Site site;
  BranchKind kind = BranchKind::relu;

  bool operator==(const BranchLiteral &) const = default;
};

/// Ordered branch literals of one execution plus the predicted label(s).
/// Order is the deterministic execution order: layer-major, neuron-minor,
/// which places a dual network's first copy before its second.
struct PathTrace {
  std::vector<BranchLiteral> literals;
  std::vector<int> labels;
};

struct ConcolicResult {
  PathTrace trace;
  std::vector<ConcolicScalar> logits; // final-layer pre-activations
  std::vector<int> labels;            // thresholded, one per logit
};

/// Concolic forward execution. Attributes in `mask` become symbolic
/// variables (variable id = attribute index); all others are frozen to
/// their seed values. A ReLU neuron whose pre-activation is non-constant
/// over the mask contributes one branch literal; constant sites are
/// unflippable and excluded from the trace. Each non-constant output logit
/// contributes one output_threshold literal whose expression is
/// logit - threshold, so polarity coincides with the label.
///
/// `dual_copies` tags sites of a doubled network: neurons in the upper
/// half of each layer belong to copy 2.
inline ConcolicResult concolic_forward(const ModelSpec &m, const std::vector<Rat> &seed,
                                       const std::set<int> &mask, bool dual_copies = false) {
  check_input(m, seed);
  if (mask.empty())
    throw Error("empty-mask", "at least one attribute must be symbolic");

  auto copy_tag = [&](const LayerSpec &layer, int neuron) {
    if (!dual_copies)
      return Site{0, 0, 0}.copy;
    return neuron * 2 >= layer.fan_out() ? 1 : 0;
  };
  auto neuron_in_copy = [&](const LayerSpec &layer, int neuron) {
    if (!dual_copies)
      return neuron;
    int half = layer.fan_out() / 2;
    return neuron % half;
  };

  std::vector<ConcolicScalar> cells;
  cells.reserve(seed.size());
  for (std::size_t i = 0; i < seed.size(); ++i) {
    ConcolicScalar cell;
    cell.concrete = seed[i];
    if (mask.count(static_cast<int>(i))) {
      cell.symbolic = SymExpr::variable(static_cast<int>(i));
      // Variable value at the seed binding is the seed value itself.
    } else {
      cell.symbolic = SymExpr::constant_of(seed[i]);
    }
    cells.push_back(std::move(cell));
  }

  ConcolicResult result;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const LayerSpec &layer = m.layers[l];
    std::vector<ConcolicScalar> next(static_cast<std::size_t>(layer.fan_out()));
    for (int j = 0; j < layer.fan_out(); ++j) {
      ConcolicScalar acc;
      acc.concrete = layer.biases[static_cast<std::size_t>(j)];
      acc.symbolic = SymExpr::constant_of(acc.concrete);
      for (int i = 0; i < layer.fan_in(); ++i) {
        const Rat &w = layer.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (w == 0)
          continue;
        acc.concrete += w * cells[static_cast<std::size_t>(i)].concrete;
        acc.symbolic.add_scaled(cells[static_cast<std::size_t>(i)].symbolic, w);
      }
      next[static_cast<std::size_t>(j)] = std::move(acc);
    }

    if (layer.activation == Activation::relu) {
      for (int j = 0; j < layer.fan_out(); ++j) {
        ConcolicScalar &pre = next[static_cast<std::size_t>(j)];
        bool taken = pre.concrete > 0;
        if (!pre.symbolic.is_constant()) {
          BranchLiteral lit;
          lit.expr = pre.symbolic;
          lit.polarity = taken;
          lit.site = Site{static_cast<int>(l), neuron_in_copy(layer, j), copy_tag(layer, j)};
          lit.kind = BranchKind::relu;
          result.trace.literals.push_back(std::move(lit));
        }
        if (!taken) {
          pre.concrete = 0;
          pre.symbolic = SymExpr::constant_of(Rat(0));
        }
      }
    }
    cells = std::move(next);
  }

  for (int j = 0; j < static_cast<int>(cells.size()); ++j) {
    const ConcolicScalar &logit = cells[static_cast<std::size_t>(j)];
    int label = logit.concrete > m.threshold ? 1 : 0;
    result.labels.push_back(label);
    if (!logit.symbolic.is_constant()) {
      BranchLiteral lit;
      lit.expr = logit.symbolic;
      lit.expr.constant -= m.threshold;
      lit.polarity = label == 1;
      const LayerSpec &last = m.layers.back();
      lit.site = Site{static_cast<int>(m.layers.size()) - 1, neuron_in_copy(last, j),
                      copy_tag(last, j)};
      lit.kind = BranchKind::output_threshold;
      result.trace.literals.push_back(std::move(lit));
    }
  }
  result.trace.labels = result.labels;
  result.logits = std::move(cells);
  return result;
}

} // namespace faircert
