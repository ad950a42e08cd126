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
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "faircert/errors.hpp"
#include "faircert/model.hpp"

namespace faircert {

/// Two weight-sharing copies of a base network merged by label comparison.
/// Attribute layout: the base attributes first, then one duplicate per
/// protected attribute (PA'), inheriting bounds and kind. Copy 1 reads
/// (PA, NPA), copy 2 reads (PA', NPA); hidden weight matrices are block
/// diagonal so the copies cannot interact.
struct DualModelSpec {
  ModelSpec net; // doubled network, final layer has two logits
  int base_attribute_count = 0;
  std::vector<std::pair<int, int>> pa_mapping; // (base PA index, duplicate index)

  int duplicate_of(int pa_index) const {
    for (const auto &[p, d] : pa_mapping)
      if (p == pa_index)
        return d;
    throw Error("index-out-of-range",
                "attribute " + std::to_string(pa_index) + " is not a protected attribute");
  }

  bool operator==(const DualModelSpec &) const = default;
};

/// Builds the dual network for `model` with respect to protected-attribute
/// indices `pa`. Hidden layers double in width with block-diagonal weights;
/// the input layer feeds NPA rows to both blocks, PA rows to block 1 only,
/// and appended PA' rows to block 2 only. Biases repeat twice per layer.
inline DualModelSpec build_dual(const ModelSpec &model, const std::vector<int> &pa) {
  if (pa.empty())
    throw Error("empty-pa", "at least one protected attribute index is required");
  std::set<int> pa_set;
  for (int p : pa) {
    if (p < 0 || p >= model.attribute_count())
      throw Error("index-out-of-range", "protected attribute index " + std::to_string(p) +
                                            " out of range for " +
                                            std::to_string(model.attribute_count()) + " attributes");
    if (!pa_set.insert(p).second)
      throw Error("index-out-of-range", "duplicate protected attribute index " + std::to_string(p));
  }

  DualModelSpec dual;
  dual.base_attribute_count = model.attribute_count();
  dual.net.attributes = model.attributes;
  dual.net.threshold = model.threshold;
  dual.net.protected_attrs = pa;
  for (int p : pa) {
    AttributeSpec dup = model.attributes[static_cast<std::size_t>(p)];
    dup.name += "'";
    dual.pa_mapping.emplace_back(p, static_cast<int>(dual.net.attributes.size()));
    dual.net.attributes.push_back(std::move(dup));
  }

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LayerSpec &base = model.layers[l];
    LayerSpec doubled;
    doubled.activation = base.activation;
    int out = base.fan_out();
    doubled.biases.reserve(static_cast<std::size_t>(2 * out));
    for (int copy = 0; copy < 2; ++copy)
      for (int j = 0; j < out; ++j)
        doubled.biases.push_back(base.biases[static_cast<std::size_t>(j)]);

    auto blank_row = [&] { return std::vector<Rat>(static_cast<std::size_t>(2 * out), Rat(0)); };
    if (l == 0) {
      // Input layer: one row per dual attribute.
      for (int i = 0; i < model.attribute_count(); ++i) {
        auto row = blank_row();
        const auto &base_row = base.weights[static_cast<std::size_t>(i)];
        bool is_pa = pa_set.count(i) != 0;
        for (int j = 0; j < out; ++j) {
          row[static_cast<std::size_t>(j)] = base_row[static_cast<std::size_t>(j)];
          if (!is_pa)
            row[static_cast<std::size_t>(out + j)] = base_row[static_cast<std::size_t>(j)];
        }
        doubled.weights.push_back(std::move(row));
      }
      for (int p : pa) {
        auto row = blank_row();
        const auto &base_row = base.weights[static_cast<std::size_t>(p)];
        for (int j = 0; j < out; ++j)
          row[static_cast<std::size_t>(out + j)] = base_row[static_cast<std::size_t>(j)];
        doubled.weights.push_back(std::move(row));
      }
    } else {
      // Hidden and output layers: block diagonal.
      int in = base.fan_in();
      for (int copy = 0; copy < 2; ++copy)
        for (int i = 0; i < in; ++i) {
          auto row = blank_row();
          const auto &base_row = base.weights[static_cast<std::size_t>(i)];
          for (int j = 0; j < out; ++j)
            row[static_cast<std::size_t>(copy * out + j)] = base_row[static_cast<std::size_t>(j)];
          doubled.weights.push_back(std::move(row));
        }
    }
    dual.net.layers.push_back(std::move(doubled));
  }
  detail::validate_structure(dual.net, false, "dual");
  return dual;
}

struct DualOutput {
  int label = 0;
  int label_prime = 0;
  int merged = 0; // 1 iff the copies' labels differ
};

/// Thresholds both copies' logits and merges by comparison.
inline DualOutput dual_output(const DualModelSpec &dual, const std::vector<Rat> &input) {
  std::vector<Rat> logits = forward(dual.net, input);
  DualOutput out;
  out.label = logits[0] > dual.net.threshold ? 1 : 0;
  out.label_prime = logits[1] > dual.net.threshold ? 1 : 0;
  out.merged = out.label != out.label_prime ? 1 : 0;
  return out;
}

/// Builds a dual input from a base instance plus PA' overrides: slots for
/// PA and NPA copy the base instance; each PA' slot carries its override,
/// defaulting to the original PA value.
inline std::vector<Rat> split_input(const DualModelSpec &dual, const std::vector<Rat> &base_instance,
                                    const std::map<int, Rat> &pa_override) {
  if (static_cast<int>(base_instance.size()) != dual.base_attribute_count)
    throw Error("dimension-mismatch",
                "expected " + std::to_string(dual.base_attribute_count) + " base values, got " +
                    std::to_string(base_instance.size()));
  for (const auto &[p, v] : pa_override)
    dual.duplicate_of(p); // throws if p is not a PA
  std::vector<Rat> input = base_instance;
  input.resize(dual.net.attributes.size());
  for (const auto &[p, dup] : dual.pa_mapping) {
    auto it = pa_override.find(p);
    input[static_cast<std::size_t>(dup)] =
        it != pa_override.end() ? it->second : base_instance[static_cast<std::size_t>(p)];
  }
  check_input(dual.net, input);
  return input;
}

/// Recovers the base network from a dual: copy-1 rows and columns of every
/// layer. build_dual(extract_base(d), d.net.protected_attrs) == d.
inline ModelSpec extract_base(const DualModelSpec &dual) {
  ModelSpec base;
  base.attributes.assign(dual.net.attributes.begin(),
                         dual.net.attributes.begin() + dual.base_attribute_count);
  base.protected_attrs = dual.net.protected_attrs;
  base.threshold = dual.net.threshold;
  for (std::size_t l = 0; l < dual.net.layers.size(); ++l) {
    const LayerSpec &layer = dual.net.layers[l];
    LayerSpec slim;
    slim.activation = layer.activation;
    int out = layer.fan_out() / 2;
    int rows = l == 0 ? dual.base_attribute_count : layer.fan_in() / 2;
    for (int i = 0; i < rows; ++i) {
      const auto &row = layer.weights[static_cast<std::size_t>(i)];
      slim.weights.emplace_back(row.begin(), row.begin() + out);
    }
    slim.biases.assign(layer.biases.begin(), layer.biases.begin() + out);
    base.layers.push_back(std::move(slim));
  }
  validate_model(base);
  return base;
}

/// Recovers the base-instance pair encoded by a dual input: phi reads the
/// (PA, NPA) slots, phi' substitutes each PA' slot back into its PA slot.
inline std::pair<std::vector<Rat>, std::vector<Rat>>
unsplit_input(const DualModelSpec &dual, const std::vector<Rat> &dual_input) {
  if (static_cast<int>(dual_input.size()) != static_cast<int>(dual.net.attributes.size()))
    throw Error("dimension-mismatch", "bad dual input size");
  std::vector<Rat> phi(dual_input.begin(), dual_input.begin() + dual.base_attribute_count);
  std::vector<Rat> phi_prime = phi;
  for (const auto &[p, dup] : dual.pa_mapping)
    phi_prime[static_cast<std::size_t>(p)] = dual_input[static_cast<std::size_t>(dup)];
  return {std::move(phi), std::move(phi_prime)};
}

} // namespace faircert
