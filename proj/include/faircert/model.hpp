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
#include <set>
#include <string>
#include <vector>

#include "faircert/errors.hpp"
#include "faircert/rational.hpp"

namespace faircert {

enum class AttrKind { integer, real };

/// One input attribute with its (mandatory) box domain. Verification
/// quantifies only over the declared box.
struct AttributeSpec {
  std::string name;
  AttrKind kind = AttrKind::real;
  Rat lower{0};
  Rat upper{0};

  bool operator==(const AttributeSpec &) const = default;
};

enum class Activation { relu, threshold_output, linear };

inline const char *activation_name(Activation a) {
  switch (a) {
  case Activation::relu:
    return "relu";
  case Activation::threshold_output:
    return "threshold_output";
  case Activation::linear:
    return "linear";
  }
  return "?";
}

/// Dense layer. weights has one row per *input* neuron (fan_in rows,
/// fan_out columns): row i holds the outgoing weights of input neuron i.
struct LayerSpec {
  std::vector<std::vector<Rat>> weights;
  std::vector<Rat> biases;
  Activation activation = Activation::relu;

  int fan_in() const { return static_cast<int>(weights.size()); }
  int fan_out() const { return static_cast<int>(biases.size()); }

  bool operator==(const LayerSpec &) const = default;
};

/// Fully connected network with ReLU hidden layers and a thresholded
/// output, plus the protected-attribute designation. The output label is
/// 1 iff the logit is strictly greater than `threshold` (the Sigmoid of
/// the original models is monotone, so sigma(z) > 1/2 iff z > 0).
struct ModelSpec {
  std::vector<AttributeSpec> attributes;
  std::vector<LayerSpec> layers;
  std::vector<int> protected_attrs;
  Rat threshold{0};

  int attribute_count() const { return static_cast<int>(attributes.size()); }
  int output_count() const { return layers.empty() ? 0 : layers.back().fan_out(); }

  std::vector<int> non_protected() const {
    std::set<int> pa(protected_attrs.begin(), protected_attrs.end());
    std::vector<int> npa;
    for (int i = 0; i < attribute_count(); ++i)
      if (!pa.count(i))
        npa.push_back(i);
    return npa;
  }

  bool operator==(const ModelSpec &) const = default;
};

namespace detail {

inline void validate_structure(const ModelSpec &m, bool binary_output, const std::string &where) {
  if (m.attributes.empty())
    throw Error("malformed-document", where + ": no attributes");
  if (m.layers.empty())
    throw Error("malformed-document", where + ": no layers");

  for (std::size_t i = 0; i < m.attributes.size(); ++i) {
    const auto &a = m.attributes[i];
    std::string path = where + ".attributes[" + std::to_string(i) + "]";
    if (a.lower > a.upper)
      throw Error("malformed-document", path + ": lower bound exceeds upper bound");
    if (a.kind == AttrKind::integer && (!rat_is_integral(a.lower) || !rat_is_integral(a.upper)))
      throw Error("malformed-document", path + ": integer attribute with non-integral bounds");
  }

  int fan_in = m.attribute_count();
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto &layer = m.layers[l];
    std::string path = where + ".layers[" + std::to_string(l) + "]";
    if (layer.fan_in() != fan_in)
      throw Error("shape-mismatch", path + ": expected " + std::to_string(fan_in) +
                                        " weight rows, got " + std::to_string(layer.fan_in()));
    int fan_out = layer.fan_out();
    if (fan_out == 0)
      throw Error("shape-mismatch", path + ": empty layer");
    for (std::size_t r = 0; r < layer.weights.size(); ++r)
      if (static_cast<int>(layer.weights[r].size()) != fan_out)
        throw Error("shape-mismatch", path + ".weights[" + std::to_string(r) + "]: expected " +
                                          std::to_string(fan_out) + " columns, got " +
                                          std::to_string(layer.weights[r].size()));
    bool last = l + 1 == m.layers.size();
    if (layer.activation == Activation::relu && last)
      throw Error("shape-mismatch", path + ": relu is not a valid output activation");
    if (layer.activation == Activation::threshold_output && !last)
      throw Error("shape-mismatch", path + ": threshold_output only allowed on the final layer");
    fan_in = fan_out;
  }

  if (binary_output && m.layers.back().fan_out() != 1)
    throw Error("shape-mismatch", where + ": final layer must have exactly one output");

  std::set<int> seen;
  for (int p : m.protected_attrs) {
    if (p < 0 || p >= m.attribute_count())
      throw Error("protected-index-out-of-range",
                  where + ".protected: index " + std::to_string(p) + " out of range");
    if (!seen.insert(p).second)
      throw Error("protected-index-out-of-range",
                  where + ".protected: duplicate index " + std::to_string(p));
  }
}

} // namespace detail

/// Checks all ModelSpec invariants; throws on violation.
inline void validate_model(const ModelSpec &m) { detail::validate_structure(m, true, "model"); }

/// Dimension and domain checks shared by forward/predict. A value outside
/// an attribute's box (or non-integral for an integer attribute) is a
/// checked error, never undefined behavior.
inline void check_input(const ModelSpec &m, const std::vector<Rat> &input) {
  if (static_cast<int>(input.size()) != m.attribute_count())
    throw Error("dimension-mismatch", "expected " + std::to_string(m.attribute_count()) +
                                          " input values, got " + std::to_string(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto &a = m.attributes[i];
    if (input[i] < a.lower || input[i] > a.upper)
      throw Error("domain-violation", "attribute '" + a.name + "' value " +
                                          rat_to_string(input[i]) + " outside [" +
                                          rat_to_string(a.lower) + ", " + rat_to_string(a.upper) +
                                          "]");
    if (a.kind == AttrKind::integer && !rat_is_integral(input[i]))
      throw Error("domain-violation",
                  "attribute '" + a.name + "' requires an integer, got " + rat_to_string(input[i]));
  }
}

/// Exact forward pass; returns the final-layer pre-activation logits.
inline std::vector<Rat> forward(const ModelSpec &m, const std::vector<Rat> &input) {
  check_input(m, input);
  std::vector<Rat> values = input;
  for (const auto &layer : m.layers) {
    std::vector<Rat> next(static_cast<std::size_t>(layer.fan_out()));
    for (int j = 0; j < layer.fan_out(); ++j) {
      Rat acc = layer.biases[static_cast<std::size_t>(j)];
      for (int i = 0; i < layer.fan_in(); ++i)
        acc += layer.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
               values[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(j)] = std::move(acc);
    }
    if (layer.activation == Activation::relu) {
      for (auto &v : next)
        if (v < 0)
          v = 0;
    }
    values = std::move(next);
  }
  return values;
}

/// Binary label: 1 iff the logit strictly exceeds the threshold. A logit
/// exactly on the threshold is assigned label 0.
inline int predict(const ModelSpec &m, const std::vector<Rat> &input) {
  if (m.output_count() != 1)
    throw Error("dimension-mismatch", "predict requires a single-output model");
  return forward(m, input)[0] > m.threshold ? 1 : 0;
}

} // namespace faircert
