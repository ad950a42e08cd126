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

#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "faircert/dual.hpp"
#include "faircert/model.hpp"
#include "faircert/version.hpp"

// On-disk model format: a JSON document whose numeric payloads are decimal
// strings (or "p/q" fractions), parsed to exact rationals. Binary floats
// never appear, so load/serialize round-trips are exact.

namespace faircert {

namespace detail {

using Json = nlohmann::ordered_json;

inline const Json &require_field(const Json &doc, const char *key, const std::string &path) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw Error("malformed-document", path + ": missing field '" + key + "'");
  return *it;
}

inline Json rat_vector_json(const std::vector<Rat> &v) {
  Json arr = Json::array();
  for (const auto &x : v)
    arr.push_back(rat_to_string(x));
  return arr;
}

inline Rat field_rat(const Json &node, const std::string &path) {
  if (!node.is_string())
    throw Error("malformed-document", path + ": numbers must be decimal strings");
  try {
    return rat_from_string(node.get<std::string>());
  } catch (const Error &e) {
    throw Error("malformed-document", path + ": " + e.what());
  }
}

inline ModelSpec model_from_json(const Json &doc, bool binary_output, const std::string &where) {
  if (!doc.is_object())
    throw Error("malformed-document", where + ": expected an object");
  ModelSpec m;

  const Json &attrs = require_field(doc, "attributes", where);
  if (!attrs.is_array())
    throw Error("malformed-document", where + ".attributes: expected an array");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    std::string path = where + ".attributes[" + std::to_string(i) + "]";
    const Json &a = attrs[i];
    AttributeSpec spec;
    spec.name = require_field(a, "name", path).get<std::string>();
    std::string kind = require_field(a, "kind", path).get<std::string>();
    if (kind == "integer")
      spec.kind = AttrKind::integer;
    else if (kind == "real")
      spec.kind = AttrKind::real;
    else
      throw Error("malformed-document", path + ".kind: unknown kind '" + kind + "'");
    spec.lower = field_rat(require_field(a, "min", path), path + ".min");
    spec.upper = field_rat(require_field(a, "max", path), path + ".max");
    m.attributes.push_back(std::move(spec));
  }

  const Json &layers = require_field(doc, "layers", where);
  if (!layers.is_array())
    throw Error("malformed-document", where + ".layers: expected an array");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::string path = where + ".layers[" + std::to_string(l) + "]";
    const Json &node = layers[l];
    LayerSpec layer;
    std::string act = require_field(node, "activation", path).get<std::string>();
    if (act == "relu")
      layer.activation = Activation::relu;
    else if (act == "threshold_output")
      layer.activation = Activation::threshold_output;
    else if (act == "linear")
      layer.activation = Activation::linear;
    else
      throw Error("unknown-activation", path + ".activation: '" + act + "'");

    const Json &rows = require_field(node, "weights", path);
    if (!rows.is_array())
      throw Error("malformed-document", path + ".weights: expected an array of rows");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::string rpath = path + ".weights[" + std::to_string(r) + "]";
      if (!rows[r].is_array())
        throw Error("malformed-document", rpath + ": expected an array");
      std::vector<Rat> row;
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        row.push_back(field_rat(rows[r][c], rpath + "[" + std::to_string(c) + "]"));
      layer.weights.push_back(std::move(row));
    }
    const Json &biases = require_field(node, "biases", path);
    if (!biases.is_array())
      throw Error("malformed-document", path + ".biases: expected an array");
    for (std::size_t b = 0; b < biases.size(); ++b)
      layer.biases.push_back(field_rat(biases[b], path + ".biases[" + std::to_string(b) + "]"));
    m.layers.push_back(std::move(layer));
  }

  const Json &prot = require_field(doc, "protected", where);
  if (!prot.is_array())
    throw Error("malformed-document", where + ".protected: expected an array of indices");
  for (const auto &p : prot) {
    if (!p.is_number_integer())
      throw Error("malformed-document", where + ".protected: indices must be integers");
    m.protected_attrs.push_back(p.get<int>());
  }

  if (auto it = doc.find("threshold"); it != doc.end())
    m.threshold = field_rat(*it, where + ".threshold");

  validate_structure(m, binary_output, where);
  return m;
}

inline Json model_to_json(const ModelSpec &m) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  Json attrs = Json::array();
  for (const auto &a : m.attributes) {
    Json node;
    node["name"] = a.name;
    node["kind"] = a.kind == AttrKind::integer ? "integer" : "real";
    node["min"] = rat_to_string(a.lower);
    node["max"] = rat_to_string(a.upper);
    attrs.push_back(std::move(node));
  }
  doc["attributes"] = std::move(attrs);
  Json layers = Json::array();
  for (const auto &layer : m.layers) {
    Json node;
    Json rows = Json::array();
    for (const auto &row : layer.weights) {
      Json cells = Json::array();
      for (const auto &w : row)
        cells.push_back(rat_to_string(w));
      rows.push_back(std::move(cells));
    }
    node["weights"] = std::move(rows);
    Json biases = Json::array();
    for (const auto &b : layer.biases)
      biases.push_back(rat_to_string(b));
    node["biases"] = std::move(biases);
    node["activation"] = activation_name(layer.activation);
    layers.push_back(std::move(node));
  }
  doc["layers"] = std::move(layers);
  doc["protected"] = m.protected_attrs;
  doc["threshold"] = rat_to_string(m.threshold);
  return doc;
}

inline Json parse_document(std::string_view raw) {
  Json doc = Json::parse(raw, nullptr, false);
  if (doc.is_discarded())
    throw Error("malformed-document", "model: not valid JSON");
  return doc;
}

} // namespace detail

/// True if `raw` is a dual-model document (carries a "dual" block).
inline bool is_dual_document(std::string_view raw) {
  detail::Json doc = detail::Json::parse(raw, nullptr, false);
  return doc.is_object() && doc.contains("dual");
}

/// Parses a base-model document. All decimal literals become exact
/// rationals; every structural invariant is checked before returning.
inline ModelSpec load_model(std::string_view raw) {
  detail::Json doc = detail::parse_document(raw);
  if (doc.contains("dual"))
    throw Error("malformed-document",
                "model: this is a dual-model document; load it as a dual network");
  return detail::model_from_json(doc, true, "model");
}

/// Canonical serialization; load_model followed by serialize_model is the
/// identity on canonically formatted documents.
inline std::string serialize_model(const ModelSpec &m) {
  return detail::model_to_json(m).dump(2) + "\n";
}

/// Parses a dual-model document as emitted by serialize_dual / the `dual`
/// CLI subcommand.
inline DualModelSpec load_dual(std::string_view raw) {
  detail::Json doc = detail::parse_document(raw);
  if (!doc.contains("dual"))
    throw Error("malformed-document", "dual: missing 'dual' block");
  DualModelSpec dual;
  dual.net = detail::model_from_json(doc, false, "dual");
  const detail::Json &block = doc["dual"];
  const detail::Json &base_n = detail::require_field(block, "base_attribute_count", "dual.dual");
  if (!base_n.is_number_integer())
    throw Error("malformed-document", "dual.dual.base_attribute_count: expected an integer");
  dual.base_attribute_count = base_n.get<int>();
  const detail::Json &mapping = detail::require_field(block, "pa_mapping", "dual.dual");
  if (!mapping.is_array())
    throw Error("malformed-document", "dual.dual.pa_mapping: expected an array of pairs");
  for (const auto &pair : mapping) {
    if (!pair.is_array() || pair.size() != 2)
      throw Error("malformed-document", "dual.dual.pa_mapping: expected [base, duplicate] pairs");
    dual.pa_mapping.emplace_back(pair[0].get<int>(), pair[1].get<int>());
  }
  if (dual.base_attribute_count + static_cast<int>(dual.pa_mapping.size()) !=
      static_cast<int>(dual.net.attributes.size()))
    throw Error("malformed-document", "dual.dual: attribute count inconsistent with pa_mapping");
  for (const auto &[p, dup] : dual.pa_mapping)
    if (p < 0 || p >= dual.base_attribute_count || dup < dual.base_attribute_count ||
        dup >= static_cast<int>(dual.net.attributes.size()))
      throw Error("malformed-document", "dual.dual.pa_mapping: index out of range");
  return dual;
}

/// Emits a dual network in the same on-disk format, plus its "dual" block,
/// so it can be inspected or fed back into any operation.
inline std::string serialize_dual(const DualModelSpec &dual) {
  detail::Json doc = detail::model_to_json(dual.net);
  detail::Json block;
  block["base_attribute_count"] = dual.base_attribute_count;
  detail::Json mapping = detail::Json::array();
  for (const auto &[p, dup] : dual.pa_mapping)
    mapping.push_back(detail::Json::array({p, dup}));
  block["pa_mapping"] = std::move(mapping);
  doc["dual"] = std::move(block);
  return doc.dump(2) + "\n";
}

} // namespace faircert
