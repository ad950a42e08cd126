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

#include <json.hpp>

#include "faircert/explore.hpp"
#include "faircert/model_io.hpp"

namespace faircert {

/// Renders the explored-prefix tree as a structured document for
/// inspection: one entry per node with its site label, literal, and the
/// status/child/leaves of both polarity edges.
inline std::string serialize_tree(const ExecTree &tree, const ModelSpec &net) {
  auto name_of = [&](int var) { return net.attributes[static_cast<std::size_t>(var)].name; };

  detail::Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["root"] = tree.root;

  auto leaf_json = [&](const LeafRecord &leaf) {
    detail::Json node;
    node["input"] = detail::rat_vector_json(leaf.input);
    node["labels"] = leaf.labels;
    return node;
  };

  detail::Json nodes = detail::Json::array();
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const ExecTree::Node &n = tree.nodes[id];
    detail::Json node;
    node["id"] = id;
    node["site"] = n.site.to_string();
    node["kind"] = n.kind == BranchKind::relu ? "relu" : "output_threshold";
    node["literal"] = "(" + n.expr.to_string(name_of) + ") > 0";
    for (bool polarity : {false, true}) {
      const ExecTree::Edge &e = n.edges[polarity ? 1 : 0];
      detail::Json edge;
      edge["status"] = edge_status_name(e.status);
      if (e.child != -1)
        edge["child"] = e.child;
      if (!e.leaves.empty()) {
        detail::Json leaves = detail::Json::array();
        for (const auto &leaf : e.leaves)
          leaves.push_back(leaf_json(leaf));
        edge["leaves"] = std::move(leaves);
      }
      node[polarity ? "true" : "false"] = std::move(edge);
    }
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);

  if (!tree.root_leaves.empty()) {
    detail::Json leaves = detail::Json::array();
    for (const auto &leaf : tree.root_leaves)
      leaves.push_back(leaf_json(leaf));
    doc["root_leaves"] = std::move(leaves);
  }
  return doc.dump(2) + "\n";
}

} // namespace faircert
