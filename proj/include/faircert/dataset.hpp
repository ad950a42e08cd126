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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "faircert/model.hpp"

namespace faircert {

/// Parsed dataset: rows of exact rationals in attribute order.
struct DatasetTable {
  std::vector<std::vector<Rat>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto &f : fields) {
    std::size_t a = f.find_first_not_of(" \t");
    std::size_t b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? "" : f.substr(a, b - a + 1);
  }
  return fields;
}

} // namespace detail

/// Parses comma-separated text with a header row. Header names are mapped
/// to attribute indices (any column order); values are parsed as exact
/// decimals and validated against the attribute domains.
inline DatasetTable parse_dataset(std::string_view raw, const ModelSpec &model) {
  DatasetTable table;
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < raw.size())
        lines.push_back(raw.substr(pos));
      break;
    }
    lines.push_back(raw.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty())
    throw Error("malformed-document", "dataset: missing header row");

  std::vector<std::string> header = detail::split_csv_line(lines[0]);
  std::map<std::string, int> attr_index;
  for (int i = 0; i < model.attribute_count(); ++i)
    attr_index[model.attributes[static_cast<std::size_t>(i)].name] = i;

  std::vector<int> column_to_attr(header.size(), -1);
  std::vector<bool> seen(model.attributes.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto it = attr_index.find(header[c]);
    if (it == attr_index.end())
      throw Error("unknown-column", "dataset: column '" + header[c] + "' is not a model attribute");
    if (seen[static_cast<std::size_t>(it->second)])
      throw Error("unknown-column", "dataset: duplicate column '" + header[c] + "'");
    seen[static_cast<std::size_t>(it->second)] = true;
    column_to_attr[c] = it->second;
  }
  for (int i = 0; i < model.attribute_count(); ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw Error("missing-column", "dataset: missing column '" +
                                        model.attributes[static_cast<std::size_t>(i)].name + "'");

  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty())
      continue;
    std::vector<std::string> fields = detail::split_csv_line(lines[r]);
    if (fields.size() != header.size())
      throw Error("malformed-document", "dataset row " + std::to_string(r) + ": expected " +
                                            std::to_string(header.size()) + " fields, got " +
                                            std::to_string(fields.size()));
    std::vector<Rat> row(model.attributes.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      int attr = column_to_attr[c];
      const AttributeSpec &a = model.attributes[static_cast<std::size_t>(attr)];
      Rat value;
      try {
        value = rat_from_string(fields[c]);
      } catch (const Error &) {
        throw Error("malformed-document", "dataset row " + std::to_string(r) + ", column '" +
                                              header[c] + "': bad number '" + fields[c] + "'");
      }
      if (value < a.lower || value > a.upper ||
          (a.kind == AttrKind::integer && !rat_is_integral(value)))
        throw Error("out-of-bounds-value", "dataset row " + std::to_string(r) + ", column '" +
                                               header[c] + "': value " + rat_to_string(value) +
                                               " outside the domain of '" + a.name + "'");
      row[static_cast<std::size_t>(attr)] = std::move(value);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Canonical CSV rendering: attribute-order header, one row per instance.
inline std::string serialize_dataset(const DatasetTable &table, const ModelSpec &model) {
  std::string out;
  for (int i = 0; i < model.attribute_count(); ++i) {
    if (i)
      out += ",";
    out += model.attributes[static_cast<std::size_t>(i)].name;
  }
  out += "\n";
  for (const auto &row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c)
        out += ",";
      out += rat_to_string(row[c]);
    }
    out += "\n";
  }
  return out;
}

} // namespace faircert
