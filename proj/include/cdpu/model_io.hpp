#pragma once

// JSON model files:
//   { "variables": [ {"name": "D", "states": ["0","1"]}, ... ],
//     "parents": { "T": ["D"], "D": [] },
//     "cpts": { "T": [ {"given": {"D":"0"}, "p": [0.8, 0.2]}, ... ], ... } }

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cdpu/causal_model.hpp"
#include "cdpu/error.hpp"
#include "json.hpp"

namespace cdpu {

using json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what) {
  throw Error(Errc::parse_error, (path.empty() ? std::string("/") : path) + ": " + what);
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path, "missing key \"" + key + "\"");
  return *it;
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected a string");
  return j.get<std::string>();
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  return j.get<double>();
}

inline std::vector<std::string> as_string_list(const json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline Assignment as_assignment(const json& j, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  Assignment a;
  for (const auto& [k, v] : j.items()) a[k] = as_string(v, path + "/" + k);
  return a;
}

}  // namespace detail

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

/// Parses the document layout only; call validate() for the model invariants.
/// `row_key` is "p" for models and "counts" for serialized beliefs.
inline ModelSpec model_spec_from_json(const json& doc, const std::string& row_key = "p") {
  ModelSpec spec;
  const auto& vars = detail::require(doc, "variables", "");
  if (!vars.is_array()) detail::parse_fail("/variables", "expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string path = "/variables/" + std::to_string(i);
    VariableSpec v;
    v.name = detail::as_string(detail::require(vars[i], "name", path), path + "/name");
    v.states = detail::as_string_list(detail::require(vars[i], "states", path), path + "/states");
    spec.variables.push_back(std::move(v));
  }
  if (auto it = doc.find("parents"); it != doc.end()) {
    if (!it->is_object()) detail::parse_fail("/parents", "expected an object");
    for (const auto& [child, list] : it->items())
      spec.parents[child] = detail::as_string_list(list, "/parents/" + child);
  }
  const auto& cpts = detail::require(doc, "cpts", "");
  if (!cpts.is_object()) detail::parse_fail("/cpts", "expected an object");
  for (const auto& [name, rows] : cpts.items()) {
    const std::string base = "/cpts/" + name;
    if (!rows.is_array()) detail::parse_fail(base, "expected an array of rows");
    auto& out = spec.cpts[name];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string path = base + "/" + std::to_string(r);
      CptRowSpec row;
      if (auto g = rows[r].find("given"); rows[r].is_object() && g != rows[r].end())
        row.given = detail::as_assignment(*g, path + "/given");
      row.p = detail::as_number_list(detail::require(rows[r], row_key, path), path + "/" + row_key);
      out.push_back(std::move(row));
    }
  }
  return spec;
}

inline json to_json(const ModelSpec& spec, const std::string& row_key = "p") {
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : spec.variables) doc["variables"].push_back({{"name", v.name}, {"states", v.states}});
  doc["parents"] = json::object();
  for (const auto& v : spec.variables) {
    auto it = spec.parents.find(v.name);
    doc["parents"][v.name] = it == spec.parents.end() ? std::vector<std::string>{} : it->second;
  }
  doc["cpts"] = json::object();
  for (const auto& v : spec.variables) {
    auto& rows = doc["cpts"][v.name] = json::array();
    auto it = spec.cpts.find(v.name);
    if (it == spec.cpts.end()) continue;
    for (const auto& row : it->second) {
      json r;
      if (!row.given.empty()) {
        r["given"] = json::object();
        for (const auto& [k, s] : row.given) r["given"][k] = s;
      }
      r[row_key] = row.p;
      rows.push_back(std::move(r));
    }
  }
  return doc;
}

inline json to_json(const CausalModel& model) { return to_json(model.to_spec()); }

/// Builds a model from a parsed document. On failure the thrown ModelError
/// carries only the first violation, with its path into the document.
inline CausalModel model_from_json(const json& doc, const Limits& limits = {}) {
  const auto spec = model_spec_from_json(doc);
  auto report = validate(spec, limits);
  if (!report.ok()) {
    report.issues.resize(1);
    throw ModelError(std::move(report));
  }
  return CausalModel::create(spec, limits);
}

inline CausalModel load_model(const std::filesystem::path& path, const Limits& limits = {}) {
  return model_from_json(read_json_file(path), limits);
}

inline void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

inline void save_model(const CausalModel& model, const std::filesystem::path& path) {
  write_json_file(to_json(model), path);
}

}  // namespace cdpu
