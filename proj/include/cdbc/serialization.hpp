#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdbc/classical.hpp"
#include "cdbc/compose.hpp"
#include "cdbc/dynamics.hpp"

namespace cdbc {

using Json = nlohmann::ordered_json;

namespace detail {

inline void only_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw FormatError("not-an-object", std::string(what) + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw FormatError("unknown-key", std::string(what) + ": unknown key '" + k + "'");
}

inline const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw FormatError("missing-key", std::string(what) + ": missing '" + key + "'");
  return j.at(key);
}

inline std::string as_string(const Json& j, const std::string& what) {
  if (!j.is_string()) throw FormatError("bad-type", what + " must be a string");
  return j.get<std::string>();
}

inline TypeTag parse_tag(const Json& j, const std::string& what) {
  const std::string s = as_string(j, what);
  if (s == "ctrl") return TypeTag::Ctrl;
  if (s == "bool") return TypeTag::Bool;
  throw FormatError("bad-tag", what + ": expected \"ctrl\" or \"bool\", got \"" + s + "\"");
}

inline std::map<Id, Id> parse_id_map(const Json& j, const std::string& what) {
  if (!j.is_object()) throw FormatError("bad-type", what + " must be an object");
  std::map<Id, Id> out;
  for (const auto& [k, v] : j.items()) out.emplace(k, as_string(v, what + "." + k));
  return out;
}

inline Json id_map_json(const std::map<Id, Id>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

}  // namespace detail

// ---- circuits -------------------------------------------------------------

/// {"vars": {id: "ctrl"|"bool"}, "units": [id], "in_flows": {id: {"src": var,
/// "dst": unit}}, "out_flows": {id: {"src": unit, "dst": var}}, "sigma": [...]}
inline Json to_json(const Circuit& c) {
  Json j;
  j["vars"] = Json::object();
  for (const auto& [v, t] : c.vars()) j["vars"][v] = std::string(to_string(t));
  j["units"] = Json::array();
  for (const auto& u : c.units()) j["units"].push_back(u);
  j["in_flows"] = Json::object();
  for (const auto& [id, f] : c.in_flows()) j["in_flows"][id] = {{"src", f.var}, {"dst", f.unit}};
  j["out_flows"] = Json::object();
  for (const auto& [id, f] : c.out_flows()) j["out_flows"][id] = {{"src", f.unit}, {"dst", f.var}};
  j["sigma"] = Json::array();
  for (auto t : c.sigma_set()) j["sigma"].push_back(std::string(to_string(t)));
  return j;
}

inline RawCircuit raw_circuit_from_json(const Json& j) {
  detail::only_keys(j, {"vars", "units", "in_flows", "out_flows", "sigma"}, "circuit");
  RawCircuit raw;
  const Json& vars = detail::require(j, "vars", "circuit");
  if (!vars.is_object()) throw FormatError("bad-type", "vars must be an object");
  for (const auto& [v, t] : vars.items()) raw.vars.emplace(v, detail::parse_tag(t, "vars." + v));
  if (j.contains("units")) {
    if (!j["units"].is_array()) throw FormatError("bad-type", "units must be an array");
    for (const auto& u : j["units"])
      if (!raw.units.insert(detail::as_string(u, "unit id")).second)
        throw FormatError("duplicate-id", "unit listed twice");
  }
  auto flows = [&](const char* key, auto add) {
    if (!j.contains(key)) return;
    const Json& fs = j.at(key);
    if (!fs.is_object()) throw FormatError("bad-type", std::string(key) + " must be an object");
    for (const auto& [id, f] : fs.items()) {
      detail::only_keys(f, {"src", "dst"}, key);
      add(id, detail::as_string(detail::require(f, "src", key), id + ".src"),
          detail::as_string(detail::require(f, "dst", key), id + ".dst"));
    }
  };
  flows("in_flows", [&](const Id& id, const Id& s, const Id& d) { raw.in_flows.emplace(id, InFlow{s, d}); });
  flows("out_flows", [&](const Id& id, const Id& s, const Id& d) { raw.out_flows.emplace(id, OutFlow{s, d}); });
  if (j.contains("sigma")) {
    if (!j["sigma"].is_array()) throw FormatError("bad-type", "sigma must be an array");
    std::set<TypeTag> sigma;
    for (const auto& t : j["sigma"]) sigma.insert(detail::parse_tag(t, "sigma"));
    raw.sigma = sigma;
  }
  return raw;
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("parse-error", e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("io-error", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Circuit circuit_from_json(const Json& j) { return make_circuit(raw_circuit_from_json(j)); }

inline std::string serialize(const Circuit& c) { return dump(to_json(c)); }
inline Circuit deserialize(const std::string& text) { return circuit_from_json(parse_json(text)); }

// ---- morphisms ------------------------------------------------------------

inline Json to_json(const ComponentMaps& m) {
  return Json{{"vars", detail::id_map_json(m.vars)},
              {"units", detail::id_map_json(m.units)},
              {"in_flows", detail::id_map_json(m.in_flows)},
              {"out_flows", detail::id_map_json(m.out_flows)}};
}

/// The four maps of a morphism file; "src"/"dst" name circuit files and are
/// resolved by the caller.
inline ComponentMaps maps_from_json(const Json& j) {
  detail::only_keys(j, {"src", "dst", "vars", "units", "in_flows", "out_flows"}, "morphism");
  ComponentMaps m;
  auto get = [&](const char* key) {
    return j.contains(key) ? detail::parse_id_map(j.at(key), key) : std::map<Id, Id>{};
  };
  m.vars = get("vars");
  m.units = get("units");
  m.in_flows = get("in_flows");
  m.out_flows = get("out_flows");
  return m;
}

inline Json provenance_json(const Composite& c) {
  Json j = Json::object();
  for (const auto& [role, leg] : c.legs) j[role] = to_json(leg.maps());
  return j;
}

// ---- pairings and wiring --------------------------------------------------

inline Pairing pairing_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("bad-type", "pairing must be an array of [left, right]");
  Pairing p;
  for (const auto& pr : j) {
    if (!pr.is_array() || pr.size() != 2) throw FormatError("bad-type", "pair must be [left, right]");
    p.emplace_back(detail::as_string(pr[0], "pair"), detail::as_string(pr[1], "pair"));
  }
  return p;
}

inline Json to_json(const Pairing& p) {
  Json j = Json::array();
  for (const auto& [l, r] : p) j.push_back({l, r});
  return j;
}

inline std::vector<Slot> slots_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError("bad-type", std::string(what) + " must be an array");
  std::vector<Slot> out;
  for (const auto& s : j) {
    if (!s.is_object()) throw FormatError("bad-type", std::string(what) + " slot must be an object");
    Slot slot;
    for (const auto& [role, v] : s.items()) slot.emplace(role, detail::as_string(v, role));
    out.push_back(std::move(slot));
  }
  return out;
}

// ---- states and traces ----------------------------------------------------

/// {var: "*" | "0" | "1"}; 0/1 may also be given as numbers or booleans.
inline std::map<Id, Value> values_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("bad-type", "inputs must be an object");
  std::map<Id, Value> out;
  for (const auto& [k, v] : j.items()) {
    std::optional<Value> x;
    if (v.is_string()) x = parse_value(v.get<std::string>());
    else if (v.is_boolean()) x = from_bit(v.get<bool>());
    else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1))
      x = from_bit(v.get<int>() == 1);
    if (!x) throw FormatError("bad-value", "value of " + k + " must be \"*\", 0 or 1");
    out.emplace(k, *x);
  }
  return out;
}

inline Json to_json(const State& st) {
  Json j = Json::object();
  for (const auto& [v, x] : st.values) j[v] = std::string(to_string(x));
  return j;
}

inline Json step_json(const TraceStep& s) {
  Json ready = Json::array();
  for (const auto& u : s.ready) ready.push_back(u);
  return Json{{"t", s.state.time}, {"state", to_json(s.state)}, {"ready", ready}};
}

/// One JSON object per line, outcome last.
inline std::string format_trace_json_lines(const Trace& tr) {
  std::string out;
  for (const auto& s : tr.steps) out += step_json(s).dump() + "\n";
  Json last{{"outcome", std::string(to_string(tr.outcome))}, {"steps", tr.transitions()}};
  if (tr.conflict) last["conflict"] = *tr.conflict;
  return out + last.dump() + "\n";
}

// ---- NAND DAGs ------------------------------------------------------------

/// {"nodes": {id: "input"|"output"|"gate"}, "edges": [[src, dst], ...]}
inline Json to_json(const NandDag& d) {
  Json j;
  j["nodes"] = Json::object();
  for (const auto& [n, k] : d.nodes()) j["nodes"][n] = std::string(to_string(k));
  j["edges"] = Json::array();
  for (const auto& [a, b] : d.edges()) j["edges"].push_back({a, b});
  return j;
}

inline RawDag raw_dag_from_json(const Json& j) {
  detail::only_keys(j, {"nodes", "edges"}, "dag");
  RawDag raw;
  const Json& nodes = detail::require(j, "nodes", "dag");
  if (!nodes.is_object()) throw FormatError("bad-type", "nodes must be an object");
  for (const auto& [n, k] : nodes.items()) {
    auto kind = parse_node_kind(detail::as_string(k, "nodes." + n));
    if (!kind) throw FormatError("bad-kind", "node " + n + " has unknown kind");
    raw.nodes.emplace(n, *kind);
  }
  const Json& edges = detail::require(j, "edges", "dag");
  if (!edges.is_array()) throw FormatError("bad-type", "edges must be an array");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2) throw FormatError("bad-type", "edge must be [src, dst]");
    raw.edges.emplace_back(detail::as_string(e[0], "edge"), detail::as_string(e[1], "edge"));
  }
  return raw;
}

inline NandDag dag_from_json(const Json& j) { return make_dag(raw_dag_from_json(j)); }

}  // namespace cdbc
