#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "metadist/graph.hpp"

namespace metadist {

// Domain-spec files: JSON with top-level `variables`, `arcs`, `rules` and
// optional `constants`. Set-descriptors are one of
//   {"interval":[lo,hi],"open":[b,b]} | {"ints":[...]} | {"range":[lo,hi]}
//   | {"cats":[...]} | "EXC" | {"interval_expr":[lo_expr,hi_expr]}
// Interval endpoints accept the strings "inf" and "-inf".

namespace detail {

inline double endpoint_from_json(const nlohmann::json& j, const std::string& context) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParseError(context + ": interval endpoint must be a number, \"inf\" or \"-inf\"");
}

inline nlohmann::json endpoint_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace detail

inline SetDescriptor set_descriptor_from_json(const nlohmann::json& j, const std::string& context) {
  if (j.is_string()) {
    if (j.get<std::string>() == kExcToken) return SetDescriptor::exc();
    throw ParseError(context + ": unknown set descriptor string '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) throw ParseError(context + ": set descriptor must be an object or \"EXC\"");
  if (j.contains("interval")) {
    const auto& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2)
      throw ParseError(context + ": \"interval\" needs [lo, hi]");
    bool open_lo = false, open_hi = false;
    if (j.contains("open")) {
      const auto& open = j.at("open");
      if (!open.is_array() || open.size() != 2)
        throw ParseError(context + ": \"open\" needs [bool, bool]");
      open_lo = open[0].get<bool>();
      open_hi = open[1].get<bool>();
    }
    return SetDescriptor::interval(detail::endpoint_from_json(iv[0], context),
                                   detail::endpoint_from_json(iv[1], context), open_lo, open_hi);
  }
  if (j.contains("interval_expr")) {
    const auto& iv = j.at("interval_expr");
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_string() || !iv[1].is_string())
      throw ParseError(context + ": \"interval_expr\" needs [lo_expr, hi_expr] strings");
    return SetDescriptor::interval_expr(iv[0].get<std::string>(), iv[1].get<std::string>());
  }
  if (j.contains("ints")) {
    std::vector<std::int64_t> values;
    for (const auto& v : j.at("ints")) values.push_back(v.get<std::int64_t>());
    return SetDescriptor::int_list(std::move(values));
  }
  if (j.contains("range")) {
    const auto& r = j.at("range");
    if (!r.is_array() || r.size() != 2) throw ParseError(context + ": \"range\" needs [lo, hi]");
    return SetDescriptor::int_range(r[0].get<std::int64_t>(), r[1].get<std::int64_t>());
  }
  if (j.contains("cats")) {
    std::vector<std::string> labels;
    for (const auto& v : j.at("cats")) labels.push_back(v.get<std::string>());
    return SetDescriptor::cat_list(std::move(labels));
  }
  throw ParseError(context + ": set descriptor has no recognized key");
}

inline nlohmann::json set_descriptor_to_json(const SetDescriptor& d) {
  nlohmann::json j;
  switch (d.kind) {
    case SetDescriptor::Kind::exc: return kExcToken;
    case SetDescriptor::Kind::interval:
      j["interval"] = {detail::endpoint_to_json(d.lo), detail::endpoint_to_json(d.hi)};
      if (d.open_lo || d.open_hi) j["open"] = {d.open_lo, d.open_hi};
      return j;
    case SetDescriptor::Kind::interval_expr:
      j["interval_expr"] = {d.lo_expr, d.hi_expr};
      return j;
    case SetDescriptor::Kind::ints: j["ints"] = d.ints; return j;
    case SetDescriptor::Kind::range: j["range"] = {d.range_lo, d.range_hi}; return j;
    case SetDescriptor::Kind::cats: j["cats"] = d.cats; return j;
  }
  throw ParseError("corrupt set descriptor");
}

inline VariableKind kind_from_string(const std::string& s, const std::string& context) {
  if (s == "cont") return VariableKind::continuous;
  if (s == "int") return VariableKind::integer;
  if (s == "cat") return VariableKind::categorical;
  throw ParseError(context + ": unknown variable kind '" + s + "'");
}

inline ArcKind arc_kind_from_string(const std::string& s, const std::string& context) {
  if (s == "inclusion") return ArcKind::inclusion;
  if (s == "values") return ArcKind::values;
  if (s == "both") return ArcKind::both;
  throw ParseError(context + ": unknown arc kind '" + s + "'");
}

inline GraphSpec graph_spec_from_json(const nlohmann::json& j) {
  GraphSpec spec;
  if (!j.is_object() || !j.contains("variables"))
    throw ParseError("domain spec: missing \"variables\"");
  for (const auto& vj : j.at("variables")) {
    VariableSpec v;
    v.name = vj.at("name").get<std::string>();
    const std::string context = "variable '" + v.name + "'";
    v.kind = kind_from_string(vj.at("kind").get<std::string>(), context);
    v.universal = set_descriptor_from_json(vj.at("universal"), context);
    v.excludable = vj.value("excludable", false);
    spec.variables.push_back(std::move(v));
  }
  if (j.contains("arcs")) {
    for (const auto& aj : j.at("arcs")) {
      ArcSpec a;
      a.parent = aj.at("parent").get<std::string>();
      a.child = aj.at("child").get<std::string>();
      a.kind = arc_kind_from_string(aj.at("kind").get<std::string>(),
                                    "arc " + a.parent + " -> " + a.child);
      spec.arcs.push_back(std::move(a));
    }
  }
  if (j.contains("rules")) {
    for (const auto& rj : j.at("rules")) {
      RuleSpec r;
      r.child = rj.at("child").get<std::string>();
      for (const auto& cj : rj.at("cases")) {
        CaseSpec c;
        if (cj.contains("when")) {
          for (const auto& [parent, test] : cj.at("when").items())
            c.when.emplace_back(parent,
                                set_descriptor_from_json(
                                    test, "rule for '" + r.child + "', test on '" + parent + "'"));
        }
        c.set = set_descriptor_from_json(cj.at("set"), "rule for '" + r.child + "'");
        r.cases.push_back(std::move(c));
      }
      spec.rules.push_back(std::move(r));
    }
  }
  if (j.contains("constants")) {
    for (const auto& cj : j.at("constants")) {
      ConstantSpec c;
      c.name = cj.at("name").get<std::string>();
      c.max_of = cj.at("max_of").get<std::string>();
      spec.constants.push_back(std::move(c));
    }
  }
  return spec;
}

inline nlohmann::json graph_spec_to_json(const GraphSpec& spec) {
  nlohmann::json j;
  j["variables"] = nlohmann::json::array();
  for (const auto& v : spec.variables) {
    nlohmann::json vj;
    vj["name"] = v.name;
    vj["kind"] = to_string(v.kind);
    vj["universal"] = set_descriptor_to_json(v.universal);
    vj["excludable"] = v.excludable;
    j["variables"].push_back(std::move(vj));
  }
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : spec.arcs) {
    j["arcs"].push_back({{"parent", a.parent}, {"child", a.child}, {"kind", to_string(a.kind)}});
  }
  j["rules"] = nlohmann::json::array();
  for (const auto& r : spec.rules) {
    nlohmann::json rj;
    rj["child"] = r.child;
    rj["cases"] = nlohmann::json::array();
    for (const auto& c : r.cases) {
      nlohmann::json cj;
      cj["when"] = nlohmann::json::object();
      for (const auto& [parent, test] : c.when) cj["when"][parent] = set_descriptor_to_json(test);
      cj["set"] = set_descriptor_to_json(c.set);
      rj["cases"].push_back(std::move(cj));
    }
    j["rules"].push_back(std::move(rj));
  }
  if (!spec.constants.empty()) {
    j["constants"] = nlohmann::json::array();
    for (const auto& c : spec.constants)
      j["constants"].push_back({{"name", c.name}, {"max_of", c.max_of}});
  }
  return j;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return j;
}

inline GraphSpec load_graph_spec(const std::string& path) {
  return graph_spec_from_json(parse_json_file(path));
}

/// Loads, resolves and validates a domain-spec file.
inline RoleGraph load_domain(const std::string& path) {
  return RoleGraph::build(load_graph_spec(path));
}

}  // namespace metadist
