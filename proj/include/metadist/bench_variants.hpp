#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "metadist/domain_json.hpp"
#include "metadist/graph.hpp"

namespace metadist {

// The five benchmark domains over MLP training hyperparameters. Two optimizer
// families share the layer/unit structure; unit-count bounds are [10, 200]
// under ASGD and [25, 300] under ADAM.

enum class Size { VS, S, M, L };
enum class Arch { MLP, CNN };

inline const char* to_string(Size s) {
  switch (s) {
    case Size::VS: return "VS";
    case Size::S: return "S";
    case Size::M: return "M";
    case Size::L: return "L";
  }
  return "?";
}

inline const char* to_string(Arch a) { return a == Arch::MLP ? "MLP" : "CNN"; }

inline Size size_from_string(const std::string& s) {
  if (s == "VS") return Size::VS;
  if (s == "S") return Size::S;
  if (s == "M") return Size::M;
  if (s == "L") return Size::L;
  throw ParseError("unknown size '" + s + "' (expected VS, S, M or L)");
}

inline Arch arch_from_string(const std::string& s) {
  if (s == "MLP") return Arch::MLP;
  if (s == "CNN") return Arch::CNN;
  throw ParseError("unknown architecture '" + s + "' (expected MLP or CNN)");
}

namespace detail {

inline nlohmann::json jvar(const std::string& name, const std::string& kind,
                           nlohmann::json universal, bool excludable) {
  return {{"name", name}, {"kind", kind}, {"universal", std::move(universal)},
          {"excludable", excludable}};
}

inline nlohmann::json jarc(const std::string& parent, const std::string& child,
                           const std::string& kind) {
  return {{"parent", parent}, {"child", child}, {"kind", kind}};
}

inline nlohmann::json jcase(nlohmann::json when, nlohmann::json set) {
  return {{"when", std::move(when)}, {"set", std::move(set)}};
}

}  // namespace detail

/// Domain-spec JSON of one benchmark variant (1..5).
inline nlohmann::json variant_domain_json(int id) {
  using nlohmann::json;
  using detail::jarc;
  using detail::jcase;
  using detail::jvar;

  const json asgd_units = {{"range", {10, 200}}};
  const json adam_units = {{"range", {25, 300}}};
  const json unit01 = {{"interval", {0, 1}}, {"open", {true, true}}};

  json j;
  j["variables"] = json::array();
  j["arcs"] = json::array();
  j["rules"] = json::array();

  if (id == 1 || id == 2) {
    // Fixed ASGD optimizer; the layer count is a free meta variable.
    j["variables"].push_back(jvar("l", "int", {{"range", {1, 3}}}, false));
    j["variables"].push_back(jvar("r", "cont", unit01, false));
    j["variables"].push_back(jvar("u1", "int", asgd_units, false));
    j["variables"].push_back(jvar("u2", "int", asgd_units, true));
    j["variables"].push_back(jvar("u3", "int", asgd_units, true));
    if (id == 2)
      for (const char* name : {"alpha1", "alpha2", "alpha3"})
        j["variables"].push_back(jvar(name, "cont", unit01, false));
    for (const char* unit : {"u1", "u2", "u3"}) j["arcs"].push_back(jarc("l", unit, "inclusion"));
    j["rules"].push_back(
        {{"child", "u1"},
         {"cases", {jcase({{"l", {{"ints", {1, 2, 3}}}}}, asgd_units)}}});
    j["rules"].push_back({{"child", "u2"},
                          {"cases",
                           {jcase({{"l", {{"ints", {2, 3}}}}}, asgd_units),
                            jcase({{"l", {{"ints", {1}}}}}, "EXC")}}});
    j["rules"].push_back({{"child", "u3"},
                          {"cases",
                           {jcase({{"l", {{"ints", {3}}}}}, asgd_units),
                            jcase({{"l", {{"ints", {1, 2}}}}}, "EXC")}}});
    return j;
  }
  if (id < 1 || id > 5) throw ValidationError("variant id must be in 1..5");

  const json asgd = {{"cats", {"ASGD"}}};
  const json adam = {{"cats", {"ADAM"}}};
  const bool three_layers = id >= 4;  // ADAM admits a third layer from variant 4 on

  j["variables"].push_back(jvar("o", "cat", {{"cats", {"ASGD", "ADAM"}}}, false));
  j["variables"].push_back(
      jvar("l", "int", {{"range", {1, three_layers ? 3 : 2}}}, false));
  j["variables"].push_back(jvar("r", "cont", unit01, false));
  j["variables"].push_back(jvar("u1", "int", {{"range", {10, 300}}}, false));
  j["variables"].push_back(jvar("u2", "int", {{"range", {10, 300}}}, true));
  if (three_layers) j["variables"].push_back(jvar("u3", "int", adam_units, true));
  for (const char* name : {"alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3"})
    j["variables"].push_back(jvar(name, "cont", unit01, true));
  if (id == 5) j["variables"].push_back(jvar("rho", "cont", {{"interval", {0, 0.5}}}, false));

  if (three_layers) j["arcs"].push_back(jarc("o", "l", "values"));
  j["arcs"].push_back(jarc("o", "u1", "values"));
  j["arcs"].push_back(jarc("o", "u2", "values"));
  j["arcs"].push_back(jarc("l", "u1", "inclusion"));
  j["arcs"].push_back(jarc("l", "u2", "inclusion"));
  if (three_layers) {
    j["arcs"].push_back(jarc("o", "u3", "values"));
    j["arcs"].push_back(jarc("l", "u3", "inclusion"));
  }
  for (const char* name : {"alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3"})
    j["arcs"].push_back(jarc("o", name, "inclusion"));
  if (id == 5) {
    j["arcs"].push_back(jarc("l", "rho", "values"));
    for (const char* unit : {"u1", "u2", "u3"}) j["arcs"].push_back(jarc(unit, "rho", "values"));
  }

  if (three_layers)
    j["rules"].push_back({{"child", "l"},
                          {"cases",
                           {jcase({{"o", asgd}}, {{"ints", {1, 2}}}),
                            jcase({{"o", adam}}, {{"ints", {1, 2, 3}}})}}});
  j["rules"].push_back({{"child", "u1"},
                        {"cases",
                         {jcase({{"o", asgd}}, asgd_units),
                          jcase({{"o", adam}}, adam_units)}}});
  {
    json cases = json::array();
    const json upper = three_layers ? json({{"ints", {2, 3}}}) : json({{"ints", {2}}});
    cases.push_back(jcase({{"o", asgd}, {"l", upper}}, asgd_units));
    cases.push_back(jcase({{"o", adam}, {"l", upper}}, adam_units));
    cases.push_back(jcase({{"l", {{"ints", {1}}}}}, "EXC"));
    j["rules"].push_back({{"child", "u2"}, {"cases", cases}});
  }
  if (three_layers) {
    // The (ASGD, l=3) combination is unreachable but the case table still
    // covers it to stay exhaustive over the universal values.
    j["rules"].push_back({{"child", "u3"},
                          {"cases",
                           {jcase({{"o", adam}, {"l", {{"ints", {3}}}}}, adam_units),
                            jcase({{"o", asgd}, {"l", {{"ints", {3}}}}}, "EXC"),
                            jcase({{"l", {{"ints", {1, 2}}}}}, "EXC")}}});
  }
  for (const char* name : {"alpha1", "alpha2", "alpha3"})
    j["rules"].push_back({{"child", name},
                          {"cases", {jcase({{"o", asgd}}, unit01), jcase({{"o", adam}}, "EXC")}}});
  for (const char* name : {"beta1", "beta2", "beta3"})
    j["rules"].push_back({{"child", name},
                          {"cases", {jcase({{"o", adam}}, unit01), jcase({{"o", asgd}}, "EXC")}}});
  if (id == 5) {
    j["rules"].push_back(
        {{"child", "rho"},
         {"cases", {jcase(json::object(),
                          {{"interval_expr", {"0", "sum(u1,u2,u3)/(2*tau_max)"}}})}}});
    j["constants"] = {{{"name", "tau_max"}, {"max_of", "sum(u1,u2,u3)"}}};
  }
  return j;
}

inline RoleGraph build_variant(int id) {
  return RoleGraph::build(graph_spec_from_json(variant_domain_json(id)));
}

/// Per-signature dataset sizes (rows of the size table); signatures are
/// ordered as enumerated: by optimizer, then by layer count.
inline std::vector<int> signature_sample_sizes(int variant, Size size) {
  std::vector<int> base;
  switch (variant) {
    case 1: base = {20, 30, 40}; break;
    case 2: base = {50, 60, 70}; break;
    case 3: base = {50, 60, 50, 60}; break;
    case 4: base = {50, 60, 50, 60, 70}; break;
    case 5: base = {60, 70, 60, 70, 80}; break;
    default: throw ValidationError("variant id must be in 1..5");
  }
  int num = 2, den = 2;  // size multipliers 1, 1.5, 2, 2.5
  switch (size) {
    case Size::VS: num = 2; break;
    case Size::S: num = 3; break;
    case Size::M: num = 4; break;
    case Size::L: num = 5; break;
  }
  for (auto& n : base) n = n * num / den;
  return base;
}

inline int total_sample_size(int variant, Size size) {
  int total = 0;
  for (const int n : signature_sample_sizes(variant, size)) total += n;
  return total;
}

/// Hybrid partitioning: a single model for variants 1-2, one per optimizer
/// for variants 3-5.
inline std::vector<int> hybrid_partition_vars(const RoleGraph& g, int variant) {
  if (variant >= 3) return {g.index_of("o")};
  return {};
}

}  // namespace metadist
