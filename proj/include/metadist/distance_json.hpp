#pragma once

#include <string>

#include <json.hpp>

#include "metadist/distance.hpp"
#include "metadist/domain_json.hpp"

namespace metadist {

// Distance-config files: {"p": number|"inf", "weights": {var: w},
// "theta_offsets": {var: t}, "categorical": {var: {"scale": s} |
// {"matrix": [[...]]}}}. Missing entries keep their defaults (w=1, t=0,
// indicator scale 1).

inline DistanceConfig distance_config_from_json(const RoleGraph& g, const nlohmann::json& j) {
  DistanceConfig cfg = DistanceConfig::defaults(g);
  if (j.contains("p")) {
    const auto& pj = j.at("p");
    if (pj.is_string() && pj.get<std::string>() == "inf") {
      cfg.p = kInf;
    } else if (pj.is_number()) {
      cfg.p = pj.get<double>();
    } else {
      throw ParseError("config: \"p\" must be a number or \"inf\"");
    }
  }
  if (j.contains("weights")) {
    for (const auto& [name, wj] : j.at("weights").items())
      cfg.weights[static_cast<std::size_t>(g.index_of(name))] = wj.get<double>();
  }
  if (j.contains("theta_offsets")) {
    for (const auto& [name, tj] : j.at("theta_offsets").items()) {
      const int v = g.index_of(name);
      if (!g.var(v).excludable)
        throw ValidationError("config: theta offset for non-excludable variable '" + name + "'");
      cfg.theta_offsets[static_cast<std::size_t>(v)] = tj.get<double>();
    }
  }
  if (j.contains("categorical")) {
    for (const auto& [name, cj] : j.at("categorical").items()) {
      const int v = g.index_of(name);
      if (g.var(v).kind != VariableKind::categorical)
        throw ValidationError("config: categorical spec for non-categorical variable '" + name +
                              "'");
      CategoricalDistanceSpec spec;
      if (cj.contains("scale")) {
        spec.scale = cj.at("scale").get<double>();
      } else if (cj.contains("matrix")) {
        spec.matrix = cj.at("matrix").get<std::vector<std::vector<double>>>();
      } else {
        throw ParseError("config: categorical spec for '" + name +
                         "' needs \"scale\" or \"matrix\"");
      }
      cfg.cat_specs[static_cast<std::size_t>(v)] = std::move(spec);
    }
  }
  cfg.validate(g);
  return cfg;
}

inline nlohmann::json distance_config_to_json(const RoleGraph& g, const DistanceConfig& cfg) {
  nlohmann::json j;
  j["p"] = std::isinf(cfg.p) ? nlohmann::json("inf") : nlohmann::json(cfg.p);
  j["weights"] = nlohmann::json::object();
  j["theta_offsets"] = nlohmann::json::object();
  nlohmann::json thetas = nlohmann::json::object();  // absolute values, informational
  for (int v = 0; v < g.size(); ++v) {
    j["weights"][g.var(v).name] = cfg.weights[static_cast<std::size_t>(v)];
    if (g.var(v).excludable) {
      j["theta_offsets"][g.var(v).name] = cfg.theta_offsets[static_cast<std::size_t>(v)];
      thetas[g.var(v).name] = theta_of(g, cfg, v);
    }
    if (g.var(v).kind == VariableKind::categorical) {
      const auto& spec = cfg.cat_specs[static_cast<std::size_t>(v)];
      if (spec.matrix) {
        j["categorical"][g.var(v).name] = {{"matrix", *spec.matrix}};
      } else {
        j["categorical"][g.var(v).name] = {{"scale", spec.scale}};
      }
    }
  }
  if (!thetas.empty()) j["theta"] = std::move(thetas);
  return j;
}

inline DistanceConfig load_distance_config(const RoleGraph& g, const std::string& path) {
  return distance_config_from_json(g, parse_json_file(path));
}

}  // namespace metadist
