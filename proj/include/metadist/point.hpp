#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metadist/graph.hpp"
#include "metadist/rng.hpp"

namespace metadist {

/// A total assignment over all variables; excluded ones carry EXC.
struct ExtendedPoint {
  std::vector<Value> values;

  const Value& operator[](int v) const { return values[static_cast<std::size_t>(v)]; }
  Value& operator[](int v) { return values[static_cast<std::size_t>(v)]; }
  friend bool operator==(const ExtendedPoint& a, const ExtendedPoint& b) {
    return a.values == b.values;
  }
};

/// A partial assignment covering exactly the included variables.
struct Point {
  std::vector<std::optional<Value>> values;

  bool present(int v) const { return values[static_cast<std::size_t>(v)].has_value(); }
  const Value& at(int v) const { return *values[static_cast<std::size_t>(v)]; }
  void set(int v, const Value& value) { values[static_cast<std::size_t>(v)] = value; }
  friend bool operator==(const Point& a, const Point& b) { return a.values == b.values; }
};

inline Point make_point(const RoleGraph& g) {
  Point p;
  p.values.resize(static_cast<std::size_t>(g.size()));
  return p;
}

/// Checks membership in the extended domain: every variable's value must lie
/// in its restricted set given the values of its parents.
inline std::optional<std::string> check_extended(const RoleGraph& g, const ExtendedPoint& x) {
  if (x.values.size() != static_cast<std::size_t>(g.size()))
    return "extended point has " + std::to_string(x.values.size()) + " values, expected " +
           std::to_string(g.size());
  for (const int v : g.topological_order()) {
    ValueSet rs = ValueSet::exc();
    try {
      rs = g.restricted_set(v, [&](int p) { return &x[p]; });
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    const Value& value = x[v];
    const bool ok = value.is_exc() ? rs.is_exc_singleton() : rs.contains(value);
    if (!ok)
      return "variable '" + g.var(v).name + "' is outside its restricted set";
  }
  return std::nullopt;
}

inline void ensure_extended(const RoleGraph& g, const ExtendedPoint& x) {
  if (const auto problem = check_extended(g, x))
    throw ValidationError("invalid extended point: " + *problem);
}

/// The transfer mapping: completes a point with EXC entries for its excluded
/// variables. Rejects points that violate a decree rule.
inline ExtendedPoint extend(const RoleGraph& g, const Point& x) {
  if (x.values.size() != static_cast<std::size_t>(g.size()))
    throw ValidationError("point has the wrong number of slots");
  ExtendedPoint out;
  out.values.assign(static_cast<std::size_t>(g.size()), Value::exc());
  for (const int v : g.topological_order()) {
    const ValueSet rs = g.restricted_set(v, [&](int p) { return &out[p]; });
    if (rs.is_exc_singleton()) {
      if (x.present(v))
        throw ValidationError("point assigns excluded variable '" + g.var(v).name + "'");
      out[v] = Value::exc();
      continue;
    }
    if (!x.present(v))
      throw ValidationError("point misses included variable '" + g.var(v).name + "'");
    if (!rs.contains(x.at(v)))
      throw ValidationError("value of '" + g.var(v).name + "' is outside its restricted set");
    out[v] = x.at(v);
  }
  return out;
}

/// Inverse of the transfer mapping: drops exactly the EXC-valued variables.
inline Point project(const RoleGraph& g, const ExtendedPoint& x) {
  ensure_extended(g, x);
  Point out = make_point(g);
  for (int v = 0; v < g.size(); ++v)
    if (!x[v].is_exc()) out.set(v, x[v]);
  return out;
}

/// Samples a valid extended point uniformly per-coordinate: variables are
/// visited in topological order and drawn from their restricted sets.
inline ExtendedPoint sample_extended(const RoleGraph& g, Rng& rng) {
  ExtendedPoint out;
  out.values.assign(static_cast<std::size_t>(g.size()), Value::exc());
  for (const int v : g.topological_order()) {
    const ValueSet rs = g.restricted_set(v, [&](int p) { return &out[p]; });
    out[v] = rs.sample(rng);
  }
  return out;
}

/// Samples within a fixed signature: controllers take the fixing values,
/// everything else is drawn from its restricted set.
inline ExtendedPoint sample_in_signature(const RoleGraph& g, const SignatureSet& sigs,
                                         int signature, Rng& rng) {
  const Signature& sig = sigs[static_cast<std::size_t>(signature)];
  ExtendedPoint out;
  out.values.assign(static_cast<std::size_t>(g.size()), Value::exc());
  std::vector<char> fixed(static_cast<std::size_t>(g.size()), 0);
  for (std::size_t i = 0; i < sigs.controllers().size(); ++i) {
    out[sigs.controllers()[i]] = sig.fixing[i];
    fixed[static_cast<std::size_t>(sigs.controllers()[i])] = 1;
  }
  for (const int v : g.topological_order()) {
    if (fixed[static_cast<std::size_t>(v)]) continue;
    const ValueSet rs = g.restricted_set(v, [&](int p) { return &out[p]; });
    out[v] = rs.sample(rng);
  }
  return out;
}

}  // namespace metadist
