#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "metadist/graph.hpp"
#include "metadist/point.hpp"

namespace metadist {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Distance between two categories: a scaled indicator by default, or a full
/// symmetric matrix validated as a metric over the label set.
struct CategoricalDistanceSpec {
  double scale = 1.0;
  std::optional<std::vector<std::vector<double>>> matrix;

  double operator()(std::int32_t a, std::int32_t b) const {
    if (a == b) return 0.0;
    if (matrix)
      return (*matrix)[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    return scale;
  }

  double diameter(std::size_t n_labels) const {
    if (!matrix) return n_labels > 1 ? scale : 0.0;
    double best = 0.0;
    for (const auto& row : *matrix)
      for (const double d : row) best = std::max(best, d);
    return best;
  }

  void validate(std::size_t n_labels) const {
    if (!matrix) {
      if (scale <= 0.0) throw ValidationError("categorical scale must be positive");
      return;
    }
    const auto& m = *matrix;
    if (m.size() != n_labels) throw ValidationError("categorical matrix has the wrong size");
    for (std::size_t i = 0; i < n_labels; ++i) {
      if (m[i].size() != n_labels) throw ValidationError("categorical matrix is not square");
      if (m[i][i] != 0.0) throw ValidationError("categorical matrix must have a zero diagonal");
      for (std::size_t j = 0; j < n_labels; ++j) {
        if (m[i][j] != m[j][i]) throw ValidationError("categorical matrix must be symmetric");
        if (i != j && m[i][j] <= 0.0)
          throw ValidationError("categorical matrix off-diagonals must be positive");
        for (std::size_t k = 0; k < n_labels; ++k)
          if (m[i][j] > m[i][k] + m[k][j] + 1e-15)
            throw ValidationError("categorical matrix violates the triangle inequality");
      }
    }
  }
};

/// Per-variable parameters of the meta distance. theta is stored as a
/// nonnegative offset above its lower bound, so every representable config
/// satisfies the exclusion-cost constraint by construction.
struct DistanceConfig {
  double p = 2.0;  // order of the aggregation norm; infinity selects the max
  std::vector<double> weights;        // omega, one per variable, > 0
  std::vector<double> theta_offsets;  // >= 0, meaningful for excludable variables
  std::vector<CategoricalDistanceSpec> cat_specs;  // one per variable (used when categorical)

  static DistanceConfig defaults(const RoleGraph& g, double p = 2.0) {
    DistanceConfig cfg;
    cfg.p = p;
    cfg.weights.assign(static_cast<std::size_t>(g.size()), 1.0);
    cfg.theta_offsets.assign(static_cast<std::size_t>(g.size()), 0.0);
    cfg.cat_specs.assign(static_cast<std::size_t>(g.size()), {});
    return cfg;
  }

  void validate(const RoleGraph& g) const {
    if (!(p >= 1.0)) throw ValidationError("distance order p must satisfy p >= 1");
    if (weights.size() != static_cast<std::size_t>(g.size()) ||
        theta_offsets.size() != static_cast<std::size_t>(g.size()) ||
        cat_specs.size() != static_cast<std::size_t>(g.size()))
      throw ValidationError("distance config does not match the domain's variables");
    for (int v = 0; v < g.size(); ++v) {
      if (!(weights[static_cast<std::size_t>(v)] > 0.0))
        throw ValidationError("weight of '" + g.var(v).name + "' must be positive");
      if (theta_offsets[static_cast<std::size_t>(v)] < 0.0)
        throw ValidationError("theta offset of '" + g.var(v).name + "' must be nonnegative");
      if (g.var(v).kind == VariableKind::categorical)
        cat_specs[static_cast<std::size_t>(v)].validate(g.var(v).labels.size());
    }
  }
};

/// One-dimensional distance for an included pair: omega-scaled absolute
/// difference, or the categorical spec.
inline double one_dim_distance(const RoleGraph& g, const DistanceConfig& cfg, int v,
                               const Value& u, const Value& w) {
  if (u.is_exc() || w.is_exc())
    throw ValidationError("one-dimensional distance is undefined for EXC");
  if (!g.in_universal(v, u) || !g.in_universal(v, w))
    throw ValidationError("value outside the universal set of '" + g.var(v).name + "'");
  const double omega = cfg.weights[static_cast<std::size_t>(v)];
  switch (g.var(v).kind) {
    case VariableKind::continuous: return omega * std::abs(u.as_real() - w.as_real());
    case VariableKind::integer:
      return omega * std::abs(static_cast<double>(u.as_integer() - w.as_integer()));
    case VariableKind::categorical:
      return omega * cfg.cat_specs[static_cast<std::size_t>(v)](u.as_category(), w.as_category());
  }
  throw ValidationError("corrupt variable kind");
}

/// Half the diameter of the universal set without EXC, under the current
/// weights; infinity for unbounded sets. The exclusion cost theta may not go
/// below this value.
inline double theta_lower_bound(const RoleGraph& g, const DistanceConfig& cfg, int v) {
  if (!g.var(v).excludable)
    throw ValidationError("variable '" + g.var(v).name + "' is not excludable");
  const double omega = cfg.weights[static_cast<std::size_t>(v)];
  double diameter = 0.0;
  if (g.var(v).kind == VariableKind::categorical) {
    diameter = cfg.cat_specs[static_cast<std::size_t>(v)].diameter(g.var(v).labels.size());
  } else {
    diameter = g.var(v).universal.numeric_diameter();
  }
  return omega * diameter / 2.0;
}

inline double theta_of(const RoleGraph& g, const DistanceConfig& cfg, int v) {
  const double lb = theta_lower_bound(g, cfg, v);
  if (std::isinf(lb)) return kInf;
  return lb + cfg.theta_offsets[static_cast<std::size_t>(v)];
}

/// The included-excluded distance: the one-dimensional distance when both
/// values are included, zero when both are excluded, theta otherwise.
inline double inc_exc_distance(const RoleGraph& g, const DistanceConfig& cfg, int v,
                               const Value& u, const Value& w) {
  const bool u_exc = u.is_exc();
  const bool w_exc = w.is_exc();
  if (!u_exc && !w_exc) return one_dim_distance(g, cfg, v, u, w);
  if (u_exc && w_exc) return 0.0;
  if (!g.var(v).excludable)
    throw ValidationError("EXC value for non-excludable variable '" + g.var(v).name + "'");
  return theta_of(g, cfg, v);
}

namespace detail {

/// Kahan-compensated accumulator; keeps coordinate sums accurate enough for
/// the 1e-12 triangle-inequality tolerance at realistic magnitudes.
struct CompensatedSum {
  double total = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
};

/// p-norm of nonnegative coordinates, max-scaled against overflow for large p.
inline double p_norm(const std::vector<double>& coords, double p) {
  double peak = 0.0;
  for (const double d : coords) {
    if (std::isinf(d)) return kInf;
    peak = std::max(peak, d);
  }
  if (std::isinf(p) || peak == 0.0) return peak;
  CompensatedSum total;
  if (p == 1.0) {
    for (const double d : coords) total.add(d);
    return total.total;
  }
  if (p == 2.0) {
    for (const double d : coords) {
      const double s = d / peak;
      total.add(s * s);
    }
    return peak * std::sqrt(total.total);
  }
  for (const double d : coords) total.add(std::pow(d / peak, p));
  return peak * std::pow(total.total, 1.0 / p);
}

}  // namespace detail

/// The meta distance on the extended domain: the p-norm of the per-variable
/// included-excluded distances (the supremum distance when p is infinite).
inline double meta_distance(const RoleGraph& g, const DistanceConfig& cfg, const ExtendedPoint& x,
                            const ExtendedPoint& y) {
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(g.size()));
  for (int v = 0; v < g.size(); ++v) coords.push_back(inc_exc_distance(g, cfg, v, x[v], y[v]));
  return detail::p_norm(coords, cfg.p);
}

/// The distance induced on the domain through the transfer mapping.
inline double induced_distance(const RoleGraph& g, const DistanceConfig& cfg, const Point& x,
                               const Point& y) {
  return meta_distance(g, cfg, extend(g, x), extend(g, y));
}

/// Whether two extended points share an inclusion signature: identical
/// exclusion pattern and identical values on every inclusion controller.
inline bool same_signature(const RoleGraph& g, const ExtendedPoint& x, const ExtendedPoint& y) {
  for (int v = 0; v < g.size(); ++v) {
    if (x[v].is_exc() != y[v].is_exc()) return false;
    if (g.controls_inclusion(v) && x[v] != y[v]) return false;
  }
  return true;
}

/// Baseline used by the subproblem approach: the weighted Euclidean distance
/// over the (shared) included variables of two same-signature points.
inline double sub_distance(const RoleGraph& g, const DistanceConfig& cfg, const ExtendedPoint& x,
                           const ExtendedPoint& y) {
  if (!same_signature(g, x, y))
    throw CrossSignatureError("sub distance requires identical inclusion signatures");
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(g.size()));
  for (int v = 0; v < g.size(); ++v) {
    if (x[v].is_exc()) continue;
    coords.push_back(one_dim_distance(g, cfg, v, x[v], y[v]));
  }
  return detail::p_norm(coords, 2.0);
}

/// Baseline following the variable-size framework: the inclusion-controlling
/// (dimensional) variables select the structure and are not compared; every
/// other variable contributes when included in both points and nothing
/// otherwise. Admits distinct points at distance zero, which is the contrast
/// motivating the meta distance.
inline double hybrid_distance(const RoleGraph& g, const DistanceConfig& cfg,
                              const ExtendedPoint& x, const ExtendedPoint& y) {
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(g.size()));
  for (int v = 0; v < g.size(); ++v) {
    if (g.controls_inclusion(v)) continue;
    if (x[v].is_exc() || y[v].is_exc()) continue;
    coords.push_back(one_dim_distance(g, cfg, v, x[v], y[v]));
  }
  return detail::p_norm(coords, cfg.p);
}

}  // namespace metadist
