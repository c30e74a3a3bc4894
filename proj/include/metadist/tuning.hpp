#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "metadist/models.hpp"
#include "metadist/rng.hpp"

namespace metadist {

// ---------------------------------------------------------------------------
// Parameter space.
// ---------------------------------------------------------------------------

struct ParamDim {
  enum class Type { continuous, integer };
  enum class Transform { identity, log10, theta_offset };
  enum class Target { weight, theta, knn_k };

  std::string name;
  Type type = Type::continuous;
  double lo = 0.0, hi = 1.0;  // internal box
  Transform transform = Transform::identity;
  Target target = Target::weight;
  int route = 0;
  int variable = -1;
};

struct ParameterSpace {
  std::vector<ParamDim> dims;
  int size() const { return static_cast<int>(dims.size()); }
};

/// Count of distance parameters for an approach on a domain: one weight per
/// routed variable plus, for the meta approach, one exclusion cost per
/// excludable variable.
inline int parameter_count(const RoutedDistance& rd) {
  int count = 0;
  for (int route = 0; route < rd.route_count(); ++route)
    count += static_cast<int>(rd.route_variables(route).size());
  if (rd.approach() == Approach::meta)
    for (int v = 0; v < rd.graph().size(); ++v)
      if (rd.graph().var(v).excludable) ++count;
  return count;
}

inline int parameter_count(const RoleGraph& g, Approach approach,
                           std::vector<int> partition_vars = {}) {
  return parameter_count(RoutedDistance::make(g, approach, std::move(partition_vars)));
}

/// Weights search a log-scaled box [1e-3, 1e3]; theta offsets a linear box
/// [0, diameter]; the KNN neighbour count an integer box [1, min(25, n)].
inline ParameterSpace build_parameter_space(const RoutedDistance& rd, bool tune_k = false,
                                            int train_size = 0) {
  ParameterSpace space;
  const RoleGraph& g = rd.graph();
  for (int route = 0; route < rd.route_count(); ++route) {
    for (const int v : rd.route_variables(route)) {
      ParamDim d;
      d.name = "w:" + std::to_string(route) + ":" + g.var(v).name;
      d.lo = -3.0;
      d.hi = 3.0;
      d.transform = ParamDim::Transform::log10;
      d.target = ParamDim::Target::weight;
      d.route = route;
      d.variable = v;
      space.dims.push_back(std::move(d));
    }
  }
  if (rd.approach() == Approach::meta) {
    for (int v = 0; v < g.size(); ++v) {
      if (!g.var(v).excludable) continue;
      double diameter = 0.0;
      if (g.var(v).kind == VariableKind::categorical) {
        diameter = g.var(v).labels.size() > 1 ? 1.0 : 0.0;
      } else {
        diameter = g.var(v).universal.numeric_diameter();
      }
      if (std::isinf(diameter)) continue;  // theta is pinned at infinity
      ParamDim d;
      d.name = "t:0:" + g.var(v).name;
      d.lo = 0.0;
      d.hi = std::max(diameter, 1e-6);
      d.transform = ParamDim::Transform::theta_offset;
      d.target = ParamDim::Target::theta;
      d.route = 0;
      d.variable = v;
      space.dims.push_back(std::move(d));
    }
  }
  if (tune_k) {
    ParamDim d;
    d.name = "k";
    d.type = ParamDim::Type::integer;
    d.lo = 1.0;
    d.hi = static_cast<double>(std::max(1, std::min(25, train_size)));
    d.target = ParamDim::Target::knn_k;
    space.dims.push_back(std::move(d));
  }
  return space;
}

/// Writes a parameter vector into the routed-distance configs (and K).
inline void apply_parameters(const ParameterSpace& space, const std::vector<double>& params,
                             RoutedDistance& rd, int* k = nullptr) {
  for (std::size_t i = 0; i < space.dims.size(); ++i) {
    const ParamDim& d = space.dims[i];
    const double x = params[i];
    switch (d.target) {
      case ParamDim::Target::weight: {
        const double w = d.transform == ParamDim::Transform::log10 ? std::pow(10.0, x) : x;
        rd.config(d.route).weights[static_cast<std::size_t>(d.variable)] = w;
        if (rd.graph().var(d.variable).kind == VariableKind::categorical) {
          // The weight doubles as the categorical scale under the indicator
          // distance; nothing extra to set.
        }
        break;
      }
      case ParamDim::Target::theta:
        rd.config(d.route).theta_offsets[static_cast<std::size_t>(d.variable)] = x;
        break;
      case ParamDim::Target::knn_k:
        if (k) *k = static_cast<int>(std::llround(x));
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Latin hypercube sampling.
// ---------------------------------------------------------------------------

/// Stratified sampling: each dimension's draws land in distinct equal-width
/// strata; integer dimensions are floored after stratifying over [lo, hi+1).
inline std::vector<std::vector<double>> lhs_sample(const ParameterSpace& space, int count,
                                                   Rng& rng) {
  if (count < 1) throw ValidationError("LHS needs a positive sample count");
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(count),
                                           std::vector<double>(space.dims.size()));
  for (std::size_t d = 0; d < space.dims.size(); ++d) {
    std::vector<int> perm(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    const ParamDim& dim = space.dims[d];
    const bool integer = dim.type == ParamDim::Type::integer;
    const double lo = dim.lo;
    const double hi = integer ? dim.hi + 1.0 : dim.hi;
    for (int i = 0; i < count; ++i) {
      const double stratum = (static_cast<double>(perm[static_cast<std::size_t>(i)]) +
                              rng.uniform01()) /
                             static_cast<double>(count);
      double x = lo + (hi - lo) * stratum;
      if (integer) x = std::min(std::floor(x), dim.hi);
      samples[static_cast<std::size_t>(i)][d] = x;
    }
  }
  return samples;
}

// ---------------------------------------------------------------------------
// Generalized pattern search.
// ---------------------------------------------------------------------------

struct PatternSearchResult {
  std::vector<double> best;
  double best_value = 0.0;
  long evals = 0;
  bool mesh_converged = false;
};

/// Coordinate poll with 2n directions scaled by a mesh fraction of each box
/// width; the mesh doubles after a successful poll and halves after a failed
/// one. Candidates are clamped into the box. Stops when the budget is spent
/// or the mesh drops below 1e-9.
inline PatternSearchResult pattern_search(
    const std::function<double(const std::vector<double>&)>& objective,
    const ParameterSpace& space, const std::vector<double>& start, long budget,
    double initial_mesh = 0.25) {
  if (budget < 1) throw ValidationError("pattern search needs a positive budget");
  PatternSearchResult result;
  result.best = start;
  result.best_value = objective(start);
  result.evals = 1;
  if (!std::isfinite(result.best_value))
    throw ValidationError("objective is not finite at the start point");

  const std::size_t n = space.dims.size();
  double mesh = initial_mesh;
  while (result.evals < budget && mesh >= 1e-9) {
    std::vector<double> poll_best;
    double poll_best_value = result.best_value;
    for (std::size_t d = 0; d < 2 * n && result.evals < budget; ++d) {
      const std::size_t axis = d / 2;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      const ParamDim& dim = space.dims[axis];
      double step = mesh * (dim.hi - dim.lo);
      if (dim.type == ParamDim::Type::integer) step = std::max(1.0, std::round(step));
      std::vector<double> candidate = result.best;
      candidate[axis] = std::clamp(candidate[axis] + sign * step, dim.lo, dim.hi);
      if (dim.type == ParamDim::Type::integer)
        candidate[axis] = std::clamp(std::round(candidate[axis]), dim.lo, dim.hi);
      const double value = objective(candidate);
      ++result.evals;
      if (value < poll_best_value) {
        poll_best_value = value;
        poll_best = std::move(candidate);
      }
    }
    if (!poll_best.empty()) {
      result.best = std::move(poll_best);
      result.best_value = poll_best_value;
      mesh = std::min(mesh * 2.0, 1.0);
    } else {
      mesh *= 0.5;
    }
  }
  result.mesh_converged = mesh < 1e-9;
  return result;
}

// ---------------------------------------------------------------------------
// Tuning driver: LHS initialization followed by pattern search.
// ---------------------------------------------------------------------------

struct TuneTracePoint {
  long k = 0;             // evaluation index of the improvement (1-based)
  double objective = 0.0;  // best-so-far objective value
  double test_metric = 0.0;
};

struct TuneResult {
  std::vector<double> best_params;
  double best_objective = 0.0;
  std::vector<TuneTracePoint> trace;  // one entry per improvement
  long evals = 0;
  long budget = 0;
  int n_params = 0;
};

/// Spends ceil(33%) of the budget on Latin hypercube sampling and the rest on
/// pattern search from the sampling incumbent. The number of objective calls
/// equals the budget exactly: when the mesh collapses early, the search
/// restarts from the incumbent with a fresh mesh. The test metric is
/// evaluated only when the objective improves.
inline TuneResult tune(const ParameterSpace& space,
                       const std::function<double(const std::vector<double>&)>& objective,
                       const std::function<double(const std::vector<double>&)>& test_metric,
                       long budget, std::uint64_t seed) {
  if (budget < 1) throw ValidationError("tune needs a positive budget");
  TuneResult result;
  result.budget = budget;
  result.n_params = space.size();
  result.best_objective = kInf;

  long evals = 0;
  const auto record = [&](const std::vector<double>& params, double value) {
    ++evals;
    if (value < result.best_objective) {
      result.best_objective = value;
      result.best_params = params;
      result.trace.push_back({evals, value, test_metric(params)});
    }
    return value;
  };

  const long lhs_budget = std::min<long>(
      budget, static_cast<long>(std::ceil(0.33 * static_cast<double>(budget))));
  Rng rng = substream(seed, "tuner-lhs");
  const auto samples = lhs_sample(space, static_cast<int>(std::max<long>(1, lhs_budget)), rng);
  for (const auto& params : samples) {
    if (evals >= budget) break;
    record(params, objective(params));
  }

  while (evals < budget) {
    const long remaining = budget - evals;
    const auto counted = [&](const std::vector<double>& params) {
      return record(params, objective(params));
    };
    pattern_search(counted, space, result.best_params, remaining);
  }

  result.evals = evals;
  return result;
}

}  // namespace metadist
