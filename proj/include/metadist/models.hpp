#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "metadist/distance.hpp"
#include "metadist/graph.hpp"
#include "metadist/point.hpp"

namespace metadist {

enum class Approach { meta, sub, hybrid };

inline const char* to_string(Approach a) {
  switch (a) {
    case Approach::meta: return "meta";
    case Approach::sub: return "sub";
    case Approach::hybrid: return "hybrid";
  }
  return "?";
}

inline Approach approach_from_string(const std::string& s) {
  if (s == "meta") return Approach::meta;
  if (s == "sub") return Approach::sub;
  if (s == "hybrid") return Approach::hybrid;
  throw ParseError("unknown approach '" + s + "'");
}

/// Distance evaluation with routing. Meta uses a single model over all data;
/// Sub routes by inclusion signature with one config per signature; Hybrid
/// routes by the values of the configured partition variables with one config
/// per partition.
class RoutedDistance {
 public:
  static RoutedDistance make(const RoleGraph& g, Approach approach,
                             std::vector<int> partition_vars = {}) {
    RoutedDistance rd;
    rd.g_ = &g;
    rd.approach_ = approach;
    rd.sigs_ = SignatureSet::enumerate(g);
    rd.partition_vars_ = std::move(partition_vars);
    switch (approach) {
      case Approach::meta:
        rd.route_of_signature_.assign(rd.sigs_.size(), 0);
        rd.n_routes_ = 1;
        break;
      case Approach::sub: {
        rd.route_of_signature_.resize(rd.sigs_.size());
        for (std::size_t s = 0; s < rd.sigs_.size(); ++s)
          rd.route_of_signature_[s] = static_cast<int>(s);
        rd.n_routes_ = static_cast<int>(rd.sigs_.size());
        break;
      }
      case Approach::hybrid: {
        // Group signatures by their values on the partition variables.
        std::map<std::vector<int>, int> keys;
        rd.route_of_signature_.resize(rd.sigs_.size());
        for (std::size_t s = 0; s < rd.sigs_.size(); ++s) {
          std::vector<int> key;
          for (const int pv : rd.partition_vars_) {
            const auto& ctrl = rd.sigs_.controllers();
            const auto it = std::find(ctrl.begin(), ctrl.end(), pv);
            if (it == ctrl.end())
              throw ValidationError("partition variable '" + g.var(pv).name +
                                    "' is not an inclusion controller");
            const Value& val = rd.sigs_[s].fixing[static_cast<std::size_t>(it - ctrl.begin())];
            key.push_back(val.is_exc() ? -1
                          : val.is_category()
                              ? val.as_category()
                              : static_cast<int>(val.as_integer()));
          }
          const auto [pos, inserted] = keys.emplace(key, static_cast<int>(keys.size()));
          rd.route_of_signature_[s] = pos->second;
        }
        rd.n_routes_ = static_cast<int>(keys.empty() ? 1 : keys.size());
        break;
      }
    }
    rd.configs_.assign(static_cast<std::size_t>(rd.n_routes_), DistanceConfig::defaults(g));
    return rd;
  }

  const RoleGraph& graph() const { return *g_; }
  Approach approach() const { return approach_; }
  const SignatureSet& signatures() const { return sigs_; }
  int route_count() const { return n_routes_; }
  int route_of_signature(int sig) const {
    return route_of_signature_[static_cast<std::size_t>(sig)];
  }
  DistanceConfig& config(int route) { return configs_[static_cast<std::size_t>(route)]; }
  const DistanceConfig& config(int route) const {
    return configs_[static_cast<std::size_t>(route)];
  }

  int signature_of(const ExtendedPoint& x) const { return sigs_.match(x.values); }

  int route_of(const ExtendedPoint& x) const {
    const int sig = signature_of(x);
    if (sig < 0) throw ValidationError("point matches no inclusion signature");
    return route_of_signature_[static_cast<std::size_t>(sig)];
  }

  double distance(int route, const ExtendedPoint& x, const ExtendedPoint& y) const {
    const auto& cfg = configs_[static_cast<std::size_t>(route)];
    switch (approach_) {
      case Approach::meta: return meta_distance(*g_, cfg, x, y);
      case Approach::sub: return sub_distance(*g_, cfg, x, y);
      case Approach::hybrid: return hybrid_distance(*g_, cfg, x, y);
    }
    throw ValidationError("corrupt approach");
  }

  /// Variables whose weight belongs to the given route's config.
  std::vector<int> route_variables(int route) const {
    std::vector<char> seen(static_cast<std::size_t>(g_->size()), 0);
    std::vector<int> out;
    for (std::size_t s = 0; s < sigs_.size(); ++s) {
      if (route_of_signature_[s] != route) continue;
      switch (approach_) {
        case Approach::meta:
          for (int v = 0; v < g_->size(); ++v)
            if (!seen[static_cast<std::size_t>(v)]) {
              seen[static_cast<std::size_t>(v)] = 1;
              out.push_back(v);
            }
          break;
        case Approach::sub:
          for (const int v : sigs_[s].free_vars)
            if (!seen[static_cast<std::size_t>(v)]) {
              seen[static_cast<std::size_t>(v)] = 1;
              out.push_back(v);
            }
          break;
        case Approach::hybrid:
          for (const int v : sigs_[s].free_vars)
            if (!g_->controls_inclusion(v) && !seen[static_cast<std::size_t>(v)]) {
              seen[static_cast<std::size_t>(v)] = 1;
              out.push_back(v);
            }
          break;
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const RoleGraph* g_ = nullptr;
  Approach approach_ = Approach::meta;
  SignatureSet sigs_;
  std::vector<int> partition_vars_;
  std::vector<int> route_of_signature_;
  int n_routes_ = 1;
  std::vector<DistanceConfig> configs_;
};

// ---------------------------------------------------------------------------
// Inverse distance weighting regression.
// ---------------------------------------------------------------------------

struct TrainedIdw {
  RoutedDistance model;
  std::vector<std::vector<ExtendedPoint>> points;  // per route
  std::vector<std::vector<double>> targets;        // per route
  double q = 2.0;       // Shepard exponent
  double global_mean = 0.0;
};

inline TrainedIdw fit_idw(RoutedDistance model, const std::vector<ExtendedPoint>& points,
                          const std::vector<double>& targets, double q = 2.0) {
  if (points.empty()) throw ValidationError("IDW needs at least one training point");
  if (points.size() != targets.size())
    throw ValidationError("training points and targets differ in length");
  if (!(q > 0.0)) throw ValidationError("IDW exponent q must be positive");
  TrainedIdw m;
  m.q = q;
  m.points.resize(static_cast<std::size_t>(model.route_count()));
  m.targets.resize(static_cast<std::size_t>(model.route_count()));
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(targets[i])) throw ValidationError("IDW targets must be finite");
    const auto route = static_cast<std::size_t>(model.route_of(points[i]));
    m.points[route].push_back(points[i]);
    m.targets[route].push_back(targets[i]);
    total += targets[i];
  }
  m.global_mean = total / static_cast<double>(points.size());
  m.model = std::move(model);
  return m;
}

inline double idw_predict(const TrainedIdw& m, const ExtendedPoint& x) {
  const int route = m.model.route_of(x);
  const auto& pts = m.points[static_cast<std::size_t>(route)];
  const auto& ys = m.targets[static_cast<std::size_t>(route)];
  if (pts.empty())
    throw UnseenSignatureError("no training data routed to this signature/partition");

  double hit_sum = 0.0;
  int hits = 0;
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = m.model.distance(route, x, pts[i]);
    if (d == 0.0) {
      hit_sum += ys[i];
      ++hits;
      continue;
    }
    if (hits > 0 || std::isinf(d)) continue;  // infinite distances carry no weight
    const double w = std::pow(d, -m.q);
    weight_sum += w;
    weighted += w * ys[i];
  }
  if (hits > 0) return hit_sum / hits;  // interpolate exactly at training points
  if (weight_sum == 0.0)
    throw ValidationError("all training points are at infinite distance from the query");
  return weighted / weight_sum;
}

/// Benchmark-path variant: unseen signatures score the global training mean.
inline double idw_predict_with_fallback(const TrainedIdw& m, const ExtendedPoint& x,
                                        bool* flagged = nullptr) {
  try {
    return idw_predict(m, x);
  } catch (const UnseenSignatureError&) {
    if (flagged) *flagged = true;
    return m.global_mean;
  }
}

// ---------------------------------------------------------------------------
// K-nearest-neighbour classification.
// ---------------------------------------------------------------------------

struct TrainedKnn {
  RoutedDistance model;
  std::vector<std::vector<ExtendedPoint>> points;  // per route
  std::vector<std::vector<int>> labels;            // per route
  int k = 1;
  int global_majority = 0;
};

inline TrainedKnn fit_knn(RoutedDistance model, const std::vector<ExtendedPoint>& points,
                          const std::vector<int>& labels, int k) {
  if (points.empty()) throw ValidationError("KNN needs at least one training point");
  if (points.size() != labels.size())
    throw ValidationError("training points and labels differ in length");
  if (k < 1) throw ValidationError("KNN needs K >= 1");
  TrainedKnn m;
  m.k = k;
  m.points.resize(static_cast<std::size_t>(model.route_count()));
  m.labels.resize(static_cast<std::size_t>(model.route_count()));
  std::map<int, int> counts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto route = static_cast<std::size_t>(model.route_of(points[i]));
    m.points[route].push_back(points[i]);
    m.labels[route].push_back(labels[i]);
    ++counts[labels[i]];
  }
  int best = 0, best_count = -1;
  for (const auto& [label, count] : counts)
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  m.global_majority = best;
  m.model = std::move(model);
  return m;
}

/// Majority vote among the K nearest neighbours. Distance ties at the K-th
/// rank fall back to training-index order; label ties prefer the smaller
/// summed distance, then the smaller label. K is clamped to the routed
/// model's size.
inline int knn_predict(const TrainedKnn& m, const ExtendedPoint& x) {
  const int route = m.model.route_of(x);
  const auto& pts = m.points[static_cast<std::size_t>(route)];
  const auto& labels = m.labels[static_cast<std::size_t>(route)];
  if (pts.empty())
    throw UnseenSignatureError("no training data routed to this signature/partition");

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    order.emplace_back(m.model.distance(route, x, pts[i]), i);
  std::sort(order.begin(), order.end());  // (distance, training index)

  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m.k), order.size());
  std::map<int, std::pair<int, double>> votes;  // label -> (count, summed distance)
  for (std::size_t i = 0; i < k; ++i) {
    auto& [count, dist_sum] = votes[labels[order[i].second]];
    ++count;
    dist_sum += order[i].first;
  }
  int best_label = 0;
  int best_count = -1;
  double best_sum = 0.0;
  for (const auto& [label, vote] : votes) {
    const auto& [count, dist_sum] = vote;
    if (count > best_count || (count == best_count && dist_sum < best_sum)) {
      best_label = label;
      best_count = count;
      best_sum = dist_sum;
    }
  }
  return best_label;
}

inline int knn_predict_with_fallback(const TrainedKnn& m, const ExtendedPoint& x,
                                     bool* flagged = nullptr) {
  try {
    return knn_predict(m, x);
  } catch (const UnseenSignatureError&) {
    if (flagged) *flagged = true;
    return m.global_majority;
  }
}

// ---------------------------------------------------------------------------
// Labels and error metrics.
// ---------------------------------------------------------------------------

/// Uniform binning of scores in [0, 100]; bins are half-open except the last.
struct LabelBinning {
  int bins = 5;
};

inline int bin_label(const LabelBinning& b, double score) {
  if (b.bins < 2) throw ValidationError("label binning needs at least 2 bins");
  if (!(score >= 0.0 && score <= 100.0))
    throw ValidationError("score " + format_real(score) + " outside [0, 100]");
  const int label = static_cast<int>(std::floor(score * b.bins / 100.0));
  return std::min(label, b.bins - 1);  // 100 lands in the closed last bin
}

inline double rmse(const std::vector<double>& predictions, const std::vector<double>& targets) {
  if (predictions.empty() || predictions.size() != targets.size())
    throw ValidationError("RMSE needs two equal-length non-empty vectors");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - targets[i];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(predictions.size()));
}

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.empty() || predictions.size() != labels.size())
    throw ValidationError("accuracy needs two equal-length non-empty vectors");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

}  // namespace metadist
