#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "metadist/bench_variants.hpp"
#include "metadist/csv.hpp"
#include "metadist/distance_json.hpp"
#include "metadist/models.hpp"
#include "metadist/point.hpp"
#include "metadist/rng.hpp"
#include "metadist/tuning.hpp"

namespace metadist {

// ---------------------------------------------------------------------------
// Surrogate blackbox.
// ---------------------------------------------------------------------------

/// Stand-in for the network-training score: deterministic per (point, seed),
/// smooth within a signature, and built from a term shared across signatures
/// plus small signature-specific offsets, so aggregating data across
/// subdomains carries signal. Clipped to [0, 100].
class SurrogateScore {
 public:
  SurrogateScore(const RoleGraph& g, int variant, Arch arch, std::uint64_t seed)
      : g_(&g), variant_(variant), arch_(arch) {
    Rng rng = substream(seed, "surrogate-field", static_cast<std::uint64_t>(variant),
                        arch == Arch::MLP ? 0 : 1);
    for (auto& wave : waves_) {
      for (auto& w : wave.w) w = 1.2 * rng.normal();
      wave.gamma = rng.normal();
      wave.phase = rng.uniform(0.0, 6.283185307179586);
    }
  }

  double operator()(const ExtendedPoint& x) const {
    const auto f = features(x);
    const double r = f[0], u_mean = f[1], h1 = f[2], h2 = f[3], h3 = f[4], lt = f[5], ot = f[6],
                 rho = f[7];
    const bool cnn = arch_ == Arch::CNN;
    const double amp_r = cnn ? 15.3 : 18.0;

    // Rich terms over variables shared across signatures, mild
    // signature-specific channels and offsets, so that pooling data across
    // subdomains carries signal.
    double score = cnn ? 45.0 : 50.0;
    score += amp_r * std::cos(kPi * (2.1 * r - 0.25));
    score += 18.0 * std::sin(kPi * (1.4 * u_mean + 0.2));
    score += 4.0 * (h1 - 0.5) - 3.5 * (h2 - 0.5) + 3.0 * (h3 - 0.5);
    if (has_var("rho") && !value_of(x, "rho").is_exc()) score += 5.0 * (rho - 0.4);
    score += 1.5 * lt - 1.2 * ot + 0.8 * lt * ot;  // signature offset
    score += 5.0 * (u_mean - 0.5) * (2.0 * r - 1.0) + 3.0 * lt * (r - 0.5);
    double noise = 0.0;
    for (const auto& wave : waves_) {
      double arg = wave.phase;
      for (std::size_t i = 0; i < f.size(); ++i) arg += wave.w[i] * f[i];
      noise += wave.gamma * std::cos(arg);
    }
    score += 2.0 * noise / 2.0;  // sigma = 2 over the four-wave average
    return std::clamp(score, 0.0, 100.0);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  bool has_var(const char* name) const { return g_->has_variable(name); }
  const Value& value_of(const ExtendedPoint& x, const char* name) const {
    return x[g_->index_of(name)];
  }

  /// Normalized feature vector (r, u_mean, h1, h2, h3, l, o, rho); absent
  /// channels sit at 0.5 so the shared waves stay well-defined everywhere.
  std::array<double, 8> features(const ExtendedPoint& x) const {
    std::array<double, 8> f{};
    f.fill(0.5);
    f[0] = value_of(x, "r").as_real();

    double u_sum = 0.0;
    int u_count = 0;
    for (const char* name : {"u1", "u2", "u3"}) {
      if (!has_var(name)) continue;
      const Value& v = value_of(x, name);
      if (v.is_exc()) continue;
      u_sum += (static_cast<double>(v.as_integer()) - 10.0) / 290.0;
      ++u_count;
    }
    f[1] = u_count > 0 ? u_sum / u_count : 0.5;

    for (int j = 0; j < 3; ++j) {
      const std::string alpha = "alpha" + std::to_string(j + 1);
      const std::string beta = "beta" + std::to_string(j + 1);
      if (g_->has_variable(alpha) && !x[g_->index_of(alpha)].is_exc()) {
        f[static_cast<std::size_t>(2 + j)] = x[g_->index_of(alpha)].as_real();
      } else if (g_->has_variable(beta) && !x[g_->index_of(beta)].is_exc()) {
        f[static_cast<std::size_t>(2 + j)] = x[g_->index_of(beta)].as_real();
      }
    }

    const std::int64_t l = value_of(x, "l").as_integer();
    const auto& lset = g_->var(g_->index_of("l")).universal;
    const double span = std::max<double>(1.0, static_cast<double>(lset.int_hi() - lset.int_lo()));
    f[5] = (static_cast<double>(l) - static_cast<double>(lset.int_lo())) / span;
    f[6] = has_var("o") ? static_cast<double>(value_of(x, "o").as_category()) : 0.0;
    if (has_var("rho") && !value_of(x, "rho").is_exc())
      f[7] = value_of(x, "rho").as_real() / 0.5;
    return f;
  }

  struct Wave {
    std::array<double, 8> w{};
    double gamma = 0.0;
    double phase = 0.0;
  };

  const RoleGraph* g_;
  int variant_;
  Arch arch_;
  std::array<Wave, 4> waves_;
};

// ---------------------------------------------------------------------------
// Instances: dataset + split + seed.
// ---------------------------------------------------------------------------

struct Instance {
  std::string id;
  int variant = 1;
  Size size = Size::VS;
  Arch arch = Arch::MLP;
  int seed_index = 0;
  std::uint64_t seed = 0;
  std::vector<ExtendedPoint> points;
  std::vector<double> scores;
  std::vector<int> split;  // 0 train, 1 validation, 2 test
};

/// Largest-remainder 50/25/25 split counts; remainder ties favor train,
/// then validation.
inline std::array<int, 3> split_counts(int n) {
  std::array<int, 3> counts = {n / 2, n / 4, n / 4};
  std::array<double, 3> remainders = {(n % 2) / 2.0, (n % 4) / 4.0, (n % 4) / 4.0};
  int leftover = n - counts[0] - counts[1] - counts[2];
  while (leftover > 0) {
    int pick = 0;
    for (int i = 1; i < 3; ++i)
      if (remainders[i] > remainders[pick]) pick = i;
    ++counts[pick];
    remainders[pick] = -1.0;
    --leftover;
  }
  return counts;
}

/// Samples one instance: per-signature counts from the size table, points
/// uniform within their restricted sets, scores from the surrogate, and a
/// stratified 50/25/25 split.
inline Instance sample_instance(const RoleGraph& g, const SignatureSet& sigs, int variant,
                                Size size, Arch arch, int seed_index, std::uint64_t seed) {
  Instance inst;
  inst.variant = variant;
  inst.size = size;
  inst.arch = arch;
  inst.seed_index = seed_index;
  inst.seed = seed;
  inst.id = "hpd-v" + std::to_string(variant) + "-" + to_string(size) + "-" + to_string(arch) +
            "-s" + std::to_string(seed_index);

  const auto sizes = signature_sample_sizes(variant, size);
  if (sizes.size() != sigs.size())
    throw ValidationError("size table does not match the enumerated signatures");
  const SurrogateScore surrogate(g, variant, arch, seed);
  const std::uint64_t arch_code = arch == Arch::MLP ? 0 : 1;
  const std::uint64_t size_code = static_cast<std::uint64_t>(size);

  for (std::size_t s = 0; s < sigs.size(); ++s) {
    Rng rng = substream(seed, "sampling", static_cast<std::uint64_t>(variant),
                        size_code * 2 + arch_code, s);
    const int begin = static_cast<int>(inst.points.size());
    for (int i = 0; i < sizes[s]; ++i) {
      ExtendedPoint x = sample_in_signature(g, sigs, static_cast<int>(s), rng);
      inst.scores.push_back(surrogate(x));
      inst.points.push_back(std::move(x));
    }
    const auto counts = split_counts(sizes[s]);
    std::vector<int> order(static_cast<std::size_t>(sizes[s]));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = begin + static_cast<int>(i);
    Rng split_rng = substream(seed, "split", static_cast<std::uint64_t>(variant),
                              size_code * 2 + arch_code, s);
    split_rng.shuffle(order);
    inst.split.resize(inst.points.size());
    int at = 0;
    for (int part = 0; part < 3; ++part)
      for (int i = 0; i < counts[static_cast<std::size_t>(part)]; ++i)
        inst.split[static_cast<std::size_t>(order[static_cast<std::size_t>(at++)])] = part;
  }
  return inst;
}

struct SplitView {
  std::vector<ExtendedPoint> points;
  std::vector<double> targets;
};

inline SplitView split_view(const Instance& inst, int part) {
  SplitView view;
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    if (inst.split[i] != part) continue;
    view.points.push_back(inst.points[i]);
    view.targets.push_back(inst.scores[i]);
  }
  return view;
}

// ---------------------------------------------------------------------------
// Approach-model evaluation under tuning.
// ---------------------------------------------------------------------------

enum class ModelKind { idw, knn };

inline const char* to_string(ModelKind m) { return m == ModelKind::idw ? "idw" : "knn"; }

inline ModelKind model_from_string(const std::string& s) {
  if (s == "idw") return ModelKind::idw;
  if (s == "knn") return ModelKind::knn;
  throw ParseError("unknown model '" + s + "' (expected idw or knn)");
}

struct ApproachModelRun {
  TuneResult tune;
  double test_metric = 0.0;  // RMSE (idw) or accuracy (knn) at the incumbent
  RoutedDistance best_model;
  int best_k = 0;
};

/// Tunes one approach-model on an instance: objective is the validation RMSE
/// (regression) or the negative validation accuracy (classification).
inline ApproachModelRun tune_approach_model(const RoleGraph& g, const Instance& inst,
                                            Approach approach, ModelKind kind,
                                            std::vector<int> partition_vars, long budget_mult,
                                            std::uint64_t tuner_seed, double q = 2.0,
                                            int bins = 5) {
  const SplitView train = split_view(inst, 0);
  const SplitView val = split_view(inst, 1);
  const SplitView test = split_view(inst, 2);

  RoutedDistance rd = RoutedDistance::make(g, approach, partition_vars);
  const ParameterSpace space = build_parameter_space(
      rd, kind == ModelKind::knn, static_cast<int>(train.points.size()));

  const LabelBinning binning{bins};
  std::vector<int> train_labels, val_labels, test_labels;
  if (kind == ModelKind::knn) {
    for (const double y : train.targets) train_labels.push_back(bin_label(binning, y));
    for (const double y : val.targets) val_labels.push_back(bin_label(binning, y));
    for (const double y : test.targets) test_labels.push_back(bin_label(binning, y));
  }

  // Fit once; each evaluation only rewrites the distance parameters.
  TrainedIdw idw;
  TrainedKnn knn;
  if (kind == ModelKind::idw) {
    idw = fit_idw(std::move(rd), train.points, train.targets, q);
  } else {
    knn = fit_knn(std::move(rd), train.points, train_labels, 1);
  }

  const auto evaluate = [&](const std::vector<double>& params, const SplitView& data,
                            const std::vector<int>& labels, bool as_objective) {
    if (kind == ModelKind::idw) {
      apply_parameters(space, params, idw.model);
      std::vector<double> predictions;
      predictions.reserve(data.points.size());
      for (const auto& x : data.points)
        predictions.push_back(idw_predict_with_fallback(idw, x));
      return rmse(predictions, data.targets);
    }
    apply_parameters(space, params, knn.model, &knn.k);
    std::vector<int> predictions;
    predictions.reserve(data.points.size());
    for (const auto& x : data.points) predictions.push_back(knn_predict_with_fallback(knn, x));
    const double acc = accuracy(predictions, labels);
    return as_objective ? -acc : acc;
  };

  const long budget = budget_mult * space.size();
  ApproachModelRun run;
  run.tune = tune(
      space, [&](const std::vector<double>& p) { return evaluate(p, val, val_labels, true); },
      [&](const std::vector<double>& p) { return evaluate(p, test, test_labels, false); }, budget,
      tuner_seed);
  run.test_metric = evaluate(run.tune.best_params, test, test_labels, false);
  if (kind == ModelKind::idw) {
    apply_parameters(space, run.tune.best_params, idw.model);
    run.best_model = std::move(idw.model);
  } else {
    apply_parameters(space, run.tune.best_params, knn.model, &knn.k);
    run.best_model = std::move(knn.model);
    run.best_k = knn.k;
  }
  return run;
}

// ---------------------------------------------------------------------------
// Convergence test and data profiles.
// ---------------------------------------------------------------------------

/// Best-so-far metric at or before evaluation k (+inf when nothing yet).
inline double best_metric_at(const std::vector<TuneTracePoint>& trace, long k, bool use_test) {
  double best = kInf;
  for (const auto& point : trace) {
    if (point.k > k) break;
    best = std::min(best, use_test ? point.test_metric : point.objective);
  }
  return best;
}

namespace detail {
/// Largest value within relative error tau of `best`, with a hair of slack so
/// exact boundary cases are not lost to rounding.
inline double tau_threshold(double best, double tau) {
  if (!(best > 0.0)) throw ValidationError("convergence test needs a positive reference value");
  return (1.0 + tau) * best + 1e-12 * best;
}
}  // namespace detail

/// Convergence test: the best value at or before k is within relative error
/// tau of the instance's best.
inline bool tau_solved_at(const std::vector<TuneTracePoint>& trace, double best, double tau,
                          long k, bool use_test = false) {
  const double threshold = detail::tau_threshold(best, tau);
  const double value = best_metric_at(trace, k, use_test);
  return value <= threshold;
}

/// First evaluation index that tau-solves the instance; -1 when never.
inline long first_tau_solve(const std::vector<TuneTracePoint>& trace, double best, double tau,
                            bool use_test = false) {
  const double threshold = detail::tau_threshold(best, tau);
  double running = kInf;
  for (const auto& point : trace) {
    running = std::min(running, use_test ? point.test_metric : point.objective);
    if (running <= threshold) return point.k;
  }
  return -1;
}

struct RunRecord {
  std::string instance;
  std::string approach_model;
  int n_params = 0;
  long budget = 0;
  std::vector<TuneTracePoint> trace;
};

struct ProfilePoint {
  double kappa = 0.0;
  std::string approach_model;
  double fraction = 0.0;
};

/// Data profiles: for each approach-model, the fraction of instances
/// tau-solved within kappa groups of (n_params + 1) evaluations.
inline std::vector<ProfilePoint> data_profile(const std::vector<RunRecord>& records, double tau,
                                              const std::vector<double>& kappas,
                                              bool use_test = false) {
  std::set<std::string> instances, approaches;
  for (const auto& r : records) {
    instances.insert(r.instance);
    approaches.insert(r.approach_model);
  }
  std::map<std::pair<std::string, std::string>, const RunRecord*> by_key;
  for (const auto& r : records) by_key[{r.instance, r.approach_model}] = &r;
  for (const auto& p : instances)
    for (const auto& s : approaches)
      if (!by_key.count({p, s}))
        throw ValidationError("data profile: missing record for instance '" + p +
                              "', approach-model '" + s + "'");

  // Best metric per instance across every approach-model.
  std::map<std::string, double> best_of;
  for (const auto& r : records) {
    const double value = best_metric_at(r.trace, r.budget, use_test);
    auto [it, inserted] = best_of.emplace(r.instance, value);
    if (!inserted) it->second = std::min(it->second, value);
  }

  std::vector<ProfilePoint> out;
  for (const auto& s : approaches) {
    for (const double kappa : kappas) {
      int solved = 0;
      for (const auto& p : instances) {
        const RunRecord& r = *by_key.at({p, s});
        const double best = best_of.at(p);
        if (!(best > 0.0)) continue;  // degenerate instance; cannot be tau-solved
        const long k = first_tau_solve(r.trace, best, tau, use_test);
        if (k >= 0 &&
            static_cast<double>(k) / static_cast<double>(r.n_params + 1) <= kappa)
          ++solved;
      }
      out.push_back({kappa, s, static_cast<double>(solved) / static_cast<double>(instances.size())});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark runner.
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::vector<int> variants = {1, 2, 3, 4, 5};
  std::vector<Size> sizes = {Size::VS, Size::S, Size::M, Size::L};
  std::vector<Arch> archs = {Arch::MLP, Arch::CNN};
  int n_seeds = 5;
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::idw;
  std::vector<Approach> approaches = {Approach::sub, Approach::hybrid, Approach::meta};
  long budget_mult = 200;
  double q = 2.0;
  int bins = 5;
  int jobs = 1;
};

struct BenchResultRow {
  std::string instance;
  int variant;
  Size size;
  Arch arch;
  int seed_index;
  Approach approach;
  int n_params;
  long budget;
  long evals;
  double best_objective;
  double test_metric;
  std::vector<TuneTracePoint> trace;
};

struct BenchResult {
  std::vector<Instance> instances;
  std::vector<BenchResultRow> rows;  // one per (instance, approach)
};

/// Runs tasks 0..count-1 on up to `jobs` threads; exceptions surface after join.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const int used = std::min(jobs, count);
  threads.reserve(static_cast<std::size_t>(used));
  for (int t = 0; t < used; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::uint64_t instance_seed(std::uint64_t base, int variant, Size size, Arch arch,
                                   int seed_index) {
  Rng rng = substream(base, "instance", static_cast<std::uint64_t>(variant),
                      static_cast<std::uint64_t>(size) * 2 + (arch == Arch::MLP ? 0 : 1),
                      static_cast<std::uint64_t>(seed_index));
  return rng.next_u64();
}

inline BenchResult run_benchmark(const BenchOptions& opt) {
  struct Task {
    int variant;
    Size size;
    Arch arch;
    int seed_index;
  };
  std::vector<Task> tasks;
  for (const int v : opt.variants)
    for (const Size size : opt.sizes)
      for (const Arch arch : opt.archs)
        for (int k = 0; k < opt.n_seeds; ++k) tasks.push_back({v, size, arch, k});

  // Shared immutable per-variant structures.
  std::map<int, RoleGraph> graphs;
  std::map<int, SignatureSet> sigsets;
  for (const int v : opt.variants) {
    graphs.emplace(v, build_variant(v));
    sigsets.emplace(v, SignatureSet::enumerate(graphs.at(v)));
  }

  BenchResult result;
  result.instances.resize(tasks.size());
  std::vector<std::vector<BenchResultRow>> rows(tasks.size());

  parallel_for(static_cast<int>(tasks.size()), opt.jobs, [&](int t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    const RoleGraph& g = graphs.at(task.variant);
    const SignatureSet& sigs = sigsets.at(task.variant);
    Instance inst =
        sample_instance(g, sigs, task.variant, task.size, task.arch, task.seed_index,
                        instance_seed(opt.seed, task.variant, task.size, task.arch,
                                      task.seed_index));
    for (std::size_t a = 0; a < opt.approaches.size(); ++a) {
      const Approach approach = opt.approaches[a];
      const std::vector<int> partition =
          approach == Approach::hybrid ? hybrid_partition_vars(g, task.variant)
                                       : std::vector<int>{};
      Rng tuner_rng = substream(inst.seed, "tuner", a);
      const ApproachModelRun run =
          tune_approach_model(g, inst, approach, opt.model, partition, opt.budget_mult,
                              tuner_rng.next_u64(), opt.q, opt.bins);
      BenchResultRow row;
      row.instance = inst.id;
      row.variant = task.variant;
      row.size = task.size;
      row.arch = task.arch;
      row.seed_index = task.seed_index;
      row.approach = approach;
      row.n_params = run.tune.n_params;
      row.budget = run.tune.budget;
      row.evals = run.tune.evals;
      row.best_objective = run.tune.best_objective;
      row.test_metric = run.test_metric;
      row.trace = run.tune.trace;
      rows[static_cast<std::size_t>(t)].push_back(std::move(row));
    }
    result.instances[static_cast<std::size_t>(t)] = std::move(inst);
  });

  for (auto& group : rows)
    for (auto& row : group) result.rows.push_back(std::move(row));
  return result;
}

// ---------------------------------------------------------------------------
// Incremental-training curves (data aggregation experiment).
// ---------------------------------------------------------------------------

struct CurvePoint {
  int variant;
  Arch arch;
  Approach approach;
  int n_points;
  double mean_rmse;
  double std_rmse;
};

/// RMSE on the test split as the training set grows one random point at a
/// time, starting from one point per signature. Distance parameters are tuned
/// once on the first seed and then held fixed; each seed redraws the dataset
/// and the insertion order.
inline std::vector<CurvePoint> aggregate_curve(int variant, Arch arch, Size size, int n_seeds,
                                               std::uint64_t base_seed, long pretune_budget_mult,
                                               double q, const std::vector<Approach>& approaches,
                                               int jobs = 1) {
  const RoleGraph g = build_variant(variant);
  const SignatureSet sigs = SignatureSet::enumerate(g);

  // Parameter selection on the first seed.
  Instance first = sample_instance(g, sigs, variant, size, arch, 0,
                                   instance_seed(base_seed, variant, size, arch, 0));
  std::vector<RoutedDistance> fixed;
  for (std::size_t a = 0; a < approaches.size(); ++a) {
    const auto partition = approaches[a] == Approach::hybrid
                               ? hybrid_partition_vars(g, variant)
                               : std::vector<int>{};
    if (pretune_budget_mult > 0) {
      Rng tuner_rng = substream(first.seed, "tuner", a);
      auto run = tune_approach_model(g, first, approaches[a], ModelKind::idw, partition,
                                     pretune_budget_mult, tuner_rng.next_u64(), q);
      fixed.push_back(std::move(run.best_model));
    } else {
      fixed.push_back(RoutedDistance::make(g, approaches[a], partition));
    }
  }

  // Per (seed, approach): RMSE after each insertion.
  const int start_points = static_cast<int>(sigs.size());
  std::vector<std::vector<std::vector<double>>> curves(
      approaches.size(),
      std::vector<std::vector<double>>(static_cast<std::size_t>(n_seeds)));

  parallel_for(n_seeds, jobs, [&](int s) {
    const Instance inst =
        s == 0 ? first
               : sample_instance(g, sigs, variant, size, arch, s,
                                 instance_seed(base_seed, variant, size, arch, s));
    const SplitView train = split_view(inst, 0);
    const SplitView test = split_view(inst, 2);

    // One random training point per signature, then the rest shuffled.
    Rng order_rng = substream(inst.seed, "curve-order");
    std::vector<std::vector<int>> per_sig(sigs.size());
    for (std::size_t i = 0; i < train.points.size(); ++i)
      per_sig[static_cast<std::size_t>(sigs.match(train.points[i].values))].push_back(
          static_cast<int>(i));
    std::vector<int> order;
    std::vector<char> taken(train.points.size(), 0);
    for (auto& group : per_sig) {
      const int pick = group[static_cast<std::size_t>(
          order_rng.uniform_int(0, static_cast<std::int64_t>(group.size()) - 1))];
      order.push_back(pick);
      taken[static_cast<std::size_t>(pick)] = 1;
    }
    std::vector<int> rest;
    for (std::size_t i = 0; i < train.points.size(); ++i)
      if (!taken[i]) rest.push_back(static_cast<int>(i));
    order_rng.shuffle(rest);
    order.insert(order.end(), rest.begin(), rest.end());

    for (std::size_t a = 0; a < approaches.size(); ++a) {
      std::vector<ExtendedPoint> partial;
      std::vector<double> partial_targets;
      auto& curve = curves[a][static_cast<std::size_t>(s)];
      for (std::size_t step = 0; step < order.size(); ++step) {
        partial.push_back(train.points[static_cast<std::size_t>(order[step])]);
        partial_targets.push_back(train.targets[static_cast<std::size_t>(order[step])]);
        if (static_cast<int>(partial.size()) < start_points) continue;
        TrainedIdw m = fit_idw(fixed[a], partial, partial_targets, q);
        std::vector<double> predictions;
        predictions.reserve(test.points.size());
        for (const auto& x : test.points)
          predictions.push_back(idw_predict_with_fallback(m, x));
        curve.push_back(rmse(predictions, test.targets));
      }
    }
  });

  std::vector<CurvePoint> out;
  for (std::size_t a = 0; a < approaches.size(); ++a) {
    const std::size_t steps = curves[a][0].size();
    for (std::size_t i = 0; i < steps; ++i) {
      double mean = 0.0;
      for (int s = 0; s < n_seeds; ++s) mean += curves[a][static_cast<std::size_t>(s)][i];
      mean /= n_seeds;
      double var = 0.0;
      for (int s = 0; s < n_seeds; ++s) {
        const double d = curves[a][static_cast<std::size_t>(s)][i] - mean;
        var += d * d;
      }
      const double sd = n_seeds > 1 ? std::sqrt(var / (n_seeds - 1)) : 0.0;
      out.push_back({variant, arch, approaches[a], start_points + static_cast<int>(i), mean, sd});
    }
  }
  return out;
}

}  // namespace metadist
