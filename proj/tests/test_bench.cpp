#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "metadist/bench.hpp"

using namespace metadist;

TEST(Variants, SizeTablesAndAggregationIdentity) {
  const std::vector<std::vector<int>> vs_rows = {
      {20, 30, 40}, {50, 60, 70}, {50, 60, 50, 60}, {50, 60, 50, 60, 70}, {60, 70, 60, 70, 80}};
  const std::vector<std::vector<int>> totals = {{90, 135, 180, 225},
                                                {180, 270, 360, 450},
                                                {220, 330, 440, 550},
                                                {290, 435, 580, 725},
                                                {340, 510, 680, 850}};
  const Size sizes[4] = {Size::VS, Size::S, Size::M, Size::L};
  for (int v = 1; v <= 5; ++v) {
    EXPECT_EQ(signature_sample_sizes(v, Size::VS), vs_rows[static_cast<std::size_t>(v - 1)]);
    for (int s = 0; s < 4; ++s) {
      const auto rows = signature_sample_sizes(v, sizes[s]);
      int sum = 0;
      for (const int n : rows) sum += n;
      EXPECT_EQ(sum, totals[static_cast<std::size_t>(v - 1)][static_cast<std::size_t>(s)])
          << "variant " << v << " size " << to_string(sizes[s]);
      EXPECT_EQ(total_sample_size(v, sizes[s]), sum);
    }
  }
  // Spot values straight from the size table.
  EXPECT_EQ(signature_sample_sizes(1, Size::S), (std::vector<int>{30, 45, 60}));
  EXPECT_EQ(total_sample_size(1, Size::VS), 90);
  EXPECT_EQ(total_sample_size(5, Size::L), 850);
}

TEST(Variants, StructureAndRoles) {
  {
    const RoleGraph g = build_variant(1);
    EXPECT_EQ(SignatureSet::enumerate(g).size(), 3u);
    EXPECT_EQ(g.role_of(g.index_of("l")), Role::meta);
    EXPECT_EQ(g.role_of(g.index_of("r")), Role::neutral);
    EXPECT_FALSE(g.has_variable("o"));
  }
  {
    const RoleGraph g = build_variant(3);
    EXPECT_EQ(SignatureSet::enumerate(g).size(), 4u);
    EXPECT_EQ(g.role_of(g.index_of("l")), Role::meta);  // same layer bounds for both optimizers
    EXPECT_EQ(g.role_of(g.index_of("o")), Role::meta);
  }
  {
    const RoleGraph g = build_variant(4);
    const SignatureSet sigs = SignatureSet::enumerate(g);
    EXPECT_EQ(sigs.size(), 5u);
    EXPECT_EQ(g.role_of(g.index_of("l")), Role::meta_decreed);  // layer bounds depend on o
  }
  {
    const RoleGraph g = build_variant(5);
    const SignatureSet sigs = SignatureSet::enumerate(g);
    EXPECT_EQ(sigs.size(), 5u);
    const int rho = g.index_of("rho");
    for (const auto& sig : sigs.items())
      EXPECT_TRUE(sig.included[static_cast<std::size_t>(rho)]);  // never excluded
    // The dropout's parents and its universal set.
    const std::set<int> parents(g.parents(rho).begin(), g.parents(rho).end());
    EXPECT_EQ(parents.size(), 4u);  // l, u1, u2, u3
    EXPECT_TRUE(parents.count(g.index_of("l")));
    EXPECT_TRUE(parents.count(g.index_of("u3")));
    EXPECT_DOUBLE_EQ(g.var(rho).universal.real_lo(), 0.0);
    EXPECT_DOUBLE_EQ(g.var(rho).universal.real_hi(), 0.5);
    EXPECT_DOUBLE_EQ(g.constants().at("tau_max"), 900.0);
    // Grandparent: the optimizer is an ancestor of the dropout but not a parent.
    EXPECT_FALSE(parents.count(g.index_of("o")));
    const auto& anc = g.ancestors(rho);
    EXPECT_TRUE(std::count(anc.begin(), anc.end(), g.index_of("o")));
  }
  EXPECT_THROW(build_variant(0), ValidationError);
  EXPECT_THROW(build_variant(6), ValidationError);
}

TEST(SplitCounts, LargestRemainder) {
  EXPECT_EQ(split_counts(20), (std::array<int, 3>{10, 5, 5}));
  EXPECT_EQ(split_counts(30), (std::array<int, 3>{15, 8, 7}));  // tie goes to validation
  EXPECT_EQ(split_counts(45), (std::array<int, 3>{23, 11, 11}));
  EXPECT_EQ(split_counts(90), (std::array<int, 3>{45, 23, 22}));
  for (int n = 1; n < 200; ++n) {
    const auto counts = split_counts(n);
    EXPECT_EQ(counts[0] + counts[1] + counts[2], n);
    EXPECT_LE(std::abs(counts[0] - n * 0.5), 1.0);
    EXPECT_LE(std::abs(counts[1] - n * 0.25), 1.0);
    EXPECT_LE(std::abs(counts[2] - n * 0.25), 1.0);
  }
}

TEST(Surrogate, DeterministicBoundedAndSeedSensitive) {
  const RoleGraph g = build_variant(3);
  const SurrogateScore f1(g, 3, Arch::MLP, 42);
  const SurrogateScore f2(g, 3, Arch::MLP, 42);
  const SurrogateScore f3(g, 3, Arch::MLP, 43);
  const SurrogateScore fc(g, 3, Arch::CNN, 42);
  Rng rng(9);
  bool seed_differs = false, arch_differs = false;
  for (int i = 0; i < 5000; ++i) {
    const ExtendedPoint x = sample_extended(g, rng);
    const double y = f1(x);
    ASSERT_GE(y, 0.0);
    ASSERT_LE(y, 100.0);
    ASSERT_EQ(y, f2(x));  // same seed, same score
    seed_differs = seed_differs || f3(x) != y;
    arch_differs = arch_differs || fc(x) != y;
  }
  EXPECT_TRUE(seed_differs);
  EXPECT_TRUE(arch_differs);
}

TEST(Surrogate, LipschitzWithinSignature) {
  // Empirical continuity audit: same-signature pairs under the default
  // distance never exceed slope 200 (the learning-rate term dominates).
  const double documented_L = 200.0;
  for (const int v : {1, 3, 5}) {
    const RoleGraph g = build_variant(v);
    const SignatureSet sigs = SignatureSet::enumerate(g);
    const SurrogateScore f(g, v, Arch::MLP, 7);
    const DistanceConfig cfg = DistanceConfig::defaults(g, 2.0);
    Rng rng(13);
    for (int i = 0; i < 4000; ++i) {
      const int s =
          static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(sigs.size()) - 1));
      const ExtendedPoint a = sample_in_signature(g, sigs, s, rng);
      const ExtendedPoint b = sample_in_signature(g, sigs, s, rng);
      const double dist = meta_distance(g, cfg, a, b);
      if (dist == 0.0) continue;
      ASSERT_LE(std::fabs(f(a) - f(b)), documented_L * dist + 1e-9);
    }
  }
}

TEST(Instances, SamplesMatchTablesAndValidate) {
  const RoleGraph g = build_variant(4);
  const SignatureSet sigs = SignatureSet::enumerate(g);
  const Instance inst = sample_instance(g, sigs, 4, Size::VS, Arch::MLP, 0, 99);
  EXPECT_EQ(static_cast<int>(inst.points.size()), total_sample_size(4, Size::VS));

  // Per-signature counts, point validity, and the EXC pattern per signature.
  std::vector<int> counts(sigs.size(), 0);
  for (const auto& x : inst.points) {
    ASSERT_FALSE(check_extended(g, x).has_value());
    const int s = sigs.match(x.values);
    ASSERT_GE(s, 0);
    ++counts[static_cast<std::size_t>(s)];
    for (int v = 0; v < g.size(); ++v)
      ASSERT_EQ(sigs[static_cast<std::size_t>(s)].included[static_cast<std::size_t>(v)] != 0,
                !x[v].is_exc());
  }
  EXPECT_EQ(counts, signature_sample_sizes(4, Size::VS));

  // Stratified split: per-signature proportions within one point.
  for (std::size_t s = 0; s < sigs.size(); ++s) {
    int train = 0, val = 0, test = 0;
    for (std::size_t i = 0; i < inst.points.size(); ++i) {
      if (sigs.match(inst.points[i].values) != static_cast<int>(s)) continue;
      train += inst.split[i] == 0;
      val += inst.split[i] == 1;
      test += inst.split[i] == 2;
    }
    const int n = train + val + test;
    EXPECT_LE(std::abs(train - n * 0.5), 1.0);
    EXPECT_LE(std::abs(val - n * 0.25), 1.0);
    EXPECT_LE(std::abs(test - n * 0.25), 1.0);
  }

  // Determinism: identical seed reproduces the instance bit for bit.
  const Instance again = sample_instance(g, sigs, 4, Size::VS, Arch::MLP, 0, 99);
  EXPECT_EQ(inst.points.size(), again.points.size());
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    ASSERT_TRUE(inst.points[i] == again.points[i]);
    ASSERT_EQ(inst.scores[i], again.scores[i]);
    ASSERT_EQ(inst.split[i], again.split[i]);
  }
}

TEST(Convergence, TauSolvedAt) {
  const std::vector<TuneTracePoint> trace = {{3, 1.10, 1.3}, {10, 1.0, 1.2}};
  // Equal to the best: solved for every nonnegative tau.
  EXPECT_TRUE(tau_solved_at(trace, 1.0, 0.0, 10));
  EXPECT_TRUE(tau_solved_at(trace, 1.0, 0.5, 10));
  // 1.10 against best 1.00: 10% off.
  EXPECT_FALSE(tau_solved_at(trace, 1.0, 0.05, 3));
  EXPECT_TRUE(tau_solved_at(trace, 1.0, 0.10, 3));
  // tau=1 admits anything up to twice the best.
  EXPECT_TRUE(tau_solved_at({{1, 1.9, 0.0}}, 1.0, 1.0, 1));
  // Before any record nothing is solved.
  EXPECT_FALSE(tau_solved_at(trace, 1.0, 1.0, 2));
  EXPECT_THROW(tau_solved_at(trace, 0.0, 0.1, 3), ValidationError);
  EXPECT_EQ(first_tau_solve(trace, 1.0, 0.05), 10);
  EXPECT_EQ(first_tau_solve(trace, 1.0, 0.10), 3);
  EXPECT_EQ(first_tau_solve({{1, 5.0, 0.0}}, 1.0, 0.5), -1);
}

TEST(Profiles, DefinitionArithmetic) {
  // Two instances, one approach: one solved instantly, one at k = n+1.
  std::vector<RunRecord> records;
  records.push_back({"p1", "meta-idw", 7, 100, {{1, 1.0, 1.0}}});
  records.push_back({"p2", "meta-idw", 7, 100, {{8, 1.0, 1.0}}});  // k = n+1 = 8
  const auto curve = data_profile(records, 0.0, {0.0, 0.5, 1.0, 2.0});
  ASSERT_EQ(curve.size(), 4u);
  EXPECT_DOUBLE_EQ(curve[0].fraction, 0.0);  // kappa = 0: nothing solved at k <= 0
  EXPECT_DOUBLE_EQ(curve[1].fraction, 0.5);  // p1 solved at k=1 <= 0.5*(7+1)
  EXPECT_DOUBLE_EQ(curve[2].fraction, 1.0);  // p2 solved exactly at kappa = 1
  EXPECT_DOUBLE_EQ(curve[3].fraction, 1.0);

  // Missing (instance, approach) pairs are an error.
  records.push_back({"p1", "sub-idw", 9, 100, {{1, 2.0, 2.0}}});
  EXPECT_THROW(data_profile(records, 0.1, {1.0}), ValidationError);
}

TEST(Profiles, CurvesAreMonotoneAndBounded) {
  std::vector<RunRecord> records;
  Rng rng(55);
  for (int p = 0; p < 6; ++p) {
    for (const char* s : {"meta-idw", "sub-idw"}) {
      RunRecord r;
      r.instance = "p" + std::to_string(p);
      r.approach_model = s;
      r.n_params = 5;
      r.budget = 200;
      double value = 2.0 + rng.uniform01();
      long k = 1 + static_cast<long>(rng.uniform_int(0, 5));
      while (k <= 200) {
        r.trace.push_back({k, value, value * 1.1});
        value *= 0.7 + 0.2 * rng.uniform01();
        k += 1 + static_cast<long>(rng.uniform_int(0, 30));
      }
      records.push_back(std::move(r));
    }
  }
  std::vector<double> kappas;
  for (double k = 0; k <= 40.0; k += 0.5) kappas.push_back(k);
  for (const bool use_test : {false, true}) {
    const auto curve = data_profile(records, 0.05, kappas, use_test);
    double previous_meta = -1.0, previous_sub = -1.0;
    for (const auto& point : curve) {
      ASSERT_GE(point.fraction, 0.0);
      ASSERT_LE(point.fraction, 1.0);
      double& previous = point.approach_model == "meta-idw" ? previous_meta : previous_sub;
      ASSERT_GE(point.fraction, previous);
      previous = point.fraction;
    }
  }
}

TEST(Runner, SmokeRunProducesConsistentRows) {
  BenchOptions opt;
  opt.variants = {1};
  opt.sizes = {Size::VS};
  opt.archs = {Arch::MLP};
  opt.n_seeds = 2;
  opt.budget_mult = 4;
  opt.jobs = 2;
  const BenchResult result = run_benchmark(opt);
  ASSERT_EQ(result.instances.size(), 2u);
  ASSERT_EQ(result.rows.size(), 6u);  // 2 instances x 3 approaches
  for (const auto& row : result.rows) {
    EXPECT_EQ(row.budget, 4 * row.n_params);
    EXPECT_EQ(row.evals, row.budget);  // exact budget accounting
    EXPECT_TRUE(std::isfinite(row.best_objective));
    EXPECT_TRUE(std::isfinite(row.test_metric));
    ASSERT_FALSE(row.trace.empty());
    for (std::size_t i = 1; i < row.trace.size(); ++i)
      EXPECT_LT(row.trace[i].objective, row.trace[i - 1].objective);
  }
  // Determinism across reruns, including with a different job count.
  BenchOptions serial = opt;
  serial.jobs = 1;
  const BenchResult again = run_benchmark(serial);
  ASSERT_EQ(again.rows.size(), result.rows.size());
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    EXPECT_EQ(result.rows[i].best_objective, again.rows[i].best_objective);
    EXPECT_EQ(result.rows[i].test_metric, again.rows[i].test_metric);
    EXPECT_EQ(result.rows[i].trace.size(), again.rows[i].trace.size());
  }
}

TEST(Runner, ClassificationSmoke) {
  BenchOptions opt;
  opt.variants = {1};
  opt.sizes = {Size::VS};
  opt.archs = {Arch::MLP};
  opt.n_seeds = 1;
  opt.budget_mult = 3;
  opt.model = ModelKind::knn;
  const BenchResult result = run_benchmark(opt);
  for (const auto& row : result.rows) {
    EXPECT_GE(row.test_metric, 0.0);
    EXPECT_LE(row.test_metric, 1.0);
    EXPECT_LE(row.best_objective, 0.0);  // negative validation accuracy
  }
}

TEST(Curves, StartAtOnePointPerSignatureAndShrink) {
  const auto curve = aggregate_curve(1, Arch::MLP, Size::VS, 4, 0, /*pretune_budget_mult=*/0,
                                     2.0, {Approach::sub, Approach::meta}, 2);
  ASSERT_FALSE(curve.empty());
  const RoleGraph g = build_variant(1);
  const int n_sigs = static_cast<int>(SignatureSet::enumerate(g).size());
  const int train_size = 45;  // half of the VS total of 90
  std::map<std::string, std::vector<CurvePoint>> by_approach;
  for (const auto& point : curve) by_approach[to_string(point.approach)].push_back(point);
  ASSERT_EQ(by_approach.size(), 2u);
  for (const auto& [name, points] : by_approach) {
    EXPECT_EQ(points.front().n_points, n_sigs);
    EXPECT_EQ(points.back().n_points, train_size);
    // More data helps on balance: the final RMSE beats the first step's.
    EXPECT_LT(points.back().mean_rmse, points.front().mean_rmse);
    for (const auto& point : points) {
      EXPECT_TRUE(std::isfinite(point.mean_rmse));
      EXPECT_GE(point.std_rmse, 0.0);
    }
  }
}
