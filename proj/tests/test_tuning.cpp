#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "metadist/bench_variants.hpp"
#include "metadist/tuning.hpp"

using namespace metadist;

namespace {

ParameterSpace box2d() {
  ParameterSpace space;
  for (const char* name : {"x", "y"}) {
    ParamDim d;
    d.name = name;
    d.lo = -1.0;
    d.hi = 1.0;
    space.dims.push_back(d);
  }
  return space;
}

}  // namespace

TEST(ParameterCount, ReproducesTheVariantTables) {
  // Per-signature variable counts (sub) and variable/theta counts (meta).
  const std::vector<std::vector<int>> sub_rows = {
      {2, 3, 4}, {5, 6, 7}, {5, 6, 5, 6}, {5, 6, 5, 6, 7}, {6, 7, 6, 7, 8}};
  const std::vector<std::pair<int, int>> meta_rows = {{5, 2}, {8, 2}, {11, 7}, {12, 8}, {13, 8}};
  for (int v = 1; v <= 5; ++v) {
    const RoleGraph g = build_variant(v);
    const SignatureSet sigs = SignatureSet::enumerate(g);
    const auto& rows = sub_rows[static_cast<std::size_t>(v - 1)];
    ASSERT_EQ(sigs.size(), rows.size());
    int sub_total = 0;
    for (std::size_t s = 0; s < sigs.size(); ++s) {
      EXPECT_EQ(static_cast<int>(sigs[s].free_vars.size()), rows[s])
          << "variant " << v << ", signature " << s;
      sub_total += rows[s];
    }
    EXPECT_EQ(parameter_count(g, Approach::sub), sub_total);

    const auto [n_vars, n_theta] = meta_rows[static_cast<std::size_t>(v - 1)];
    EXPECT_EQ(g.size(), n_vars) << "variant " << v;
    int excludable = 0;
    for (int i = 0; i < g.size(); ++i) excludable += g.var(i).excludable ? 1 : 0;
    EXPECT_EQ(excludable, n_theta) << "variant " << v;
    EXPECT_EQ(parameter_count(g, Approach::meta), n_vars + n_theta) << "variant " << v;
  }
  // Worked instances: 5 weights + 2 exclusion costs, and 11 + 7.
  EXPECT_EQ(parameter_count(build_variant(1), Approach::meta), 7);
  EXPECT_EQ(parameter_count(build_variant(3), Approach::meta), 18);
  EXPECT_EQ(parameter_count(build_variant(1), Approach::sub), 9);
}

TEST(Lhs, StratificationPerDimension) {
  const ParameterSpace space = box2d();
  Rng rng(0);
  const int count = 8;
  const auto samples = lhs_sample(space, count, rng);
  ASSERT_EQ(samples.size(), 8u);
  for (std::size_t d = 0; d < space.dims.size(); ++d) {
    std::set<int> strata;
    for (const auto& s : samples) {
      const double t = (s[d] - space.dims[d].lo) / (space.dims[d].hi - space.dims[d].lo);
      ASSERT_GE(t, 0.0);
      ASSERT_LT(t, 1.0);
      strata.insert(static_cast<int>(t * count));
    }
    EXPECT_EQ(strata.size(), 8u) << "dimension " << d;
  }
}

TEST(Lhs, OneDimFourSamplesHitEachQuarter) {
  ParameterSpace space;
  ParamDim d;
  d.name = "x";
  d.lo = 0.0;
  d.hi = 1.0;
  space.dims.push_back(d);
  Rng rng(5);
  const auto samples = lhs_sample(space, 4, rng);
  std::set<int> quarters;
  for (const auto& s : samples) quarters.insert(static_cast<int>(s[0] * 4.0));
  EXPECT_EQ(quarters, (std::set<int>{0, 1, 2, 3}));
}

TEST(Lhs, DeterministicPerSeed) {
  const ParameterSpace space = box2d();
  Rng a(42), b(42), c(43);
  const auto s1 = lhs_sample(space, 16, a);
  const auto s2 = lhs_sample(space, 16, b);
  const auto s3 = lhs_sample(space, 16, c);
  EXPECT_EQ(s1, s2);
  EXPECT_NE(s1, s3);
}

TEST(Lhs, IntegerDimensionsKeepStrataWhereCardinalityAllows) {
  ParameterSpace space;
  ParamDim d;
  d.name = "k";
  d.type = ParamDim::Type::integer;
  d.lo = 1.0;
  d.hi = 8.0;
  space.dims.push_back(d);
  Rng rng(9);
  const auto samples = lhs_sample(space, 8, rng);
  std::set<double> values;
  for (const auto& s : samples) {
    values.insert(s[0]);
    ASSERT_GE(s[0], 1.0);
    ASSERT_LE(s[0], 8.0);
    ASSERT_EQ(s[0], std::floor(s[0]));
  }
  EXPECT_EQ(values.size(), 8u);  // eight strata, eight distinct integers
}

TEST(PatternSearch, ConvexQuadratic) {
  const ParameterSpace space = box2d();
  const auto objective = [](const std::vector<double>& x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + (x[1] + 0.2) * (x[1] + 0.2);
  };
  const auto result = pattern_search(objective, space, {0.9, -0.9}, 500);
  EXPECT_LE(result.best_value, 1e-4);
  EXPECT_LE(result.evals, 500);
}

TEST(PatternSearch, BudgetOneReturnsStart) {
  const ParameterSpace space = box2d();
  int calls = 0;
  const auto objective = [&](const std::vector<double>& x) {
    ++calls;
    return x[0] + x[1];
  };
  const auto result = pattern_search(objective, space, {0.5, 0.5}, 1);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(result.best, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(pattern_search(objective, space, {0.5, 0.5}, 0), ValidationError);
  const auto bad = [](const std::vector<double>&) { return kInf; };
  EXPECT_THROW(pattern_search(bad, space, {0.5, 0.5}, 10), ValidationError);
}

TEST(PatternSearch, StaysInsideTheBox) {
  const ParameterSpace space = box2d();
  const auto objective = [&](const std::vector<double>& x) {
    EXPECT_GE(x[0], -1.0);
    EXPECT_LE(x[0], 1.0);
    EXPECT_GE(x[1], -1.0);
    EXPECT_LE(x[1], 1.0);
    return -x[0] - x[1];  // pushes toward the corner
  };
  const auto result = pattern_search(objective, space, {0.0, 0.0}, 200);
  EXPECT_NEAR(result.best[0], 1.0, 1e-9);
  EXPECT_NEAR(result.best[1], 1.0, 1e-9);
}

TEST(Tune, BudgetAccountingIsExact) {
  const ParameterSpace space = box2d();
  long calls = 0;
  const auto objective = [&](const std::vector<double>& x) {
    ++calls;
    return x[0] * x[0] + x[1] * x[1];
  };
  const auto test_metric = [](const std::vector<double>&) { return 0.0; };
  for (const long budget : {1L, 7L, 100L, 1400L}) {
    calls = 0;
    const TuneResult result = tune(space, objective, test_metric, budget, 3);
    EXPECT_EQ(calls, budget);
    EXPECT_EQ(result.evals, budget);
  }
}

TEST(Tune, LhsShareIsCeil33Percent) {
  // With budget 1400 the sampling phase takes ceil(0.33 * 1400) = 462
  // evaluations and the search takes the remaining 938.
  const ParameterSpace space = box2d();
  std::vector<std::vector<double>> seen;
  const auto objective = [&](const std::vector<double>& x) {
    seen.push_back(x);
    return x[0] * x[0] + x[1] * x[1];
  };
  const auto test_metric = [](const std::vector<double>&) { return 0.0; };
  tune(space, objective, test_metric, 1400, 3);
  ASSERT_EQ(seen.size(), 1400u);
  // The first 462 evaluations are stratified: projections hit distinct strata.
  std::set<int> strata;
  for (std::size_t i = 0; i < 462; ++i)
    strata.insert(static_cast<int>((seen[i][0] + 1.0) / 2.0 * 462.0));
  EXPECT_EQ(strata.size(), 462u);
}

TEST(Tune, TraceIsNonincreasingAndFeasible) {
  const RoleGraph g = build_variant(1);
  RoutedDistance rd = RoutedDistance::make(g, Approach::meta);
  const ParameterSpace space = build_parameter_space(rd);
  long calls = 0;
  const auto objective = [&](const std::vector<double>& params) {
    EXPECT_EQ(params.size(), static_cast<std::size_t>(space.size()));
    for (std::size_t d = 0; d < params.size(); ++d) {
      EXPECT_GE(params[d], space.dims[d].lo);
      EXPECT_LE(params[d], space.dims[d].hi);
    }
    ++calls;
    double total = 0.0;
    for (const double x : params) total += std::cos(3.0 * x) + 0.1 * x * x;
    return total;
  };
  const auto test_metric = [](const std::vector<double>&) { return 1.0; };
  const TuneResult result = tune(space, objective, test_metric, 300, 7);
  EXPECT_EQ(calls, 300);
  ASSERT_FALSE(result.trace.empty());
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    EXPECT_LT(result.trace[i].objective, result.trace[i - 1].objective);
    EXPECT_GT(result.trace[i].k, result.trace[i - 1].k);
  }
  EXPECT_EQ(result.trace.back().objective, result.best_objective);
}

TEST(Tune, DeterministicPerSeed) {
  const ParameterSpace space = box2d();
  const auto objective = [](const std::vector<double>& x) {
    return std::sin(5 * x[0]) + x[1] * x[1];
  };
  const auto test_metric = [](const std::vector<double>& x) { return x[0]; };
  const TuneResult a = tune(space, objective, test_metric, 120, 11);
  const TuneResult b = tune(space, objective, test_metric, 120, 11);
  EXPECT_EQ(a.best_params, b.best_params);
  EXPECT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].k, b.trace[i].k);
    EXPECT_EQ(a.trace[i].objective, b.trace[i].objective);
  }
}

TEST(Space, MetaDimensionsAndDecoding) {
  const RoleGraph g = build_variant(3);
  RoutedDistance rd = RoutedDistance::make(g, Approach::meta);
  const ParameterSpace space = build_parameter_space(rd, /*tune_k=*/true, /*train_size=*/110);
  EXPECT_EQ(space.size(), 18 + 1);  // Table 5b row 3 plus the neighbour count

  std::vector<double> params(static_cast<std::size_t>(space.size()), 0.0);
  params[0] = 1.0;  // first weight dimension is log10-scaled
  params.back() = 7.4;
  int k = 0;
  apply_parameters(space, params, rd, &k);
  EXPECT_EQ(k, 7);
  const int first_var = space.dims[0].variable;
  EXPECT_DOUBLE_EQ(rd.config(0).weights[static_cast<std::size_t>(first_var)], 10.0);
  // theta offsets land in their dimension's variable.
  for (const auto& dim : space.dims) {
    if (dim.target != ParamDim::Target::theta) continue;
    EXPECT_GE(dim.hi, 1e-6);
    EXPECT_EQ(dim.lo, 0.0);
  }
  // K bounds follow min(25, train size).
  EXPECT_DOUBLE_EQ(space.dims.back().hi, 25.0);
  const ParameterSpace small = build_parameter_space(rd, true, 9);
  EXPECT_DOUBLE_EQ(small.dims.back().hi, 9.0);
}
