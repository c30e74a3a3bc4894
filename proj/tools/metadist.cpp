// Command-line entry point: validate domain specs, compute pairwise
// distances, fit and query distance-based models, tune their parameters, and
// run the benchmark harness.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "metadist/bench.hpp"
#include "metadist/csv.hpp"
#include "metadist/distance_json.hpp"
#include "metadist/domain_json.hpp"
#include "metadist/models.hpp"
#include "metadist/tuning.hpp"

namespace fs = std::filesystem;
using namespace metadist;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitBadInput = 3;
constexpr int kExitInvalid = 4;

void guard_output(const std::string& path, bool force) {
  if (path.empty() || force) return;
  if (fs::exists(path))
    throw ParseError("output '" + path + "' exists; pass --force to overwrite");
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_text_file(path, content);
  }
}

std::vector<int> parse_variants(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const int lo = std::stoi(item.substr(0, dots));
      const int hi = std::stoi(item.substr(dots + 2));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else if (!item.empty()) {
      out.push_back(std::stoi(item));
    }
  }
  if (out.empty()) throw ParseError("no variants in '" + text + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse(item));
  }
  if (out.empty()) throw ParseError("empty list '" + text + "'");
  return out;
}

int default_jobs() {
  if (const char* env = std::getenv("METADIST_JOBS")) {
    const int jobs = std::atoi(env);
    if (jobs >= 1) return jobs;
  }
  return 1;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& spec_path) {
  const GraphSpec spec = load_graph_spec(spec_path);
  auto [graph, report] = RoleGraph::build_with_report(spec);
  (void)graph;
  for (const auto& line : report) std::cout << line << "\n";
  return report.empty() ? 0 : kExitInvalid;
}

int cmd_distance(const std::string& spec_path, const std::string& config_path,
                 const std::string& points_path, const std::string& out, bool force) {
  guard_output(out, force);
  const RoleGraph g = load_domain(spec_path);
  const DistanceConfig cfg = load_distance_config(g, config_path);
  const Dataset data = load_dataset(g, points_path);
  std::string csv;
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    for (std::size_t j = 0; j < data.points.size(); ++j) {
      if (j) csv += ',';
      csv += format_real(meta_distance(g, cfg, data.points[i], data.points[j]));
    }
    csv += '\n';
  }
  emit(out, csv);
  return 0;
}

struct FitPredictArgs {
  std::string spec, config, train, query, out;
  std::string model = "idw";
  std::string approach = "meta";
  double q = 2.0;
  int k = 5;
  int bins = 5;
  std::vector<std::string> partition_by;
  bool force = false;
};

int cmd_fit_predict(const FitPredictArgs& args) {
  guard_output(args.out, args.force);
  const RoleGraph g = load_domain(args.spec);
  const DistanceConfig cfg = load_distance_config(g, args.config);
  const Dataset train = load_dataset(g, args.train);
  if (!train.has_targets) throw ParseError("training file needs a target column");
  const Dataset query = load_dataset(g, args.query);

  std::vector<int> partition;
  for (const auto& name : args.partition_by) partition.push_back(g.index_of(name));
  RoutedDistance rd = RoutedDistance::make(g, approach_from_string(args.approach), partition);
  for (int route = 0; route < rd.route_count(); ++route) rd.config(route) = cfg;

  std::string csv = "prediction,flag\n";
  if (model_from_string(args.model) == ModelKind::idw) {
    const TrainedIdw m = fit_idw(std::move(rd), train.points, train.targets, args.q);
    for (const auto& x : query.points) {
      bool flagged = false;
      const double y = idw_predict_with_fallback(m, x, &flagged);
      csv += format_real(y);
      csv += flagged ? ",unseen_signature\n" : ",\n";
    }
  } else {
    const LabelBinning binning{args.bins};
    std::vector<int> labels;
    labels.reserve(train.targets.size());
    for (const double y : train.targets) labels.push_back(bin_label(binning, y));
    const TrainedKnn m = fit_knn(std::move(rd), train.points, labels, args.k);
    for (const auto& x : query.points) {
      bool flagged = false;
      const int label = knn_predict_with_fallback(m, x, &flagged);
      csv += std::to_string(label);
      csv += flagged ? ",unseen_signature\n" : ",\n";
    }
  }
  emit(args.out, csv);
  return 0;
}

struct TuneArgs {
  std::string spec, dataset, out;
  std::string approach = "meta";
  std::string model = "idw";
  long budget_mult = 200;
  std::uint64_t seed = 0;
  double q = 2.0;
  int bins = 5;
  std::vector<std::string> partition_by;
  bool external_eval = false;
  bool force = false;
};

nlohmann::json space_to_json(const ParameterSpace& space) {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& d : space.dims) {
    dims.push_back({{"name", d.name},
                    {"lo", d.lo},
                    {"hi", d.hi},
                    {"type", d.type == ParamDim::Type::integer ? "int" : "cont"},
                    {"transform", d.transform == ParamDim::Transform::log10 ? "log10"
                                  : d.transform == ParamDim::Transform::theta_offset
                                      ? "theta_offset"
                                      : "identity"}});
  }
  return dims;
}

int cmd_tune(const TuneArgs& args) {
  guard_output(args.out, args.force);
  const RoleGraph g = load_domain(args.spec);
  const SignatureSet sigs = SignatureSet::enumerate(g);
  const Dataset data = load_dataset(g, args.dataset);
  if (!data.has_targets) throw ParseError("tune dataset needs a target column");

  // Stratified 50/25/25 split derived from --seed.
  Instance inst;
  inst.id = args.dataset;
  inst.seed = args.seed;
  inst.points = data.points;
  inst.scores = data.targets;
  inst.split.resize(inst.points.size());
  std::vector<std::vector<int>> per_sig(sigs.size());
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    const int s = sigs.match(inst.points[i].values);
    if (s < 0) throw ValidationError("dataset row " + std::to_string(i + 2) +
                                     " matches no inclusion signature");
    per_sig[static_cast<std::size_t>(s)].push_back(static_cast<int>(i));
  }
  for (std::size_t s = 0; s < per_sig.size(); ++s) {
    auto& rows = per_sig[s];
    Rng rng = substream(args.seed, "split", s);
    rng.shuffle(rows);
    const auto counts = split_counts(static_cast<int>(rows.size()));
    int at = 0;
    for (int part = 0; part < 3; ++part)
      for (int i = 0; i < counts[static_cast<std::size_t>(part)]; ++i)
        inst.split[static_cast<std::size_t>(rows[static_cast<std::size_t>(at++)])] = part;
  }

  std::vector<int> partition;
  for (const auto& name : args.partition_by) partition.push_back(g.index_of(name));
  const Approach approach = approach_from_string(args.approach);
  const ModelKind kind = model_from_string(args.model);

  if (args.external_eval) {
    // Objective server: one whitespace-separated parameter vector per line on
    // stdin, one objective value per line on stdout. The space definition is
    // printed first as a JSON line so external solvers know the box.
    const SplitView train = split_view(inst, 0);
    const SplitView val = split_view(inst, 1);
    RoutedDistance rd = RoutedDistance::make(g, approach, partition);
    const ParameterSpace space =
        build_parameter_space(rd, kind == ModelKind::knn, static_cast<int>(train.points.size()));
    const LabelBinning binning{args.bins};
    std::vector<int> train_labels, val_labels;
    if (kind == ModelKind::knn) {
      for (const double y : train.targets) train_labels.push_back(bin_label(binning, y));
      for (const double y : val.targets) val_labels.push_back(bin_label(binning, y));
    }
    TrainedIdw idw;
    TrainedKnn knn;
    if (kind == ModelKind::idw) {
      idw = fit_idw(std::move(rd), train.points, train.targets, args.q);
    } else {
      knn = fit_knn(std::move(rd), train.points, train_labels, 1);
    }
    std::cout << nlohmann::json({{"dims", space_to_json(space)}}).dump() << "\n" << std::flush;
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::vector<double> params;
      double x;
      while (ss >> x) params.push_back(x);
      if (params.size() != static_cast<std::size_t>(space.size()))
        throw ParseError("expected " + std::to_string(space.size()) + " parameters, got " +
                         std::to_string(params.size()));
      double objective;
      if (kind == ModelKind::idw) {
        apply_parameters(space, params, idw.model);
        std::vector<double> predictions;
        for (const auto& p : val.points) predictions.push_back(idw_predict_with_fallback(idw, p));
        objective = rmse(predictions, val.targets);
      } else {
        apply_parameters(space, params, knn.model, &knn.k);
        std::vector<int> predictions;
        for (const auto& p : val.points) predictions.push_back(knn_predict_with_fallback(knn, p));
        objective = -accuracy(predictions, val_labels);
      }
      std::cout << format_real(objective) << "\n" << std::flush;
    }
    return 0;
  }

  Rng tuner_rng = substream(args.seed, "tuner");
  const ApproachModelRun run = tune_approach_model(
      g, inst, approach, kind, partition, args.budget_mult, tuner_rng.next_u64(), args.q,
      args.bins);

  RoutedDistance rd = RoutedDistance::make(g, approach, partition);
  const ParameterSpace space = build_parameter_space(
      rd, kind == ModelKind::knn, static_cast<int>(split_view(inst, 0).points.size()));

  nlohmann::json j;
  j["dataset"] = args.dataset;
  j["approach"] = to_string(approach);
  j["model"] = to_string(kind);
  j["seed"] = args.seed;
  j["n_params"] = run.tune.n_params;
  j["budget"] = run.tune.budget;
  j["evals"] = run.tune.evals;
  j["best_objective"] = run.tune.best_objective;
  j["test_metric"] = run.test_metric;
  j["space"] = space_to_json(space);
  j["best_params"] = run.tune.best_params;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& point : run.tune.trace)
    trace.push_back({{"k", point.k}, {"objective", point.objective},
                     {"test_metric", point.test_metric}});
  j["trace"] = std::move(trace);
  nlohmann::json configs = nlohmann::json::array();
  for (int route = 0; route < run.best_model.route_count(); ++route)
    configs.push_back({{"route", route},
                       {"config", distance_config_to_json(g, run.best_model.config(route))}});
  j["best_configs"] = std::move(configs);
  if (kind == ModelKind::knn) j["best_k"] = run.best_k;

  guard_output(args.out, args.force);
  emit(args.out, j.dump(2) + "\n");
  return 0;
}

struct BenchRunArgs {
  std::string variants = "1..5";
  std::string sizes = "VS,S,M,L";
  std::string archs = "MLP,CNN";
  int seeds = 5;
  std::uint64_t seed = 0;
  std::string model = "idw";
  std::string approaches = "sub,hybrid,meta";
  long budget_mult = 200;
  double q = 2.0;
  int bins = 5;
  int jobs = default_jobs();
  std::string out;
  bool force = false;
};

std::string approach_model_name(Approach a, ModelKind m) {
  return std::string(to_string(a)) + "-" + to_string(m);
}

int cmd_bench_run(const BenchRunArgs& args) {
  if (args.out.empty()) throw ParseError("bench run needs --out");
  if (fs::exists(args.out) && !fs::is_empty(args.out) && !args.force)
    throw ParseError("output directory '" + args.out + "' is not empty; pass --force");
  fs::create_directories(args.out);

  BenchOptions opt;
  opt.variants = parse_variants(args.variants);
  opt.sizes = parse_list<Size>(args.sizes, size_from_string);
  opt.archs = parse_list<Arch>(args.archs, arch_from_string);
  opt.n_seeds = args.seeds;
  opt.seed = args.seed;
  opt.model = model_from_string(args.model);
  opt.approaches = parse_list<Approach>(args.approaches, approach_from_string);
  opt.budget_mult = args.budget_mult;
  opt.q = args.q;
  opt.bins = args.bins;
  opt.jobs = args.jobs;

  const BenchResult result = run_benchmark(opt);

  // Per-instance dataset files.
  std::map<int, RoleGraph> graphs;
  for (const int v : opt.variants) graphs.emplace(v, build_variant(v));
  nlohmann::json manifest;
  manifest["seed"] = opt.seed;
  manifest["model"] = to_string(opt.model);
  manifest["budget_mult"] = opt.budget_mult;
  manifest["instances"] = nlohmann::json::array();
  for (const auto& inst : result.instances) {
    const RoleGraph& g = graphs.at(inst.variant);
    for (int part = 0; part < 3; ++part) {
      Dataset d;
      d.has_targets = true;
      for (std::size_t i = 0; i < inst.points.size(); ++i) {
        if (inst.split[i] != part) continue;
        d.points.push_back(inst.points[i]);
        d.targets.push_back(inst.scores[i]);
      }
      const char* names[3] = {"train", "val", "test"};
      write_text_file(args.out + "/" + inst.id + "." + names[part] + ".csv",
                      dataset_to_csv(g, d));
    }
    manifest["instances"].push_back({{"id", inst.id},
                                     {"variant", inst.variant},
                                     {"size", to_string(inst.size)},
                                     {"arch", to_string(inst.arch)},
                                     {"seed_index", inst.seed_index},
                                     {"files",
                                      {inst.id + ".train.csv", inst.id + ".val.csv",
                                       inst.id + ".test.csv"}}});
  }
  write_text_file(args.out + "/manifest.json", manifest.dump(2) + "\n");

  std::string results_csv =
      "instance,variant,size,arch,seed_index,approach,model,n_params,budget,evals,"
      "best_objective,test_metric\n";
  std::string trace_csv = "instance,approach,model,n_params,budget,k,objective,test_metric\n";
  for (const auto& row : result.rows) {
    results_csv += row.instance + "," + std::to_string(row.variant) + "," +
                   to_string(row.size) + "," + to_string(row.arch) + "," +
                   std::to_string(row.seed_index) + "," + to_string(row.approach) + "," +
                   to_string(opt.model) + "," + std::to_string(row.n_params) + "," +
                   std::to_string(row.budget) + "," + std::to_string(row.evals) + "," +
                   format_real(row.best_objective) + "," + format_real(row.test_metric) + "\n";
    for (const auto& point : row.trace)
      trace_csv += row.instance + "," + to_string(row.approach) + "," + to_string(opt.model) +
                   "," + std::to_string(row.n_params) + "," + std::to_string(row.budget) + "," +
                   std::to_string(point.k) + "," + format_real(point.objective) + "," +
                   format_real(point.test_metric) + "\n";
  }
  write_text_file(args.out + "/results.csv", results_csv);
  write_text_file(args.out + "/trace.csv", trace_csv);

  // Mean/std of the test metric per (size, variant, approach).
  struct Cell {
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
  };
  std::map<std::tuple<std::string, int, std::string>, Cell> cells;
  for (const auto& row : result.rows) {
    auto& cell = cells[{to_string(row.size), row.variant, to_string(row.approach)}];
    cell.sum += row.test_metric;
    cell.sum2 += row.test_metric * row.test_metric;
    ++cell.n;
  }
  std::string table_csv = "size,variant,approach,mean,std,n\n";
  for (const auto& [key, cell] : cells) {
    const double mean = cell.sum / cell.n;
    const double var = cell.n > 1 ? std::max(0.0, (cell.sum2 - cell.n * mean * mean) /
                                                     (cell.n - 1))
                                  : 0.0;
    table_csv += std::get<0>(key) + "," + std::to_string(std::get<1>(key)) + "," +
                 std::get<2>(key) + "," + format_real(mean) + "," +
                 format_real(std::sqrt(var)) + "," + std::to_string(cell.n) + "\n";
  }
  write_text_file(args.out + "/table.csv", table_csv);
  return 0;
}

struct BenchProfileArgs {
  std::string in, out;
  double tau = 0.005;
  std::string metric = "validation";
  double kappa_max = 250.0;
  double kappa_step = 0.5;
  bool force = false;
};

int cmd_bench_profile(const BenchProfileArgs& args) {
  guard_output(args.out, args.force);
  const std::string content = read_text_file(args.in + "/trace.csv");
  std::stringstream ss(content);
  std::string line;
  if (!std::getline(ss, line)) throw ParseError("empty trace file");
  std::map<std::pair<std::string, std::string>, RunRecord> records;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) throw ParseError("trace row with " + std::to_string(cells.size()) +
                                            " cells (expected 8)");
    const std::string approach_model = cells[1] + "-" + cells[2];
    auto& record = records[{cells[0], approach_model}];
    record.instance = cells[0];
    record.approach_model = approach_model;
    record.n_params = std::stoi(cells[3]);
    record.budget = std::stol(cells[4]);
    record.trace.push_back({std::stol(cells[5]), std::stod(cells[6]), std::stod(cells[7])});
  }
  std::vector<RunRecord> list;
  list.reserve(records.size());
  for (auto& [key, record] : records) list.push_back(std::move(record));

  std::vector<double> kappas;
  for (double k = 0.0; k <= args.kappa_max + 1e-9; k += args.kappa_step) kappas.push_back(k);
  const bool use_test = args.metric == "test";
  if (!use_test && args.metric != "validation")
    throw ParseError("--metric must be validation or test");
  const auto curve = data_profile(list, args.tau, kappas, use_test);

  std::string csv = "kappa,approach,fraction\n";
  for (const auto& point : curve)
    csv += format_real(point.kappa) + "," + point.approach_model + "," +
           format_real(point.fraction) + "\n";
  emit(args.out, csv);
  return 0;
}

struct CurveArgs {
  std::string variants = "1..5";
  std::string archs = "MLP,CNN";
  std::string size = "M";
  int seeds = 20;
  std::uint64_t seed = 0;
  long budget_mult = 25;
  double q = 2.0;
  int jobs = default_jobs();
  std::string out;
  bool force = false;
};

int cmd_bench_curve(const CurveArgs& args) {
  guard_output(args.out, args.force);
  const std::vector<Approach> approaches = {Approach::sub, Approach::hybrid, Approach::meta};
  std::string csv = "variant,arch,approach,n_points,mean_rmse,std_rmse\n";
  for (const int variant : parse_variants(args.variants)) {
    for (const Arch arch : parse_list<Arch>(args.archs, arch_from_string)) {
      const auto curve =
          aggregate_curve(variant, arch, size_from_string(args.size), args.seeds, args.seed,
                          args.budget_mult, args.q, approaches, args.jobs);
      for (const auto& point : curve)
        csv += std::to_string(point.variant) + "," + to_string(point.arch) + "," +
               to_string(point.approach) + "," + std::to_string(point.n_points) + "," +
               format_real(point.mean_rmse) + "," + format_real(point.std_rmse) + "\n";
    }
  }
  emit(args.out, csv);
  return 0;
}

int cmd_emit_specs(const std::string& out, bool force) {
  fs::create_directories(out);
  for (int v = 1; v <= 5; ++v) {
    const std::string path = out + "/hpd-variant" + std::to_string(v) + ".json";
    guard_output(path, force);
    write_text_file(path, variant_domain_json(v).dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-based modeling over hierarchical mixed-variable domains"};
  app.require_subcommand(1);

  // validate
  std::string spec_path;
  auto* validate = app.add_subcommand("validate", "Check a domain-spec file");
  validate->add_option("spec", spec_path, "domain-spec JSON file")->required();

  // distance
  std::string dist_spec, dist_config, dist_points, dist_out;
  bool dist_force = false;
  auto* distance = app.add_subcommand("distance", "Pairwise distance matrix for a points file");
  distance->add_option("spec", dist_spec)->required();
  distance->add_option("config", dist_config)->required();
  distance->add_option("points", dist_points)->required();
  distance->add_option("--out", dist_out, "write CSV here instead of stdout");
  distance->add_flag("--force", dist_force, "overwrite an existing output file");

  // fit-predict
  FitPredictArgs fp;
  auto* fit = app.add_subcommand("fit-predict", "Fit a model on a training file and predict");
  fit->add_option("spec", fp.spec)->required();
  fit->add_option("config", fp.config)->required();
  fit->add_option("train", fp.train)->required();
  fit->add_option("query", fp.query)->required();
  fit->add_option("--model", fp.model, "idw or knn")->check(CLI::IsMember({"idw", "knn"}));
  fit->add_option("--approach", fp.approach, "meta, sub or hybrid")
      ->check(CLI::IsMember({"meta", "sub", "hybrid"}));
  fit->add_option("--q", fp.q, "IDW exponent");
  fit->add_option("--k", fp.k, "KNN neighbour count");
  fit->add_option("--bins", fp.bins, "label bins over [0,100] for knn");
  fit->add_option("--partition-by", fp.partition_by, "hybrid partition variable (repeatable)");
  fit->add_option("--out", fp.out, "write CSV here instead of stdout");
  fit->add_flag("--force", fp.force);

  // tune
  TuneArgs tn;
  auto* tune_cmd = app.add_subcommand("tune", "Tune approach-model parameters on a dataset");
  tune_cmd->add_option("spec", tn.spec)->required();
  tune_cmd->add_option("dataset", tn.dataset)->required();
  tune_cmd->add_option("--approach", tn.approach)->check(CLI::IsMember({"meta", "sub", "hybrid"}));
  tune_cmd->add_option("--model", tn.model)->check(CLI::IsMember({"idw", "knn"}));
  tune_cmd->add_option("--budget-mult", tn.budget_mult, "budget = mult * n_params");
  tune_cmd->add_option("--seed", tn.seed);
  tune_cmd->add_option("--q", tn.q);
  tune_cmd->add_option("--bins", tn.bins);
  tune_cmd->add_option("--partition-by", tn.partition_by);
  tune_cmd->add_option("--out", tn.out, "result JSON path");
  tune_cmd->add_flag("--external-eval", tn.external_eval,
                     "serve objective evaluations over stdin/stdout instead of optimizing");
  tune_cmd->add_flag("--force", tn.force);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark harness");
  bench->require_subcommand(1);

  BenchRunArgs br;
  auto* bench_run = bench->add_subcommand("run", "Generate instances and tune approach-models");
  bench_run->add_option("--variants", br.variants, "e.g. 1..5 or 1,3,5");
  bench_run->add_option("--sizes", br.sizes, "subset of VS,S,M,L");
  bench_run->add_option("--arch", br.archs, "subset of MLP,CNN");
  bench_run->add_option("--seeds", br.seeds, "number of seeds per dataset");
  bench_run->add_option("--seed", br.seed, "base seed");
  bench_run->add_option("--model", br.model)->check(CLI::IsMember({"idw", "knn"}));
  bench_run->add_option("--approaches", br.approaches);
  bench_run->add_option("--budget-mult", br.budget_mult);
  bench_run->add_option("--q", br.q);
  bench_run->add_option("--bins", br.bins);
  bench_run->add_option("--jobs", br.jobs, "parallel instances (default METADIST_JOBS or 1)");
  bench_run->add_option("--out", br.out, "output directory")->required();
  bench_run->add_flag("--force", br.force);

  BenchProfileArgs bp;
  auto* bench_profile = bench->add_subcommand("profile", "Data profiles from a bench run");
  bench_profile->add_option("--in", bp.in, "bench run output directory")->required();
  bench_profile->add_option("--out", bp.out, "profile CSV path");
  bench_profile->add_option("--tau", bp.tau, "relative convergence tolerance");
  bench_profile->add_option("--metric", bp.metric, "validation or test");
  bench_profile->add_option("--kappa-max", bp.kappa_max);
  bench_profile->add_option("--kappa-step", bp.kappa_step);
  bench_profile->add_flag("--force", bp.force);

  CurveArgs cv;
  auto* bench_curve =
      bench->add_subcommand("aggregate-curve", "Test RMSE against growing training data");
  bench_curve->add_option("--variants", cv.variants);
  bench_curve->add_option("--arch", cv.archs);
  bench_curve->add_option("--size", cv.size);
  bench_curve->add_option("--seeds", cv.seeds);
  bench_curve->add_option("--seed", cv.seed);
  bench_curve->add_option("--budget-mult", cv.budget_mult,
                          "pretune budget multiplier on the first seed (0 = default weights)");
  bench_curve->add_option("--q", cv.q);
  bench_curve->add_option("--jobs", cv.jobs);
  bench_curve->add_option("--out", cv.out, "curve CSV path");
  bench_curve->add_flag("--force", cv.force);

  std::string specs_out = "domains";
  bool specs_force = false;
  auto* emit_specs = bench->add_subcommand("emit-specs", "Write the benchmark domain-spec files");
  emit_specs->add_option("--out", specs_out, "output directory");
  emit_specs->add_flag("--force", specs_force);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(spec_path);
    if (*distance) return cmd_distance(dist_spec, dist_config, dist_points, dist_out, dist_force);
    if (*fit) return cmd_fit_predict(fp);
    if (*tune_cmd) return cmd_tune(tn);
    if (*bench_run) return cmd_bench_run(br);
    if (*bench_profile) return cmd_bench_profile(bp);
    if (*bench_curve) return cmd_bench_curve(cv);
    if (*emit_specs) return cmd_emit_specs(specs_out, specs_force);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
