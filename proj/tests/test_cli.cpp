#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "metadist/bench.hpp"
#include "metadist/csv.hpp"
#include "metadist/domain_json.hpp"

namespace fs = std::filesystem;
using namespace metadist;

namespace {

struct CliResult {
  int code = -1;
  std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(METADIST_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer;
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("metadist-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    spec_ = (dir_ / "variant1.json").string();
    write_text_file(spec_, variant_domain_json(1).dump(2) + "\n");
    config_ = (dir_ / "config.json").string();
    write_text_file(config_, "{\"p\": 2}\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string spec_, config_;
};

}  // namespace

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(run_cli("validate " + spec_).code, 0);
  EXPECT_EQ(run_cli("validate " + spec_).output, "");

  const char* cyclic = R"json({
    "variables": [
      {"name": "x1", "kind": "int", "universal": {"ints": [0,1]}, "excludable": false},
      {"name": "x2", "kind": "int", "universal": {"ints": [0,1]}, "excludable": false}
    ],
    "arcs": [
      {"parent": "x2", "child": "x1", "kind": "values"},
      {"parent": "x1", "child": "x2", "kind": "values"}
    ],
    "rules": [
      {"child": "x1", "cases": [{"when": {}, "set": {"ints": [0,1]}}]},
      {"child": "x2", "cases": [{"when": {}, "set": {"ints": [0,1]}}]}
    ]
  })json";
  write_text_file(path("cyclic.json"), cyclic);
  const CliResult result = run_cli("validate " + path("cyclic.json"));
  EXPECT_EQ(result.code, 4);
  EXPECT_NE(result.output.find("cycle"), std::string::npos);
  EXPECT_NE(result.output.find("x1"), std::string::npos);

  EXPECT_EQ(run_cli("validate " + path("missing.json")).code, 3);
  write_text_file(path("garbage.json"), "not json");
  EXPECT_EQ(run_cli("validate " + path("garbage.json")).code, 3);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST_F(CliTest, DistanceMatrixIsSymmetricWithZeroDiagonal) {
  const RoleGraph g = build_variant(1);
  const SignatureSet sigs = SignatureSet::enumerate(g);
  Rng rng(3);
  Dataset points;
  for (int i = 0; i < 6; ++i) points.points.push_back(sample_extended(g, rng));
  write_text_file(path("points.csv"), dataset_to_csv(g, points));

  const CliResult result =
      run_cli("distance " + spec_ + " " + config_ + " " + path("points.csv"));
  ASSERT_EQ(result.code, 0);
  std::vector<std::vector<double>> matrix;
  std::stringstream ss(result.output);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<double> row;
    for (const auto& cell : split_csv_line(line)) row.push_back(std::stod(cell));
    matrix.push_back(std::move(row));
  }
  ASSERT_EQ(matrix.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    ASSERT_EQ(matrix[i].size(), 6u);
    EXPECT_EQ(matrix[i][i], 0.0);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(matrix[i][j], matrix[j][i]);
  }
}

TEST_F(CliTest, DatasetCsvRoundTripsByteIdentical) {
  const RoleGraph g = build_variant(1);
  const SignatureSet sigs = SignatureSet::enumerate(g);
  const Instance inst = sample_instance(g, sigs, 1, Size::VS, Arch::MLP, 0, 7);
  Dataset data;
  data.has_targets = true;
  data.points = inst.points;
  data.targets = inst.scores;
  const std::string written = dataset_to_csv(g, data);
  write_text_file(path("data.csv"), written);
  const Dataset read = load_dataset(g, path("data.csv"));
  EXPECT_EQ(dataset_to_csv(g, read), written);
}

TEST_F(CliTest, FitPredictIsDeterministicAndFlagsUnseenSignatures) {
  const RoleGraph g = build_variant(1);
  const SignatureSet sigs = SignatureSet::enumerate(g);
  Rng rng(5);
  Dataset train;
  train.has_targets = true;
  for (int i = 0; i < 12; ++i) {  // only signatures 0 and 1
    train.points.push_back(sample_in_signature(g, sigs, i % 2, rng));
    train.targets.push_back(rng.uniform(0.0, 100.0));
  }
  Dataset query;
  query.points.push_back(sample_in_signature(g, sigs, 0, rng));
  query.points.push_back(sample_in_signature(g, sigs, 2, rng));  // unseen under sub
  write_text_file(path("train.csv"), dataset_to_csv(g, train));
  write_text_file(path("query.csv"), dataset_to_csv(g, query));

  const std::string base = "fit-predict " + spec_ + " " + config_ + " " + path("train.csv") +
                           " " + path("query.csv");
  const CliResult meta = run_cli(base + " --model idw --approach meta");
  ASSERT_EQ(meta.code, 0);
  EXPECT_EQ(meta.output, run_cli(base + " --model idw --approach meta").output);
  EXPECT_EQ(meta.output.find("unseen_signature"), std::string::npos);

  const CliResult sub = run_cli(base + " --model idw --approach sub");
  ASSERT_EQ(sub.code, 0);
  EXPECT_NE(sub.output.find("unseen_signature"), std::string::npos);

  const CliResult knn = run_cli(base + " --model knn --approach meta --k 3");
  ASSERT_EQ(knn.code, 0);
  std::stringstream ss(knn.output);
  std::string header, row;
  std::getline(ss, header);
  EXPECT_EQ(header, "prediction,flag");
  int rows = 0;
  while (std::getline(ss, row)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, TuneWritesResultJsonDeterministically) {
  const RoleGraph g = build_variant(1);
  const SignatureSet sigs = SignatureSet::enumerate(g);
  const Instance inst = sample_instance(g, sigs, 1, Size::VS, Arch::MLP, 0, 11);
  Dataset data;
  data.has_targets = true;
  data.points = inst.points;
  data.targets = inst.scores;
  write_text_file(path("dataset.csv"), dataset_to_csv(g, data));

  const std::string base = "tune " + spec_ + " " + path("dataset.csv") +
                           " --approach meta --model idw --budget-mult 3 --seed 9 --out ";
  ASSERT_EQ(run_cli(base + path("a.json")).code, 0);
  ASSERT_EQ(run_cli(base + path("b.json")).code, 0);
  const std::string a = read_text_file(path("a.json"));
  EXPECT_EQ(a, read_text_file(path("b.json")));

  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j.at("n_params").get<int>(), 7);  // 5 weights + 2 exclusion costs
  EXPECT_EQ(j.at("budget").get<long>(), 21);
  EXPECT_EQ(j.at("evals").get<long>(), 21);
  EXPECT_TRUE(j.contains("best_configs"));
  EXPECT_TRUE(j.at("trace").is_array());

  // Existing outputs are protected without --force.
  EXPECT_EQ(run_cli(base + path("a.json")).code, 3);
  EXPECT_EQ(run_cli(base + path("a.json") + " --force").code, 0);
}

TEST_F(CliTest, BenchRunProfileAndSpecsEmission) {
  const std::string out = path("bench");
  const std::string run_args =
      "bench run --variants 1 --sizes VS --arch MLP --seeds 2 --budget-mult 3 --seed 4 --out " +
      out;
  ASSERT_EQ(run_cli(run_args).code, 0);
  EXPECT_TRUE(fs::exists(out + "/manifest.json"));
  EXPECT_TRUE(fs::exists(out + "/results.csv"));
  EXPECT_TRUE(fs::exists(out + "/trace.csv"));
  EXPECT_TRUE(fs::exists(out + "/table.csv"));
  EXPECT_TRUE(fs::exists(out + "/hpd-v1-VS-MLP-s0.train.csv"));
  EXPECT_TRUE(fs::exists(out + "/hpd-v1-VS-MLP-s1.test.csv"));

  // Refuses to clobber without --force.
  EXPECT_EQ(run_cli(run_args).code, 3);

  const CliResult profile =
      run_cli("bench profile --in " + out + " --tau 0.1 --kappa-max 5 --kappa-step 1");
  ASSERT_EQ(profile.code, 0);
  std::stringstream ss(profile.output);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "kappa,approach,fraction");
  std::set<std::string> approaches;
  std::string line;
  while (std::getline(ss, line)) {
    const auto cells = split_csv_line(line);
    ASSERT_EQ(cells.size(), 3u);
    approaches.insert(cells[1]);
    const double fraction = std::stod(cells[2]);
    EXPECT_GE(fraction, 0.0);
    EXPECT_LE(fraction, 1.0);
  }
  EXPECT_EQ(approaches,
            (std::set<std::string>{"sub-idw", "hybrid-idw", "meta-idw"}));

  ASSERT_EQ(run_cli("bench emit-specs --out " + path("specs")).code, 0);
  for (int v = 1; v <= 5; ++v) {
    const std::string file = path("specs") + "/hpd-variant" + std::to_string(v) + ".json";
    ASSERT_TRUE(fs::exists(file));
    EXPECT_EQ(run_cli("validate " + file).code, 0);
  }
  // The shipped copies match what the binary emits.
  for (int v = 1; v <= 5; ++v) {
    const std::string shipped =
        std::string(METADIST_SOURCE_DIR) + "/domains/hpd-variant" + std::to_string(v) + ".json";
    ASSERT_TRUE(fs::exists(shipped)) << shipped;
    EXPECT_EQ(read_text_file(shipped),
              read_text_file(path("specs") + "/hpd-variant" + std::to_string(v) + ".json"));
  }
}

TEST_F(CliTest, AggregateCurveSmoke) {
  const CliResult result = run_cli(
      "bench aggregate-curve --variants 1 --arch MLP --size VS --seeds 2 --budget-mult 0 "
      "--seed 1 --jobs 2");
  ASSERT_EQ(result.code, 0);
  std::stringstream ss(result.output);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "variant,arch,approach,n_points,mean_rmse,std_rmse");
  int rows = 0;
  std::string line;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 3 * 43);  // three approaches, 45 train points from 3 signatures
}
