#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using ssdml::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ssdml_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ssdml");
    out_.str("");
    err_.str("");
    return ssdml::cli::run(args, {out_, err_});
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path write_config(const json& j, const std::string& name = "cfg.json") {
    const auto p = path(name);
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static json small_config() {
    return json{{"data", {{"synth", {{"seed", 3}, {"classes", 2}, {"per_class", 20}, {"dim", 4},
                                     {"spread", 1.0}, {"label_fraction", 0.25}, {"test_per_class", 10}}}}},
                {"net", {{"hidden", {6}}, {"out_dim", 5}, {"seed", 2}}},
                {"train", {{"k", 4}, {"l", 3}, {"t_b", 10}, {"n_p", 20}, {"rounds", 2}, {"seed", 4},
                           {"epochs_per_partition", 1}, {"sgd", {{"lr", 0.01}}}}},
                {"eval", {{"ks", {1, 2}}}}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, SynthWritesRequestedRows) {
  ASSERT_EQ(run({"synth", "--seed", "1", "--classes", "2", "--per-class", "50", "--dim", "8",
                 "--label-fraction", "0.1", "--out", path("blobs.csv").string()}),
            0);
  const auto ds = ssdml::load_csv(path("blobs.csv"));
  EXPECT_EQ(ds.size(), 100);
  EXPECT_EQ(ds.dim(), 8);
  EXPECT_EQ(ds.num_labeled(), 10);
}

TEST_F(CliTest, SynthWithoutOutIsUsageError) {
  EXPECT_EQ(run({"synth", "--seed", "1"}), 2);
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, SynthIsReproducible) {
  const std::vector<std::string> flags{"synth", "--seed", "9", "--classes", "3", "--dim", "5"};
  auto a = flags, b = flags;
  a.insert(a.end(), {"--out", path("a.csv").string()});
  b.insert(b.end(), {"--out", path("b.csv").string()});
  ASSERT_EQ(run(a), 0);
  ASSERT_EQ(run(b), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run({}), 2); }

TEST_F(CliTest, TrainWritesArtifacts) {
  const auto cfg = write_config(small_config());
  ASSERT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string()}), 0) << err_.str();
  for (const char* f : {"log.jsonl", "ckpt_final.json", "ckpt_round1.json", "ckpt_round2.json", "metrics.json",
                        "embeddings_test.csv"})
    EXPECT_TRUE(fs::exists(path("run") / f)) << f;
  const auto metrics = json::parse(slurp(path("run") / "metrics.json"));
  EXPECT_TRUE(metrics.contains("nmi"));
  std::vector<std::string> keys;
  for (const auto& [k, _] : metrics.at("recall").items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(metrics.at("n_test").get<int>(), 20);
}

TEST_F(CliTest, TrainRejectsSubspaceLargerThanEmbedding) {
  auto j = small_config();
  j["train"]["l"] = 6;
  const auto cfg = write_config(j);
  EXPECT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string()}), 2);
  EXPECT_NE(err_.str().find("train.l"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(path("run")));
}

TEST_F(CliTest, TrainRejectsUnknownKey) {
  auto j = small_config();
  j["train"]["learning_rate"] = 0.1;
  const auto cfg = write_config(j);
  EXPECT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string()}), 2);
  EXPECT_NE(err_.str().find("train.learning_rate"), std::string::npos) << err_.str();
}

TEST_F(CliTest, TrainRejectsWrongType) {
  auto j = small_config();
  j["train"]["k"] = "ten";
  const auto cfg = write_config(j);
  EXPECT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string()}), 2);
  EXPECT_NE(err_.str().find("train.k"), std::string::npos);
}

TEST_F(CliTest, TrainLogIsByteIdenticalAcrossRuns) {
  const auto cfg = write_config(small_config());
  ASSERT_EQ(run({"train", "--config", cfg.string(), "--out", path("r1").string()}), 0);
  ASSERT_EQ(run({"train", "--config", cfg.string(), "--out", path("r2").string()}), 0);
  const auto a = slurp(path("r1") / "log.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("r2") / "log.jsonl"));
  EXPECT_EQ(slurp(path("r1") / "ckpt_final.json"), slurp(path("r2") / "ckpt_final.json"));
}

TEST_F(CliTest, TrainFlagsOverrideConfig) {
  const auto cfg = write_config(small_config());
  ASSERT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string(), "--rounds", "1"}), 0);
  EXPECT_TRUE(fs::exists(path("run") / "ckpt_round1.json"));
  EXPECT_FALSE(fs::exists(path("run") / "ckpt_round2.json"));
}

TEST_F(CliTest, TrainReadsCsvPathsRelativeToConfig) {
  ASSERT_EQ(run({"synth", "--seed", "2", "--classes", "2", "--per-class", "20", "--dim", "4", "--label-fraction",
                 "0.25", "--out", path("train.csv").string(), "--test-out", path("test.csv").string(),
                 "--test-per-class", "5"}),
            0);
  auto j = small_config();
  j["data"] = {{"train", "train.csv"}, {"test", "test.csv"}};
  const auto cfg = write_config(j);
  ASSERT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string()}), 0) << err_.str();
  EXPECT_EQ(json::parse(slurp(path("run") / "metrics.json")).at("n_test").get<int>(), 10);
}

TEST_F(CliTest, EvalSchemaAndProjection) {
  const auto cfg = write_config(small_config());
  ASSERT_EQ(run({"train", "--config", cfg.string(), "--out", path("run").string()}), 0);
  ASSERT_EQ(run({"synth", "--seed", "3", "--classes", "2", "--per-class", "20", "--dim", "4", "--out",
                 path("unused.csv").string(), "--test-out", path("test.csv").string(), "--test-per-class", "10"}),
            0);
  const auto ck = (path("run") / "ckpt_final.json").string();

  ASSERT_EQ(run({"eval", "--checkpoint", ck, "--test", path("test.csv").string(), "--out", path("e1").string()}), 0)
      << err_.str();
  const auto m = json::parse(slurp(path("e1") / "metrics.json"));
  std::vector<std::string> keys;
  for (const auto& [k, _] : m.at("recall").items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, (std::vector<std::string>{"1", "2", "4", "8"}));
  EXPECT_GE(m.at("nmi").get<double>(), 0.0);
  EXPECT_LE(m.at("nmi").get<double>(), 100.0);
  EXPECT_EQ(ssdml::load_csv(path("e1") / "embeddings.csv").dim(), 5);

  ASSERT_EQ(run({"eval", "--checkpoint", ck, "--test", path("test.csv").string(), "--out", path("e2").string(),
                 "--project-L", "--ks", "1,3"}),
            0);
  EXPECT_EQ(ssdml::load_csv(path("e2") / "embeddings.csv").dim(), 3);
  const auto m2 = json::parse(slurp(path("e2") / "metrics.json"));
  EXPECT_TRUE(m2.at("recall").contains("3"));
  EXPECT_EQ(m2.at("recall").size(), 2u);
}

TEST_F(CliTest, EvalMissingFilesIsUsageError) {
  EXPECT_EQ(run({"eval", "--checkpoint", path("nope.json").string(), "--test", path("nope.csv").string(), "--out",
                 path("e").string()}),
            2);
}

TEST_F(CliTest, PropagateDebugDumpsMatrices) {
  const auto cfg = write_config(small_config());
  ASSERT_EQ(run({"propagate-debug", "--config", cfg.string(), "--out", path("dbg").string()}), 0) << err_.str();
  for (const char* f : {"W0.csv", "Q.csv", "Wstar.csv", "W.csv", "triplets.csv", "nodes.csv"})
    EXPECT_TRUE(fs::exists(path("dbg") / f)) << f;
  // 10 labeled + n_p = 20 unlabeled nodes, k/2 = 2 triplets per node
  std::ifstream t(path("dbg") / "triplets.csv");
  std::string line;
  int rows = -1;
  while (std::getline(t, line)) ++rows;
  EXPECT_EQ(rows, 30 * 2);
}

#ifdef SSDML_CLI_PATH
#include <sys/wait.h>

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = SSDML_CLI_PATH;
  const auto status = [](int raw) { return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1; };
  EXPECT_EQ(status(std::system((bin + " synth --seed 1 > /dev/null 2>&1").c_str())), 2);
  EXPECT_EQ(status(std::system((bin + " synth --out " + path("x.csv").string() + " > /dev/null").c_str())), 0);
  EXPECT_TRUE(fs::exists(path("x.csv")));
  EXPECT_EQ(status(std::system((bin + " --help > /dev/null").c_str())), 0);
}
#endif
