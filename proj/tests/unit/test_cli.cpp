#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "posebench/cli.hpp"
#include "posebench/io.hpp"

using namespace posebench;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "posebench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("posebench_cli_" + std::string(::testing::UnitTest::GetInstance()
                                               ->current_test_info()
                                               ->name()));
    fs::create_directories(dir_);
    unsetenv("POSEBENCH_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("POSEBENCH_SEED");
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string fixture(const std::string& name) {
    return std::string(POSEBENCH_FIXTURE_DIR) + "/" + name;
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EvalZeroNoiseFixture) {
  const Result r = run({"eval", "--gt", fixture("zero_noise_gt.jsonl"), "--det",
                        fixture("zero_noise_det.jsonl"), "--metrics", "ap,avp,aos,avp3d", "--out",
                        path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json doc = io::Json::parse(io::read_file(path("report.json")));
  EXPECT_EQ(doc["means"]["map"], 1.0);
  EXPECT_EQ(doc["means"]["maos"], 1.0);
  EXPECT_EQ(doc["means"]["mavp3d"], 1.0);
  for (const auto& [v, value] : doc["means"]["mavp"].items()) EXPECT_EQ(value, 1.0) << v;
  EXPECT_EQ(doc["inputs"][0]["sha256"], io::sha256_file(fixture("zero_noise_gt.jsonl")));
}

TEST_F(Cli, EvalIsByteDeterministic) {
  const std::vector<std::string> base = {"eval",  "--gt", fixture("golden_gt.jsonl"),
                                         "--det", fixture("golden_det.jsonl"), "--views",
                                         "4,8,16,24", "--pose-mode", "continuous",
                                         "--iou-rule", "strict", "--ap-interp", "11point"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.json")});
  b.insert(b.end(), {"--out", path("b.json")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
  const io::Json doc = io::Json::parse(io::read_file(path("a.json")));
  EXPECT_EQ(doc["config"]["pose_mode"], "continuous");
  EXPECT_EQ(doc["config"]["ap_interp"], "11point");
}

TEST_F(Cli, EvalToStdout) {
  const Result r = run({"eval", "--gt", fixture("golden_gt.jsonl"), "--det",
                        fixture("golden_det.jsonl"), "--metrics", "ap"});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json doc = io::Json::parse(r.out);
  EXPECT_FALSE(doc["means"].contains("mavp"));
  EXPECT_NEAR(doc["means"]["map"].get<double>(), 5.0 / 6.0, 1e-15);
}

TEST_F(Cli, ValidationFailuresExitOne) {
  io::write_file(path("bad.jsonl"), "{\"image\":\"a\",\"class\":\"c\",\"bbox\":[5,0,1,1]}\n");
  Result r = run({"eval", "--gt", path("bad.jsonl"), "--det", fixture("golden_det.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.jsonl:1"), std::string::npos) << r.err;
  EXPECT_EQ(run({"eval", "--gt", path("missing.jsonl"), "--det", path("missing.jsonl")}).code, 1);
  EXPECT_EQ(run({"eval", "--gt", fixture("golden_gt.jsonl")}).code, 1);
  EXPECT_EQ(run({"eval", "--gt", fixture("golden_gt.jsonl"), "--det",
                 fixture("golden_det.jsonl"), "--pose-mode", "fuzzy"})
                .code,
            1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, MissingAnglesRejectedOnlyWhenNeeded) {
  io::write_file(path("gt.jsonl"), "{\"image\":\"a\",\"class\":\"c\",\"bbox\":[0,0,1,1]}\n");
  io::write_file(path("det.jsonl"),
                 "{\"image\":\"a\",\"class\":\"c\",\"bbox\":[0,0,1,1],\"score\":0.5}\n");
  EXPECT_EQ(run({"eval", "--gt", path("gt.jsonl"), "--det", path("det.jsonl"), "--metrics", "ap"})
                .code,
            0);
  const Result r = run({"eval", "--gt", path("gt.jsonl"), "--det", path("det.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("azimuth_deg"), std::string::npos);
}

TEST_F(Cli, CurvesWritesSvgAndCsvTwin) {
  const Result r = run({"curves", "--gt", fixture("golden_gt.jsonl"), "--det",
                        fixture("golden_det.jsonl"), "--class", "car", "--metric", "avp",
                        "--views", "8", "--out", path("car.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("car.svg")));
  const std::string csv = io::read_file(path("car.csv"));
  EXPECT_NE(csv.find("AVP8,"), std::string::npos);
  ASSERT_EQ(run({"curves", "--gt", fixture("golden_gt.jsonl"), "--det",
                 fixture("golden_det.jsonl"), "--class", "car", "--metric", "aos", "--out",
                 path("aos.csv")})
                .code,
            0);
  EXPECT_NE(io::read_file(path("aos.csv")).find("AOS,"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("aos.svg")));
  EXPECT_EQ(run({"curves", "--gt", fixture("golden_gt.jsonl"), "--det",
                 fixture("golden_det.jsonl"), "--class", "truck", "--out", path("x.svg")})
                .code,
            1);
  EXPECT_EQ(run({"curves", "--gt", fixture("golden_gt.jsonl"), "--det",
                 fixture("golden_det.jsonl"), "--class", "car", "--out", path("x.png")})
                .code,
            1);
}

TEST_F(Cli, Confusion) {
  const Result r = run({"confusion", "--gt", fixture("golden_gt.jsonl"), "--det",
                        fixture("golden_det.jsonl"), "--views", "8", "--out", path("c.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(io::read_file(path("c.csv")).find("car,all,opposite,1,"), std::string::npos);
  EXPECT_NE(io::read_file(path("c.svg")).find("</svg>"), std::string::npos);
}

TEST_F(Cli, LossCheck) {
  for (const char* loss : {"xent", "euclidean", "huber", "cyclic"}) {
    const Result r = run({"losscheck", "--loss", loss, "--trials", "100", "--step", "1e-6"});
    EXPECT_EQ(r.code, 0) << loss << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
  }
  EXPECT_EQ(run({"losscheck", "--loss", "huber", "--delta", "0.5"}).code, 0);
  // A step this coarse cannot resolve the gradients to 1e-5.
  const Result coarse = run({"losscheck", "--loss", "cyclic", "--step", "0.1"});
  EXPECT_EQ(coarse.code, 1);
  EXPECT_NE(coarse.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run({"losscheck", "--loss", "l7"}).code, 1);
}

TEST_F(Cli, SimulateSeedPrecedence) {
  const std::string scen = fixture("zero_noise_scenario.json");
  ASSERT_EQ(run({"simulate", "--scenario", scen, "--out-gt", path("g1"), "--out-det",
                 path("d1")})
                .code,
            0);
  EXPECT_EQ(io::read_file(path("g1")), io::read_file(fixture("zero_noise_gt.jsonl")));
  EXPECT_EQ(io::read_file(path("d1")), io::read_file(fixture("zero_noise_det.jsonl")));

  setenv("POSEBENCH_SEED", "7", 1);
  ASSERT_EQ(run({"simulate", "--scenario", scen, "--out-gt", path("g2"), "--out-det",
                 path("d2")})
                .code,
            0);
  EXPECT_NE(io::read_file(path("g2")), io::read_file(path("g1")));
  EXPECT_EQ((*io::load_gt(path("g2")).meta)["seed"], 7);

  ASSERT_EQ(run({"simulate", "--scenario", scen, "--seed", "42", "--out-gt", path("g3"),
                 "--out-det", path("d3")})
                .code,
            0);
  EXPECT_EQ(io::read_file(path("g3")), io::read_file(path("g1")));

  setenv("POSEBENCH_SEED", "seven", 1);
  EXPECT_EQ(run({"simulate", "--scenario", scen, "--out-gt", path("g4"), "--out-det",
                 path("d4")})
                .code,
            1);
}

TEST_F(Cli, SimulateMetaHeader) {
  ASSERT_EQ(run({"simulate", "--scenario", fixture("zero_noise_scenario.json"), "--out-gt",
                 path("g"), "--out-det", path("d")})
                .code,
            0);
  const io::DetDataset d = io::load_det(path("d"));
  ASSERT_TRUE(d.meta);
  EXPECT_EQ((*d.meta)["rng"], "mt19937_64");
  EXPECT_EQ((*d.meta)["kind"], "det");
  EXPECT_EQ((*d.meta)["scenario"]["n_images"], 200);
}
