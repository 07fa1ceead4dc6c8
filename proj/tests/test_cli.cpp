#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cdpu/cli.hpp"

using namespace cdpu;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cdpu");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string model = CDPU_DATA_DIR "/medic_model.json";
const std::string experiment = CDPU_DATA_DIR "/medic_experiment.json";

}  // namespace

TEST(Cli, InterventionalQuery) {
  const auto r = run({"query", "--model", model, "--do", "T=1", "--target", "Y=1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.87\n");
}

TEST(Cli, ObservationalQuery) {
  const auto r = run({"query", "--model", model, "--target", "Y=1", "--given", "T=0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(r.out), 0.6695, 1e-4);
}

TEST(Cli, BestAction) {
  const auto r = run({"best-action", "--model", model, "--experiment", experiment});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "treatment\n");
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({"query", "--target", "Y=1"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"query", "--model", model, "--target", "Y"}).code, 1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, ValidationErrorsExitTwo) {
  const auto bad = std::filesystem::temp_directory_path() / "cdpu_cli_bad_model.json";
  {
    std::ofstream f(bad);
    f << R"({"variables":[{"name":"A","states":["0","1"]}],"parents":{"A":[]},"cpts":{"A":[{"p":[0.5,0.6]}]}})";
  }
  const auto r = run({"query", "--model", bad.string(), "--target", "A=1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/cpts/A/0/p"), std::string::npos);
  std::filesystem::remove(bad);

  EXPECT_EQ(run({"query", "--model", "/nonexistent.json", "--target", "Y=1"}).code, 2);
  EXPECT_EQ(run({"query", "--model", model, "--target", "Y=7"}).code, 2);
  EXPECT_EQ(run({"query", "--model", model, "--do", "Y=1", "--target", "Y=1"}).code, 2);
}

TEST(Cli, SimulateWritesOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "cdpu_cli_sim";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "out.csv").string(), svg = (dir / "out.svg").string();
  const auto r = run({"simulate", "--model", model, "--experiment", experiment, "--out", csv, "--svg", svg, "--rounds",
                      "5", "--reps", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("convergence index"), std::string::npos);
  std::ifstream in(csv);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 1u + 5u * 3u);
  EXPECT_TRUE(std::filesystem::exists(svg));
  std::filesystem::remove_all(dir);
}
