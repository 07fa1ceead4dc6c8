#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "cdpu/experiment.hpp"
#include "cdpu/report.hpp"

using namespace cdpu;

namespace {

Environment always_pays() {
  ModelSpec spec{{{"T", {"0", "1"}}, {"Y", {"0", "1"}}},
                 {{"T", {}}, {"Y", {"T"}}},
                 {{"T", {{{}, {0.5, 0.5}}}}, {"Y", {{{{"T", "0"}}, {0.0, 1.0}}, {{{"T", "1"}}, {0.0, 1.0}}}}}};
  return Environment(CausalModel::create(spec),
                     {{"off", Intervention{{"T", "0"}}}, {"on", Intervention{{"T", "1"}}}}, "Y",
                     UtilityFunction{{"0", 0.0}, {"1", 1.0}});
}

ExperimentConfig small_config(std::size_t rounds, std::size_t reps) {
  ExperimentConfig cfg;
  cfg.rounds = rounds;
  cfg.replications = reps;
  return cfg;
}

std::string csv_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(r.series, out);
  return out.str();
}

}  // namespace

TEST(RunExperiment, GreedyCausalAgentStartsAtIndexZero) {
  auto cfg = small_config(1, 1);
  cfg.agents = {{"causal", CausalAgentConfig{1.0, 0.0}}};
  const auto r = run_experiment(medic_scenario(), cfg);
  EXPECT_EQ(r.log.at(0, 0, 0).action, 0u);
  EXPECT_EQ(r.log.at(0, 0, 0).round, 1u);
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0].mean.size(), 1u);
}

TEST(RunExperiment, RandomAgentAveragesTheTwoArms) {
  auto cfg = small_config(200, 200);
  cfg.agents = {{"random", RandomAgentConfig{}}};
  const auto r = run_experiment(medic_scenario(), cfg);
  const double overall = r.series_for("random").cumulative_mean.back();
  EXPECT_GE(overall, 0.66);
  EXPECT_LE(overall, 0.73);
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  auto cfg = small_config(30, 40);
  const auto serial = run_experiment(medic_scenario(), cfg);
  cfg.threads = 4;
  const auto threaded = run_experiment(medic_scenario(), cfg);
  EXPECT_EQ(serial.log, threaded.log);
  EXPECT_EQ(serial.series, threaded.series);
  EXPECT_EQ(csv_text(serial), csv_text(threaded));
}

TEST(RunExperiment, SeedChangesResults) {
  auto cfg = small_config(20, 10);
  const auto a = run_experiment(medic_scenario(), cfg);
  cfg.seed = 43;
  EXPECT_NE(run_experiment(medic_scenario(), cfg).log, a.log);
}

TEST(RunExperiment, LogIsRectangularAndRewardsMatchSeries) {
  const auto cfg = small_config(5, 7);
  const auto r = run_experiment(medic_scenario(), cfg);
  EXPECT_EQ(r.log.agents(), (std::vector<std::string>{"causal", "qlearning", "random"}));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t t = 0; t < 5; ++t) {
      double sum = 0.0;
      for (std::size_t rep = 0; rep < 7; ++rep) {
        const auto& rec = r.log.at(rep, a, t);
        EXPECT_EQ(rec.round, t + 1);
        EXPECT_LT(rec.action, 2u);
        EXPECT_TRUE(rec.reward == 0.0 || rec.reward == 1.0);
        sum += rec.reward;
      }
      EXPECT_DOUBLE_EQ(r.series[a].mean[t], sum / 7.0);
    }
}

TEST(RunExperiment, InvalidConfigurations) {
  auto cfg = small_config(0, 1);
  EXPECT_THROW(run_experiment(medic_scenario(), cfg), Error);
  cfg = small_config(1, 1);
  cfg.agents = {{"a", RandomAgentConfig{}}, {"a", RandomAgentConfig{}}};
  EXPECT_THROW(run_experiment(medic_scenario(), cfg), Error);
  cfg.agents = {{"q", QLearningConfig{0.0, 0.1, 0.0}}};
  EXPECT_THROW(run_experiment(medic_scenario(), cfg), Error);
}

TEST(ExperimentConfig, ParsesAgentsInFileOrder) {
  const auto doc = json::parse(R"({"rounds": 10, "replications": 3, "seed": 7, "epsilon": 0.1,
    "agents": {"random": {}, "greedy": {"type": "causal", "epsilon": 0.0}, "qlearning": {"alpha": 0.2}},
    "target": "Y"})");
  const auto cfg = experiment_config_from_json(doc);
  EXPECT_EQ(cfg.rounds, 10u);
  EXPECT_EQ(cfg.replications, 3u);
  EXPECT_EQ(cfg.seed, 7u);
  ASSERT_EQ(cfg.agents.size(), 3u);
  EXPECT_EQ(cfg.agents[0].label, "random");
  EXPECT_EQ(std::get<CausalAgentConfig>(cfg.agents[1].params).epsilon, 0.0);
  EXPECT_EQ(std::get<QLearningConfig>(cfg.agents[2].params).alpha, 0.2);

  EXPECT_THROW(experiment_config_from_json(json::parse(R"({"agents": {"x": {}}})")), Error);
  EXPECT_THROW(experiment_config_from_json(json::parse(R"({"agents": {"random": {"alpha": 1}}})")), Error);
  EXPECT_THROW(experiment_config_from_json(json::parse(R"({"rounds": -1})")), Error);
}

TEST(ConvergenceIndex, Examples) {
  const std::vector<double> x{0.5, 0.6, 0.8, 0.85}, y{0.5, 0.7, 0.81, 0.84};
  EXPECT_EQ(convergence_index(x, y, 0.05), 2u);
  EXPECT_EQ(convergence_index(x, x, 0.05), 0u);
  const std::vector<double> far{0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(convergence_index(x, far, 0.05), std::nullopt);
  const std::vector<double> shorter{0.5};
  try {
    convergence_index(x, shorter, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::length_mismatch);
  }
  EXPECT_THROW(convergence_index(x, y, 0.0), Error);
}

TEST(ConvergenceIndex, NonIncreasingInEpsilon) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(30), y(30);
    for (std::size_t t = 0; t < 30; ++t) {
      x[t] = unit(gen);
      y[t] = x[t] + (unit(gen) - 0.5) * 0.4 / static_cast<double>(t + 1);
    }
    const double e1 = 0.01 + unit(gen) * 0.1, e2 = e1 + unit(gen) * 0.1;
    const auto n1 = convergence_index(x, y, e1), n2 = convergence_index(x, y, e2);
    if (!n1) continue;
    ASSERT_TRUE(n2.has_value());
    EXPECT_LE(*n2, *n1);
  }
}

TEST(Csv, SingleRoundSingleAgent) {
  auto cfg = small_config(1, 1);
  cfg.agents = {{"causal", CausalAgentConfig{}}};
  const auto r = run_experiment(always_pays(), cfg);
  EXPECT_EQ(csv_text(r), "round,agent,mean_reward,cum_mean_reward\n1,causal,1.0000000000,1.0000000000\n");
}

TEST(Csv, RoundMajorInConfiguredOrderAndReproducible) {
  auto cfg = small_config(3, 5);
  cfg.agents = {{"random", RandomAgentConfig{}}, {"causal", CausalAgentConfig{}}};
  const auto text = csv_text(run_experiment(medic_scenario(), cfg));
  EXPECT_EQ(text, csv_text(run_experiment(medic_scenario(), cfg)));
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> prefixes;
  std::getline(in, line);
  while (std::getline(in, line)) prefixes.push_back(line.substr(0, line.find(',', 2)));
  EXPECT_EQ(prefixes, (std::vector<std::string>{"1,random", "1,causal", "2,random", "2,causal", "3,random", "3,causal"}));
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Csv, DecimalFormatting) {
  EXPECT_EQ(format_decimal(0.0), "0.0000000000");
  EXPECT_EQ(format_decimal(0.87), "0.8700000000");
  EXPECT_EQ(format_decimal(0.001234), "0.001234000000");
  EXPECT_EQ(std::stod(format_decimal(1.0 / 3.0)), std::stod("0.3333333333"));
}

TEST(Csv, TrialLog) {
  auto cfg = small_config(2, 2);
  cfg.agents = {{"causal", CausalAgentConfig{}}};
  std::ostringstream out;
  write_trial_log_csv(run_experiment(always_pays(), cfg).log, out);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "replication,round,agent,action,reward");
  EXPECT_EQ(first.substr(0, 11), "1,1,causal,");
}

TEST(Svg, OnePolylinePerAgent) {
  const std::vector<RoundSeries> series{make_series("causal", {0.5, 0.7, 0.9}), make_series("q<&>", {0.4, 0.4, 0.4})};
  std::ostringstream out;
  write_svg(series, out);
  const auto svg = out.str();
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find(">round<"), std::string::npos);
  EXPECT_NE(svg.find(">mean reward<"), std::string::npos);
  EXPECT_NE(svg.find("data-agent=\"q&lt;&amp;&gt;\""), std::string::npos);

  const std::regex poly("<polyline[^>]*points=\"([^\"]*)\"");
  std::vector<std::string> points;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it)
    points.push_back((*it)[1]);
  ASSERT_EQ(points.size(), 2u);

  // constant series: every point shares one y coordinate
  std::set<std::string> ys;
  std::istringstream pts(points[1]);
  for (std::string p; pts >> p;) ys.insert(p.substr(p.find(',') + 1));
  EXPECT_EQ(ys.size(), 1u);

  // tags balance
  std::size_t opens = 0, closes = 0, selfs = 0;
  for (std::size_t i = 0; (i = svg.find('<', i)) != std::string::npos; ++i) {
    if (svg.compare(i, 2, "</") == 0) ++closes;
    else if (svg.compare(i, 2, "<?") != 0) ++opens;
  }
  for (std::size_t i = 0; (i = svg.find("/>", i)) != std::string::npos; ++i) ++selfs;
  EXPECT_EQ(opens, closes + selfs);
}

TEST(Svg, EmptySetIsUsageError) {
  std::ostringstream out;
  try {
    write_svg(std::vector<RoundSeries>{}, out);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::usage);
  }
}

TEST(Output, UnwritablePathIsIoError) {
  const std::vector<RoundSeries> series{make_series("a", {1.0})};
  try {
    write_csv(series, std::filesystem::path("/nonexistent/dir/out.csv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io_error);
  }
}
