#pragma once

// Replicated multi-agent simulations producing per-round average-reward
// series, plus the convergence check between two such series.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "cdpu/agents.hpp"
#include "cdpu/environment.hpp"
#include "cdpu/model_io.hpp"
#include "cdpu/random.hpp"

namespace cdpu {

struct CausalAgentConfig {
  double prior_alpha = 1.0;
  double epsilon = 0.1;
};

struct QLearningConfig {
  double alpha = 0.1;
  double epsilon = 0.1;
  double q0 = 1.0;
};

struct RandomAgentConfig {};

struct AgentConfig {
  std::string label;
  std::variant<CausalAgentConfig, QLearningConfig, RandomAgentConfig> params;
};

inline std::vector<AgentConfig> default_agents() {
  return {{"causal", CausalAgentConfig{}}, {"qlearning", QLearningConfig{}}, {"random", RandomAgentConfig{}}};
}

struct ExperimentConfig {
  std::size_t rounds = 200;
  std::size_t replications = 1000;
  std::uint64_t seed = 42;
  double epsilon = 0.05;  // convergence tolerance between the causal and Q-learning curves
  std::vector<AgentConfig> agents = default_agents();
  unsigned threads = 1;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> svg;

  void validate() const {
    if (rounds < 1) throw Error(Errc::invalid_parameter, "rounds must be at least 1");
    if (replications < 1) throw Error(Errc::invalid_parameter, "replications must be at least 1");
    if (!(epsilon > 0.0)) throw Error(Errc::invalid_parameter, "convergence epsilon must be positive");
    if (agents.empty()) throw Error(Errc::invalid_parameter, "at least one agent is required");
    std::set<std::string> labels;
    for (const auto& a : agents)
      if (!labels.insert(a.label).second) throw Error(Errc::invalid_parameter, "agent label '" + a.label + "' repeated");
  }
};

namespace detail {

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) parse_fail(path + "/" + k, "unknown key");
  }
}

inline double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, path + "/" + key);
}

inline std::uint64_t unsigned_or(const json& obj, const char* key, std::uint64_t fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) parse_fail(path + "/" + key, "expected a non-negative integer");
  return it->get<std::uint64_t>();
}

}  // namespace detail

/// Reads the harness fields of an experiment file. Environment fields
/// (target, actions, utility) are ignored here.
inline ExperimentConfig experiment_config_from_json(const json& doc) {
  if (!doc.is_object()) detail::parse_fail("", "expected an object");
  ExperimentConfig cfg;
  cfg.rounds = detail::unsigned_or(doc, "rounds", cfg.rounds, "");
  cfg.replications = detail::unsigned_or(doc, "replications", cfg.replications, "");
  cfg.seed = detail::unsigned_or(doc, "seed", cfg.seed, "");
  cfg.epsilon = detail::number_or(doc, "epsilon", cfg.epsilon, "");
  cfg.threads = static_cast<unsigned>(detail::unsigned_or(doc, "threads", cfg.threads, ""));
  if (auto it = doc.find("csv"); it != doc.end()) cfg.csv = detail::as_string(*it, "/csv");
  if (auto it = doc.find("svg"); it != doc.end()) cfg.svg = detail::as_string(*it, "/svg");

  if (auto it = doc.find("agents"); it != doc.end()) {
    if (!it->is_object()) detail::parse_fail("/agents", "expected an object");
    cfg.agents.clear();
    for (const auto& [label, body] : it->items()) {
      const std::string path = "/agents/" + label;
      if (!body.is_object()) detail::parse_fail(path, "expected an object");
      std::string type = label;
      if (auto t = body.find("type"); t != body.end()) type = detail::as_string(*t, path + "/type");
      if (type == "causal") {
        detail::check_keys(body, {"type", "prior_alpha", "epsilon"}, path);
        CausalAgentConfig c;
        c.prior_alpha = detail::number_or(body, "prior_alpha", c.prior_alpha, path);
        c.epsilon = detail::number_or(body, "epsilon", c.epsilon, path);
        cfg.agents.push_back({label, c});
      } else if (type == "qlearning") {
        detail::check_keys(body, {"type", "alpha", "epsilon", "q0"}, path);
        QLearningConfig q;
        q.alpha = detail::number_or(body, "alpha", q.alpha, path);
        q.epsilon = detail::number_or(body, "epsilon", q.epsilon, path);
        q.q0 = detail::number_or(body, "q0", q.q0, path);
        cfg.agents.push_back({label, q});
      } else if (type == "random") {
        detail::check_keys(body, {"type"}, path);
        cfg.agents.push_back({label, RandomAgentConfig{}});
      } else {
        detail::parse_fail(path, "unknown agent type '" + type + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Agents behind one choose/learn interface

struct RandomAgentState {
  std::size_t actions;
};

class Agent {
 public:
  Agent(const AgentConfig& cfg, const Environment& env) : label_(cfg.label) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, CausalAgentConfig>) {
            state_.template emplace<CausalAgentState>(BeliefState(env.truth().graph(), p.prior_alpha), env.actions(),
                                                      env.target(), env.utility(), p.epsilon);
          } else if constexpr (std::is_same_v<T, QLearningConfig>) {
            state_ = make_q_agent(env.actions().size(), p.alpha, p.epsilon, p.q0);
          } else {
            state_ = RandomAgentState{env.actions().size()};
          }
        },
        cfg.params);
  }

  const std::string& label() const noexcept { return label_; }

  std::size_t choose(RandomStream& rng) const {
    return std::visit(
        [&](const auto& s) -> std::size_t {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CausalAgentState>) return causal_choose(s, rng);
          else if constexpr (std::is_same_v<T, QAgentState>) return q_choose(s, rng);
          else return random_choose(s.actions, rng);
        },
        state_);
  }

  void learn(const StepRecord& rec) {
    std::visit(
        [&](auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CausalAgentState>) s.observe(rec.action, rec.realized);
          else if constexpr (std::is_same_v<T, QAgentState>) s = q_learn(std::move(s), rec.action, rec.reward);
        },
        state_);
  }

  const CausalAgentState* causal() const noexcept { return std::get_if<CausalAgentState>(&state_); }
  const QAgentState* qlearning() const noexcept { return std::get_if<QAgentState>(&state_); }

 private:
  std::string label_;
  std::variant<RandomAgentState, CausalAgentState, QAgentState> state_{RandomAgentState{0}};
};

// ---------------------------------------------------------------------------
// Results

struct AgentRecord {
  std::size_t round;  // 1-based
  std::size_t action;
  double reward;

  friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

/// Rectangular log: every replication x agent x round has exactly one record.
class TrialLog {
 public:
  TrialLog() = default;
  TrialLog(std::vector<std::string> agents, std::vector<std::string> actions, std::size_t replications, std::size_t rounds)
      : agents_(std::move(agents)),
        actions_(std::move(actions)),
        replications_(replications),
        rounds_(rounds),
        records_(replications * agents_.size() * rounds) {}

  const std::vector<std::string>& agents() const noexcept { return agents_; }
  const std::vector<std::string>& action_labels() const noexcept { return actions_; }
  std::size_t replications() const noexcept { return replications_; }
  std::size_t rounds() const noexcept { return rounds_; }

  // `round` is 0-based here.
  AgentRecord& at(std::size_t replication, std::size_t agent, std::size_t round) {
    return records_.at((replication * agents_.size() + agent) * rounds_ + round);
  }
  const AgentRecord& at(std::size_t replication, std::size_t agent, std::size_t round) const {
    return records_.at((replication * agents_.size() + agent) * rounds_ + round);
  }

  friend bool operator==(const TrialLog&, const TrialLog&) = default;

 private:
  std::vector<std::string> agents_;
  std::vector<std::string> actions_;
  std::size_t replications_ = 0;
  std::size_t rounds_ = 0;
  std::vector<AgentRecord> records_;
};

/// Per-round reward averaged over replications, and its running mean.
struct RoundSeries {
  std::string agent;
  std::vector<double> mean;
  std::vector<double> cumulative_mean;

  friend bool operator==(const RoundSeries&, const RoundSeries&) = default;
};

struct ExperimentResult {
  std::vector<RoundSeries> series;
  TrialLog log;

  const RoundSeries& series_for(const std::string& agent) const {
    for (const auto& s : series)
      if (s.agent == agent) return s;
    throw Error(Errc::invalid_parameter, "no series for agent '" + agent + "'");
  }
};

inline RoundSeries make_series(std::string agent, std::vector<double> mean) {
  RoundSeries s{std::move(agent), std::move(mean), {}};
  s.cumulative_mean.reserve(s.mean.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < s.mean.size(); ++t) {
    sum += s.mean[t];
    s.cumulative_mean.push_back(sum / static_cast<double>(t + 1));
  }
  return s;
}

namespace detail {

inline void run_replication(const Environment& env, const ExperimentConfig& cfg, std::size_t rep, TrialLog& log) {
  std::vector<Agent> agents;
  agents.reserve(cfg.agents.size());
  for (const auto& a : cfg.agents) agents.emplace_back(a, env);
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    for (std::size_t a = 0; a < agents.size(); ++a) {
      RandomStream rng(substream_seed(cfg.seed, rep, agents[a].label(), t + 1));
      const auto choice = agents[a].choose(rng);
      const auto rec = step(env, choice, rng);
      agents[a].learn(rec);
      log.at(rep, a, t) = AgentRecord{t + 1, choice, rec.reward};
    }
  }
}

}  // namespace detail

/// Runs `cfg.replications` independent replications. Each (replication, agent,
/// round) draws from its own substream, so results do not depend on
/// `cfg.threads`.
inline ExperimentResult run_experiment(const Environment& env, const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> labels;
  for (const auto& a : cfg.agents) labels.push_back(a.label);
  std::vector<std::string> actions;
  for (const auto& a : env.actions()) actions.push_back(a.label);
  // Construct once up front so configuration errors surface before any work.
  for (const auto& a : cfg.agents) [[maybe_unused]] Agent probe(a, env);

  TrialLog log(labels, actions, cfg.replications, cfg.rounds);
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.replications)));
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.replications; ++r) detail::run_replication(env, cfg, r, log);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t r; (r = next.fetch_add(1)) < cfg.replications;) detail::run_replication(env, cfg, r, log);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentResult result{{}, std::move(log)};
  const auto reps = static_cast<double>(cfg.replications);
  for (std::size_t a = 0; a < labels.size(); ++a) {
    std::vector<double> mean(cfg.rounds, 0.0);
    for (std::size_t t = 0; t < cfg.rounds; ++t) {
      double sum = 0.0;
      for (std::size_t r = 0; r < cfg.replications; ++r) sum += result.log.at(r, a, t).reward;
      mean[t] = sum / reps;
    }
    result.series.push_back(make_series(labels[a], std::move(mean)));
  }
  return result;
}

/// Smallest N >= 0 with |x_t - y_t| < epsilon for every t > N (1-indexed), or
/// nullopt when even the last round violates it.
inline std::optional<std::size_t> convergence_index(std::span<const double> x, std::span<const double> y, double epsilon) {
  if (x.size() != y.size())
    throw Error(Errc::length_mismatch, "series lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (!(epsilon > 0.0)) throw Error(Errc::invalid_parameter, "epsilon must be positive");
  std::size_t last_violation = 0;
  for (std::size_t t = 0; t < x.size(); ++t)
    if (!(std::abs(x[t] - y[t]) < epsilon)) last_violation = t + 1;
  if (!x.empty() && last_violation == x.size()) return std::nullopt;
  return last_violation;
}

inline std::optional<std::size_t> convergence_index(const RoundSeries& x, const RoundSeries& y, double epsilon) {
  return convergence_index(x.mean, y.mean, epsilon);
}

}  // namespace cdpu
