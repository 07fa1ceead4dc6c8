#pragma once

// The ground-truth world an agent acts in, and the built-in medic scenario.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdpu/agents.hpp"
#include "cdpu/causal_model.hpp"
#include "cdpu/model_io.hpp"

namespace cdpu {

struct StepRecord {
  std::size_t action;
  FullState realized;
  double reward;
};

/// Immutable after construction. Each action's mutilated model is built once
/// and shared by every step; the truth model is never modified.
class Environment {
 public:
  Environment(CausalModel truth, std::vector<Action> actions, std::string target, UtilityFunction utility)
      : truth_(std::move(truth)), actions_(std::move(actions)), target_(std::move(target)), utility_(std::move(utility)) {
    validate_actions(truth_.graph(), actions_, target_);
    target_index_ = truth_.graph().index_of(target_);
    rewards_ = utility_.over(truth_.graph().variable(target_index_));
    for (const auto& a : actions_) surgeries_.push_back(intervene(truth_, a.intervention));
  }

  const CausalModel& truth() const noexcept { return truth_; }
  const std::vector<Action>& actions() const noexcept { return actions_; }
  const std::string& target() const noexcept { return target_; }
  std::size_t target_index() const noexcept { return target_index_; }
  const UtilityFunction& utility() const noexcept { return utility_; }

  /// Utilities aligned with the target's state order.
  const std::vector<double>& rewards() const noexcept { return rewards_; }

  const CausalModel& mutilated(std::size_t action) const { return surgeries_.at(action); }

  std::optional<std::size_t> find_action(const Action& a) const {
    for (std::size_t i = 0; i < actions_.size(); ++i)
      if (actions_[i] == a) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> find_action(const std::string& label) const {
    for (std::size_t i = 0; i < actions_.size(); ++i)
      if (actions_[i].label == label) return i;
    return std::nullopt;
  }

  /// Exact mean reward of repeatedly playing `action`.
  double expected_reward(std::size_t action) const {
    return expected_utility(truth_, actions_.at(action), target_, utility_);
  }

  friend bool operator==(const Environment& a, const Environment& b) {
    return a.truth_ == b.truth_ && a.actions_ == b.actions_ && a.target_ == b.target_ && a.utility_ == b.utility_;
  }

 private:
  CausalModel truth_;
  std::vector<Action> actions_;
  std::string target_;
  UtilityFunction utility_;
  std::size_t target_index_ = 0;
  std::vector<double> rewards_;
  std::vector<CausalModel> surgeries_;
};

/// Executes an action: samples the mutilated truth and rewards the realized
/// target state.
inline StepRecord step(const Environment& env, std::size_t action, RandomStream& rng) {
  if (action >= env.actions().size()) throw Error(Errc::unknown_action, "action index " + std::to_string(action) + " out of range");
  auto realized = sample_state(env.mutilated(action), rng);
  const double reward = env.rewards()[realized[env.target_index()]];
  return StepRecord{action, std::move(realized), reward};
}

inline StepRecord step(const Environment& env, const Action& a, RandomStream& rng) {
  auto i = env.find_action(a);
  if (!i) throw Error(Errc::unknown_action, "action '" + a.label + "' is not offered by this environment");
  return step(env, *i, rng);
}

inline Assignment realized_assignment(const Environment& env, const StepRecord& rec) {
  return to_assignment(env.truth().graph(), rec.realized);
}

// ---------------------------------------------------------------------------
// Medic scenario: disease D confounds treatment T and survival Y.
//   P(D=1)=0.3; P(T=1|D=1)=0.9, P(T=1|D=0)=0.2
//   P(Y=1|T=1,D=1)=0.8, P(Y=1|T=1,D=0)=0.9, P(Y=1|T=0,D=1)=0.1, P(Y=1|T=0,D=0)=0.7

inline ModelSpec medic_model_spec() {
  ModelSpec spec;
  spec.variables = {{"D", {"0", "1"}}, {"T", {"0", "1"}}, {"Y", {"0", "1"}}};
  spec.parents = {{"D", {}}, {"T", {"D"}}, {"Y", {"D", "T"}}};
  spec.cpts["D"] = {{{}, {0.7, 0.3}}};
  spec.cpts["T"] = {{{{"D", "0"}}, {0.8, 0.2}}, {{{"D", "1"}}, {0.1, 0.9}}};
  spec.cpts["Y"] = {
      {{{"D", "0"}, {"T", "0"}}, {0.3, 0.7}},
      {{{"D", "0"}, {"T", "1"}}, {0.1, 0.9}},
      {{{"D", "1"}, {"T", "0"}}, {0.9, 0.1}},
      {{{"D", "1"}, {"T", "1"}}, {0.2, 0.8}},
  };
  return spec;
}

inline Environment medic_scenario() {
  return Environment(CausalModel::create(medic_model_spec()),
                     {Action{"no-treatment", Intervention{{"T", "0"}}}, Action{"treatment", Intervention{{"T", "1"}}}},
                     "Y", UtilityFunction{{"1", 1.0}, {"0", 0.0}});
}

// ---------------------------------------------------------------------------
// Experiment-file environment block:
//   {"target":"Y","desired":"1","actions":[{"label":"treatment","do":{"T":"1"}}],"utility":{"1":1.0,"0":0.0}}
// "utility" may be omitted when "desired" is given (0/1 utility).

inline Environment environment_from_json(CausalModel truth, const json& doc) {
  const auto target = detail::as_string(detail::require(doc, "target", ""), "/target");
  const auto& graph = truth.graph();
  if (!graph.find(target)) throw Error(Errc::unknown_target, "/target: '" + target + "' is not a model variable");
  const auto& target_var = graph.variable(graph.index_of(target));

  const auto& list = detail::require(doc, "actions", "");
  if (!list.is_array()) detail::parse_fail("/actions", "expected an array");
  std::vector<Action> actions;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "/actions/" + std::to_string(i);
    auto label = detail::as_string(detail::require(list[i], "label", path), path + "/label");
    auto forced = detail::as_assignment(detail::require(list[i], "do", path), path + "/do");
    if (forced.empty()) detail::parse_fail(path + "/do", "an action must force at least one variable");
    actions.push_back(Action{std::move(label), Intervention(std::move(forced))});
  }

  UtilityFunction utility;
  if (auto u = doc.find("utility"); u != doc.end()) {
    if (!u->is_object()) detail::parse_fail("/utility", "expected an object");
    std::map<std::string, double> values;
    for (const auto& [state, value] : u->items()) values[state] = detail::as_number(value, "/utility/" + state);
    utility = UtilityFunction(std::move(values));
    if (auto d = doc.find("desired"); d != doc.end()) graph.state_index(graph.index_of(target), detail::as_string(*d, "/desired"));
  } else if (auto d = doc.find("desired"); d != doc.end()) {
    utility = UtilityFunction::indicator(target_var, detail::as_string(*d, "/desired"));
  } else {
    detail::parse_fail("", "experiment needs \"utility\" or \"desired\"");
  }
  return Environment(std::move(truth), std::move(actions), target, std::move(utility));
}

inline json environment_to_json(const Environment& env) {
  json doc;
  doc["target"] = env.target();
  doc["actions"] = json::array();
  for (const auto& a : env.actions()) {
    json forced = json::object();
    for (const auto& [k, v] : a.intervention.forced()) forced[k] = v;
    doc["actions"].push_back({{"label", a.label}, {"do", forced}});
  }
  doc["utility"] = json::object();
  for (const auto& [state, u] : env.utility().values()) doc["utility"][state] = u;
  return doc;
}

inline Environment load_environment(const std::filesystem::path& model_file, const std::filesystem::path& experiment_file) {
  auto truth = load_model(model_file);
  return environment_from_json(std::move(truth), read_json_file(experiment_file));
}

}  // namespace cdpu
