#pragma once

// Decision makers: expected-utility maximization under interventions, the
// causal agent acting greedily on its posterior-mean model, and the two
// baselines (stateless epsilon-greedy Q-learning, uniform random).

#include <cmath>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cdpu/beliefs.hpp"
#include "cdpu/causal_model.hpp"
#include "cdpu/random.hpp"

namespace cdpu {

struct Action {
  std::string label;
  Intervention intervention;

  friend bool operator==(const Action&, const Action&) = default;
};

/// Utility of each state of the target variable (the agent's preferences).
class UtilityFunction {
 public:
  UtilityFunction() = default;
  explicit UtilityFunction(std::map<std::string, double> values) : values_(std::move(values)) {
    for (const auto& [state, u] : values_)
      if (!std::isfinite(u)) throw Error(Errc::invalid_utility, "utility of '" + state + "' is not finite");
  }
  UtilityFunction(std::initializer_list<std::map<std::string, double>::value_type> values)
      : UtilityFunction(std::map<std::string, double>(values)) {}

  /// 1 for `desired`, 0 for every other state of `target`.
  static UtilityFunction indicator(const VariableSpec& target, const std::string& desired) {
    if (!detail::find_state(target, desired))
      throw Error(Errc::illegal_state, "'" + desired + "' is not a state of '" + target.name + "'");
    std::map<std::string, double> values;
    for (const auto& s : target.states) values[s] = s == desired ? 1.0 : 0.0;
    return UtilityFunction(std::move(values));
  }

  const std::map<std::string, double>& values() const noexcept { return values_; }

  /// Utilities aligned with the target's state order.
  std::vector<double> over(const VariableSpec& target) const {
    std::vector<double> out;
    for (const auto& s : target.states) {
      auto it = values_.find(s);
      if (it == values_.end())
        throw Error(Errc::invalid_utility, "no utility for state '" + s + "' of '" + target.name + "'");
      out.push_back(it->second);
    }
    for (const auto& [s, _] : values_)
      if (!detail::find_state(target, s))
        throw Error(Errc::invalid_utility, "'" + s + "' is not a state of '" + target.name + "'");
    return out;
  }

  friend bool operator==(const UtilityFunction&, const UtilityFunction&) = default;

 private:
  std::map<std::string, double> values_;
};

/// Checks the action-set invariants against a structure: non-empty, unique
/// labels, legal interventions, and no action forcing the target.
inline void validate_actions(const CausalGraph& g, std::span<const Action> actions, const std::string& target) {
  if (!g.find(target)) throw Error(Errc::unknown_target, "target '" + target + "' is not a model variable");
  if (actions.empty()) throw Error(Errc::empty_action_set, "action set is empty");
  std::set<std::string> labels;
  for (const auto& a : actions) {
    if (!labels.insert(a.label).second) throw Error(Errc::duplicate_action, "action label '" + a.label + "' repeated");
    resolve(g, a.intervention);
    if (a.intervention.forces(target))
      throw Error(Errc::action_intervenes_target, "action '" + a.label + "' intervenes on target '" + target + "'");
  }
}

/// Sum over target states y of u(y) * P(target = y | do(a)).
inline double expected_utility(const CausalModel& m, const Action& a, const std::string& target, const UtilityFunction& u) {
  const auto t = m.graph().index_of(target);
  if (a.intervention.forces(target))
    throw Error(Errc::target_is_intervened, "action '" + a.label + "' intervenes on target '" + target + "'");
  const auto utilities = u.over(m.graph().variable(t));
  const auto dist = interventional_distribution(m, a.intervention, t);
  double eu = 0.0;
  for (std::size_t y = 0; y < dist.size(); ++y) eu += utilities[y] * dist[y];
  return eu;
}

/// Index of the first maximum. Values within 1e-12 (relative) of the running
/// best count as ties, so equal EUs reached by different summation orders
/// still resolve to the lowest index.
inline std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_action_set, "argmax over an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double margin = 1e-12 * std::max(1.0, std::abs(values[best]));
    if (values[i] > values[best] + margin) best = i;
  }
  return best;
}

inline std::vector<double> expected_utilities(const CausalModel& m, std::span<const Action> actions,
                                              const std::string& target, const UtilityFunction& u) {
  std::vector<double> eu;
  eu.reserve(actions.size());
  for (const auto& a : actions) eu.push_back(expected_utility(m, a, target, u));
  return eu;
}

/// The action whose intervention maximizes expected utility of the target.
inline std::size_t best_action(const CausalModel& m, std::span<const Action> actions, const std::string& target,
                               const UtilityFunction& u) {
  if (actions.empty()) throw Error(Errc::empty_action_set, "no actions to choose from");
  const auto eu = expected_utilities(m, actions, target, u);
  return argmax_lowest(eu);
}

// ---------------------------------------------------------------------------
// Causal agent

class CausalAgentState {
 public:
  CausalAgentState(BeliefState beliefs, std::vector<Action> actions, std::string target, UtilityFunction utility,
                   double epsilon = 0.0)
      : beliefs_(std::move(beliefs)),
        actions_(std::move(actions)),
        target_(std::move(target)),
        utility_(std::move(utility)),
        epsilon_(epsilon) {
    validate_actions(beliefs_.graph(), actions_, target_);
    utility_.over(beliefs_.graph().variable(beliefs_.graph().index_of(target_)));
    if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0))
      throw Error(Errc::invalid_parameter, "causal epsilon must lie in [0,1]");
    for (const auto& a : actions_) forced_.push_back(resolve(beliefs_.graph(), a.intervention));
  }

  const BeliefState& beliefs() const noexcept { return beliefs_; }
  const std::vector<Action>& actions() const noexcept { return actions_; }
  const std::string& target() const noexcept { return target_; }
  const UtilityFunction& utility() const noexcept { return utility_; }
  double epsilon() const noexcept { return epsilon_; }

  /// In-place learning step for the simulation loop.
  void observe(std::size_t action, std::span<const std::size_t> realized) {
    if (action >= actions_.size()) throw Error(Errc::bad_index, "action index out of range");
    beliefs_.observe(forced_[action], realized);
  }

 private:
  BeliefState beliefs_;
  std::vector<Action> actions_;
  std::string target_;
  UtilityFunction utility_;
  double epsilon_;
  std::vector<std::vector<Binding>> forced_;
};

/// Greedy choice treating the posterior-mean model as the true model.
inline std::size_t causal_choose(const CausalAgentState& s) {
  return best_action(posterior_mean(s.beliefs()), s.actions(), s.target(), s.utility());
}

/// As above, but with probability epsilon a uniformly random action instead.
inline std::size_t causal_choose(const CausalAgentState& s, RandomStream& rng) {
  if (s.epsilon() > 0.0 && rng.uniform() < s.epsilon()) return rng.index(s.actions().size());
  return causal_choose(s);
}

inline CausalAgentState causal_learn(CausalAgentState s, const Action& chosen, const Assignment& observed) {
  for (std::size_t i = 0; i < s.actions().size(); ++i) {
    if (s.actions()[i] == chosen) {
      FullState full;
      try {
        full = resolve_full(s.beliefs().graph(), observed);
      } catch (const Error& e) {
        if (e.code() != Errc::partial_assignment) throw;
        throw Error(Errc::partial_observation, e.what());
      }
      s.observe(i, full);
      return s;
    }
  }
  throw Error(Errc::unknown_action, "action '" + chosen.label + "' is not available to this agent");
}

// ---------------------------------------------------------------------------
// Baselines

/// Single-state (bandit form) Q-learning with epsilon-greedy selection.
struct QAgentState {
  std::vector<double> q;
  double alpha = 0.1;
  double epsilon = 0.1;

  friend bool operator==(const QAgentState&, const QAgentState&) = default;
};

inline QAgentState make_q_agent(std::size_t actions, double alpha = 0.1, double epsilon = 0.1, double q0 = 1.0) {
  if (actions == 0) throw Error(Errc::empty_action_set, "Q agent needs at least one action");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::invalid_parameter, "Q-learning alpha must lie in (0,1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(Errc::invalid_parameter, "Q-learning epsilon must lie in [0,1]");
  if (!std::isfinite(q0)) throw Error(Errc::invalid_parameter, "q0 must be finite");
  return QAgentState{std::vector<double>(actions, q0), alpha, epsilon};
}

inline std::size_t q_choose(const QAgentState& s, RandomStream& rng) {
  if (s.epsilon > 0.0 && rng.uniform() < s.epsilon) return rng.index(s.q.size());
  return argmax_lowest(s.q);
}

/// Q(a) <- Q(a) + alpha * (reward - Q(a)) on the chosen entry only.
inline QAgentState q_learn(QAgentState s, std::size_t chosen, double reward) {
  if (chosen >= s.q.size()) throw Error(Errc::bad_index, "action index " + std::to_string(chosen) + " out of range");
  s.q[chosen] += s.alpha * (reward - s.q[chosen]);
  return s;
}

inline std::size_t random_choose(std::size_t actions, RandomStream& rng) {
  if (actions == 0) throw Error(Errc::empty_action_set, "no actions to choose from");
  return rng.index(actions);
}

inline std::size_t random_choose(std::span<const Action> actions, RandomStream& rng) {
  return random_choose(actions.size(), rng);
}

}  // namespace cdpu
