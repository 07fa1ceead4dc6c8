#pragma once

// Test-only reference implementations. Everything here works on the raw
// ModelSpec (name/label maps, linear row search) and shares no code with the
// library's indexed inference paths.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cdpu/causal_model.hpp"

namespace oracle {

using cdpu::Assignment;
using cdpu::ModelSpec;

inline double row_lookup(const ModelSpec& spec, const std::string& var, const Assignment& full) {
  const auto& vspec = *std::find_if(spec.variables.begin(), spec.variables.end(), [&](const auto& v) { return v.name == var; });
  const auto state = static_cast<std::size_t>(
      std::find(vspec.states.begin(), vspec.states.end(), full.at(var)) - vspec.states.begin());
  for (const auto& row : spec.cpts.at(var)) {
    bool match = true;
    for (const auto& [p, label] : row.given) match = match && full.at(p) == label;
    if (match) return row.p.at(state);
  }
  throw std::logic_error("oracle: no matching row for " + var);
}

/// Every full assignment with its joint probability (product of CPT entries).
inline std::vector<std::pair<Assignment, double>> enumerate(const ModelSpec& spec) {
  std::vector<std::pair<Assignment, double>> out;
  Assignment current;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == spec.variables.size()) {
      double p = 1.0;
      for (const auto& v : spec.variables) p *= row_lookup(spec, v.name, current);
      out.emplace_back(current, p);
      return;
    }
    for (const auto& s : spec.variables[i].states) {
      current[spec.variables[i].name] = s;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

inline bool agrees(const Assignment& full, const Assignment& partial) {
  for (const auto& [k, v] : partial)
    if (full.at(k) != v) return false;
  return true;
}

/// P(target | evidence); NaN when P(evidence) = 0.
inline double probability(const ModelSpec& spec, const Assignment& target, const Assignment& evidence = {}) {
  double num = 0.0, den = 0.0;
  for (const auto& [full, p] : enumerate(spec)) {
    if (!agrees(full, evidence)) continue;
    den += p;
    if (agrees(full, target)) num += p;
  }
  return den > 0.0 ? num / den : std::nan("");
}

/// Graph surgery written directly on the description.
inline ModelSpec mutilate(ModelSpec spec, const Assignment& forced) {
  for (const auto& [var, label] : forced) {
    const auto& vspec = *std::find_if(spec.variables.begin(), spec.variables.end(), [&](const auto& v) { return v.name == var; });
    std::vector<double> point(vspec.states.size(), 0.0);
    for (std::size_t s = 0; s < vspec.states.size(); ++s)
      if (vspec.states[s] == label) point[s] = 1.0;
    spec.parents[var] = {};
    spec.cpts[var] = {cdpu::CptRowSpec{{}, point}};
  }
  return spec;
}

inline double interventional(const ModelSpec& spec, const Assignment& forced, const Assignment& target) {
  return probability(mutilate(spec, forced), target);
}

/// Random valid model: up to `max_vars` variables with 2..`max_states` states,
/// edges only from earlier to later variables in a shuffled order, strictly
/// positive CPT rows.
inline ModelSpec random_model(std::mt19937_64& rng, std::size_t max_vars = 5, std::size_t max_states = 3) {
  std::uniform_int_distribution<std::size_t> nvars(2, max_vars);
  std::uniform_int_distribution<std::size_t> nstates(2, max_states);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::bernoulli_distribution edge(0.5);

  ModelSpec spec;
  const auto n = nvars(rng);
  for (std::size_t i = 0; i < n; ++i) {
    cdpu::VariableSpec v{"V" + std::to_string(i), {}};
    const auto k = nstates(rng);
    for (std::size_t s = 0; s < k; ++s) v.states.push_back("s" + std::to_string(s));
    spec.variables.push_back(std::move(v));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t j = 0; j < n; ++j) {
    auto& ps = spec.parents[spec.variables[order[j]].name];
    for (std::size_t i = 0; i < j; ++i)
      if (edge(rng)) ps.push_back(spec.variables[order[i]].name);
    std::shuffle(ps.begin(), ps.end(), rng);
  }
  for (const auto& v : spec.variables) {
    const auto& ps = spec.parents[v.name];
    std::vector<Assignment> configs{{}};
    for (const auto& p : ps) {
      const auto& pspec = *std::find_if(spec.variables.begin(), spec.variables.end(), [&](const auto& x) { return x.name == p; });
      std::vector<Assignment> next;
      for (const auto& c : configs)
        for (const auto& s : pspec.states) {
          auto e = c;
          e[p] = s;
          next.push_back(std::move(e));
        }
      configs = std::move(next);
    }
    auto& rows = spec.cpts[v.name];
    for (const auto& c : configs) {
      std::vector<double> p(v.states.size());
      double sum = 0.0;
      for (auto& x : p) sum += (x = unit(rng));
      for (auto& x : p) x /= sum;
      rows.push_back({c, p});
    }
  }
  return spec;
}

/// Random non-empty partial assignment over a random subset of variables.
inline Assignment random_partial(const ModelSpec& spec, std::mt19937_64& rng, std::size_t max_size) {
  Assignment a;
  std::vector<std::size_t> idx(spec.variables.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto k = std::uniform_int_distribution<std::size_t>(1, std::min(max_size, idx.size()))(rng);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& v = spec.variables[idx[j]];
    a[v.name] = v.states[std::uniform_int_distribution<std::size_t>(0, v.states.size() - 1)(rng)];
  }
  return a;
}

}  // namespace oracle
