#pragma once

// Dirichlet beliefs over the CPT parameters of a known causal structure.

#include <cmath>
#include <span>
#include <vector>

#include "cdpu/causal_model.hpp"
#include "cdpu/model_io.hpp"

namespace cdpu {

/// Pseudo-counts for every (variable, parent configuration) row of a graph.
/// The row layout mirrors the CPT layout of CausalModel.
class BeliefState {
 public:
  BeliefState(CausalGraph graph, double alpha0) : graph_(std::move(graph)) {
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0))
      throw Error(Errc::nonpositive_alpha, "prior pseudo-count must be positive, got " + std::to_string(alpha0));
    counts_.resize(graph_.size());
    for (std::size_t v = 0; v < graph_.size(); ++v)
      counts_[v].assign(graph_.row_count(v), std::vector<double>(graph_.state_count(v), alpha0));
  }

  const CausalGraph& graph() const noexcept { return graph_; }

  std::span<const double> row(std::size_t var, std::size_t row) const { return counts_.at(var).at(row); }

  double total_mass() const noexcept {
    double total = 0.0;
    for (const auto& rows : counts_)
      for (const auto& r : rows)
        for (double c : r) total += c;
    return total;
  }

  /// Conjugate update from one outcome observed under `forced`. Every
  /// non-intervened variable gets +1 on its observed state in the row picked by
  /// its observed parents. Checks run before any count changes.
  void observe(std::span<const Binding> forced, std::span<const std::size_t> observed) {
    if (observed.size() != graph_.size())
      throw Error(Errc::partial_observation, "observation must assign all " + std::to_string(graph_.size()) + " variables");
    std::vector<bool> intervened(graph_.size(), false);
    for (auto b : forced) {
      if (observed[b.var] != b.state)
        throw Error(Errc::inconsistent_with_intervention,
                    "'" + graph_.variable(b.var).name + "' was forced to '" + graph_.variable(b.var).states[b.state] + "'");
      intervened[b.var] = true;
    }
    for (std::size_t v = 0; v < graph_.size(); ++v)
      if (observed[v] >= graph_.state_count(v))
        throw Error(Errc::illegal_state, "state index out of range for '" + graph_.variable(v).name + "'");
    for (std::size_t v = 0; v < graph_.size(); ++v)
      if (!intervened[v]) counts_[v][graph_.row_of(v, observed)][observed[v]] += 1.0;
  }

  /// Replaces one row of pseudo-counts; used to seed informative priors.
  void set_row(std::size_t var, std::size_t row, std::vector<double> counts) {
    if (counts.size() != graph_.state_count(var))
      throw Error(Errc::row_length_mismatch, "row for '" + graph_.variable(var).name + "' has wrong length");
    for (double c : counts)
      if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::nonpositive_alpha, "pseudo-counts must be positive");
    counts_.at(var).at(row) = std::move(counts);
  }

  friend bool operator==(const BeliefState&, const BeliefState&) = default;

 private:
  CausalGraph graph_;
  std::vector<std::vector<std::vector<double>>> counts_;
};

inline BeliefState init_uniform(const CausalGraph& graph, double alpha0 = 1.0) { return BeliefState(graph, alpha0); }

/// Point estimate used by the causal agent: each row's pseudo-counts divided by
/// the row total.
inline CausalModel posterior_mean(const BeliefState& b) {
  const auto& g = b.graph();
  std::vector<Cpt> cpts(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    cpts[v].rows.resize(g.row_count(v));
    for (std::size_t r = 0; r < g.row_count(v); ++r) {
      auto counts = b.row(v, r);
      double sum = 0.0;
      for (double c : counts) sum += c;
      auto& out = cpts[v].rows[r];
      out.reserve(counts.size());
      for (double c : counts) out.push_back(c / sum);
    }
  }
  return CausalModel(g, std::move(cpts));
}

/// Value-returning form of BeliefState::observe. The input is never modified.
inline BeliefState update(BeliefState b, const Intervention& i, const Assignment& observed) {
  const auto forced = resolve(b.graph(), i);
  FullState full;
  try {
    full = resolve_full(b.graph(), observed);
  } catch (const Error& e) {
    if (e.code() != Errc::partial_assignment) throw;
    throw Error(Errc::partial_observation, e.what());
  }
  b.observe(forced, full);
  return b;
}

/// Same layout as a model file, with "counts" in place of "p".
inline json to_json(const BeliefState& b) {
  ModelSpec spec;
  const auto& g = b.graph();
  spec.variables = g.variables();
  spec.parents = g.parent_names();
  for (std::size_t v = 0; v < g.size(); ++v) {
    auto& rows = spec.cpts[g.variable(v).name];
    for (std::size_t r = 0; r < g.row_count(v); ++r) {
      auto c = b.row(v, r);
      rows.push_back({g.parent_assignment(v, r), std::vector<double>(c.begin(), c.end())});
    }
  }
  return to_json(spec, "counts");
}

inline BeliefState beliefs_from_json(const json& doc) {
  const auto spec = model_spec_from_json(doc, "counts");
  auto graph = CausalGraph::create(spec.variables, spec.parents);
  BeliefState b(graph, 1.0);
  for (std::size_t v = 0; v < graph.size(); ++v) {
    const auto& name = graph.variable(v).name;
    auto it = spec.cpts.find(name);
    if (it == spec.cpts.end() || it->second.size() != graph.row_count(v))
      throw Error(Errc::missing_cpt_row, "/cpts/" + name + ": expected " + std::to_string(graph.row_count(v)) + " rows");
    for (const auto& row : it->second) {
      FullState full(graph.size(), 0);
      for (auto p : graph.parents(v)) {
        auto g = row.given.find(graph.variable(p).name);
        if (g == row.given.end()) throw Error(Errc::partial_assignment, "/cpts/" + name + ": row misses a parent");
        full[p] = graph.state_index(p, g->second);
      }
      b.set_row(v, graph.row_of(v, full), row.p);
    }
  }
  return b;
}

}  // namespace cdpu
