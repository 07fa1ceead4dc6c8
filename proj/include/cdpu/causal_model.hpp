#pragma once

// Discrete causal graphical models: structure, conditional probability tables,
// exact inference by enumeration of the joint, graph surgery for interventions
// and ancestral sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdpu/error.hpp"
#include "cdpu/random.hpp"

namespace cdpu {

inline constexpr double kNormalizationTolerance = 1e-9;

struct VariableSpec {
  std::string name;
  std::vector<std::string> states;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// Variable name -> state label. May be partial or full.
using Assignment = std::map<std::string, std::string>;

/// Argument of the do-operator: a non-empty set of forced variable states.
class Intervention {
 public:
  explicit Intervention(Assignment forced) : forced_(std::move(forced)) {
    if (forced_.empty()) throw Error(Errc::empty_intervention, "an intervention must force at least one variable");
  }
  Intervention(std::initializer_list<Assignment::value_type> forced) : Intervention(Assignment(forced)) {}

  const Assignment& forced() const noexcept { return forced_; }
  bool forces(const std::string& variable) const { return forced_.contains(variable); }

  friend bool operator==(const Intervention&, const Intervention&) = default;

 private:
  Assignment forced_;
};

/// Unvalidated model description, mirroring the JSON file layout.
struct CptRowSpec {
  Assignment given;
  std::vector<double> p;

  friend bool operator==(const CptRowSpec&, const CptRowSpec&) = default;
};

struct ModelSpec {
  std::vector<VariableSpec> variables;
  std::map<std::string, std::vector<std::string>> parents;
  std::map<std::string, std::vector<CptRowSpec>> cpts;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct Limits {
  std::size_t max_joint_size = std::size_t{1} << 20;
};

/// A variable index paired with one of its state indices.
struct Binding {
  std::size_t var;
  std::size_t state;

  friend bool operator==(const Binding&, const Binding&) = default;
};

namespace detail {

inline std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

inline std::string describe(const Assignment& a) {
  std::string out = "{";
  for (const auto& [k, v] : a) {
    if (out.size() > 1) out += ", ";
    out += k + "=" + v;
  }
  return out + "}";
}

inline std::optional<std::size_t> find_state(const VariableSpec& v, const std::string& label) {
  auto it = std::find(v.states.begin(), v.states.end(), label);
  if (it == v.states.end()) return std::nullopt;
  return static_cast<std::size_t>(it - v.states.begin());
}

// Structural checks shared by validate() and CausalGraph::create(). Returns
// the parent index lists for edges that resolved.
inline std::vector<std::vector<std::size_t>> check_structure(
    const std::vector<VariableSpec>& variables,
    const std::map<std::string, std::vector<std::string>>& parents, const Limits& limits,
    std::vector<Issue>& issues) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const auto& v = variables[i];
    const std::string path = "/variables/" + std::to_string(i);
    if (!index.emplace(v.name, i).second)
      issues.push_back({Errc::duplicate_variable, path + "/name", "variable '" + v.name + "' declared twice"});
    if (v.states.size() < 2)
      issues.push_back({Errc::too_few_states, path + "/states", "variable '" + v.name + "' needs at least 2 states"});
    std::set<std::string> seen;
    for (std::size_t s = 0; s < v.states.size(); ++s)
      if (!seen.insert(v.states[s]).second)
        issues.push_back({Errc::duplicate_state, path + "/states/" + std::to_string(s),
                          "state '" + v.states[s] + "' repeated in '" + v.name + "'"});
  }

  std::vector<std::vector<std::size_t>> resolved(variables.size());
  for (const auto& [child, list] : parents) {
    const std::string path = "/parents/" + child;
    auto c = index.find(child);
    if (c == index.end()) {
      issues.push_back({Errc::unknown_variable, path, "parents declared for undeclared variable '" + child + "'"});
      continue;
    }
    std::set<std::string> seen;
    for (std::size_t j = 0; j < list.size(); ++j) {
      const auto& p = list[j];
      const std::string ppath = path + "/" + std::to_string(j);
      if (p == child) {
        issues.push_back({Errc::self_loop, ppath, "'" + child + "' lists itself as a parent"});
        continue;
      }
      if (!seen.insert(p).second) {
        issues.push_back({Errc::duplicate_parent, ppath, "'" + p + "' listed twice as parent of '" + child + "'"});
        continue;
      }
      auto it = index.find(p);
      if (it == index.end()) {
        issues.push_back({Errc::unknown_parent, ppath, "'" + child + "' has undeclared parent '" + p + "'"});
        continue;
      }
      resolved[c->second].push_back(it->second);
    }
  }

  // Kahn's algorithm; leftovers lie on or downstream of a cycle.
  std::vector<std::size_t> indegree(variables.size(), 0);
  for (std::size_t v = 0; v < variables.size(); ++v) indegree[v] = resolved[v].size();
  std::vector<bool> done(variables.size(), false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t v = 0; v < variables.size(); ++v) {
      if (done[v] || indegree[v] != 0) continue;
      done[v] = true;
      progress = true;
      for (std::size_t w = 0; w < variables.size(); ++w)
        for (auto p : resolved[w])
          if (p == v) --indegree[w];
    }
  }
  std::vector<std::string> cyclic;
  for (std::size_t v = 0; v < variables.size(); ++v)
    if (!done[v]) cyclic.push_back(variables[v].name);
  if (!cyclic.empty())
    issues.push_back({Errc::cycle_detected, "/parents", "graph is not acyclic; unresolved variables: " + join(cyclic)});

  double joint = 1.0;
  for (const auto& v : variables) joint *= static_cast<double>(std::max<std::size_t>(v.states.size(), 1));
  if (joint > static_cast<double>(limits.max_joint_size))
    issues.push_back({Errc::budget_exceeded, "/variables",
                      "joint state space exceeds the budget of " + std::to_string(limits.max_joint_size)});
  return resolved;
}

}  // namespace detail

/// Validated, immutable DAG over finite discrete variables. Copies share the
/// underlying data. The topological order is computed once at construction.
class CausalGraph {
 public:
  static CausalGraph create(std::vector<VariableSpec> variables,
                            const std::map<std::string, std::vector<std::string>>& parents,
                            const Limits& limits = {}) {
    std::vector<Issue> issues;
    auto resolved = detail::check_structure(variables, parents, limits, issues);
    if (!issues.empty()) throw ModelError(ValidationReport{std::move(issues)});
    return CausalGraph(std::move(variables), std::move(resolved));
  }

  std::size_t size() const noexcept { return data_->variables.size(); }
  const std::vector<VariableSpec>& variables() const noexcept { return data_->variables; }
  const VariableSpec& variable(std::size_t v) const { return data_->variables.at(v); }
  std::size_t state_count(std::size_t v) const { return data_->variables.at(v).states.size(); }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (data_->variables[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw Error(Errc::unknown_variable, "no variable named '" + name + "'");
  }

  std::size_t state_index(std::size_t v, const std::string& label) const {
    if (auto s = detail::find_state(variable(v), label)) return *s;
    throw Error(Errc::illegal_state, "'" + label + "' is not a state of '" + variable(v).name + "'");
  }

  std::span<const std::size_t> parents(std::size_t v) const { return data_->parents.at(v); }
  std::span<const std::size_t> topological_order() const noexcept { return data_->topo; }
  std::size_t joint_size() const noexcept { return data_->joint_size; }

  bool has_edge(std::size_t from, std::size_t to) const {
    auto ps = parents(to);
    return std::find(ps.begin(), ps.end(), from) != ps.end();
  }

  bool is_ancestor(std::size_t a, std::size_t of) const {
    std::vector<std::size_t> stack(parents(of).begin(), parents(of).end());
    std::vector<bool> seen(size(), false);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (v == a) return true;
      if (seen[v]) continue;
      seen[v] = true;
      for (auto p : parents(v)) stack.push_back(p);
    }
    return false;
  }

  /// Number of parent configurations (CPT rows) of `v`.
  std::size_t row_count(std::size_t v) const { return data_->row_counts.at(v); }

  /// CPT row selected by the parent states inside a full state vector.
  /// The last-listed parent varies fastest.
  std::size_t row_of(std::size_t v, std::span<const std::size_t> full) const {
    const auto& ps = data_->parents[v];
    const auto& st = data_->strides[v];
    std::size_t row = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) row += full[ps[k]] * st[k];
    return row;
  }

  /// Parent states (aligned with parents(v)) encoded by `row`.
  std::vector<std::size_t> parent_states(std::size_t v, std::size_t row) const {
    const auto& ps = data_->parents[v];
    std::vector<std::size_t> out(ps.size());
    for (std::size_t k = ps.size(); k-- > 0;) {
      const auto n = state_count(ps[k]);
      out[k] = row % n;
      row /= n;
    }
    return out;
  }

  Assignment parent_assignment(std::size_t v, std::size_t row) const {
    Assignment a;
    const auto states = parent_states(v, row);
    const auto ps = parents(v);
    for (std::size_t k = 0; k < ps.size(); ++k) a[variable(ps[k]).name] = variable(ps[k]).states[states[k]];
    return a;
  }

  /// Copy with all incoming edges of `vars` removed (the structural half of
  /// graph surgery). The cached topological order stays valid.
  CausalGraph without_parents(std::span<const std::size_t> vars) const {
    auto parents = data_->parents;
    for (auto v : vars) parents.at(v).clear();
    return CausalGraph(data_->variables, std::move(parents));
  }

  std::map<std::string, std::vector<std::string>> parent_names() const {
    std::map<std::string, std::vector<std::string>> out;
    for (std::size_t v = 0; v < size(); ++v) {
      auto& list = out[variable(v).name];
      for (auto p : parents(v)) list.push_back(variable(p).name);
    }
    return out;
  }

  friend bool operator==(const CausalGraph& a, const CausalGraph& b) {
    return a.data_ == b.data_ ||
           (a.data_->variables == b.data_->variables && a.data_->parents == b.data_->parents);
  }

 private:
  struct Data {
    std::vector<VariableSpec> variables;
    std::vector<std::vector<std::size_t>> parents;
    std::vector<std::vector<std::size_t>> strides;
    std::vector<std::size_t> row_counts;
    std::vector<std::size_t> topo;
    std::size_t joint_size = 1;
  };

  CausalGraph(std::vector<VariableSpec> variables, std::vector<std::vector<std::size_t>> parents) {
    auto d = std::make_shared<Data>();
    d->variables = std::move(variables);
    d->parents = std::move(parents);
    const auto n = d->variables.size();
    d->strides.resize(n);
    d->row_counts.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& ps = d->parents[v];
      d->strides[v].resize(ps.size());
      std::size_t stride = 1;
      for (std::size_t k = ps.size(); k-- > 0;) {
        d->strides[v][k] = stride;
        stride *= d->variables[ps[k]].states.size();
      }
      d->row_counts[v] = stride;
      d->joint_size *= d->variables[v].states.size();
    }
    // Kahn, lowest declared index first among ready variables
    std::vector<bool> placed(n, false);
    while (d->topo.size() < n) {
      for (std::size_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        bool ready = std::all_of(d->parents[v].begin(), d->parents[v].end(), [&](auto p) { return placed[p]; });
        if (ready) {
          placed[v] = true;
          d->topo.push_back(v);
          break;
        }
      }
    }
    data_ = std::move(d);
  }

  std::shared_ptr<const Data> data_;
};

/// One probability vector per parent configuration, indexed by CausalGraph::row_of.
struct Cpt {
  std::vector<std::vector<double>> rows;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

/// A causal graph together with one CPT per variable. Always valid once
/// constructed; rows within tolerance of 1 are renormalized, others rejected.
class CausalModel {
 public:
  CausalModel(CausalGraph graph, std::vector<Cpt> cpts) : graph_(std::move(graph)), cpts_(std::move(cpts)) {
    std::vector<Issue> issues;
    if (cpts_.size() != graph_.size()) {
      issues.push_back({Errc::missing_cpt, "/cpts", "expected " + std::to_string(graph_.size()) + " tables, got " +
                                                        std::to_string(cpts_.size())});
      throw ModelError(ValidationReport{std::move(issues)});
    }
    for (std::size_t v = 0; v < graph_.size(); ++v) {
      const auto& name = graph_.variable(v).name;
      auto& rows = cpts_[v].rows;
      if (rows.size() != graph_.row_count(v)) {
        issues.push_back({Errc::missing_cpt_row, "/cpts/" + name,
                          "expected " + std::to_string(graph_.row_count(v)) + " rows, got " + std::to_string(rows.size())});
        continue;
      }
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string path = "/cpts/" + name + "/" + std::to_string(r);
        if (auto issue = check_row(rows[r], graph_.state_count(v), path)) {
          issues.push_back(std::move(*issue));
          continue;
        }
        normalize(rows[r]);
      }
    }
    if (!issues.empty()) throw ModelError(ValidationReport{std::move(issues)});
  }

  static CausalModel create(const ModelSpec& spec, const Limits& limits = {});

  const CausalGraph& graph() const noexcept { return graph_; }
  const Cpt& cpt(std::size_t v) const { return cpts_.at(v); }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }

  std::span<const double> row(std::size_t v, std::span<const std::size_t> full) const {
    return cpts_[v].rows[graph_.row_of(v, full)];
  }

  /// P(x_v | pa_v) read from a full state vector.
  double factor(std::size_t v, std::span<const std::size_t> full) const { return row(v, full)[full[v]]; }

  ModelSpec to_spec() const {
    ModelSpec spec;
    spec.variables = graph_.variables();
    spec.parents = graph_.parent_names();
    for (std::size_t v = 0; v < graph_.size(); ++v) {
      auto& rows = spec.cpts[graph_.variable(v).name];
      for (std::size_t r = 0; r < graph_.row_count(v); ++r)
        rows.push_back({graph_.parent_assignment(v, r), cpts_[v].rows[r]});
    }
    return spec;
  }

  friend bool operator==(const CausalModel&, const CausalModel&) = default;

  static std::optional<Issue> check_row(const std::vector<double>& p, std::size_t states, const std::string& path) {
    if (p.size() != states)
      return Issue{Errc::row_length_mismatch, path + "/p",
                   "row has " + std::to_string(p.size()) + " entries, variable has " + std::to_string(states) + " states"};
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p[i]) || p[i] < 0.0 || p[i] > 1.0)
        return Issue{Errc::probability_out_of_range, path + "/p/" + std::to_string(i), "entry outside [0,1]"};
      sum += p[i];
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance)
      return Issue{Errc::row_not_normalized, path + "/p", "row sums to " + std::to_string(sum)};
    return std::nullopt;
  }

 private:
  // Rows already within a few ulps of 1 are left bit-for-bit untouched, so
  // rebuilding a model from its own tables is the identity.
  static void normalize(std::vector<double>& p) {
    double sum = 0.0;
    for (double x : p) sum += x;
    if (std::abs(sum - 1.0) > 8 * std::numeric_limits<double>::epsilon())
      for (double& x : p) x /= sum;
  }

  CausalGraph graph_;
  std::vector<Cpt> cpts_;
};

// ---------------------------------------------------------------------------
// Validation

/// Checks every structural and parametric invariant of a model description and
/// reports all violations found (not just the first).
inline ValidationReport validate(const ModelSpec& spec, const Limits& limits = {}) {
  ValidationReport report;
  auto& issues = report.issues;
  auto resolved = detail::check_structure(spec.variables, spec.parents, limits, issues);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.variables.size(); ++i) index.emplace(spec.variables[i].name, i);

  for (const auto& [name, rows] : spec.cpts)
    if (!index.contains(name)) issues.push_back({Errc::unknown_variable, "/cpts/" + name, "table for undeclared variable"});

  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    const auto& var = spec.variables[v];
    if (index.at(var.name) != v) continue;  // duplicate declaration already reported
    const std::string base = "/cpts/" + var.name;
    auto it = spec.cpts.find(var.name);
    if (it == spec.cpts.end()) {
      issues.push_back({Errc::missing_cpt, base, "no table for '" + var.name + "'"});
      continue;
    }
    const auto& ps = resolved[v];
    std::set<std::vector<std::size_t>> seen;
    bool rows_resolved = true;
    for (std::size_t r = 0; r < it->second.size(); ++r) {
      const auto& row = it->second[r];
      const std::string path = base + "/" + std::to_string(r);
      if (auto issue = CausalModel::check_row(row.p, var.states.size(), path)) issues.push_back(std::move(*issue));

      std::vector<std::size_t> config(ps.size());
      bool ok = true;
      for (const auto& [g, label] : row.given) {
        auto pi = index.find(g);
        auto pos = pi == index.end() ? ps.end() : std::find(ps.begin(), ps.end(), pi->second);
        if (pos == ps.end()) {
          issues.push_back({Errc::unknown_parent, path + "/given/" + g, "'" + g + "' is not a parent of '" + var.name + "'"});
          ok = false;
          continue;
        }
        auto s = detail::find_state(spec.variables[*pos], label);
        if (!s) {
          issues.push_back({Errc::illegal_state, path + "/given/" + g, "'" + label + "' is not a state of '" + g + "'"});
          ok = false;
          continue;
        }
        config[static_cast<std::size_t>(pos - ps.begin())] = *s;
      }
      if (ok && row.given.size() != ps.size()) {
        issues.push_back({Errc::partial_assignment, path + "/given", "row does not fix every parent of '" + var.name + "'"});
        ok = false;
      }
      if (!ok) {
        rows_resolved = false;
        continue;
      }
      if (!seen.insert(config).second)
        issues.push_back({Errc::duplicate_cpt_row, path, "parent configuration " + detail::describe(row.given) + " repeated"});
    }
    if (!rows_resolved) continue;

    // every element of the cross product of parent states must be present
    std::vector<std::size_t> config(ps.size(), 0);
    for (bool more = true; more;) {
      if (!seen.contains(config)) {
        Assignment missing;
        for (std::size_t k = 0; k < ps.size(); ++k) missing[spec.variables[ps[k]].name] = spec.variables[ps[k]].states[config[k]];
        issues.push_back({Errc::missing_cpt_row, base, "no row for parent configuration " + detail::describe(missing)});
      }
      more = false;
      for (std::size_t k = ps.size(); k-- > 0;) {
        if (++config[k] < spec.variables[ps[k]].states.size()) {
          more = true;
          break;
        }
        config[k] = 0;
      }
    }
  }
  return report;
}

inline ValidationReport validate(const CausalModel& model) { return validate(model.to_spec()); }

inline CausalModel CausalModel::create(const ModelSpec& spec, const Limits& limits) {
  auto report = validate(spec, limits);
  if (!report.ok()) throw ModelError(std::move(report));
  auto graph = CausalGraph::create(spec.variables, spec.parents, limits);
  std::vector<Cpt> cpts(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    auto& rows = cpts[v].rows;
    rows.resize(graph.row_count(v));
    const auto ps = graph.parents(v);
    for (const auto& row : spec.cpts.at(graph.variable(v).name)) {
      std::vector<std::size_t> full(graph.size(), 0);
      for (auto p : ps) full[p] = graph.state_index(p, row.given.at(graph.variable(p).name));
      rows[graph.row_of(v, full)] = row.p;
    }
  }
  return CausalModel(std::move(graph), std::move(cpts));
}

// ---------------------------------------------------------------------------
// Assignments

using FullState = std::vector<std::size_t>;

inline std::vector<Binding> resolve(const CausalGraph& g, const Assignment& a) {
  std::vector<Binding> out;
  out.reserve(a.size());
  for (const auto& [name, label] : a) {
    const auto v = g.index_of(name);
    out.push_back({v, g.state_index(v, label)});
  }
  return out;
}

inline std::vector<Binding> resolve(const CausalGraph& g, const Intervention& i) { return resolve(g, i.forced()); }

inline FullState resolve_full(const CausalGraph& g, const Assignment& a) {
  FullState full(g.size(), 0);
  std::vector<bool> seen(g.size(), false);
  for (auto [v, s] : resolve(g, a)) {
    full[v] = s;
    seen[v] = true;
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!seen[v]) throw Error(Errc::partial_assignment, "assignment does not set '" + g.variable(v).name + "'");
  return full;
}

inline Assignment to_assignment(const CausalGraph& g, std::span<const std::size_t> full) {
  Assignment a;
  for (std::size_t v = 0; v < g.size(); ++v) a[g.variable(v).name] = g.variable(v).states.at(full[v]);
  return a;
}

inline bool matches(std::span<const std::size_t> full, std::span<const Binding> bindings) noexcept {
  for (auto b : bindings)
    if (full[b.var] != b.state) return false;
  return true;
}

/// Calls `fn(full_state)` for every full state that agrees with `fixed`.
template <class Fn>
void for_each_completion(const CausalGraph& g, std::span<const Binding> fixed, Fn&& fn) {
  FullState state(g.size(), 0);
  std::vector<bool> pinned(g.size(), false);
  for (auto b : fixed) {
    state[b.var] = b.state;
    pinned[b.var] = true;
  }
  std::vector<std::size_t> free;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!pinned[v]) free.push_back(v);
  while (true) {
    fn(std::span<const std::size_t>(state));
    std::size_t k = 0;
    for (; k < free.size(); ++k) {
      if (++state[free[k]] < g.state_count(free[k])) break;
      state[free[k]] = 0;
    }
    if (k == free.size()) return;
  }
}

// ---------------------------------------------------------------------------
// Inference

inline double joint_probability(const CausalModel& m, std::span<const std::size_t> full) {
  double p = 1.0;
  for (std::size_t v = 0; v < m.graph().size(); ++v) p *= m.factor(v, full);
  return p;
}

/// Product of P(x_i | pa_i) over all variables. `full` must set every variable.
inline double joint_probability(const CausalModel& m, const Assignment& full) {
  return joint_probability(m, resolve_full(m.graph(), full));
}

/// Exact P(target | evidence) by enumerating the joint.
inline double query(const CausalModel& m, const Assignment& target, const Assignment& evidence = {}) {
  if (target.empty()) throw Error(Errc::empty_target, "query target is empty");
  for (const auto& [name, _] : target)
    if (evidence.contains(name))
      throw Error(Errc::overlapping_target_evidence, "'" + name + "' appears in both target and evidence");
  const auto t = resolve(m.graph(), target);
  const auto e = resolve(m.graph(), evidence);
  double num = 0.0;
  double den = 0.0;
  for_each_completion(m.graph(), e, [&](std::span<const std::size_t> full) {
    const double p = joint_probability(m, full);
    den += p;
    if (matches(full, t)) num += p;
  });
  if (den <= 0.0) throw Error(Errc::zero_probability_evidence, "P" + detail::describe(evidence) + " = 0");
  return num / den;
}

/// Graph surgery: every forced variable loses its parents and gets a point-mass
/// CPT on its forced state. The input model is not modified.
inline CausalModel intervene(const CausalModel& m, const Intervention& i) {
  const auto bindings = resolve(m.graph(), i);
  std::vector<std::size_t> vars;
  for (auto b : bindings) vars.push_back(b.var);
  auto cpts = m.cpts();
  for (auto b : bindings) {
    std::vector<double> point(m.graph().state_count(b.var), 0.0);
    point[b.state] = 1.0;
    cpts[b.var].rows.assign(1, std::move(point));
  }
  return CausalModel(m.graph().without_parents(vars), std::move(cpts));
}

namespace detail {

// Truncated factorization: enumerate with forced variables pinned and skip
// their factors.
template <class Fn>
void for_each_intervened(const CausalModel& m, std::span<const Binding> forced, Fn&& fn) {
  std::vector<bool> skip(m.graph().size(), false);
  for (auto b : forced) skip[b.var] = true;
  for_each_completion(m.graph(), forced, [&](std::span<const std::size_t> full) {
    double p = 1.0;
    for (std::size_t v = 0; v < m.graph().size(); ++v)
      if (!skip[v]) p *= m.factor(v, full);
    fn(full, p);
  });
}

}  // namespace detail

/// Distribution of `var` under do(i), aligned with var's state order.
inline std::vector<double> interventional_distribution(const CausalModel& m, const Intervention& i, std::size_t var) {
  const auto forced = resolve(m.graph(), i);
  for (auto b : forced)
    if (b.var == var) throw Error(Errc::target_is_intervened, "'" + m.graph().variable(var).name + "' is intervened on");
  std::vector<double> dist(m.graph().state_count(var), 0.0);
  detail::for_each_intervened(m, forced, [&](std::span<const std::size_t> full, double p) { dist[full[var]] += p; });
  return dist;
}

/// P(target | do(i)); equals query(intervene(m, i), target).
inline double interventional_query(const CausalModel& m, const Intervention& i, const Assignment& target) {
  if (target.empty()) throw Error(Errc::empty_target, "query target is empty");
  for (const auto& [name, _] : target)
    if (i.forces(name)) throw Error(Errc::target_is_intervened, "'" + name + "' is intervened on");
  const auto forced = resolve(m.graph(), i);
  const auto t = resolve(m.graph(), target);
  double num = 0.0;
  detail::for_each_intervened(m, forced, [&](std::span<const std::size_t> full, double p) {
    if (matches(full, t)) num += p;
  });
  return num;
}

// ---------------------------------------------------------------------------
// Sampling

/// Ancestral sampling in topological order.
inline FullState sample_state(const CausalModel& m, RandomStream& rng) {
  FullState full(m.graph().size(), 0);
  for (auto v : m.graph().topological_order()) full[v] = rng.categorical(m.row(v, full));
  return full;
}

inline Assignment sample(const CausalModel& m, RandomStream& rng) { return to_assignment(m.graph(), sample_state(m, rng)); }

}  // namespace cdpu
