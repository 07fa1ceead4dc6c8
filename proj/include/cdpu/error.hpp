#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cdpu {

enum class Errc {
  // model structure and parameters
  cycle_detected,
  missing_cpt_row,
  duplicate_cpt_row,
  row_not_normalized,
  row_length_mismatch,
  probability_out_of_range,
  unknown_parent,
  duplicate_parent,
  self_loop,
  duplicate_variable,
  duplicate_state,
  too_few_states,
  missing_cpt,
  budget_exceeded,
  // queries
  unknown_variable,
  illegal_state,
  partial_assignment,
  zero_probability_evidence,
  overlapping_target_evidence,
  empty_target,
  empty_intervention,
  target_is_intervened,
  // beliefs
  nonpositive_alpha,
  inconsistent_with_intervention,
  partial_observation,
  // agents / environment
  empty_action_set,
  duplicate_action,
  bad_index,
  invalid_utility,
  invalid_parameter,
  unknown_action,
  unknown_target,
  action_intervenes_target,
  // harness / io
  length_mismatch,
  parse_error,
  io_error,
  usage,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::cycle_detected: return "cycle-detected";
    case Errc::missing_cpt_row: return "missing-cpt-row";
    case Errc::duplicate_cpt_row: return "duplicate-cpt-row";
    case Errc::row_not_normalized: return "row-not-normalized";
    case Errc::row_length_mismatch: return "row-length-mismatch";
    case Errc::probability_out_of_range: return "probability-out-of-range";
    case Errc::unknown_parent: return "unknown-parent";
    case Errc::duplicate_parent: return "duplicate-parent";
    case Errc::self_loop: return "self-loop";
    case Errc::duplicate_variable: return "duplicate-variable";
    case Errc::duplicate_state: return "duplicate-state";
    case Errc::too_few_states: return "too-few-states";
    case Errc::missing_cpt: return "missing-cpt";
    case Errc::budget_exceeded: return "budget-exceeded";
    case Errc::unknown_variable: return "unknown-variable";
    case Errc::illegal_state: return "illegal-state";
    case Errc::partial_assignment: return "partial-assignment";
    case Errc::zero_probability_evidence: return "zero-probability-evidence";
    case Errc::overlapping_target_evidence: return "overlapping-target-evidence";
    case Errc::empty_target: return "empty-target";
    case Errc::empty_intervention: return "empty-intervention";
    case Errc::target_is_intervened: return "target-is-intervened";
    case Errc::nonpositive_alpha: return "nonpositive-alpha";
    case Errc::inconsistent_with_intervention: return "inconsistent-with-intervention";
    case Errc::partial_observation: return "partial-observation";
    case Errc::empty_action_set: return "empty-action-set";
    case Errc::duplicate_action: return "duplicate-action";
    case Errc::bad_index: return "bad-index";
    case Errc::invalid_utility: return "invalid-utility";
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::unknown_action: return "unknown-action";
    case Errc::unknown_target: return "unknown-target";
    case Errc::action_intervenes_target: return "action-intervenes-target";
    case Errc::length_mismatch: return "length-mismatch";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
    case Errc::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// One violation found by model validation. `path` points into the JSON
/// document layout (e.g. "/cpts/Y/2/p") so loaders can report it verbatim.
struct Issue {
  Errc code;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const noexcept { return issues.empty(); }
  explicit operator bool() const noexcept { return ok(); }

  bool contains(Errc code) const noexcept {
    for (const auto& i : issues)
      if (i.code == code) return true;
    return false;
  }

  std::string summary() const {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += '\n';
      out += std::string(to_string(i.code)) + " at " + (i.path.empty() ? "/" : i.path) + ": " + i.message;
    }
    return out;
  }
};

/// Thrown when a model fails validation; carries the full report.
class ModelError : public Error {
 public:
  explicit ModelError(ValidationReport report)
      : Error(report.issues.empty() ? Errc::parse_error : report.issues.front().code, report.summary()),
        report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace cdpu
