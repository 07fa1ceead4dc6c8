#pragma once

// Command-line front end:
//   simulate    --model F --experiment F --out CSV [--svg F] [--log F] [--seed S] [--rounds N] [--reps K] [--threads T]
//   query       --model F --target VAR=STATE [--do VAR=STATE]... [--given VAR=STATE]...
//   best-action --model F --experiment F
// Exit codes: 0 success, 1 usage error, 2 validation error.

#include <iomanip>
#include <locale>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdpu/agents.hpp"
#include "cdpu/environment.hpp"
#include "cdpu/experiment.hpp"
#include "cdpu/model_io.hpp"
#include "cdpu/report.hpp"

namespace cdpu {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;

namespace detail {

inline Assignment parse_bindings(const std::vector<std::string>& items, const std::string& flag) {
  Assignment out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw Error(Errc::usage, flag + " expects VAR=STATE, got '" + item + "'");
    if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
      throw Error(Errc::usage, flag + " names '" + item.substr(0, eq) + "' more than once");
  }
  return out;
}

inline std::string format_probability(double p) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(10) << p;
  return s.str();
}

template <class Params>
const AgentConfig* first_agent_of(const ExperimentConfig& cfg) {
  for (const auto& a : cfg.agents)
    if (std::holds_alternative<Params>(a.params)) return &a;
  return nullptr;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal decision problems: interventional inference and agent simulations", "cdpu"};
  app.require_subcommand(1);

  std::string model_path, experiment_path, csv_path, svg_path, log_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rounds, reps;
  std::optional<unsigned> threads;
  std::vector<std::string> do_items, target_items, given_items;

  auto* simulate = app.add_subcommand("simulate", "Run the replicated agent comparison and write per-round averages");
  simulate->add_option("--model", model_path, "Model file (JSON)")->required();
  simulate->add_option("--experiment", experiment_path, "Experiment file (JSON)")->required();
  simulate->add_option("--out", csv_path, "Output CSV path")->required();
  simulate->add_option("--svg", svg_path, "Also write an SVG chart here");
  simulate->add_option("--log", log_path, "Also write every per-replication record as CSV");
  simulate->add_option("--seed", seed, "Master seed (overrides the experiment file)");
  simulate->add_option("--rounds", rounds, "Rounds per replication (overrides the experiment file)");
  simulate->add_option("--reps", reps, "Replications (overrides the experiment file)");
  simulate->add_option("--threads", threads, "Worker threads for replications; output does not depend on it");

  auto* query_cmd = app.add_subcommand("query", "Print P(target | do(...), given) computed exactly");
  query_cmd->add_option("--model", model_path, "Model file (JSON)")->required();
  query_cmd->add_option("--do", do_items, "Intervention VAR=STATE (repeatable)");
  query_cmd->add_option("--target", target_items, "Target VAR=STATE (repeatable)")->required();
  query_cmd->add_option("--given", given_items, "Observed evidence VAR=STATE (repeatable)");

  auto* best = app.add_subcommand("best-action", "Print the label of the expected-utility-maximizing action under the model");
  best->add_option("--model", model_path, "Model file (JSON)")->required();
  best->add_option("--experiment", experiment_path, "Experiment file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      const auto env = load_environment(model_path, experiment_path);
      auto cfg = experiment_config_from_json(read_json_file(experiment_path));
      if (seed) cfg.seed = *seed;
      if (rounds) cfg.rounds = *rounds;
      if (reps) cfg.replications = *reps;
      if (threads) cfg.threads = *threads;
      cfg.csv = csv_path;
      if (!svg_path.empty()) cfg.svg = svg_path;
      cfg.validate();

      const auto result = run_experiment(env, cfg);
      write_csv(result.series, *cfg.csv);
      if (cfg.svg) write_svg(result.series, *cfg.svg);
      if (!log_path.empty()) write_trial_log_csv(result.log, log_path);

      for (const auto& s : result.series)
        out << s.agent << ": round " << cfg.rounds << " mean " << format_decimal(s.mean.back()) << ", overall mean "
            << format_decimal(s.cumulative_mean.back()) << '\n';
      const auto* causal = detail::first_agent_of<CausalAgentConfig>(cfg);
      const auto* qlearn = detail::first_agent_of<QLearningConfig>(cfg);
      if (causal && qlearn) {
        const auto n = convergence_index(result.series_for(causal->label), result.series_for(qlearn->label), cfg.epsilon);
        out << "convergence index (" << causal->label << " vs " << qlearn->label << ", epsilon "
            << detail::format_probability(cfg.epsilon) << "): " << (n ? std::to_string(*n) : std::string("none")) << '\n';
      }
      return kExitOk;
    }

    if (query_cmd->parsed()) {
      const auto model = load_model(model_path);
      const auto target = detail::parse_bindings(target_items, "--target");
      const auto given = detail::parse_bindings(given_items, "--given");
      const auto forced = detail::parse_bindings(do_items, "--do");
      double p;
      if (forced.empty()) {
        p = query(model, target, given);
      } else {
        const Intervention i(forced);
        for (const auto& [name, _] : target)
          if (i.forces(name)) throw Error(Errc::target_is_intervened, "'" + name + "' is intervened on");
        p = given.empty() ? interventional_query(model, i, target) : query(intervene(model, i), target, given);
      }
      out << detail::format_probability(p) << '\n';
      return kExitOk;
    }

    if (best->parsed()) {
      const auto env = load_environment(model_path, experiment_path);
      const auto i = best_action(env.truth(), env.actions(), env.target(), env.utility());
      out << env.actions()[i].label << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::usage ? kExitUsage : kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace cdpu
