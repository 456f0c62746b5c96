// Command-line front end: randomized runs, exhaustive search, and the
// built-in Needham-Schroeder attack reproduction.
//
// Exit codes: 0 success (FormulaSatisfied / witness found / attack matched),
// 1 an execution that ended some other way, 2 load or usage errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bach/bach.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string model_path;
  std::string formula;
  std::uint64_t seed = 0;
  int max_steps = 10000;
  int max_depth = 64;
  std::string output = "text";
  bool all_witnesses = false;
};

std::vector<std::string> dump_lines(const bach::Store& s) {
  std::vector<std::string> lines;
  std::string cur;
  for (const char c : s.dump()) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return lines;
}

json step_record(std::size_t index, const bach::Configuration& c,
                 bool with_formula) {
  const bach::StepLabel& l = c.trace.back();
  json rec{{"index", index},
           {"kind", std::string(bach::prim_name(l.kind))},
           {"term", bach::render(l.term)},
           {"store_after", dump_lines(c.store)}};
  if (with_formula) {
    rec["formula_residual"] = bach::pretty_formula(c.formula);
  } else {
    rec["formula_residual"] = nullptr;
  }
  return rec;
}

/// The goal formula: --formula overrides the model's run directive.
std::optional<bach::BslFormula> pick_goal(const bach::Model& m,
                                          const Options& o) {
  if (!o.formula.empty()) {
    if (!m.formulae.contains(o.formula)) {
      throw bach::UnknownFormulaVariableError(o.formula);
    }
    return bach::fvar(o.formula);
  }
  if (m.goal) {
    return m.goal_formula();
  }
  return std::nullopt;
}

int cmd_run(const Options& o) {
  bach::Model m = bach::parse_file(o.model_path);
  bach::Agent entry = m.entry_agent();
  std::optional<bach::BslFormula> goal = pick_goal(m, o);
  const bool structured = o.output == "structured";

  bach::RunOptions ro;
  ro.max_steps = o.max_steps;
  ro.on_step = [&](const bach::Configuration& c) {
    if (structured) {
      std::cout << step_record(c.trace.size(), c, goal.has_value()) << "\n";
    } else {
      std::cout << bach::format_trace_line(c.trace.size(), c.trace.back())
                << "\n";
    }
  };

  bach::RandomSource rng(o.seed);
  bach::RunOutcome outcome =
      goal ? bach::execute(std::move(entry), *goal, m.procs, m.formulae, rng, ro)
           : bach::run_unconstrained(std::move(entry), m.procs, rng, ro);

  if (structured) {
    std::cout << json{{"status", std::string(to_string(outcome.status))}}
              << "\n";
  } else {
    std::cout << to_string(outcome.status) << "\n";
  }
  return outcome.status == bach::RunStatus::formula_satisfied ? 0 : 1;
}

void print_witness_text(const std::vector<bach::StepLabel>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::cout << bach::format_trace_line(i + 1, trace[i]) << "\n";
  }
}

void print_witness_structured(const bach::Model& m, const bach::BslFormula& goal,
                              const bach::Witness& w) {
  auto path = bach::replay_trace(m.entry_agent(), goal, m.procs, m.formulae,
                                 w.trace);
  if (!path) {
    throw bach::Error("internal error: witness trace failed to replay");
  }
  for (std::size_t i = 0; i < path->size(); ++i) {
    std::cout << step_record(i + 1, (*path)[i], true) << "\n";
  }
}

int run_search(const bach::Model& m, const bach::BslFormula& goal,
               const Options& o, const bach::SearchResult& result) {
  const bool structured = o.output == "structured";
  if (result.status != bach::SearchStatus::witness_found) {
    if (structured) {
      std::cout << json{{"status", std::string(to_string(result.status))}}
                << "\n";
    } else {
      std::cout << (result.status == bach::SearchStatus::depth_limit
                        ? "depth limit"
                        : "exhausted")
                << "\n";
    }
    return 1;
  }
  for (std::size_t i = 0; i < result.witnesses.size(); ++i) {
    const bach::Witness& w = result.witnesses[i];
    if (structured) {
      std::cout << json{{"witness", i + 1}, {"steps", w.trace.size()}} << "\n";
      print_witness_structured(m, goal, w);
    } else {
      if (result.witnesses.size() > 1) {
        std::cout << "witness " << (i + 1) << " (" << w.trace.size()
                  << " steps)\n";
      }
      print_witness_text(w.trace);
    }
  }
  return 0;
}

int cmd_search(const Options& o) {
  bach::Model m = bach::parse_file(o.model_path);
  std::optional<bach::BslFormula> goal = pick_goal(m, o);
  if (!goal) {
    throw bach::Error("search needs a formula: pass --formula or add a "
                      "'run ... with ...' directive");
  }
  bach::SearchOptions so;
  so.max_depth = o.max_depth;
  so.all_witnesses = o.all_witnesses;
  bach::SearchResult result =
      bach::search(m.entry_agent(), *goal, m.procs, m.formulae, so);
  return run_search(m, *goal, o, result);
}

int cmd_ns_attack(const Options& o) {
  bach::Model m = bach::build_ns_model();
  bach::BslFormula goal = m.goal_formula();
  bach::SearchOptions so;
  so.max_depth = o.max_depth;
  bach::SearchResult result =
      bach::search(m.entry_agent(), goal, m.procs, m.formulae, so);
  const int search_code = run_search(m, goal, o, result);
  if (search_code != 0) {
    return search_code;
  }

  const std::vector<bach::Exchange> got =
      bach::project_exchanges(result.witnesses.front().trace);
  const bool structured = o.output == "structured";
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (structured) {
      std::cout << json{{"exchange", i + 1},
                        {"sender", bach::render(got[i].sender)},
                        {"receiver", bach::render(got[i].receiver)},
                        {"payload", bach::render(got[i].payload)}}
                << "\n";
    } else {
      std::cout << bach::render(got[i]) << "\n";
    }
  }
  return got == bach::expected_attack_summary() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolkit for the Bach coordination language"};
  app.require_subcommand(1);
  Options o;

  CLI::App* run = app.add_subcommand(
      "run", "Randomized execution of a model, optionally formula-constrained");
  run->add_option("model", o.model_path, "Model file")->required();
  run->add_option("--formula", o.formula, "Name of the constraining formula");
  run->add_option("--seed", o.seed, "Random seed (default 0)");
  run->add_option("--max-steps", o.max_steps, "Step budget (default 10000)");
  run->add_option("--output", o.output, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));

  CLI::App* search = app.add_subcommand(
      "search", "Exhaustive bounded search for a satisfying execution");
  search->add_option("model", o.model_path, "Model file")->required();
  search->add_option("--formula", o.formula, "Name of the goal formula");
  search->add_option("--max-depth", o.max_depth, "Depth bound (default 64)");
  search->add_flag("--all", o.all_witnesses, "Report every witness");
  search->add_option("--output", o.output, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));

  CLI::App* attack = app.add_subcommand(
      "ns-attack",
      "Search the built-in Needham-Schroeder model and print the attack");
  attack->add_option("--max-depth", o.max_depth, "Depth bound (default 64)");
  attack->add_option("--output", o.output, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are load errors
  }

  try {
    if (run->parsed()) {
      return cmd_run(o);
    }
    if (search->parsed()) {
      return cmd_search(o);
    }
    if (attack->parsed()) {
      return cmd_ns_attack(o);
    }
  } catch (const bach::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
