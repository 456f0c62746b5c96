#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bach/agent.hpp"
#include "bach/errors.hpp"
#include "bach/logic.hpp"
#include "bach/store.hpp"
#include "bach/term.hpp"

namespace bach {

/// The observable effect of one execution step: which primitive fired, on
/// which term.
struct StepLabel {
  PrimKind kind;
  SiTerm term;

  friend bool operator==(const StepLabel& a, const StepLabel& b) {
    return a.kind == b.kind && a.term == b.term;
  }
  friend bool operator!=(const StepLabel& a, const StepLabel& b) {
    return !(a == b);
  }
};

inline std::string render(const StepLabel& l) {
  std::string out{prim_name(l.kind)};
  out += '(';
  detail::render_term(out, l.term);
  out += ')';
  return out;
}

/// One numbered trace line, e.g. "(3)  tell(a)". Indices are 1-based.
inline std::string format_trace_line(std::size_t index, const StepLabel& l) {
  return "(" + std::to_string(index) + ")  " + render(l);
}

/// A point of an execution: residual agent, current store, residual formula
/// and the labels of the steps taken so far.
struct Configuration {
  Agent agent;
  Store store;
  BslFormula formula;
  std::vector<StepLabel> trace;
};

inline Configuration initial_configuration(Agent agent, BslFormula formula,
                                           Store store = {}) {
  return Configuration{normalize(std::move(agent)), std::move(store),
                       std::move(formula), {}};
}

/// Deterministic seeded randomness. Derives values with modulo reduction
/// rather than std::uniform_int_distribution, whose output differs across
/// standard library implementations; equal seeds must replay equal runs
/// everywhere.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// One random bit.
  bool bit() { return (engine_() & 1u) != 0; }

  /// Uniform index in [0, n); n must be positive.
  std::size_t pick(std::size_t n) {
    if (n == 0) {
      throw Error("pick: empty range");
    }
    return static_cast<std::size_t>(engine_() % n);
  }

private:
  std::mt19937_64 engine_;
};

/// One enabled step of an agent: its label, the residual agent and the store
/// after the effect.
struct Transition {
  StepLabel label;
  Agent agent;
  Store store;
};

namespace detail {

inline std::optional<Transition> prim_step(const Agent& a, const Store& s) {
  const SiTerm& t = a.term();
  switch (a.prim_kind()) {
    case PrimKind::tell: {
      Store ns = s;
      ns.tell(t);
      return Transition{{PrimKind::tell, t}, empty_agent(), std::move(ns)};
    }
    case PrimKind::ask:
      if (s.ask(t)) {
        return Transition{{PrimKind::ask, t}, empty_agent(), s};
      }
      return std::nullopt;
    case PrimKind::get: {
      Store ns = s;
      if (!ns.get(t)) {
        return std::nullopt;
      }
      return Transition{{PrimKind::get, t}, empty_agent(), std::move(ns)};
    }
    case PrimKind::nask:
      if (s.nask(t)) {
        return Transition{{PrimKind::nask, t}, empty_agent(), s};
      }
      return std::nullopt;
  }
  throw Error("prim_step: corrupt primitive");
}

inline Agent seq_compose(Agent l, Agent r) {
  return l.is_empty() ? std::move(r) : seq(std::move(l), std::move(r));
}

inline Agent par_compose(Agent l, Agent r) {
  if (l.is_empty()) {
    return r;
  }
  if (r.is_empty()) {
    return l;
  }
  return par(std::move(l), std::move(r));
}

inline void collect_transitions(const Agent& a, const Store& s,
                                const ProcEnv& env,
                                std::vector<Transition>& out) {
  switch (a.kind()) {
    case Agent::Kind::empty:
      return;
    case Agent::Kind::prim:
      if (auto tr = prim_step(a, s)) {
        out.push_back(std::move(*tr));
      }
      return;
    case Agent::Kind::seq: {
      std::vector<Transition> inner;
      collect_transitions(a.left(), s, env, inner);
      for (Transition& tr : inner) {
        out.push_back(Transition{std::move(tr.label),
                                 seq_compose(std::move(tr.agent), a.right()),
                                 std::move(tr.store)});
      }
      return;
    }
    case Agent::Kind::par: {
      std::vector<Transition> inner;
      collect_transitions(a.left(), s, env, inner);
      for (Transition& tr : inner) {
        out.push_back(Transition{std::move(tr.label),
                                 par_compose(std::move(tr.agent), a.right()),
                                 std::move(tr.store)});
      }
      inner.clear();
      collect_transitions(a.right(), s, env, inner);
      for (Transition& tr : inner) {
        out.push_back(Transition{std::move(tr.label),
                                 par_compose(a.left(), std::move(tr.agent)),
                                 std::move(tr.store)});
      }
      return;
    }
    case Agent::Kind::choice:
      collect_transitions(a.left(), s, env, out);
      collect_transitions(a.right(), s, env, out);
      return;
    case Agent::Kind::gsum:
      collect_transitions(expand_gsum(a), s, env, out);
      return;
    case Agent::Kind::call:
      collect_transitions(resolve_call(env, a), s, env, out);
      return;
  }
}

}  // namespace detail

/// Every step the agent can take on the given store, in a fixed
/// left-to-right order. Residual agents are normalized.
inline std::vector<Transition> agent_transitions(const Agent& a, const Store& s,
                                                 const ProcEnv& env) {
  std::vector<Transition> out;
  detail::collect_transitions(a, s, env, out);
  return out;
}

namespace detail {

/// One randomized attempt at a step. Each parallel composition and each
/// choice consumes one bit deciding which side is tried first; the other
/// side is the fallback. Sums expand to right-nested choices first, so every
/// two-way fork costs exactly one bit.
inline std::optional<Transition> try_step(const Agent& a, const Store& s,
                                          const ProcEnv& env,
                                          RandomSource& rng) {
  switch (a.kind()) {
    case Agent::Kind::empty:
      return std::nullopt;
    case Agent::Kind::prim:
      return prim_step(a, s);
    case Agent::Kind::seq: {
      auto tr = try_step(a.left(), s, env, rng);
      if (tr) {
        tr->agent = seq_compose(std::move(tr->agent), a.right());
      }
      return tr;
    }
    case Agent::Kind::par: {
      const bool right_first = rng.bit();
      for (int attempt = 0; attempt < 2; ++attempt) {
        const bool use_right = (attempt == 0) == right_first;
        const Agent& side = use_right ? a.right() : a.left();
        if (auto tr = try_step(side, s, env, rng)) {
          tr->agent = use_right
                          ? par_compose(a.left(), std::move(tr->agent))
                          : par_compose(std::move(tr->agent), a.right());
          return tr;
        }
      }
      return std::nullopt;
    }
    case Agent::Kind::choice: {
      const bool right_first = rng.bit();
      for (int attempt = 0; attempt < 2; ++attempt) {
        const bool use_right = (attempt == 0) == right_first;
        const Agent& side = use_right ? a.right() : a.left();
        if (auto tr = try_step(side, s, env, rng)) {
          return tr;  // the untaken branch is discarded
        }
      }
      return std::nullopt;
    }
    case Agent::Kind::gsum:
      return try_step(expand_gsum(a), s, env, rng);
    case Agent::Kind::call:
      return try_step(resolve_call(env, a), s, env, rng);
  }
  throw Error("try_step: corrupt agent");
}

}  // namespace detail

/// Attempts one randomized execution step. Returns {false, c} when the agent
/// cannot move on the current store; the formula part is carried along
/// untouched.
inline std::pair<bool, Configuration> run_one(const Configuration& c,
                                              const ProcEnv& env,
                                              RandomSource& rng) {
  auto tr = detail::try_step(c.agent, c.store, env, rng);
  if (!tr) {
    return {false, c};
  }
  Configuration nc{std::move(tr->agent), std::move(tr->store), c.formula,
                   c.trace};
  nc.trace.push_back(std::move(tr->label));
  return {true, std::move(nc)};
}

/// All constrained successors of a configuration: the cross product of the
/// agent's transitions with the residuals derivable on each successor store.
/// An empty result means every enabled agent step would violate the formula
/// (or the agent has no step at all).
inline std::vector<Configuration> constrained_step(const Configuration& c,
                                                   const ProcEnv& penv,
                                                   const FormulaEnv& fenv) {
  if (is_satisfied(c.formula)) {
    throw Error("constrained_step: formula is already satisfied");
  }
  std::vector<Configuration> out;
  for (Transition& tr : agent_transitions(c.agent, c.store, penv)) {
    for (BslFormula& r : derive(tr.store, c.formula, fenv)) {
      Configuration nc{tr.agent, tr.store, std::move(r), c.trace};
      nc.trace.push_back(tr.label);
      out.push_back(std::move(nc));
    }
  }
  return out;
}

enum class RunStatus { formula_satisfied, agent_terminated, stuck, step_limit };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::formula_satisfied: return "FormulaSatisfied";
    case RunStatus::agent_terminated: return "AgentTerminated";
    case RunStatus::stuck: return "Stuck";
    case RunStatus::step_limit: return "StepLimit";
  }
  return "?";
}

struct RunOutcome {
  RunStatus status;
  Configuration final_config;
};

struct RunOptions {
  int max_steps = 10000;
  Store initial_store;
  /// Invoked after every committed step.
  std::function<void(const Configuration&)> on_step;
};

/// Randomized constrained execution: from each configuration one successor
/// is drawn uniformly among all constrained successors, until the formula is
/// satisfied, the agent terminates, no successor is left, or the step budget
/// runs out.
inline RunOutcome execute(Agent entry, BslFormula goal, const ProcEnv& penv,
                          const FormulaEnv& fenv, RandomSource& rng,
                          const RunOptions& opts = {}) {
  Configuration c =
      initial_configuration(std::move(entry), std::move(goal),
                            opts.initial_store);
  while (true) {
    if (is_satisfied(c.formula)) {
      return {RunStatus::formula_satisfied, std::move(c)};
    }
    if (c.agent.is_empty()) {
      return {RunStatus::agent_terminated, std::move(c)};
    }
    if (c.trace.size() >= static_cast<std::size_t>(opts.max_steps)) {
      return {RunStatus::step_limit, std::move(c)};
    }
    std::vector<Configuration> succs = constrained_step(c, penv, fenv);
    if (succs.empty()) {
      return {RunStatus::stuck, std::move(c)};
    }
    c = std::move(succs[rng.pick(succs.size())]);
    if (opts.on_step) {
      opts.on_step(c);
    }
  }
}

/// Unconstrained randomized execution: repeated run_one until the agent
/// terminates, blocks, or the budget runs out. FormulaSatisfied never occurs
/// here.
inline RunOutcome run_unconstrained(Agent entry, const ProcEnv& penv,
                                    RandomSource& rng,
                                    const RunOptions& opts = {}) {
  Configuration c = initial_configuration(std::move(entry), epsilon(),
                                          opts.initial_store);
  while (true) {
    if (c.agent.is_empty()) {
      return {RunStatus::agent_terminated, std::move(c)};
    }
    if (c.trace.size() >= static_cast<std::size_t>(opts.max_steps)) {
      return {RunStatus::step_limit, std::move(c)};
    }
    auto [stepped, nc] = run_one(c, penv, rng);
    if (!stepped) {
      return {RunStatus::stuck, std::move(c)};
    }
    c = std::move(nc);
    if (opts.on_step) {
      opts.on_step(c);
    }
  }
}

}  // namespace bach
