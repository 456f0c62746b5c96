#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bach/agent.hpp"
#include "bach/interpreter.hpp"
#include "bach/logic.hpp"
#include "bach/store.hpp"

namespace bach {

/// A successful constrained execution found by search.
struct Witness {
  std::vector<StepLabel> trace;
  Configuration final_config;
};

enum class SearchStatus { witness_found, exhausted, depth_limit };

inline std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::witness_found: return "WitnessFound";
    case SearchStatus::exhausted: return "Exhausted";
    case SearchStatus::depth_limit: return "DepthLimit";
  }
  return "?";
}

struct SearchStats {
  std::size_t expanded = 0;      // configurations visited, revisits included
  int max_depth_reached = 0;
};

struct SearchResult {
  SearchStatus status;
  std::vector<Witness> witnesses;
  SearchStats stats;
};

struct SearchOptions {
  int max_depth = 64;
  /// Collect every witness instead of stopping at the first. Disables the
  /// visited-state cut so that distinct traces to the same state are all
  /// reported; meant for small state spaces.
  bool all_witnesses = false;
  Store initial_store;
  /// Invoked on every visited configuration, including the initial one.
  std::function<void(const Configuration&)> on_visit;
};

namespace detail {

/// Canonical key of a search state. Rendering is injective on terms, agents
/// and formulas, so equal keys mean equal states.
inline std::string state_key(const Configuration& c) {
  std::string key = pretty_agent(c.agent);
  key += '\n';
  key += c.store.dump();
  key += '\n';
  key += pretty_formula(c.formula);
  return key;
}

struct SearchCtx {
  const ProcEnv& penv;
  const FormulaEnv& fenv;
  const SearchOptions& opts;
  SearchResult result;
  // Shallowest depth at which each state was expanded. A state reached again
  // at the same or a greater depth has nothing new below it; reached
  // shallower, it gets a deeper remaining budget and must be re-expanded.
  std::unordered_map<std::string, int> best_depth;
  bool truncated = false;
};

// Returns true when the whole search should stop (first witness found).
inline bool search_dfs(const Configuration& c, int depth, SearchCtx& ctx) {
  ++ctx.result.stats.expanded;
  ctx.result.stats.max_depth_reached =
      std::max(ctx.result.stats.max_depth_reached, depth);
  if (ctx.opts.on_visit) {
    ctx.opts.on_visit(c);
  }
  if (is_satisfied(c.formula)) {
    ctx.result.witnesses.push_back(Witness{c.trace, c});
    return !ctx.opts.all_witnesses;
  }
  if (depth >= ctx.opts.max_depth) {
    if (!constrained_step(c, ctx.penv, ctx.fenv).empty()) {
      ctx.truncated = true;  // a live state was cut off
    }
    return false;
  }
  for (Configuration& succ : constrained_step(c, ctx.penv, ctx.fenv)) {
    if (!ctx.opts.all_witnesses) {
      std::string key = state_key(succ);
      auto it = ctx.best_depth.find(key);
      if (it != ctx.best_depth.end() && it->second <= depth + 1) {
        continue;
      }
      ctx.best_depth[std::move(key)] = depth + 1;
    }
    if (search_dfs(succ, depth + 1, ctx)) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Exhaustive depth-first search for constrained executions that satisfy the
/// goal. Deterministic: successors are expanded in the order
/// constrained_step lists them, so the first witness is always the same.
inline SearchResult search(Agent entry, BslFormula goal, const ProcEnv& penv,
                           const FormulaEnv& fenv,
                           const SearchOptions& opts = {}) {
  Configuration c0 = initial_configuration(std::move(entry), std::move(goal),
                                           opts.initial_store);
  detail::SearchCtx ctx{penv, fenv, opts, {}, {}, false};
  if (!opts.all_witnesses) {
    ctx.best_depth[detail::state_key(c0)] = 0;
  }
  detail::search_dfs(c0, 0, ctx);
  SearchResult result = std::move(ctx.result);
  result.status = !result.witnesses.empty()
                      ? SearchStatus::witness_found
                      : (ctx.truncated ? SearchStatus::depth_limit
                                       : SearchStatus::exhausted);
  return result;
}

namespace detail {

inline void reach_rec(const Agent& a, const Store& s, const ProcEnv& env,
                      int depth, int max_depth,
                      std::unordered_map<std::string, int>& best_depth,
                      std::set<Store>& out) {
  std::vector<Transition> succs = agent_transitions(a, s, env);
  if (succs.empty()) {
    out.insert(s);  // maximal: terminated or blocked
    return;
  }
  if (depth >= max_depth) {
    return;
  }
  for (Transition& tr : succs) {
    std::string key = pretty_agent(tr.agent);
    key += '\n';
    key += tr.store.dump();
    auto it = best_depth.find(key);
    if (it != best_depth.end() && it->second <= depth + 1) {
      continue;
    }
    best_depth[std::move(key)] = depth + 1;
    reach_rec(tr.agent, tr.store, env, depth + 1, max_depth, best_depth, out);
  }
}

}  // namespace detail

/// The stores of all maximal configurations — agent terminated or no step
/// enabled — reachable by unconstrained execution within max_depth steps.
/// Sorted and duplicate-free, so equal sets compare equal.
inline std::vector<Store> reachable_stores(const Agent& a, const Store& s0,
                                           const ProcEnv& env,
                                           int max_depth = 64) {
  Agent n = normalize(a);
  std::set<Store> out;
  std::unordered_map<std::string, int> best_depth;
  best_depth[pretty_agent(n) + '\n' + s0.dump()] = 0;
  detail::reach_rec(n, s0, env, 0, max_depth, best_depth, out);
  return {out.begin(), out.end()};
}

namespace detail {

inline bool replay_rec(const Configuration& c,
                       const std::vector<StepLabel>& trace, std::size_t i,
                       const ProcEnv& penv, const FormulaEnv& fenv,
                       std::vector<Configuration>& path) {
  if (i == trace.size()) {
    return is_satisfied(c.formula);
  }
  if (is_satisfied(c.formula)) {
    return false;  // satisfied too early, nothing may step further
  }
  for (Configuration& succ : constrained_step(c, penv, fenv)) {
    if (succ.trace.back() == trace[i]) {
      path.push_back(succ);
      if (replay_rec(succ, trace, i + 1, penv, fenv, path)) {
        return true;
      }
      path.pop_back();
    }
  }
  return false;
}

}  // namespace detail

/// Drives a recorded witness trace back through constrained_step, resolving
/// label ties so that the final formula ends satisfied. Returns the
/// configuration after each step, or nullopt when the trace is not a witness
/// of the goal.
inline std::optional<std::vector<Configuration>> replay_trace(
    Agent entry, BslFormula goal, const ProcEnv& penv, const FormulaEnv& fenv,
    const std::vector<StepLabel>& trace, Store initial = {}) {
  Configuration c0 = initial_configuration(std::move(entry), std::move(goal),
                                           std::move(initial));
  std::vector<Configuration> path;
  path.reserve(trace.size());
  if (!detail::replay_rec(c0, trace, 0, penv, fenv, path)) {
    return std::nullopt;
  }
  return path;
}

}  // namespace bach
