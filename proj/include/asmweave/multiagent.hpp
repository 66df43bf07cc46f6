#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asmweave/eval.hpp"

namespace asmweave {

enum class AgentMode { Synchronous, Interleaving };

// How agents sharing one state take turns.
//   Synchronous    every agent steps against the same pre-state; the update
//                  sets are unioned
//   Interleaving   one agent per step, picked by the resolver among the
//                  agents that can produce updates
//   ScriptedOrder  one agent per step, taken from a fixed list
struct Scheduler {
  enum class Kind { Synchronous, Interleaving, ScriptedOrder };

  Kind kind = Kind::Interleaving;
  std::vector<std::string> order;

  static Scheduler synchronous() { return {Kind::Synchronous, {}}; }
  static Scheduler interleaving() { return {Kind::Interleaving, {}}; }
  static Scheduler scripted_order(std::vector<std::string> order) { return {Kind::ScriptedOrder, std::move(order)}; }
  static Scheduler from_mode(AgentMode mode) {
    return mode == AgentMode::Synchronous ? synchronous() : interleaving();
  }
};

struct MaOptions {
  EvalOptions eval;
  // Branch budget for deciding which agents can move.
  std::size_t branch_budget = 10000;
};

struct MaStepResult {
  StepResult result;
  std::vector<std::string> scheduled;
};

// Update set of one agent's rule with `self` bound to the agent id.
UpdateSet agent_update_set(const MachineDef& m, const State& s, const AgentDecl& agent, Resolver& r,
                           const EvalOptions& options = {});

// Agents that have at least one resolution producing updates.
std::vector<std::string> schedulable_agents(const MachineDef& m, const State& s, const MaOptions& options = {});

// One multi-agent step. Calls r.begin_step(step_index). For ScriptedOrder,
// step_index selects the agent from the order list. Evaluation errors are
// rethrown with the agent id in the message.
MaStepResult ma_step(const MachineDef& m, const State& s, const Scheduler& scheduler, Resolver& r,
                     std::size_t step_index = 0, const MaOptions& options = {});

// Iterates ma_step. A machine without agents runs its main rule; one with
// neither agents nor a main rule stalls at once.
Trace ma_run(const MachineDef& m, const Scheduler& scheduler, RunConfig config, const MaOptions& options = {});

struct Successor {
  StepResult result;
  std::vector<std::string> agents;
};

// Every distinct outcome of one step from `s`: over all resolutions, and
// under Interleaving over all agents. Steps without updates are omitted.
// Machines without agents step their main rule.
std::vector<Successor> successors(const MachineDef& m, const State& s, AgentMode mode, std::size_t branch_budget,
                                  const EvalOptions& options = {});

struct ExploreConfig {
  std::size_t depth = 10;
  std::size_t branch_budget = 10000;
  AgentMode mode = AgentMode::Interleaving;
  // Safety assertion; a state where it is not true is a violation.
  TermPtr assertion;
  EvalOptions eval;
};

struct ExploreReport {
  std::size_t states_visited = 0;
  std::size_t depth_reached = 0;
  std::size_t inconsistent_branches = 0;
  std::set<std::uint64_t> visited;
  // Shortest trace to a violating state, if any.
  std::optional<Trace> counterexample;
};

// Breadth-first exploration over all interleavings and resolutions up to
// `depth` steps, deduplicating states by their Controlled content.
ExploreReport explore(const MachineDef& m, const ExploreConfig& config);

}  // namespace asmweave
