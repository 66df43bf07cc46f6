#include "asmweave/multiagent.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace asmweave {
namespace {

const AgentDecl& find_agent(const MachineDef& m, const std::string& id) {
  for (const auto& a : m.agents)
    if (a.id == id) return a;
  throw Error(ErrorCode::ScriptViolation, "no agent named '" + id + "'");
}

Resolution schedule_resolution(const std::string& id) {
  return Resolution{ResolutionKind::Schedule, "schedule", "schedule", Value::sym(id)};
}

// Fills status, conflicts and post-state from `us` evaluated against `pre`.
void settle(StepResult& res, const State& before, const State& pre, UpdateSet us,
            const std::map<Update, std::vector<std::string>>* who, bool stutter_ok) {
  res.fired = std::move(us);
  auto cs = conflicts(res.fired);
  if (!cs.empty()) {
    if (who) {
      for (auto& c : cs) {
        std::set<std::string> agents;
        for (const auto& v : c.values) {
          auto it = who->find(Update{c.loc, v});
          if (it != who->end()) agents.insert(it->second.begin(), it->second.end());
        }
        c.agents.assign(agents.begin(), agents.end());
      }
    }
    res.status = StepResult::Status::Inconsistent;
    res.conflicts = std::move(cs);
    return;
  }
  if (res.fired.empty() && pre.content() == before.content() && !stutter_ok) {
    res.status = StepResult::Status::Stalled;
    return;
  }
  res.status = StepResult::Status::Progressed;
  res.next = fire(pre, res.fired);
}

bool same_outcome(const StepResult& a, const StepResult& b) { return a.status == b.status && a.fired == b.fired; }

}  // namespace

UpdateSet agent_update_set(const MachineDef& m, const State& s, const AgentDecl& agent, Resolver& r,
                           const EvalOptions& options) {
  EvalContext ctx{m, s, r, Value::sym(agent.id), "agent:" + agent.id + "/", options};
  try {
    return update_set(*m.rule(agent.rule).body, ctx);
  } catch (const Error& e) {
    throw Error(e.code(), "agent " + agent.id + ": " + e.message(), e.pos());
  }
}

std::vector<std::string> schedulable_agents(const MachineDef& m, const State& s, const MaOptions& options) {
  std::vector<std::string> out;
  for (const auto& a : m.agents) {
    bool can_move = false;
    try {
      for_each_branch(options.branch_budget, [&](Resolver& r) {
        r.begin_step(0);
        if (!agent_update_set(m, s, a, r, options.eval).empty()) can_move = true;
      });
    } catch (const Error&) {
      // Let the real step surface the error.
      can_move = true;
    }
    if (can_move) out.push_back(a.id);
  }
  return out;
}

MaStepResult ma_step(const MachineDef& m, const State& s, const Scheduler& scheduler, Resolver& r,
                     std::size_t step_index, const MaOptions& options) {
  if (!m.multi_agent()) {
    if (m.main.empty()) {
      // No program at all: nothing can ever move.
      r.begin_step(step_index);
      return MaStepResult{StepResult(inject_monitored(s, r, step_index)), {}};
    }
    return MaStepResult{step(s, m, m.main, r, step_index, options.eval), {}};
  }

  r.begin_step(step_index);
  State pre = inject_monitored(s, r, step_index);
  MaStepResult out{StepResult(pre), {}};
  UpdateSet us;
  std::map<Update, std::vector<std::string>> who;
  bool stutter_ok = false;

  switch (scheduler.kind) {
    case Scheduler::Kind::Synchronous:
      for (const auto& a : m.agents) {
        UpdateSet mine = agent_update_set(m, pre, a, r, options.eval);
        for (const auto& u : mine) who[u].push_back(a.id);
        us.merge(mine);
        out.scheduled.push_back(a.id);
      }
      break;
    case Scheduler::Kind::Interleaving: {
      auto ids = schedulable_agents(m, pre, options);
      if (ids.empty()) break;
      std::vector<Value> candidates;
      for (const auto& id : ids) candidates.push_back(Value::sym(id));
      std::sort(candidates.begin(), candidates.end());
      Value chosen = r.pick(ResolutionKind::Schedule, "schedule", "schedule", candidates);
      const AgentDecl& a = find_agent(m, chosen.text());
      us = agent_update_set(m, pre, a, r, options.eval);
      for (const auto& u : us) who[u].push_back(a.id);
      out.scheduled.push_back(a.id);
      stutter_ok = true;
      break;
    }
    case Scheduler::Kind::ScriptedOrder: {
      if (step_index >= scheduler.order.size())
        throw Error(ErrorCode::ScriptViolation, "schedule exhausted at step " + std::to_string(step_index + 1));
      const AgentDecl& a = find_agent(m, scheduler.order[step_index]);
      us = agent_update_set(m, pre, a, r, options.eval);
      for (const auto& u : us) who[u].push_back(a.id);
      out.scheduled.push_back(a.id);
      stutter_ok = true;
      break;
    }
  }
  out.result.resolutions = r.take_resolutions();
  settle(out.result, s, pre, std::move(us), &who, stutter_ok);
  return out;
}

Trace ma_run(const MachineDef& m, const Scheduler& scheduler, RunConfig config, const MaOptions& options) {
  if (!m.multi_agent() && !m.main.empty()) return run(m, std::move(config));
  for (const auto& id : scheduler.order) find_agent(m, id);

  State s = config.initial ? *config.initial : initial_state(m);
  Trace trace(s);
  trace.machine = m.name;
  trace.provenance = config.resolver.provenance();
  trace.outcome = RunOutcome::MaxSteps;
  MaOptions opts = options;
  opts.eval = config.eval;
  for (std::size_t k = 0; k < config.max_steps; ++k) {
    if (scheduler.kind == Scheduler::Kind::ScriptedOrder && k >= scheduler.order.size()) {
      trace.outcome = RunOutcome::ScheduleExhausted;
      break;
    }
    MaStepResult res = ma_step(m, s, scheduler, config.resolver, k, opts);
    if (res.result.status == StepResult::Status::Stalled) {
      trace.outcome = RunOutcome::Stalled;
      trace.terminal_resolutions = std::move(res.result.resolutions);
      break;
    }
    if (res.result.status == StepResult::Status::Inconsistent) {
      trace.outcome = RunOutcome::Inconsistent;
      trace.conflicts = std::move(res.result.conflicts);
      trace.terminal_resolutions = std::move(res.result.resolutions);
      break;
    }
    trace.steps.push_back(TraceStep{s.digest(), res.result.next.digest(), std::move(res.result.fired),
                                    std::move(res.result.resolutions), std::move(res.scheduled), res.result.next});
    s = std::move(res.result.next);
  }
  trace.final_state = s;
  return trace;
}

std::vector<Successor> successors(const MachineDef& m, const State& s, AgentMode mode, std::size_t branch_budget,
                                  const EvalOptions& options) {
  std::vector<Successor> out;
  auto add = [&](StepResult res, std::vector<std::string> agents) {
    for (const auto& o : out)
      if (o.agents == agents && same_outcome(o.result, res)) return;
    out.push_back(Successor{std::move(res), std::move(agents)});
  };

  if (!m.multi_agent()) {
    if (m.main.empty()) return out;
    for (auto& res : enumerate_steps(s, m, m.main, branch_budget, options)) {
      if (res.status == StepResult::Status::Stalled) continue;
      add(std::move(res), {});
    }
    return out;
  }

  if (mode == AgentMode::Synchronous) {
    MaOptions opts{options, branch_budget};
    for_each_branch(branch_budget, [&](Resolver& r) {
      MaStepResult res = ma_step(m, s, Scheduler::synchronous(), r, 0, opts);
      if (res.result.status == StepResult::Status::Stalled || res.result.fired.empty()) return;
      add(std::move(res.result), std::move(res.scheduled));
    });
    return out;
  }

  for (const auto& a : m.agents) {
    for_each_branch(branch_budget, [&](Resolver& r) {
      r.begin_step(0);
      UpdateSet us = agent_update_set(m, s, a, r, options);
      if (us.empty()) return;
      StepResult res(s);
      res.resolutions.push_back(schedule_resolution(a.id));
      for (auto& x : r.take_resolutions()) res.resolutions.push_back(std::move(x));
      std::map<Update, std::vector<std::string>> who;
      for (const auto& u : us) who[u].push_back(a.id);
      settle(res, s, s, std::move(us), &who, true);
      add(std::move(res), {a.id});
    });
  }
  return out;
}

ExploreReport explore(const MachineDef& m, const ExploreConfig& config) {
  struct Node {
    State state;
    std::size_t parent;
    std::size_t depth;
    UpdateSet fired;
    std::vector<Resolution> resolutions;
    std::vector<std::string> agents;
  };
  constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

  ExploreReport report;
  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;

  auto violates = [&](const State& s) {
    if (!config.assertion) return false;
    Resolver r = Resolver::seeded(0);
    EvalContext ctx{m, s, r, std::nullopt, "", config.eval};
    return !eval_term(*config.assertion, ctx).is_true();
  };

  auto build_trace = [&](std::size_t leaf) {
    std::vector<std::size_t> path;
    for (std::size_t i = leaf; i != kRoot; i = nodes[i].parent) path.push_back(i);
    std::reverse(path.begin(), path.end());
    Trace t(nodes[path.front()].state);
    t.machine = m.name;
    t.provenance = "explore";
    for (std::size_t j = 1; j < path.size(); ++j) {
      const Node& prev = nodes[path[j - 1]];
      const Node& n = nodes[path[j]];
      t.steps.push_back(TraceStep{prev.state.digest(), n.state.digest(), n.fired, n.resolutions, n.agents, n.state});
    }
    t.final_state = nodes[leaf].state;
    t.outcome = RunOutcome::MaxSteps;
    return t;
  };

  // Returns the new node's index, or nothing when the state was seen.
  auto insert = [&](Node n) -> std::optional<std::size_t> {
    std::uint64_t d = n.state.digest();
    auto& bucket = index[d];
    for (std::size_t i : bucket)
      if (nodes[i].state.content() == n.state.content()) return std::nullopt;
    nodes.push_back(std::move(n));
    bucket.push_back(nodes.size() - 1);
    report.visited.insert(d);
    return nodes.size() - 1;
  };

  State init = initial_state(m);
  insert(Node{init, kRoot, 0, {}, {}, {}});
  if (violates(init)) {
    report.states_visited = 1;
    report.counterexample = build_trace(0);
    return report;
  }

  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t cur = frontier.front();
    frontier.pop_front();
    if (nodes[cur].depth >= config.depth) continue;
    auto succs = successors(m, nodes[cur].state, config.mode, config.branch_budget, config.eval);
    for (auto& succ : succs) {
      if (succ.result.status == StepResult::Status::Inconsistent) {
        ++report.inconsistent_branches;
        continue;
      }
      std::size_t depth = nodes[cur].depth + 1;
      auto idx = insert(Node{succ.result.next, cur, depth, succ.result.fired, succ.result.resolutions, succ.agents});
      if (!idx) continue;
      report.depth_reached = std::max(report.depth_reached, depth);
      if (violates(nodes[*idx].state)) {
        report.states_visited = nodes.size();
        report.counterexample = build_trace(*idx);
        return report;
      }
      frontier.push_back(*idx);
    }
  }
  report.states_visited = nodes.size();
  return report;
}

}  // namespace asmweave
