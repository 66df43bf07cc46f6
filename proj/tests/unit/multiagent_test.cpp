#include <gtest/gtest.h>

#include <algorithm>

#include "asmweave/multiagent.hpp"
#include "asmweave/parser.hpp"
#include "support.hpp"

using namespace asmweave;

namespace {

Value I(long long v) { return Value::integer(v); }
Location L(const std::string& f) { return {f, {}}; }
Location L(const std::string& f, long long a) { return {f, {I(a)}}; }

MachineDef two_agents(const std::string& a_body, const std::string& b_body) {
  return parse_machine("machine Two\ncontrolled x, y\nrule A = " + a_body + "\nrule B = " + b_body +
                       "\nmain A\nagent a1 runs A\nagent a2 runs B\n");
}

Resolution choose_act(const std::string& act) {
  return {ResolutionKind::Choose, "Node.act", "Node.act", Value::sym(act)};
}

const char* kDetectedImpliesIdle = "detected implies (not active(0) and not active(1) and not active(2))";

}  // namespace

TEST(Synchronous, DisjointAgentsFireTogether) {
  MachineDef m = two_agents("x := 1", "y := 2");
  Resolver r = Resolver::seeded(0);
  MaStepResult res = ma_step(m, initial_state(m), Scheduler::synchronous(), r);
  ASSERT_EQ(res.result.status, StepResult::Status::Progressed);
  EXPECT_EQ(res.result.next.lookup(L("x")), I(1));
  EXPECT_EQ(res.result.next.lookup(L("y")), I(2));
  EXPECT_EQ(res.scheduled, (std::vector<std::string>{"a1", "a2"}));
}

TEST(Synchronous, CrossAgentClashNamesBothAgents) {
  MachineDef m = two_agents("x := self", "x := self");
  Resolver r = Resolver::seeded(0);
  MaStepResult res = ma_step(m, initial_state(m), Scheduler::synchronous(), r);
  ASSERT_EQ(res.result.status, StepResult::Status::Inconsistent);
  ASSERT_EQ(res.result.conflicts.size(), 1u);
  const Conflict& c = res.result.conflicts[0];
  EXPECT_EQ(c.loc, L("x"));
  EXPECT_EQ(c.values, (std::vector<Value>{Value::sym("a1"), Value::sym("a2")}));
  EXPECT_EQ(c.agents, (std::vector<std::string>{"a1", "a2"}));
}

TEST(Synchronous, AgentOrderDoesNotMatter) {
  MachineDef m = load_machine(support::model("termination.asm"));
  MachineDef reversed = m;
  std::reverse(reversed.agents.begin(), reversed.agents.end());
  State s = initial_state(m);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Resolver r1 = Resolver::seeded(seed), r2 = Resolver::seeded(seed);
    MaStepResult a = ma_step(m, s, Scheduler::synchronous(), r1);
    MaStepResult b = ma_step(reversed, s, Scheduler::synchronous(), r2);
    EXPECT_EQ(a.result.status, b.result.status);
    EXPECT_EQ(a.result.fired, b.result.fired);
    if (a.result.status == StepResult::Status::Progressed) s = a.result.next;
  }
}

TEST(Interleaving, OnlyTheScheduledAgentWrites) {
  MachineDef m = two_agents("x := self", "x := self");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Resolver r = Resolver::seeded(seed);
    MaStepResult res = ma_step(m, initial_state(m), Scheduler::interleaving(), r);
    ASSERT_EQ(res.result.status, StepResult::Status::Progressed);
    ASSERT_EQ(res.scheduled.size(), 1u);
    EXPECT_EQ(res.result.next.lookup(L("x")), Value::sym(res.scheduled[0]));
    ASSERT_FALSE(res.result.resolutions.empty());
    EXPECT_EQ(res.result.resolutions[0].kind, ResolutionKind::Schedule);
  }
}

TEST(Interleaving, ScheduledAgentWasSchedulable) {
  MachineDef m = load_machine(support::model("termination.asm"));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    State s = initial_state(m);
    for (std::size_t k = 0; k < 15; ++k) {
      auto ready = schedulable_agents(m, s);
      Resolver r = Resolver::seeded(seed);
      MaStepResult res = ma_step(m, s, Scheduler::interleaving(), r, k);
      if (res.result.status != StepResult::Status::Progressed) {
        EXPECT_TRUE(ready.empty());
        break;
      }
      ASSERT_EQ(res.scheduled.size(), 1u);
      EXPECT_NE(std::find(ready.begin(), ready.end(), res.scheduled[0]), ready.end());
      s = res.result.next;
    }
  }
}

TEST(Interleaving, ReplayWithRecordedSchedule) {
  MachineDef m = load_machine(support::model("termination.asm"));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RunConfig c;
    c.max_steps = 25;
    c.resolver = Resolver::seeded(seed);
    Trace t = ma_run(m, Scheduler::interleaving(), c);
    RunConfig again;
    again.max_steps = 25;
    again.resolver = Resolver::scripted(t.script());
    Trace u = ma_run(m, Scheduler::interleaving(), again);
    EXPECT_EQ(t.digests(), u.digests());
    ASSERT_EQ(t.steps.size(), u.steps.size());
    for (std::size_t k = 0; k < t.steps.size(); ++k) EXPECT_EQ(t.steps[k].agents, u.steps[k].agents);
    EXPECT_EQ(t.outcome, u.outcome);
  }
}

TEST(ScriptedOrder, QuiescingScheduleDetectsTermination) {
  MachineDef m = load_machine(support::model("termination.asm"));
  Script script = {{choose_act("idle")}, {choose_act("idle")}, {choose_act("idle")}, {choose_act("probe")},
                   {choose_act("pass")}, {choose_act("pass")}, {choose_act("probe")}};
  RunConfig c;
  c.max_steps = 7;
  c.resolver = Resolver::scripted(script);
  Trace t = ma_run(m, Scheduler::scripted_order({"a0", "a1", "a2", "a0", "a2", "a1", "a0"}), c);
  ASSERT_EQ(t.steps.size(), 7u);
  const State& f = t.final_state;
  EXPECT_TRUE(f.lookup(L("detected")).is_true());
  for (long long i = 0; i < 3; ++i) EXPECT_TRUE(f.lookup(L("active", i)).is_false());
}

TEST(ScriptedOrder, UnknownAgentIsRejected) {
  MachineDef m = two_agents("x := 1", "y := 1");
  RunConfig c;
  c.max_steps = 2;
  try {
    ma_run(m, Scheduler::scripted_order({"a1", "ghost"}), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScriptViolation);
  }
}

TEST(ScriptedOrder, RunsOutOfOrderEntries) {
  MachineDef m = two_agents("x := 1", "y := 1");
  RunConfig c;
  c.max_steps = 5;
  Trace t = ma_run(m, Scheduler::scripted_order({"a2"}), c);
  EXPECT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.outcome, RunOutcome::ScheduleExhausted);
}

TEST(MaRun, ZeroAgentsStallImmediately) {
  MachineDef m = two_agents("x := 1", "y := 1");
  m.agents.clear();
  m.main.clear();
  Trace t = ma_run(m, Scheduler::interleaving(), RunConfig{});
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.outcome, RunOutcome::Stalled);
}

TEST(MaRun, AgentErrorsNameTheAgent) {
  MachineDef m = parse_machine("machine E\ncontrolled c, x\nrule A = if c then x := 1\nmain A\nagent bad runs A\n");
  Resolver r = Resolver::seeded(0);
  try {
    ma_step(m, initial_state(m), Scheduler::synchronous(), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GuardNotBoolean);
    EXPECT_NE(e.message().find("bad"), std::string::npos);
  }
}

TEST(Explore, SwapHasTwoStates) {
  MachineDef m = load_machine(support::model("swap.asm"));
  ExploreConfig c;
  c.depth = 2;
  c.assertion = parse_term_for("a = 1 or a = 2", m);
  ExploreReport r = explore(m, c);
  EXPECT_EQ(r.states_visited, 2u);
  EXPECT_FALSE(r.counterexample);
}

TEST(Explore, FindsShortestViolation) {
  MachineDef m = load_machine(support::model("swap.asm"));
  ExploreConfig c;
  c.depth = 5;
  c.assertion = parse_term_for("a = 1", m);
  ExploreReport r = explore(m, c);
  ASSERT_TRUE(r.counterexample);
  EXPECT_EQ(r.counterexample->steps.size(), 1u);
}

TEST(Explore, MutantTerminationIsCaught) {
  MachineDef good = load_machine(support::model("termination.asm"));
  MachineDef bad = load_machine(support::model("termination_mutant.asm"));
  ExploreConfig c;
  c.depth = 12;
  c.assertion = parse_term_for(kDetectedImpliesIdle, good);
  ExploreReport ok = explore(good, c);
  EXPECT_FALSE(ok.counterexample);
  ExploreReport ko = explore(bad, c);
  ASSERT_TRUE(ko.counterexample);
  const State& f = ko.counterexample->final_state;
  EXPECT_TRUE(f.lookup(L("detected")).is_true());
  bool someone_active = false;
  for (long long i = 0; i < 3; ++i) someone_active |= f.lookup(L("active", i)).is_true();
  EXPECT_TRUE(someone_active);
}

TEST(Explore, Deterministic) {
  MachineDef bad = load_machine(support::model("termination_mutant.asm"));
  ExploreConfig c;
  c.depth = 10;
  c.assertion = parse_term_for(kDetectedImpliesIdle, bad);
  ExploreReport a = explore(bad, c), b = explore(bad, c);
  EXPECT_EQ(a.states_visited, b.states_visited);
  ASSERT_EQ(a.counterexample.has_value(), b.counterexample.has_value());
  if (a.counterexample) EXPECT_EQ(a.counterexample->digests(), b.counterexample->digests());
}

TEST(Explore, SubsumesSeededRuns) {
  MachineDef m = load_machine(support::model("termination.asm"));
  ExploreConfig c;
  c.depth = 8;
  ExploreReport r = explore(m, c);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RunConfig rc;
    rc.max_steps = 8;
    rc.resolver = Resolver::seeded(seed);
    Trace t = ma_run(m, Scheduler::interleaving(), rc);
    for (std::uint64_t d : t.digests()) EXPECT_TRUE(r.visited.count(d)) << "seed " << seed;
  }
}
