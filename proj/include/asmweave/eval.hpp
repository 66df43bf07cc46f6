#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asmweave/ast.hpp"
#include "asmweave/core.hpp"
#include "asmweave/resolver.hpp"
#include "asmweave/trace.hpp"

namespace asmweave {

// Lexical bindings for let/forall/choose variables and rule parameters.
// Rule parameters are bound by name: the argument term together with the
// caller's environment, re-evaluated at every use.
class Env {
 public:
  struct Node;

  Env() = default;

  Env bind(std::string name, Value v) const;
  Env bind_term(std::string name, TermPtr term, Env captured) const;
  // Innermost binding of `name`, or null.
  const Node* find(std::string_view name) const;

 private:
  explicit Env(std::shared_ptr<const Node> head) : head_(std::move(head)) {}
  std::shared_ptr<const Node> head_;
};

struct Env::Node {
  std::string name;
  Value value;
  TermPtr term;  // set for by-name bindings
  Env captured;
  std::shared_ptr<const Node> parent;
};

struct EvalOptions {
  std::size_t max_call_depth = 1000;
};

struct EvalContext {
  const MachineDef& machine;
  const State& state;
  Resolver& resolver;
  // Value of `self`; the agent identity in multi-agent runs.
  std::optional<Value> self;
  // Prefix of resolution keys, distinguishing agents evaluated in one step.
  std::string scope;
  EvalOptions options;
};

// Denotation of a term. Background functions propagate undef except
// equality and the connectives. Throws UnboundVariable, UnboundedAbstract,
// BackgroundError.
Value eval_term(const Term& t, const EvalContext& ctx, const Env& env = {});

// The update set of one evaluation of a rule, by structural recursion over
// the seven constructs. Consistency is not checked here.
UpdateSet update_set(const Rule& op, const EvalContext& ctx, const Env& env = {});

struct StepResult {
  enum class Status { Progressed, Inconsistent, Stalled };

  explicit StepResult(State s) : next(std::move(s)) {}

  Status status = Status::Stalled;
  // Post-state for Progressed; the (input-injected) pre-state otherwise.
  State next;
  UpdateSet fired;
  std::vector<Conflict> conflicts;
  std::vector<Resolution> resolutions;
};

std::string_view to_string(StepResult::Status status);

// The machine's initial state: init entries evaluated in order, each in the
// state built so far.
State initial_state(const MachineDef& m);

// Writes this step's Monitored inputs from the resolver into `s`.
State inject_monitored(const State& s, const Resolver& r, std::size_t step_index);

// One iteration of `rule` (which takes no parameters). Calls
// r.begin_step(step_index).
StepResult step(const State& s, const MachineDef& m, const std::string& rule, Resolver& r,
                std::size_t step_index = 0, const EvalOptions& options = {});

struct RunConfig {
  std::size_t max_steps = 100;
  Resolver resolver = Resolver::seeded(0);
  EvalOptions eval;
  // Overrides the machine's initial state.
  std::optional<State> initial;
};

// Iterates the main rule until it stalls, becomes inconsistent or reaches
// max_steps.
Trace run(const MachineDef& m, RunConfig config);

// Calls `branch(resolver)` once for every combination of picks an exhaustive
// resolver can make. `branch` must start with resolver.begin_step(). Throws
// BranchBudgetExceeded after `bound` combinations.
template <typename F>
std::size_t for_each_branch(std::size_t bound, F&& branch) {
  Resolver r = Resolver::exhaustive();
  std::size_t n = 0;
  do {
    if (++n > bound)
      throw Error(ErrorCode::BranchBudgetExceeded, "more than " + std::to_string(bound) + " branches");
    branch(r);
  } while (r.next_branch());
  return n;
}

// Every distinct outcome of one step of `rule` over all choose and Abstract
// resolutions, in enumeration order.
std::vector<StepResult> enumerate_steps(const State& s, const MachineDef& m, const std::string& rule,
                                        std::size_t bound, const EvalOptions& options = {},
                                        std::size_t step_index = 0);

}  // namespace asmweave
