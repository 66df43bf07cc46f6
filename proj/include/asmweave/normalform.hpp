#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asmweave/ast.hpp"
#include "asmweave/core.hpp"
#include "asmweave/eval.hpp"

namespace asmweave {

// Whether a rule is a parallel guarded assignment: only assign, par and if,
// after inlining calls.
struct PgaVerdict {
  bool is_pga = true;
  std::vector<std::pair<SourcePos, std::string>> offending;
};

// Throws RecursiveCall when a call cannot be inlined.
PgaVerdict classify_pga(const MachineDef& m, const RulePtr& rule);
PgaVerdict classify_pga(const MachineDef& m, const std::string& rule);

struct Clause {
  TermPtr guard;
  RulePtr assign;
};

// par (if g1 then a1) ... (if gn then an) endpar
struct NormalForm {
  std::vector<Clause> clauses;

  RulePtr to_rule() const;
};

// Pushes guards down to the assignments. Nested guards are conjoined with
// "and" and else branches contribute "not c"; no simplification is done.
// Throws NotPGA or RecursiveCall.
NormalForm normalize(const MachineDef& m, const RulePtr& rule);
NormalForm normalize(const MachineDef& m, const std::string& rule);

// Finite set of states: every combination of the listed values for the
// listed locations, on top of a base state.
struct StateSpace {
  State base;
  std::vector<std::pair<Location, std::vector<Value>>> dims;

  explicit StateSpace(State base) : base(std::move(base)) {}

  // Saturates at SIZE_MAX.
  std::size_t size() const;
  State at(std::size_t index) const;
};

// 0-ary Controlled and Monitored functions over their declared codomain, or
// {false, true, 0, 1, 2} when none is declared. Other locations keep their
// initial values.
StateSpace default_space(const MachineDef& m);

inline constexpr std::size_t kDefaultSpaceBudget = 1000000;

// What one step of a rule can do in one state: the set of update sets over
// all resolutions, or the error it raises.
struct StepOutcome {
  std::optional<ErrorCode> error;
  std::vector<UpdateSet> update_sets;  // sorted, distinct

  std::string to_string() const;
  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

StepOutcome step_outcome(const MachineDef& m, const RulePtr& rule, const State& s,
                         std::size_t branch_budget = 10000);

struct EquivalenceResult {
  bool equivalent = true;
  std::size_t states_checked = 0;
  // First differing state and what each rule does there.
  std::optional<State> witness;
  StepOutcome left;
  StepOutcome right;
};

// Throws SpaceTooLarge when the space has more than `budget` states.
EquivalenceResult equivalence_check(const MachineDef& m, const RulePtr& a, const RulePtr& b,
                                    const StateSpace& space, std::size_t budget = kDefaultSpaceBudget);
EquivalenceResult equivalence_check(const MachineDef& m, const std::string& a, const std::string& b,
                                    const StateSpace& space, std::size_t budget = kDefaultSpaceBudget);

}  // namespace asmweave
