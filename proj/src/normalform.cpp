#include "asmweave/normalform.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "asmweave/parser.hpp"

namespace asmweave {
namespace {

using Subst = std::map<std::string, TermPtr, std::less<>>;

struct CallStack {
  std::vector<std::string> names;

  void push(const MachineDef& m, const Rule& call) {
    if (std::find(names.begin(), names.end(), call.callee) != names.end())
      throw Error(ErrorCode::RecursiveCall, "cannot inline recursive call to '" + call.callee + "'", call.pos);
    m.rule(call.callee);
    names.push_back(call.callee);
  }
  void pop() { names.pop_back(); }
};

void classify(const MachineDef& m, const Rule& r, CallStack& stack, PgaVerdict& out) {
  switch (r.kind) {
    case Rule::Kind::Assign: return;
    case Rule::Kind::Par:
      for (const auto& c : r.children) classify(m, *c, stack, out);
      return;
    case Rule::Kind::If:
      classify(m, *r.then_branch, stack, out);
      if (r.else_branch) classify(m, *r.else_branch, stack, out);
      return;
    case Rule::Kind::Call:
      stack.push(m, r);
      classify(m, *m.rule(r.callee).body, stack, out);
      stack.pop();
      return;
    case Rule::Kind::Let:
    case Rule::Kind::Forall:
    case Rule::Kind::Choose:
      out.is_pga = false;
      out.offending.emplace_back(r.pos, std::string(construct_name(r.kind)));
      classify(m, *r.body, stack, out);
      return;
  }
}

TermPtr substitute(const TermPtr& t, const Subst& s) {
  switch (t->kind) {
    case Term::Kind::Lit: return t;
    case Term::Kind::Var: {
      auto it = s.find(t->name);
      return it == s.end() ? t : it->second;
    }
    case Term::Kind::App: {
      if (t->args.empty()) return t;
      std::vector<TermPtr> args;
      for (const auto& a : t->args) args.push_back(substitute(a, s));
      return Term::app(t->name, std::move(args), t->pos);
    }
  }
  return t;
}

// Only called on PGA rules, which bind no variables, so substitution cannot
// capture.
RulePtr inline_calls(const MachineDef& m, const RulePtr& r, const Subst& s, CallStack& stack) {
  switch (r->kind) {
    case Rule::Kind::Assign:
      return Rule::assign(substitute(r->target, s), substitute(r->value, s), r->pos);
    case Rule::Kind::Par: {
      std::vector<RulePtr> children;
      for (const auto& c : r->children) children.push_back(inline_calls(m, c, s, stack));
      return Rule::par(std::move(children), r->pos);
    }
    case Rule::Kind::If:
      return Rule::if_then(substitute(r->cond, s), inline_calls(m, r->then_branch, s, stack),
                           r->else_branch ? inline_calls(m, r->else_branch, s, stack) : nullptr, r->pos);
    case Rule::Kind::Call: {
      stack.push(m, *r);
      const RuleDecl& callee = m.rule(r->callee);
      Subst inner;
      for (std::size_t i = 0; i < callee.formals.size() && i < r->args.size(); ++i)
        inner[callee.formals[i]] = substitute(r->args[i], s);
      RulePtr body = inline_calls(m, callee.body, inner, stack);
      stack.pop();
      return body;
    }
    default:
      throw Error(ErrorCode::NotPGA, std::string(construct_name(r->kind)) + " is not a guarded assignment", r->pos);
  }
}

TermPtr conjoin(const TermPtr& guard, TermPtr c) {
  if (!guard) return c;
  return Term::app("and", {guard, std::move(c)});
}

void collect(const RulePtr& r, const TermPtr& guard, std::vector<Clause>& out) {
  switch (r->kind) {
    case Rule::Kind::Assign:
      out.push_back(Clause{guard ? guard : Term::lit(Value::boolean(true)), r});
      return;
    case Rule::Kind::Par:
      for (const auto& c : r->children) collect(c, guard, out);
      return;
    case Rule::Kind::If:
      collect(r->then_branch, conjoin(guard, r->cond), out);
      if (r->else_branch) collect(r->else_branch, conjoin(guard, Term::app("not", {r->cond})), out);
      return;
    default:
      throw Error(ErrorCode::NotPGA, std::string(construct_name(r->kind)) + " is not a guarded assignment", r->pos);
  }
}

const std::vector<Value>& fallback_values() {
  static const std::vector<Value> values = {Value::boolean(false), Value::boolean(true), Value::integer(0),
                                            Value::integer(1), Value::integer(2)};
  return values;
}

const std::string kLeft = "%left";
const std::string kRight = "%right";

StepOutcome outcome_of(const MachineDef& m, const std::string& rule, const State& s, std::size_t branch_budget) {
  StepOutcome out;
  try {
    for (auto& res : enumerate_steps(s, m, rule, branch_budget)) out.update_sets.push_back(std::move(res.fired));
  } catch (const Error& e) {
    out.error = e.code();
    out.update_sets.clear();
    return out;
  }
  std::sort(out.update_sets.begin(), out.update_sets.end());
  out.update_sets.erase(std::unique(out.update_sets.begin(), out.update_sets.end()), out.update_sets.end());
  return out;
}

}  // namespace

PgaVerdict classify_pga(const MachineDef& m, const RulePtr& rule) {
  PgaVerdict out;
  CallStack stack;
  classify(m, *rule, stack, out);
  return out;
}

PgaVerdict classify_pga(const MachineDef& m, const std::string& rule) {
  PgaVerdict out;
  CallStack stack;
  stack.names.push_back(rule);
  classify(m, *m.rule(rule).body, stack, out);
  return out;
}

RulePtr NormalForm::to_rule() const {
  std::vector<RulePtr> children;
  for (const auto& c : clauses) children.push_back(Rule::if_then(c.guard, c.assign));
  return Rule::par(std::move(children));
}

NormalForm normalize(const MachineDef& m, const RulePtr& rule) {
  CallStack stack;
  RulePtr flat = inline_calls(m, rule, {}, stack);
  NormalForm nf;
  collect(flat, nullptr, nf.clauses);
  return nf;
}

NormalForm normalize(const MachineDef& m, const std::string& rule) {
  CallStack stack;
  stack.names.push_back(rule);
  RulePtr flat = inline_calls(m, m.rule(rule).body, {}, stack);
  NormalForm nf;
  collect(flat, nullptr, nf.clauses);
  return nf;
}

std::size_t StateSpace::size() const {
  std::size_t n = 1;
  for (const auto& [loc, values] : dims) {
    if (values.empty()) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / values.size()) return std::numeric_limits<std::size_t>::max();
    n *= values.size();
  }
  return n;
}

State StateSpace::at(std::size_t index) const {
  State s = base;
  for (const auto& [loc, values] : dims) {
    s.assign(loc, values[index % values.size()]);
    index /= values.size();
  }
  return s;
}

StateSpace default_space(const MachineDef& m) {
  StateSpace space(initial_state(m));
  for (const auto& name : m.sig->names()) {
    const FunctionInfo& info = m.sig->at(name);
    if (info.arity != 0) continue;
    if (info.kind != FunctionKind::Controlled && info.kind != FunctionKind::Monitored) continue;
    space.dims.emplace_back(Location{name, {}}, info.codomain ? *info.codomain : fallback_values());
  }
  return space;
}

std::string StepOutcome::to_string() const {
  if (error) return "error " + std::string(asmweave::to_string(*error));
  std::ostringstream os;
  for (std::size_t i = 0; i < update_sets.size(); ++i) os << (i ? " | " : "") << update_sets[i].to_string();
  return os.str();
}

StepOutcome step_outcome(const MachineDef& m, const RulePtr& rule, const State& s, std::size_t branch_budget) {
  return outcome_of(m.with_rule(RuleDecl{kLeft, {}, rule, {}}), kLeft, s, branch_budget);
}

EquivalenceResult equivalence_check(const MachineDef& m, const RulePtr& a, const RulePtr& b, const StateSpace& space,
                                    std::size_t budget) {
  std::size_t n = space.size();
  if (n > budget)
    throw Error(ErrorCode::SpaceTooLarge,
                "state space has " + (n == std::numeric_limits<std::size_t>::max() ? std::string("too many")
                                                                                    : std::to_string(n)) +
                    " states, budget is " + std::to_string(budget));
  MachineDef both = m.with_rule(RuleDecl{kLeft, {}, a, {}}).with_rule(RuleDecl{kRight, {}, b, {}});
  EquivalenceResult result;
  for (std::size_t i = 0; i < n; ++i) {
    State s = space.at(i);
    StepOutcome left = outcome_of(both, kLeft, s, 10000);
    StepOutcome right = outcome_of(both, kRight, s, 10000);
    ++result.states_checked;
    if (!(left == right)) {
      result.equivalent = false;
      result.witness = std::move(s);
      result.left = std::move(left);
      result.right = std::move(right);
      break;
    }
  }
  return result;
}

EquivalenceResult equivalence_check(const MachineDef& m, const std::string& a, const std::string& b,
                                    const StateSpace& space, std::size_t budget) {
  return equivalence_check(m, m.rule(a).body, m.rule(b).body, space, budget);
}

}  // namespace asmweave
