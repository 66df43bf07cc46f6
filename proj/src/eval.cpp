#include "asmweave/eval.hpp"

#include <algorithm>

namespace asmweave {

Env Env::bind(std::string name, Value v) const {
  auto n = std::make_shared<Node>();
  n->name = std::move(name);
  n->value = std::move(v);
  n->parent = head_;
  return Env(std::move(n));
}

Env Env::bind_term(std::string name, TermPtr term, Env captured) const {
  auto n = std::make_shared<Node>();
  n->name = std::move(name);
  n->term = std::move(term);
  n->captured = std::move(captured);
  n->parent = head_;
  return Env(std::move(n));
}

const Env::Node* Env::find(std::string_view name) const {
  for (const Node* n = head_.get(); n; n = n->parent.get())
    if (n->name == name) return n;
  return nullptr;
}

std::string_view to_string(StepResult::Status status) {
  switch (status) {
    case StepResult::Status::Progressed: return "progressed";
    case StepResult::Status::Inconsistent: return "inconsistent";
    case StepResult::Status::Stalled: return "stalled";
  }
  return "?";
}

namespace {

// Attaches a source position to errors raised below a construct that did
// not know where it was.
template <typename F>
auto at_pos(SourcePos pos, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const InconsistentError&) {
    throw;
  } catch (const Error& e) {
    if (e.pos().known() || !pos.known()) throw;
    throw Error(e.code(), e.message(), pos);
  }
}

Value draw_abstract(const Location& loc, const FunctionInfo& info, const EvalContext& ctx) {
  if (const Value* v = ctx.resolver.drawn(loc)) return *v;
  // Without a codomain only a script can supply the value.
  std::span<const Value> candidates;
  bool open = !info.codomain;
  if (info.codomain) candidates = *info.codomain;
  std::string name = loc.to_string();
  Value v = ctx.resolver.pick(ResolutionKind::Abstract, name, name, candidates, open);
  ctx.resolver.remember(loc, v);
  return v;
}

Value eval_app(const Term& t, const EvalContext& ctx, const Env& env) {
  std::vector<Value> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(eval_term(*a, ctx, env));

  if (const FunctionInfo* info = ctx.state.signature().find(t.name)) {
    Location loc{t.name, std::move(args)};
    switch (info->kind) {
      case FunctionKind::Static: return ctx.state.static_value(loc);
      case FunctionKind::Controlled:
      case FunctionKind::Monitored: return ctx.state.lookup(loc);
      case FunctionKind::Abstract: return draw_abstract(loc, *info, ctx);
    }
  }
  if (t.name == kSelf && args.empty()) return ctx.self.value_or(Value::undef());
  return ctx.machine.background->apply(t.name, args);
}

bool guard_value(const Term& cond, const EvalContext& ctx, const Env& env, SourcePos pos) {
  Value v = eval_term(cond, ctx, env);
  if (!v.is_bool())
    throw Error(ErrorCode::GuardNotBoolean, "guard evaluated to " + v.to_string(), cond.pos.known() ? cond.pos : pos);
  return v.as_bool();
}

const std::vector<Value>& range_elements(const Value& range, const Rule& r) {
  if (!range.is_set())
    throw Error(ErrorCode::RangeNotSet,
                std::string(construct_name(r.kind)) + " range evaluated to " + range.to_string(), r.pos);
  return range.elements();
}

class Executor {
 public:
  explicit Executor(const EvalContext& ctx) : ctx_(ctx) {}

  UpdateSet exec(const Rule& r, const Env& env, const std::string& path, std::size_t depth) {
    return at_pos(r.pos, [&] { return exec_inner(r, env, path, depth); });
  }

 private:
  UpdateSet exec_inner(const Rule& r, const Env& env, const std::string& path, std::size_t depth) {
    UpdateSet out;
    switch (r.kind) {
      case Rule::Kind::Assign: {
        const Term& target = *r.target;
        std::vector<Value> args;
        for (const auto& a : target.args) args.push_back(eval_term(*a, ctx_, env));
        Location loc{target.name, std::move(args)};
        const FunctionInfo& info = ctx_.state.signature().at(loc.fname);
        if (info.kind != FunctionKind::Controlled)
          throw Error(ErrorCode::KindViolation, "assignment to " + std::string(to_string(info.kind)) + " function '" +
                                                    loc.fname + "'");
        if (info.arity != loc.args.size()) throw Error(ErrorCode::ArityMismatch, "arity mismatch for " + loc.fname);
        out.insert(Update{std::move(loc), eval_term(*r.value, ctx_, env)});
        break;
      }
      case Rule::Kind::Par:
        for (const auto& c : r.children) out.merge(exec(*c, env, path, depth));
        break;
      case Rule::Kind::If:
        if (guard_value(*r.cond, ctx_, env, r.pos))
          out = exec(*r.then_branch, env, path, depth);
        else if (r.else_branch)
          out = exec(*r.else_branch, env, path, depth);
        break;
      case Rule::Kind::Let:
        out = exec(*r.body, env.bind(r.var, eval_term(*r.bound, ctx_, env)), path, depth);
        break;
      case Rule::Kind::Call: {
        if (depth + 1 > ctx_.options.max_call_depth)
          throw Error(ErrorCode::CallDepthExceeded,
                      "call depth exceeds " + std::to_string(ctx_.options.max_call_depth) + " at '" + r.callee + "'");
        const RuleDecl& callee = ctx_.machine.rule(r.callee);
        if (callee.formals.size() != r.args.size())
          throw Error(ErrorCode::ResolveError, "wrong number of arguments to '" + r.callee + "'");
        Env inner;
        for (std::size_t i = 0; i < callee.formals.size(); ++i) inner = inner.bind_term(callee.formals[i], r.args[i], env);
        out = exec(*callee.body, inner, path + "/c" + std::to_string(r.id), depth + 1);
        break;
      }
      case Rule::Kind::Forall: {
        Value range = eval_term(*r.range, ctx_, env);
        for (const auto& v : range_elements(range, r)) {
          Env inner = env.bind(r.var, v);
          if (r.cond && !guard_value(*r.cond, ctx_, inner, r.pos)) continue;
          out.merge(exec(*r.body, inner, path + "/f" + std::to_string(r.id) + "=" + v.to_string(), depth));
        }
        break;
      }
      case Rule::Kind::Choose: {
        Value range = eval_term(*r.range, ctx_, env);
        std::vector<Value> candidates;
        for (const auto& v : range_elements(range, r))
          if (!r.cond || guard_value(*r.cond, ctx_, env.bind(r.var, v), r.pos)) candidates.push_back(v);
        if (candidates.empty()) break;
        std::string label = r.choice_label();
        std::string key = ctx_.scope + path + "|" + label;
        Value v = ctx_.resolver.pick(ResolutionKind::Choose, key, label, candidates);
        out = exec(*r.body, env.bind(r.var, v), path, depth);
        break;
      }
    }
    return out;
  }

  const EvalContext& ctx_;
};

}  // namespace

Value eval_term(const Term& t, const EvalContext& ctx, const Env& env) {
  switch (t.kind) {
    case Term::Kind::Lit:
      return t.value;
    case Term::Kind::Var: {
      const Env::Node* b = env.find(t.name);
      if (!b) throw Error(ErrorCode::UnboundVariable, "unbound variable '" + t.name + "'", t.pos);
      if (b->term) return eval_term(*b->term, ctx, b->captured);
      return b->value;
    }
    case Term::Kind::App:
      return at_pos(t.pos, [&] { return eval_app(t, ctx, env); });
  }
  return Value::undef();
}

UpdateSet update_set(const Rule& op, const EvalContext& ctx, const Env& env) {
  return Executor(ctx).exec(op, env, "", 0);
}

State initial_state(const MachineDef& m) {
  State s(m.sig);
  Resolver r = Resolver::seeded(0);
  for (const auto& e : m.init) {
    EvalContext ctx{m, s, r, std::nullopt, "", {}};
    std::vector<Value> args;
    for (const auto& a : e.target->args) args.push_back(eval_term(*a, ctx));
    Value v = eval_term(*e.value, ctx);
    at_pos(e.target->pos, [&] { s.assign(Location{e.target->name, std::move(args)}, std::move(v)); });
  }
  return s;
}

State inject_monitored(const State& s, const Resolver& r, std::size_t step_index) {
  const auto* inputs = r.monitored_for(step_index);
  if (!inputs || inputs->empty()) return s;
  State next = s;
  for (const auto& [loc, val] : *inputs) {
    if (next.signature().at(loc.fname).kind != FunctionKind::Monitored)
      throw Error(ErrorCode::KindViolation, "'" + loc.fname + "' is not a monitored function");
    next.assign(loc, val);
  }
  return next;
}

StepResult step(const State& s, const MachineDef& m, const std::string& rule, Resolver& r, std::size_t step_index,
                const EvalOptions& options) {
  r.begin_step(step_index);
  State pre = inject_monitored(s, r, step_index);
  const RuleDecl& decl = m.rule(rule);
  EvalContext ctx{m, pre, r, std::nullopt, "", options};
  UpdateSet us = update_set(*decl.body, ctx);

  StepResult result(pre);
  result.resolutions = r.take_resolutions();
  result.fired = us;
  auto cs = conflicts(us);
  if (!cs.empty()) {
    result.status = StepResult::Status::Inconsistent;
    result.conflicts = std::move(cs);
    return result;
  }
  if (us.empty() && pre.content() == s.content()) {
    result.status = StepResult::Status::Stalled;
    return result;
  }
  result.status = StepResult::Status::Progressed;
  result.next = fire(pre, us);
  return result;
}

Trace run(const MachineDef& m, RunConfig config) {
  State s = config.initial ? *config.initial : initial_state(m);
  Trace trace(s);
  trace.machine = m.name;
  trace.provenance = config.resolver.provenance();
  trace.outcome = RunOutcome::MaxSteps;
  for (std::size_t k = 0; k < config.max_steps; ++k) {
    StepResult res = step(s, m, m.main, config.resolver, k, config.eval);
    if (res.status == StepResult::Status::Stalled) {
      trace.outcome = RunOutcome::Stalled;
      trace.terminal_resolutions = std::move(res.resolutions);
      break;
    }
    if (res.status == StepResult::Status::Inconsistent) {
      trace.outcome = RunOutcome::Inconsistent;
      trace.conflicts = std::move(res.conflicts);
      trace.terminal_resolutions = std::move(res.resolutions);
      break;
    }
    trace.steps.push_back(
        TraceStep{s.digest(), res.next.digest(), std::move(res.fired), std::move(res.resolutions), {}, res.next});
    s = std::move(res.next);
  }
  trace.final_state = s;
  return trace;
}

std::vector<StepResult> enumerate_steps(const State& s, const MachineDef& m, const std::string& rule,
                                        std::size_t bound, const EvalOptions& options, std::size_t step_index) {
  std::vector<StepResult> out;
  for_each_branch(bound, [&](Resolver& r) {
    StepResult res = step(s, m, rule, r, step_index, options);
    bool seen = std::any_of(out.begin(), out.end(), [&](const StepResult& o) {
      return o.status == res.status && o.fired == res.fired;
    });
    if (!seen) out.push_back(std::move(res));
  });
  return out;
}

}  // namespace asmweave
