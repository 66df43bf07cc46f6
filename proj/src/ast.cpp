#include "asmweave/ast.hpp"

#include <atomic>

namespace asmweave {
namespace {

std::uint32_t next_rule_id() {
  static std::atomic<std::uint32_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::shared_ptr<Rule> make_rule(Rule::Kind kind, SourcePos pos) {
  auto r = std::make_shared<Rule>();
  r->kind = kind;
  r->id = next_rule_id();
  r->pos = pos;
  return r;
}

bool same_terms(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_term(a[i], b[i])) return false;
  return true;
}

}  // namespace

TermPtr Term::lit(Value v, SourcePos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Lit;
  t->value = std::move(v);
  t->pos = pos;
  return t;
}

TermPtr Term::var(std::string name, SourcePos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->name = std::move(name);
  t->pos = pos;
  return t;
}

TermPtr Term::app(std::string name, std::vector<TermPtr> args, SourcePos pos) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::App;
  t->name = std::move(name);
  t->args = std::move(args);
  t->pos = pos;
  return t;
}

bool same_term(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Lit: return a.value == b.value;
    case Term::Kind::Var: return a.name == b.name;
    case Term::Kind::App: return a.name == b.name && same_terms(a.args, b.args);
  }
  return false;
}

bool same_term(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return same_term(*a, *b);
}

RulePtr Rule::assign(TermPtr target, TermPtr value, SourcePos pos) {
  auto r = make_rule(Kind::Assign, pos);
  r->target = std::move(target);
  r->value = std::move(value);
  return r;
}

RulePtr Rule::par(std::vector<RulePtr> children, SourcePos pos) {
  auto r = make_rule(Kind::Par, pos);
  r->children = std::move(children);
  return r;
}

RulePtr Rule::if_then(TermPtr cond, RulePtr then_branch, RulePtr else_branch, SourcePos pos) {
  auto r = make_rule(Kind::If, pos);
  r->cond = std::move(cond);
  r->then_branch = std::move(then_branch);
  if (else_branch && !else_branch->is_skip()) r->else_branch = std::move(else_branch);
  return r;
}

RulePtr Rule::let(std::string var, TermPtr bound, RulePtr body, SourcePos pos) {
  auto r = make_rule(Kind::Let, pos);
  r->var = std::move(var);
  r->bound = std::move(bound);
  r->body = std::move(body);
  return r;
}

RulePtr Rule::call(std::string callee, std::vector<TermPtr> args, SourcePos pos) {
  auto r = make_rule(Kind::Call, pos);
  r->callee = std::move(callee);
  r->args = std::move(args);
  return r;
}

RulePtr Rule::forall(std::string var, TermPtr range, TermPtr cond, RulePtr body, SourcePos pos) {
  auto r = make_rule(Kind::Forall, pos);
  r->var = std::move(var);
  r->range = std::move(range);
  r->cond = std::move(cond);
  r->body = std::move(body);
  return r;
}

RulePtr Rule::choose(std::string var, TermPtr range, TermPtr cond, RulePtr body, std::string label, SourcePos pos) {
  auto r = make_rule(Kind::Choose, pos);
  r->var = std::move(var);
  r->range = std::move(range);
  r->cond = std::move(cond);
  r->body = std::move(body);
  r->label = std::move(label);
  return r;
}

std::string Rule::choice_label() const { return label.empty() ? "node" + std::to_string(id) : label; }

bool same_rule(const RulePtr& a, const RulePtr& b) {
  if (!a || !b) return !a && !b;
  return same_rule(*a, *b);
}

bool same_rule(const Rule& a, const Rule& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Rule::Kind::Assign:
      return same_term(a.target, b.target) && same_term(a.value, b.value);
    case Rule::Kind::Par:
      if (a.children.size() != b.children.size()) return false;
      for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!same_rule(a.children[i], b.children[i])) return false;
      return true;
    case Rule::Kind::If:
      return same_term(a.cond, b.cond) && same_rule(a.then_branch, b.then_branch) &&
             same_rule(a.else_branch, b.else_branch);
    case Rule::Kind::Let:
      return a.var == b.var && same_term(a.bound, b.bound) && same_rule(a.body, b.body);
    case Rule::Kind::Call:
      return a.callee == b.callee && same_terms(a.args, b.args);
    case Rule::Kind::Forall:
    case Rule::Kind::Choose:
      return a.var == b.var && same_term(a.range, b.range) && same_term(a.cond, b.cond) &&
             same_rule(a.body, b.body);
  }
  return false;
}

std::string_view construct_name(Rule::Kind kind) {
  switch (kind) {
    case Rule::Kind::Assign: return "assign";
    case Rule::Kind::Par: return "par";
    case Rule::Kind::If: return "if";
    case Rule::Kind::Let: return "let";
    case Rule::Kind::Call: return "call";
    case Rule::Kind::Forall: return "forall";
    case Rule::Kind::Choose: return "choose";
  }
  return "?";
}

const RuleDecl* MachineDef::find_rule(const std::string& rname) const {
  for (const auto& r : rules)
    if (r.name == rname) return &r;
  return nullptr;
}

const RuleDecl& MachineDef::rule(const std::string& rname) const {
  if (const auto* r = find_rule(rname)) return *r;
  throw Error(ErrorCode::ResolveError, "unknown rule '" + rname + "'");
}

MachineDef MachineDef::with_rule(RuleDecl decl) const {
  MachineDef m = *this;
  for (auto& r : m.rules) {
    if (r.name == decl.name) {
      r = std::move(decl);
      return m;
    }
  }
  m.rules.push_back(std::move(decl));
  return m;
}

bool same_machine(const MachineDef& a, const MachineDef& b) {
  if (a.name != b.name || !(*a.sig == *b.sig) || a.main != b.main) return false;
  if (a.rules.size() != b.rules.size() || a.init.size() != b.init.size() || a.agents.size() != b.agents.size())
    return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    const auto& x = a.rules[i];
    const auto& y = b.rules[i];
    if (x.name != y.name || x.formals != y.formals || !same_rule(x.body, y.body)) return false;
  }
  for (std::size_t i = 0; i < a.init.size(); ++i)
    if (!same_term(a.init[i].target, b.init[i].target) || !same_term(a.init[i].value, b.init[i].value)) return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i)
    if (a.agents[i].id != b.agents[i].id || a.agents[i].rule != b.agents[i].rule) return false;
  return true;
}

void collect_apps(const TermPtr& t, std::vector<TermPtr>& out) {
  if (!t) return;
  if (t->kind == Term::Kind::App) out.push_back(t);
  for (const auto& a : t->args) collect_apps(a, out);
}

}  // namespace asmweave
