#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "asmweave/background.hpp"
#include "asmweave/core.hpp"
#include "asmweave/error.hpp"
#include "asmweave/value.hpp"

namespace asmweave {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Lit(value) | Var(name) | App(name, args). Operators and connectives are
// Apps of background functions ("+", "and", "=", "set", ...).
struct Term {
  enum class Kind { Lit, Var, App };

  Kind kind = Kind::Lit;
  Value value;
  std::string name;
  std::vector<TermPtr> args;
  SourcePos pos;

  static TermPtr lit(Value v, SourcePos pos = {});
  static TermPtr var(std::string name, SourcePos pos = {});
  static TermPtr app(std::string name, std::vector<TermPtr> args = {}, SourcePos pos = {});

  bool is_app(std::string_view fname) const { return kind == Kind::App && name == fname; }
};

// Structural equality; positions are ignored.
bool same_term(const Term& a, const Term& b);
bool same_term(const TermPtr& a, const TermPtr& b);

struct Rule;
using RulePtr = std::shared_ptr<const Rule>;

// The seven constructs. Skip is Par with no children.
struct Rule {
  enum class Kind { Assign, Par, If, Let, Call, Forall, Choose };

  Kind kind = Kind::Par;
  // Stable identity of this node, used to key choice resolutions.
  std::uint32_t id = 0;
  SourcePos pos;

  // Assign: target := value
  TermPtr target;
  TermPtr value;
  // Par
  std::vector<RulePtr> children;
  // If: if cond then then_branch [else else_branch]. Forall/Choose: optional
  // "with" condition.
  TermPtr cond;
  RulePtr then_branch;
  RulePtr else_branch;
  // Let/Forall/Choose bind `var` (to `bound` for let, ranging over `range`
  // otherwise) in `body`.
  std::string var;
  TermPtr bound;
  TermPtr range;
  RulePtr body;
  // Call
  std::string callee;
  std::vector<TermPtr> args;
  // Choose: human-readable name for scripting, e.g. "Main.x".
  std::string label;

  static RulePtr assign(TermPtr target, TermPtr value, SourcePos pos = {});
  static RulePtr par(std::vector<RulePtr> children, SourcePos pos = {});
  static RulePtr skip(SourcePos pos = {}) { return par({}, pos); }
  // A skip else-branch is dropped: "if c then P else skip" is "if c then P".
  static RulePtr if_then(TermPtr cond, RulePtr then_branch, RulePtr else_branch = nullptr, SourcePos pos = {});
  static RulePtr let(std::string var, TermPtr bound, RulePtr body, SourcePos pos = {});
  static RulePtr call(std::string callee, std::vector<TermPtr> args, SourcePos pos = {});
  static RulePtr forall(std::string var, TermPtr range, TermPtr cond, RulePtr body, SourcePos pos = {});
  static RulePtr choose(std::string var, TermPtr range, TermPtr cond, RulePtr body, std::string label = {},
                        SourcePos pos = {});

  bool is_skip() const { return kind == Kind::Par && children.empty(); }
  // Label if set, otherwise one derived from the node id.
  std::string choice_label() const;
};

bool same_rule(const Rule& a, const Rule& b);
bool same_rule(const RulePtr& a, const RulePtr& b);

std::string_view construct_name(Rule::Kind kind);

struct RuleDecl {
  std::string name;
  std::vector<std::string> formals;
  RulePtr body;
  SourcePos pos;
};

struct InitEntry {
  TermPtr target;
  TermPtr value;
};

struct AgentDecl {
  std::string id;
  std::string rule;
  SourcePos pos;
};

struct MachineDef {
  std::string name;
  std::shared_ptr<const Signature> sig = std::make_shared<const Signature>();
  std::vector<RuleDecl> rules;
  std::vector<InitEntry> init;
  std::string main;
  SourcePos main_pos;
  std::vector<AgentDecl> agents;
  std::shared_ptr<const BackgroundRegistry> background = BackgroundRegistry::standard();

  const RuleDecl* find_rule(const std::string& name) const;
  // Throws ResolveError.
  const RuleDecl& rule(const std::string& name) const;
  bool multi_agent() const { return !agents.empty(); }

  // Copy of this machine with one rule added or replaced.
  MachineDef with_rule(RuleDecl decl) const;
};

// Structural equality modulo positions, node ids and declaration order of
// signature entries.
bool same_machine(const MachineDef& a, const MachineDef& b);

// Name of the implicit per-agent identity function.
inline constexpr std::string_view kSelf = "self";

// All function names applied anywhere in a term.
void collect_apps(const TermPtr& t, std::vector<TermPtr>& out);

}  // namespace asmweave
