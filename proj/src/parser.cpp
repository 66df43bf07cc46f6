#include "asmweave/parser.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <map>
#include <set>

#include "lexer.hpp"

namespace asmweave {

std::vector<Diagnostic> resolve_machine(const MachineDef& m);

namespace {

using detail::Token;
using detail::TokenKind;

constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(detail::tokenize(text)) {}

  MachineDef machine(std::shared_ptr<const BackgroundRegistry> background);
  TermPtr standalone_term(const std::vector<std::string>& bound);

 private:
  // Tokens
  const Token& peek(std::size_t k = 0) const { return tokens_[std::min(i_ + k, tokens_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (i_ < tokens_.size() - 1) ++i_;
    return t;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) return false;
    next();
    return true;
  }
  bool accept_punct(std::string_view p) {
    if (!peek().is_punct(p)) return false;
    next();
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("expected '" + std::string(kw) + "'");
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
  }
  std::string expect_ident(std::string_view what) {
    if (peek().kind != TokenKind::Ident) fail("expected " + std::string(what));
    return next().text;
  }
  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError({Diagnostic{peek().pos, ErrorCode::SyntaxError, expected + ", found " + peek().describe()}});
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) p_.fail("nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  bool is_bound(const std::string& name) const {
    return std::find(scope_.rbegin(), scope_.rend(), name) != scope_.rend();
  }

  // Declarations
  void sig_decl(Signature& sig);
  std::vector<Value> set_literal();
  Value literal();
  RuleDecl rule_decl();
  RulePtr op();
  std::pair<TermPtr, SourcePos> lhs_term();

  // Terms
  TermPtr term() { return implies_term(); }
  TermPtr implies_term();
  TermPtr or_term();
  TermPtr and_term();
  TermPtr not_term();
  TermPtr cmp_term();
  TermPtr add_term();
  TermPtr mul_term();
  TermPtr unary_term();
  TermPtr primary();
  std::vector<TermPtr> call_args();

  std::vector<Token> tokens_;
  std::size_t i_ = 0;
  int depth_ = 0;
  std::vector<std::string> scope_;
  std::string current_rule_;
  std::map<std::string, int> choose_counts_;
};

MachineDef Parser::machine(std::shared_ptr<const BackgroundRegistry> background) {
  MachineDef m;
  m.background = std::move(background);
  expect_keyword("machine");
  m.name = expect_ident("machine name");

  auto sig = std::make_shared<Signature>();
  std::vector<Diagnostic> decl_errors;
  while (peek().is_keyword("static") || peek().is_keyword("controlled") || peek().is_keyword("monitored") ||
         peek().is_keyword("abstract")) {
    SourcePos pos = peek().pos;
    try {
      sig_decl(*sig);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      decl_errors.push_back(Diagnostic{pos, e.code(), e.message()});
    }
  }
  m.sig = sig;

  if (!peek().is_keyword("rule")) fail("expected 'rule'");
  while (peek().is_keyword("rule")) m.rules.push_back(rule_decl());

  if (accept_keyword("init")) {
    expect_punct("{");
    while (!peek().is_punct("}")) {
      auto [target, pos] = lhs_term();
      expect_punct(":=");
      m.init.push_back(InitEntry{target, term()});
    }
    expect_punct("}");
  }

  m.main_pos = peek().pos;
  expect_keyword("main");
  m.main = expect_ident("main rule name");
  while (peek().is_keyword("agent")) {
    AgentDecl a;
    a.pos = peek().pos;
    expect_keyword("agent");
    a.id = expect_ident("agent id");
    expect_keyword("runs");
    a.rule = expect_ident("rule name");
    m.agents.push_back(std::move(a));
  }
  if (peek().kind != TokenKind::End) fail("expected end of machine");

  // Resolution happens once the whole text is known: rules may refer to
  // each other in any order.
  std::vector<Diagnostic> diags = std::move(decl_errors);
  auto more = resolve_machine(m);
  diags.insert(diags.end(), more.begin(), more.end());
  if (!diags.empty()) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return std::pair(a.pos.line, a.pos.column) < std::pair(b.pos.line, b.pos.column);
    });
    throw ParseError(std::move(diags));
  }
  return m;
}

void Parser::sig_decl(Signature& sig) {
  FunctionKind kind = FunctionKind::Controlled;
  const std::string& kw = next().text;
  if (kw == "static") kind = FunctionKind::Static;
  if (kw == "monitored") kind = FunctionKind::Monitored;
  if (kw == "abstract") kind = FunctionKind::Abstract;
  std::vector<std::pair<std::string, FunctionInfo>> entries;
  do {
    SourcePos pos = peek().pos;
    std::string name = expect_ident("function name");
    FunctionInfo info;
    info.kind = kind;
    if (accept_punct("/")) {
      if (peek().kind != TokenKind::Int) fail("expected arity");
      const std::string& digits = next().text;
      if (digits.size() > 3) fail("arity too large");
      info.arity = std::stoul(digits);
    }
    if (accept_punct(":")) info.codomain = set_literal();
    if (name == kSelf) throw Error(ErrorCode::ResolveError, "'self' is reserved", pos);
    entries.emplace_back(std::move(name), std::move(info));
  } while (accept_punct(","));
  for (auto& [name, info] : entries) sig.declare(name, std::move(info));
}

std::vector<Value> Parser::set_literal() {
  expect_punct("{");
  std::vector<Value> elems;
  if (accept_punct("}")) return elems;
  Value first = literal();
  if (accept_punct("..")) {
    Value last = literal();
    if (!first.is_int() || !last.is_int()) fail("expected integer range bounds");
    if (last.as_int() - first.as_int() >= BigInt(kMaxRangeSize)) fail("range too large");
    for (BigInt i = first.as_int(); i <= last.as_int(); ++i) elems.push_back(Value::integer(i));
    expect_punct("}");
    return elems;
  }
  elems.push_back(std::move(first));
  while (accept_punct(",")) elems.push_back(literal());
  expect_punct("}");
  return Value::set(std::move(elems)).elements();
}

Value Parser::literal() {
  const Token& t = peek();
  if (t.is_punct("-") && peek(1).kind == TokenKind::Int) {
    next();
    return Value::integer(-BigInt(next().text));
  }
  switch (t.kind) {
    case TokenKind::Int: return Value::integer(BigInt(next().text));
    case TokenKind::String: return Value::str(next().text);
    case TokenKind::Symbol: return Value::sym(next().text);
    case TokenKind::Keyword:
      if (t.text == "true") return next(), Value::boolean(true);
      if (t.text == "false") return next(), Value::boolean(false);
      if (t.text == "undef") return next(), Value::undef();
      break;
    default: break;
  }
  fail("expected a literal");
}

RuleDecl Parser::rule_decl() {
  RuleDecl decl;
  decl.pos = peek().pos;
  expect_keyword("rule");
  decl.name = expect_ident("rule name");
  if (accept_punct("(")) {
    do {
      decl.formals.push_back(expect_ident("formal parameter"));
    } while (accept_punct(","));
    expect_punct(")");
  }
  expect_punct("=");
  current_rule_ = decl.name;
  choose_counts_.clear();
  scope_ = decl.formals;
  decl.body = op();
  scope_.clear();
  return decl;
}

std::pair<TermPtr, SourcePos> Parser::lhs_term() {
  SourcePos pos = peek().pos;
  std::string name = expect_ident("location");
  std::vector<TermPtr> args;
  if (peek().is_punct("(")) args = call_args();
  return {Term::app(std::move(name), std::move(args), pos), pos};
}

RulePtr Parser::op() {
  DepthGuard guard(*this);
  SourcePos pos = peek().pos;
  if (accept_keyword("skip")) return Rule::skip(pos);
  if (accept_keyword("par")) {
    std::vector<RulePtr> children;
    while (!accept_keyword("endpar")) {
      if (peek().kind == TokenKind::End) fail("expected 'endpar'");
      children.push_back(op());
    }
    return Rule::par(std::move(children), pos);
  }
  if (accept_keyword("if")) {
    TermPtr cond = term();
    expect_keyword("then");
    RulePtr then_branch = op();
    RulePtr else_branch;
    if (accept_keyword("else")) else_branch = op();
    return Rule::if_then(std::move(cond), std::move(then_branch), std::move(else_branch), pos);
  }
  if (accept_keyword("let")) {
    std::string var = expect_ident("variable");
    expect_punct("=");
    TermPtr bound = term();
    expect_keyword("in");
    scope_.push_back(var);
    RulePtr body = op();
    scope_.pop_back();
    return Rule::let(std::move(var), std::move(bound), std::move(body), pos);
  }
  if (peek().is_keyword("forall") || peek().is_keyword("choose")) {
    bool is_forall = next().text == "forall";
    std::string var = expect_ident("variable");
    expect_keyword("in");
    TermPtr range = term();
    scope_.push_back(var);
    TermPtr cond;
    if (accept_keyword("with")) cond = term();
    expect_keyword("do");
    RulePtr body = op();
    scope_.pop_back();
    if (is_forall) return Rule::forall(std::move(var), std::move(range), std::move(cond), std::move(body), pos);
    int n = ++choose_counts_[var];
    std::string label = current_rule_ + "." + var + (n > 1 ? "#" + std::to_string(n) : "");
    return Rule::choose(std::move(var), std::move(range), std::move(cond), std::move(body), std::move(label), pos);
  }
  if (peek().kind == TokenKind::Ident) {
    std::string name = next().text;
    bool has_args = peek().is_punct("(");
    std::vector<TermPtr> args;
    if (has_args) args = call_args();
    if (accept_punct(":=")) {
      if (!has_args && is_bound(name))
        throw ParseError({Diagnostic{pos, ErrorCode::ResolveError, "cannot assign to bound variable '" + name + "'"}});
      TermPtr target = Term::app(name, std::move(args), pos);
      return Rule::assign(std::move(target), term(), pos);
    }
    if (!has_args) fail("expected ':='");
    return Rule::call(std::move(name), std::move(args), pos);
  }
  fail("expected an operation");
}

std::vector<TermPtr> Parser::call_args() {
  expect_punct("(");
  std::vector<TermPtr> args;
  if (accept_punct(")")) return args;
  do {
    args.push_back(term());
  } while (accept_punct(","));
  expect_punct(")");
  return args;
}

TermPtr Parser::implies_term() {
  DepthGuard guard(*this);
  TermPtr left = or_term();
  SourcePos pos = peek().pos;
  if (accept_keyword("implies")) return Term::app("implies", {left, implies_term()}, pos);
  return left;
}

TermPtr Parser::or_term() {
  TermPtr left = and_term();
  for (;;) {
    SourcePos pos = peek().pos;
    if (!accept_keyword("or")) return left;
    left = Term::app("or", {left, and_term()}, pos);
  }
}

TermPtr Parser::and_term() {
  TermPtr left = not_term();
  for (;;) {
    SourcePos pos = peek().pos;
    if (!accept_keyword("and")) return left;
    left = Term::app("and", {left, not_term()}, pos);
  }
}

TermPtr Parser::not_term() {
  DepthGuard guard(*this);
  SourcePos pos = peek().pos;
  if (accept_keyword("not")) return Term::app("not", {not_term()}, pos);
  return cmp_term();
}

TermPtr Parser::cmp_term() {
  TermPtr left = add_term();
  for (std::string_view op : {"=", "!=", "<=", ">=", "<", ">"}) {
    SourcePos pos = peek().pos;
    if (accept_punct(op)) return Term::app(std::string(op), {left, add_term()}, pos);
  }
  return left;
}

TermPtr Parser::add_term() {
  TermPtr left = mul_term();
  for (;;) {
    SourcePos pos = peek().pos;
    if (accept_punct("+"))
      left = Term::app("+", {left, mul_term()}, pos);
    else if (accept_punct("-"))
      left = Term::app("-", {left, mul_term()}, pos);
    else
      return left;
  }
}

TermPtr Parser::mul_term() {
  TermPtr left = unary_term();
  for (;;) {
    SourcePos pos = peek().pos;
    if (accept_punct("*"))
      left = Term::app("*", {left, unary_term()}, pos);
    else if (accept_punct("/"))
      left = Term::app("/", {left, unary_term()}, pos);
    else if (accept_keyword("mod"))
      left = Term::app("mod", {left, unary_term()}, pos);
    else
      return left;
  }
}

TermPtr Parser::unary_term() {
  DepthGuard guard(*this);
  SourcePos pos = peek().pos;
  if (peek().is_punct("-")) {
    if (peek(1).kind == TokenKind::Int) {
      next();
      return Term::lit(Value::integer(-BigInt(next().text)), pos);
    }
    next();
    return Term::app("neg", {unary_term()}, pos);
  }
  return primary();
}

TermPtr Parser::primary() {
  DepthGuard guard(*this);
  const Token& t = peek();
  SourcePos pos = t.pos;
  switch (t.kind) {
    case TokenKind::Int: return Term::lit(Value::integer(BigInt(next().text)), pos);
    case TokenKind::String: return Term::lit(Value::str(next().text), pos);
    case TokenKind::Symbol: return Term::lit(Value::sym(next().text), pos);
    case TokenKind::Keyword:
      if (accept_keyword("true")) return Term::lit(Value::boolean(true), pos);
      if (accept_keyword("false")) return Term::lit(Value::boolean(false), pos);
      if (accept_keyword("undef")) return Term::lit(Value::undef(), pos);
      break;
    case TokenKind::Ident: {
      std::string name = next().text;
      if (peek().is_punct("(")) return Term::app(std::move(name), call_args(), pos);
      if (is_bound(name)) return Term::var(std::move(name), pos);
      return Term::app(std::move(name), {}, pos);
    }
    case TokenKind::Punct:
      if (accept_punct("(")) {
        TermPtr inner = term();
        expect_punct(")");
        return inner;
      }
      if (accept_punct("{")) {
        if (accept_punct("}")) return Term::app("set", {}, pos);
        TermPtr first = term();
        if (accept_punct("..")) {
          TermPtr last = term();
          expect_punct("}");
          return Term::app("range", {first, last}, pos);
        }
        std::vector<TermPtr> elems{first};
        while (accept_punct(",")) elems.push_back(term());
        expect_punct("}");
        return Term::app("set", std::move(elems), pos);
      }
      break;
    default: break;
  }
  fail("expected a term");
}

TermPtr Parser::standalone_term(const std::vector<std::string>& bound) {
  scope_ = bound;
  TermPtr t = term();
  if (peek().kind != TokenKind::End) fail("expected end of term");
  return t;
}

// Resolution

class NameResolver {
 public:
  explicit NameResolver(const MachineDef& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> seen;
    for (const auto& r : m_.rules) {
      if (!seen.insert(r.name).second) error(r.pos, ErrorCode::ResolveError, "rule '" + r.name + "' declared twice");
      if (m_.sig->contains(r.name))
        error(r.pos, ErrorCode::ResolveError, "'" + r.name + "' is both a function and a rule");
      std::set<std::string> formals(r.formals.begin(), r.formals.end());
      if (formals.size() != r.formals.size())
        error(r.pos, ErrorCode::ResolveError, "duplicate formal parameter in rule '" + r.name + "'");
      rule(r.body);
    }
    for (const auto& e : m_.init) {
      check_target(e.target, /*in_rule=*/false);
      term(e.value);
    }
    check_entry(m_.main, "main rule", m_.main_pos);
    std::set<std::string> ids;
    for (const auto& a : m_.agents) {
      if (!ids.insert(a.id).second) error(a.pos, ErrorCode::ResolveError, "agent '" + a.id + "' declared twice");
      check_entry(a.rule, "agent rule", a.pos);
    }
    return std::move(diags_);
  }

  void term(const TermPtr& t) {
    if (!t || t->kind != Term::Kind::App) return;
    for (const auto& a : t->args) term(a);
    std::size_t arity = t->args.size();
    if (const FunctionInfo* info = m_.sig->find(t->name)) {
      if (info->arity != arity) arity_error(t->pos, t->name, info->arity, arity);
      return;
    }
    if (t->name == kSelf) {
      if (arity != 0) arity_error(t->pos, t->name, 0, arity);
      return;
    }
    if (const BackgroundFunction* bg = m_.background->find(t->name)) {
      if (bg->arity != BackgroundFunction::kVariadic && static_cast<std::size_t>(bg->arity) != arity)
        arity_error(t->pos, t->name, static_cast<std::size_t>(bg->arity), arity);
      return;
    }
    error(t->pos, ErrorCode::ResolveError, "unknown name '" + t->name + "'");
  }

  std::vector<Diagnostic> take() { return std::move(diags_); }

 private:
  void error(SourcePos pos, ErrorCode code, std::string message) {
    diags_.push_back(Diagnostic{pos, code, std::move(message)});
  }

  void arity_error(SourcePos pos, const std::string& name, std::size_t want, std::size_t got) {
    error(pos, ErrorCode::ResolveError,
          "'" + name + "' expects " + std::to_string(want) + " argument(s), got " + std::to_string(got));
  }

  void check_entry(const std::string& rname, const char* what, SourcePos pos) {
    const RuleDecl* r = m_.find_rule(rname);
    if (!r)
      error(pos, ErrorCode::ResolveError, std::string(what) + " '" + rname + "' is not declared");
    else if (!r->formals.empty())
      error(r->pos, ErrorCode::ResolveError, std::string(what) + " '" + rname + "' must not take parameters");
  }

  void check_target(const TermPtr& target, bool in_rule) {
    for (const auto& a : target->args) term(a);
    const FunctionInfo* info = m_.sig->find(target->name);
    if (!info) {
      error(target->pos, ErrorCode::ResolveError, "unknown name '" + target->name + "'");
      return;
    }
    if (info->arity != target->args.size()) arity_error(target->pos, target->name, info->arity, target->args.size());
    bool ok = in_rule ? info->kind == FunctionKind::Controlled : info->kind != FunctionKind::Abstract;
    if (!ok)
      error(target->pos, ErrorCode::ResolveError,
            "cannot assign to " + std::string(to_string(info->kind)) + " function '" + target->name + "'");
  }

  void rule(const RulePtr& r) {
    if (!r) return;
    switch (r->kind) {
      case Rule::Kind::Assign:
        check_target(r->target, /*in_rule=*/true);
        term(r->value);
        break;
      case Rule::Kind::Par:
        for (const auto& c : r->children) rule(c);
        break;
      case Rule::Kind::If:
        term(r->cond);
        rule(r->then_branch);
        rule(r->else_branch);
        break;
      case Rule::Kind::Let:
        term(r->bound);
        rule(r->body);
        break;
      case Rule::Kind::Call: {
        for (const auto& a : r->args) term(a);
        const RuleDecl* callee = m_.find_rule(r->callee);
        if (!callee)
          error(r->pos, ErrorCode::ResolveError, "unknown rule '" + r->callee + "'");
        else if (callee->formals.size() != r->args.size())
          error(r->pos, ErrorCode::ResolveError,
                "rule '" + r->callee + "' expects " + std::to_string(callee->formals.size()) + " argument(s), got " +
                    std::to_string(r->args.size()));
        break;
      }
      case Rule::Kind::Forall:
      case Rule::Kind::Choose:
        term(r->range);
        term(r->cond);
        rule(r->body);
        break;
    }
  }

  const MachineDef& m_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> resolve_machine(const MachineDef& m) { return NameResolver(m).run(); }

MachineDef parse_machine(std::string_view text, std::shared_ptr<const BackgroundRegistry> background) {
  if (!background) background = BackgroundRegistry::standard();
  return Parser(text).machine(std::move(background));
}

TermPtr parse_term(std::string_view text, const std::vector<std::string>& bound) {
  return Parser(text).standalone_term(bound);
}

std::vector<Diagnostic> resolve_term(const TermPtr& term, const MachineDef& machine) {
  NameResolver r(machine);
  r.term(term);
  return r.take();
}

TermPtr parse_term_for(std::string_view text, const MachineDef& machine) {
  TermPtr t = parse_term(text);
  auto diags = resolve_term(t, machine);
  if (!diags.empty()) throw ParseError(std::move(diags));
  return t;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

MachineDef load_machine(const std::filesystem::path& file) { return parse_machine(read_file(file)); }

}  // namespace asmweave
