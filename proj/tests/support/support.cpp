#include "support.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "asmweave/eval.hpp"
#include "asmweave/parser.hpp"

namespace support {

std::filesystem::path models_dir() { return ASMWEAVE_MODELS_DIR; }
std::filesystem::path model(const std::string& name) { return models_dir() / name; }
std::filesystem::path fixtures_dir() { return ASMWEAVE_FIXTURES_DIR; }
std::string cli_path() { return ASMWEAVE_CLI; }

std::vector<std::filesystem::path> bundled_machines() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(models_dir()))
    if (e.path().extension() == ".asm") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

CommandResult run_command(const std::string& cmd) {
  CommandResult res;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
  int raw = pclose(pipe);
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

MachineDef random_base() {
  static const MachineDef base = parse_machine(R"(
machine Random
controlled x0 : {0, 1, 2}, x1 : {0, 1, 2}, x2 : {0, 1, 2}
controlled b0 : {false, true}, b1 : {false, true}
controlled f/1
rule Aux(p) = x0 := p
rule Main = skip
main Main
)");
  return base;
}

namespace {

const std::array<const char*, 3> kInts = {"x0", "x1", "x2"};
const std::array<const char*, 2> kBools = {"b0", "b1"};

TermPtr lit(long long v) { return Term::lit(Value::integer(v)); }

}  // namespace

TermPtr RuleGen::int_term(int depth, const std::vector<std::string>& vars) {
  int choice = pick(depth <= 0 ? 3 : 5);
  switch (choice) {
    case 0: return lit(pick(3));
    case 1: return Term::app(kInts[pick(3)]);
    case 2:
      if (!vars.empty()) return Term::var(vars[pick(static_cast<int>(vars.size()))]);
      return Term::app(kInts[pick(3)]);
    case 3: return Term::app("+", {int_term(depth - 1, vars), lit(pick(3))});
    default:
      return Term::app("mod", {Term::app("+", {int_term(depth - 1, vars), int_term(depth - 1, vars)}), lit(3)});
  }
}

TermPtr RuleGen::bool_term(int depth, const std::vector<std::string>& vars) {
  int choice = pick(depth <= 0 ? 3 : 6);
  switch (choice) {
    case 0: return Term::app(kBools[pick(2)]);
    case 1: return Term::app("=", {int_term(0, vars), int_term(0, vars)});
    case 2: return Term::app("<", {int_term(0, vars), int_term(0, vars)});
    case 3: return Term::app("not", {bool_term(depth - 1, vars)});
    case 4: return Term::app("and", {bool_term(depth - 1, vars), bool_term(depth - 1, vars)});
    default: return Term::app("or", {bool_term(depth - 1, vars), bool_term(depth - 1, vars)});
  }
}

RulePtr RuleGen::rule(int depth, const std::vector<std::string>& vars) {
  if (depth <= 1) {
    switch (pick(5)) {
      case 0: return Rule::assign(Term::app(kBools[pick(2)]), bool_term(1, vars));
      case 1: return Rule::assign(Term::app("f", {int_term(0, vars)}), int_term(1, vars));
      case 2:
        if (pick(3) == 0) return Rule::skip();
        [[fallthrough]];
      default: return Rule::assign(Term::app(kInts[pick(3)]), int_term(1, vars));
    }
  }
  std::string v = "v" + std::to_string(vars.size());
  std::vector<std::string> inner = vars;
  inner.push_back(v);
  switch (pick(8)) {
    case 0: return rule(1, vars);
    case 1: {
      std::vector<RulePtr> children;
      int n = 2 + pick(2);
      for (int i = 0; i < n; ++i) children.push_back(rule(depth - 1, vars));
      return Rule::par(std::move(children));
    }
    case 2:
      return Rule::if_then(bool_term(2, vars), rule(depth - 1, vars), pick(2) ? rule(depth - 1, vars) : nullptr);
    case 3: return Rule::let(v, int_term(1, vars), rule(depth - 1, inner));
    case 4: return Rule::call("Aux", {int_term(1, vars)});
    case 5:
      return Rule::forall(v, Term::app("range", {lit(0), lit(pick(3))}), pick(2) ? bool_term(1, inner) : nullptr,
                          rule(depth - 1, inner));
    default: {
      std::vector<TermPtr> elems;
      int n = 1 + pick(3);
      for (int i = 0; i < n; ++i) elems.push_back(lit(pick(4)));
      return Rule::choose(v, Term::app("set", std::move(elems)), pick(2) ? bool_term(1, inner) : nullptr,
                          rule(depth - 1, inner));
    }
  }
}

RulePtr RuleGen::pga_rule(int depth) {
  if (depth <= 1) {
    if (pick(2)) return Rule::assign(Term::app(kBools[pick(2)]), bool_term(1, {}));
    return Rule::assign(Term::app(kInts[pick(3)]), int_term(1, {}));
  }
  switch (pick(4)) {
    case 0: return pga_rule(1);
    case 1: {
      std::vector<RulePtr> children;
      int n = 1 + pick(3);
      for (int i = 0; i < n; ++i) children.push_back(pga_rule(depth - 1));
      return Rule::par(std::move(children));
    }
    default:
      return Rule::if_then(bool_term(2, {}), pga_rule(depth - 1), pick(2) ? pga_rule(depth - 1) : nullptr);
  }
}

RulePtr RuleGen::top_par(int depth) {
  std::vector<RulePtr> children;
  int n = 2 + pick(3);
  for (int i = 0; i < n; ++i) children.push_back(rule(depth - 1));
  return Rule::par(std::move(children));
}

State RuleGen::random_state(const MachineDef& m) {
  State s = initial_state(m);
  for (const char* x : kInts) s.assign(Location{x, {}}, Value::integer(pick(3)));
  for (const char* b : kBools) s.assign(Location{b, {}}, Value::boolean(pick(2) == 1));
  for (int i = 0; i < 3; ++i)
    if (pick(2)) s.assign(Location{"f", {Value::integer(i)}}, Value::integer(pick(5)));
  return s;
}

namespace {

struct OracleEval {
  const std::map<std::string, Value>& state;
  bool ok = true;

  Value term(const Term& t) {
    if (t.kind == Term::Kind::Lit) return t.value;
    if (t.kind == Term::Kind::Var) {
      ok = false;
      return Value::undef();
    }
    if (t.args.empty()) {
      if (t.name == "true" || t.name == "false") return Value::boolean(t.name == "true");
      auto it = state.find(t.name);
      return it == state.end() ? Value::undef() : it->second;
    }
    std::vector<Value> a;
    for (const auto& x : t.args) a.push_back(term(*x));
    const std::string& f = t.name;
    auto tri = [](const Value& v) { return v.is_bool() ? (v.as_bool() ? 1 : 0) : -1; };
    auto from_tri = [](int k) { return k < 0 ? Value::undef() : Value::boolean(k == 1); };
    if (f == "=") return Value::boolean(a[0] == a[1]);
    if (f == "!=") return Value::boolean(a[0] != a[1]);
    if (f == "not") return from_tri(tri(a[0]) < 0 ? -1 : 1 - tri(a[0]));
    if (f == "and") {
      int x = tri(a[0]), y = tri(a[1]);
      if (x == 0 || y == 0) return from_tri(0);
      return from_tri(x == 1 && y == 1 ? 1 : -1);
    }
    if (f == "or") {
      int x = tri(a[0]), y = tri(a[1]);
      if (x == 1 || y == 1) return from_tri(1);
      return from_tri(x == 0 && y == 0 ? 0 : -1);
    }
    if (!a[0].is_int() || !a[1].is_int()) {
      if (f == "<" || f == "+" || f == "mod" || f == "-") return Value::undef();
      ok = false;
      return Value::undef();
    }
    long long x = static_cast<long long>(a[0].as_int());
    long long y = static_cast<long long>(a[1].as_int());
    if (f == "<") return Value::boolean(x < y);
    if (f == "+") return Value::integer(x + y);
    if (f == "-") return Value::integer(x - y);
    if (f == "mod") {
      if (y == 0) return Value::undef();
      long long r = x % y;
      if (r != 0 && ((r < 0) != (y < 0))) r += y;
      return Value::integer(r);
    }
    ok = false;
    return Value::undef();
  }

  void rule(const Rule& r, OracleResult& out) {
    if (out.error || !ok) return;
    switch (r.kind) {
      case Rule::Kind::Assign: {
        if (!r.target->args.empty()) {
          ok = false;
          return;
        }
        Value v = term(*r.value);
        auto& vals = out.updates[r.target->name];
        if (std::find(vals.begin(), vals.end(), v) == vals.end()) {
          vals.push_back(v);
          std::sort(vals.begin(), vals.end());
        }
        return;
      }
      case Rule::Kind::Par:
        for (const auto& c : r.children) rule(*c, out);
        return;
      case Rule::Kind::If: {
        Value g = term(*r.cond);
        if (!g.is_bool()) {
          out.error = true;
          return;
        }
        if (g.as_bool())
          rule(*r.then_branch, out);
        else if (r.else_branch)
          rule(*r.else_branch, out);
        return;
      }
      default:
        ok = false;
    }
  }
};

}  // namespace

OracleResult oracle_pga(const Rule& r, const std::map<std::string, Value>& state) {
  OracleEval ev{state};
  OracleResult out;
  ev.rule(r, out);
  out.ok = ev.ok;
  if (out.error) out.updates.clear();
  return out;
}

UpdateSet to_update_set(const OracleResult& r) {
  UpdateSet us;
  for (const auto& [name, vals] : r.updates)
    for (const auto& v : vals) us.insert(Update{Location{name, {}}, v});
  return us;
}

}  // namespace support
