#include <map>

#include "asmweave/parser.hpp"

namespace asmweave {
namespace {

// Binding strength, loosest first.
enum Prec : int { kImplies = 1, kOr, kAnd, kNot, kCmp, kAdd, kMul, kUnary, kAtom };

struct OpInfo {
  Prec prec;
  const char* spelling;
};

const std::map<std::string, OpInfo, std::less<>>& binary_ops() {
  static const std::map<std::string, OpInfo, std::less<>> ops = {
      {"implies", {kImplies, " implies "}}, {"or", {kOr, " or "}},   {"and", {kAnd, " and "}},
      {"=", {kCmp, " = "}},                 {"!=", {kCmp, " != "}},  {"<", {kCmp, " < "}},
      {"<=", {kCmp, " <= "}},               {">", {kCmp, " > "}},    {">=", {kCmp, " >= "}},
      {"+", {kAdd, " + "}},                 {"-", {kAdd, " - "}},    {"*", {kMul, " * "}},
      {"/", {kMul, " / "}},                 {"mod", {kMul, " mod "}},
  };
  return ops;
}

Prec precedence(const Term& t) {
  if (t.kind == Term::Kind::Lit) return t.value.is_int() && t.value.as_int() < 0 ? kUnary : kAtom;
  if (t.kind != Term::Kind::App) return kAtom;
  if (t.args.size() == 2) {
    auto it = binary_ops().find(t.name);
    if (it != binary_ops().end()) return it->second.prec;
  }
  if (t.name == "not" && t.args.size() == 1) return kNot;
  return kAtom;
}

void print(const Term& t, int min_prec, std::string& out);

void print_child(const TermPtr& t, int min_prec, std::string& out) { print(*t, min_prec, out); }

void print_list(const std::vector<TermPtr>& args, std::string& out) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_child(args[i], kImplies, out);
  }
}

void print(const Term& t, int min_prec, std::string& out) {
  Prec p = precedence(t);
  bool parens = p < min_prec;
  if (parens) out += "(";
  switch (t.kind) {
    case Term::Kind::Lit:
      out += t.value.to_string();
      break;
    case Term::Kind::Var:
      out += t.name;
      break;
    case Term::Kind::App: {
      auto it = binary_ops().find(t.name);
      if (t.args.size() == 2 && it != binary_ops().end()) {
        // implies associates to the right, comparisons not at all, the rest
        // to the left.
        int left = p, right = p + 1;
        if (p == kImplies) left = p + 1, right = p;
        if (p == kCmp) left = right = p + 1;
        print_child(t.args[0], left, out);
        out += it->second.spelling;
        print_child(t.args[1], right, out);
      } else if (t.name == "not" && t.args.size() == 1) {
        out += "not ";
        print_child(t.args[0], kNot, out);
      } else if (t.name == "neg" && t.args.size() == 1) {
        out += "-(";
        print_child(t.args[0], kImplies, out);
        out += ")";
      } else if (t.name == "set") {
        out += "{";
        print_list(t.args, out);
        out += "}";
      } else if (t.name == "range" && t.args.size() == 2) {
        out += "{";
        print_child(t.args[0], kImplies, out);
        out += "..";
        print_child(t.args[1], kImplies, out);
        out += "}";
      } else {
        out += t.name;
        if (!t.args.empty()) {
          out += "(";
          print_list(t.args, out);
          out += ")";
        }
      }
      break;
    }
  }
  if (parens) out += ")";
}

// True when the rule's text ends with an if that has no else, so that an
// else written after it would be captured by that if.
bool ends_with_open_if(const Rule& r) {
  switch (r.kind) {
    case Rule::Kind::If:
      return !r.else_branch || ends_with_open_if(*r.else_branch);
    case Rule::Kind::Let:
    case Rule::Kind::Forall:
    case Rule::Kind::Choose:
      return ends_with_open_if(*r.body);
    default:
      return false;
  }
}

class RulePrinter {
 public:
  explicit RulePrinter(std::string& out) : out_(out) {}

  // `close_if` forces an explicit "else skip" on the trailing open if.
  void rule(const Rule& r, int indent, bool close_if = false) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (r.kind) {
      case Rule::Kind::Assign:
        out_ += pad + print_term(r.target) + " := " + print_term(r.value) + "\n";
        break;
      case Rule::Kind::Par:
        if (r.children.empty()) {
          out_ += pad + "skip\n";
          break;
        }
        out_ += pad + "par\n";
        for (const auto& c : r.children) rule(*c, indent + 1);
        out_ += pad + "endpar\n";
        break;
      case Rule::Kind::If: {
        out_ += pad + "if " + print_term(r.cond) + " then\n";
        bool has_else = r.else_branch || close_if;
        rule(*r.then_branch, indent + 1, has_else && ends_with_open_if(*r.then_branch));
        if (r.else_branch) {
          out_ += pad + "else\n";
          rule(*r.else_branch, indent + 1, close_if);
        } else if (close_if) {
          out_ += pad + "else\n" + pad + "  skip\n";
        }
        break;
      }
      case Rule::Kind::Let:
        out_ += pad + "let " + r.var + " = " + print_term(r.bound) + " in\n";
        rule(*r.body, indent + 1, close_if);
        break;
      case Rule::Kind::Call:
        out_ += pad + r.callee + "(";
        print_list(r.args, out_);
        out_ += ")\n";
        break;
      case Rule::Kind::Forall:
      case Rule::Kind::Choose:
        out_ += pad + (r.kind == Rule::Kind::Forall ? "forall " : "choose ") + r.var + " in " + print_term(r.range);
        if (r.cond) out_ += " with " + print_term(r.cond);
        out_ += " do\n";
        rule(*r.body, indent + 1, close_if);
        break;
    }
  }

 private:
  std::string& out_;
};

std::string codomain_text(const std::vector<Value>& values) {
  std::string out = "{";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i].to_string();
  }
  return out + "}";
}

}  // namespace

std::string print_term(const Term& t) {
  std::string out;
  print(t, kImplies, out);
  return out;
}

std::string print_term(const TermPtr& t) { return t ? print_term(*t) : std::string(); }

std::string print_rule(const Rule& r, int indent) {
  std::string out;
  RulePrinter(out).rule(r, indent);
  return out;
}

std::string print_rule(const RulePtr& r, int indent) { return r ? print_rule(*r, indent) : std::string(); }

std::string pretty_print(const MachineDef& m) {
  std::string out = "machine " + m.name + "\n";
  if (m.sig->size() != 0) {
    out += "\n";
    for (const auto& name : m.sig->names()) {
      const FunctionInfo& info = m.sig->at(name);
      out += std::string(to_string(info.kind)) + " " + name;
      if (info.arity != 0) out += "/" + std::to_string(info.arity);
      if (info.codomain) out += " : " + codomain_text(*info.codomain);
      out += "\n";
    }
  }
  for (const auto& r : m.rules) {
    out += "\nrule " + r.name;
    if (!r.formals.empty()) {
      out += "(";
      for (std::size_t i = 0; i < r.formals.size(); ++i) out += (i ? ", " : "") + r.formals[i];
      out += ")";
    }
    out += " =\n";
    RulePrinter(out).rule(*r.body, 1);
  }
  if (!m.init.empty()) {
    out += "\ninit {\n";
    for (const auto& e : m.init) out += "  " + print_term(e.target) + " := " + print_term(e.value) + "\n";
    out += "}\n";
  }
  out += "\nmain " + m.main + "\n";
  if (!m.agents.empty()) {
    out += "\n";
    for (const auto& a : m.agents) out += "agent " + a.id + " runs " + a.rule + "\n";
  }
  return out;
}

}  // namespace asmweave
