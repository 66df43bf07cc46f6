#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "asmweave/ast.hpp"

namespace asmweave {

// Parses and resolves a machine. Throws ParseError listing every syntax or
// resolution diagnostic, each with a line/column position.
//
//   machine   := "machine" IDENT sigdecl* ruledecl+ initdecl? maindecl agentdecl*
//   sigdecl   := kind IDENT ("/" NAT)? (":" setliteral)? ("," IDENT ("/" NAT)? (":" setliteral)?)*
//   ruledecl  := "rule" IDENT ("(" IDENT ("," IDENT)* ")")? "=" op
//   initdecl  := "init" "{" (lhsterm ":=" term)* "}"
//   maindecl  := "main" IDENT
//   agentdecl := "agent" IDENT "runs" IDENT
//   op        := lhsterm ":=" term | "par" op* "endpar" | "if" term "then" op ("else" op)?
//              | "let" IDENT "=" term "in" op | IDENT "(" (term ("," term)*)? ")"
//              | "forall" IDENT "in" term ("with" term)? "do" op
//              | "choose" IDENT "in" term ("with" term)? "do" op | "skip"
//
// Term operators, loosest first: implies, or, and, not, comparisons
// (= != < <= > >=), + -, * / mod, unary minus.
MachineDef parse_machine(std::string_view text,
                         std::shared_ptr<const BackgroundRegistry> background = BackgroundRegistry::standard());

// Whole file as text; throws IoError.
std::string read_file(const std::filesystem::path& file);
// read_file then parse_machine.
MachineDef load_machine(const std::filesystem::path& file);

// Parses a standalone term. Identifiers listed in `bound` become variables;
// every other identifier is a function application. Names are not checked.
TermPtr parse_term(std::string_view text, const std::vector<std::string>& bound = {});

// Checks the names and arities of a closed term against a machine.
std::vector<Diagnostic> resolve_term(const TermPtr& term, const MachineDef& machine);

// Parses a term and resolves it against a machine; throws ParseError.
TermPtr parse_term_for(std::string_view text, const MachineDef& machine);

// Canonical source text; parse_machine(pretty_print(m)) is structurally m.
std::string pretty_print(const MachineDef& m);
std::string print_term(const Term& t);
std::string print_term(const TermPtr& t);
std::string print_rule(const Rule& r, int indent = 0);
std::string print_rule(const RulePtr& r, int indent = 0);

}  // namespace asmweave
