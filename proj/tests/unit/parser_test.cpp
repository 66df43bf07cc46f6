#include <gtest/gtest.h>

#include "asmweave/parser.hpp"
#include "support.hpp"

using namespace asmweave;

namespace {

std::vector<Diagnostic> diagnostics_of(std::string_view text) {
  try {
    parse_machine(text);
  } catch (const ParseError& e) {
    return e.diagnostics();
  }
  return {};
}

}  // namespace

TEST(Parser, SwapMainIsParOfTwoAssignments) {
  MachineDef m = load_machine(support::model("swap.asm"));
  const Rule& body = *m.rule("Main").body;
  ASSERT_EQ(body.kind, Rule::Kind::Par);
  ASSERT_EQ(body.children.size(), 2u);
  const Rule& first = *body.children[0];
  const Rule& second = *body.children[1];
  ASSERT_EQ(first.kind, Rule::Kind::Assign);
  EXPECT_EQ(first.target->name, "a");
  EXPECT_EQ(first.value->name, "b");
  EXPECT_EQ(second.target->name, "b");
  EXPECT_EQ(second.value->name, "a");
}

TEST(Parser, UndeclaredTargetIsResolveError) {
  auto d = diagnostics_of("machine M\nrule R = x := 1\nmain R\n");
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d[0].code, ErrorCode::ResolveError);
  EXPECT_TRUE(d[0].pos.known());
}

TEST(Parser, ReportsEveryUnresolvedName) {
  auto d = diagnostics_of("machine M\nrule R = if x then y := 1\nmain R\n");
  ASSERT_EQ(d.size(), 2u);
  for (const auto& x : d) EXPECT_EQ(x.code, ErrorCode::ResolveError);
  EXPECT_NE(d[0].message.find("x"), std::string::npos);
  EXPECT_NE(d[1].message.find("y"), std::string::npos);
}

TEST(Parser, AssignmentToMonitoredIsRejected) {
  auto d = diagnostics_of("machine M\nmonitored m\nrule R = m := 1\nmain R\n");
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d[0].code, ErrorCode::ResolveError);
}

TEST(Parser, CallArityIsChecked) {
  auto d = diagnostics_of("machine M\ncontrolled x\nrule S(p) = x := p\nrule R = S(1, 2)\nmain R\n");
  ASSERT_FALSE(d.empty());
}

TEST(Parser, SyntaxErrorCarriesPosition) {
  auto d = diagnostics_of(read_file(support::fixtures_dir() / "broken.asm"));
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d[0].code, ErrorCode::SyntaxError);
  EXPECT_EQ(d[0].pos.line, 7);
}

TEST(Parser, SkipPrintsAsSkip) { EXPECT_EQ(print_rule(Rule::skip()), "skip\n"); }

TEST(Parser, PrettyPrintIsAFixedPointOnBundledMachines) {
  for (const auto& file : support::bundled_machines()) {
    MachineDef m = load_machine(file);
    std::string once = pretty_print(m);
    MachineDef back = parse_machine(once);
    EXPECT_TRUE(same_machine(m, back)) << file;
    EXPECT_EQ(pretty_print(back), once) << file;
  }
}

TEST(Parser, NestedIfAndParRoundTrip) {
  const char* text = R"(machine N
controlled c, d : {false, true}
controlled x, y
rule Main =
  if c then
    par
      x := 1
      if d then y := 2 else y := 3
    endpar
main Main
)";
  MachineDef m = parse_machine(text);
  std::string pp = pretty_print(m);
  EXPECT_EQ(pretty_print(parse_machine(pp)), pp);
}

TEST(Terms, ArithmeticPrecedence) {
  TermPtr t = parse_term("a + 1");
  ASSERT_TRUE(t->is_app("+"));
  EXPECT_TRUE(t->args[0]->is_app("a"));
  EXPECT_EQ(t->args[1]->kind, Term::Kind::Lit);
  EXPECT_EQ(t->args[1]->value, Value::integer(1));
}

TEST(Terms, EquationBetweenApplications) {
  TermPtr t = parse_term("f(1,2) = g(3)");
  ASSERT_TRUE(t->is_app("="));
  EXPECT_TRUE(t->args[0]->is_app("f"));
  EXPECT_EQ(t->args[0]->args.size(), 2u);
  EXPECT_TRUE(t->args[1]->is_app("g"));
}

TEST(Terms, ConnectivesBindLooserThanComparisons) {
  TermPtr t = parse_term("a < b + 1 and not c = d or e");
  ASSERT_TRUE(t->is_app("or"));
  const Term& conj = *t->args[0];
  ASSERT_TRUE(conj.is_app("and"));
  EXPECT_TRUE(conj.args[0]->is_app("<"));
  EXPECT_TRUE(conj.args[0]->args[1]->is_app("+"));
  ASSERT_TRUE(conj.args[1]->is_app("not"));
  EXPECT_TRUE(conj.args[1]->args[0]->is_app("="));
}

TEST(Terms, UnbalancedParenIsSyntaxError) {
  try {
    parse_term("(");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  }
}

TEST(Terms, PrintThenParseIsStructural) {
  for (const char* s : {"a + 1 * 2", "(a + 1) * 2", "not (a and b)", "a - (b - c)", "{1 .. 3}", "#red = x",
                        "f(1, g(2)) implies h"}) {
    TermPtr t = parse_term(s);
    EXPECT_TRUE(same_term(t, parse_term(print_term(t)))) << s << " -> " << print_term(t);
  }
}

TEST(Parser, ArbitraryBytesNeverCrash) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 64, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    try {
      parse_machine(s);
    } catch (const ParseError& e) {
      for (const auto& d : e.diagnostics()) EXPECT_TRUE(d.pos.known());
    }
  }
}

TEST(Parser, CodomainBelongsToOneEntry) {
  MachineDef m = parse_machine("machine C\ncontrolled p, q : {1, 2}\nrule R = skip\nmain R\n");
  EXPECT_FALSE(m.sig->at("p").codomain);
  ASSERT_TRUE(m.sig->at("q").codomain);
  EXPECT_EQ(m.sig->at("q").codomain->size(), 2u);
}

TEST(Parser, MissingMainRuleHasPosition) {
  auto d = diagnostics_of("machine M\ncontrolled x\nrule R = x := 1\nmain Nope\nagent a runs Gone\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].pos.line, 4);
  EXPECT_EQ(d[1].pos.line, 5);
}
