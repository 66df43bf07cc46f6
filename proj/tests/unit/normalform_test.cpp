#include <gtest/gtest.h>

#include "asmweave/normalform.hpp"
#include "asmweave/parser.hpp"
#include "support.hpp"

using namespace asmweave;

namespace {

MachineDef guarded(const std::string& extra, const std::string& body) {
  return parse_machine("machine G\ncontrolled c : {false, true}, d : {false, true}\ncontrolled x : {0, 1, 2}, y : {0, 1, 2}\n" + extra +
                       "\nrule Main =\n" + body + "\nmain Main\n");
}

std::vector<std::pair<std::string, std::string>> clauses_of(const NormalForm& nf) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& c : nf.clauses) {
    std::string a = print_rule(c.assign);
    if (!a.empty() && a.back() == '\n') a.pop_back();
    out.emplace_back(print_term(c.guard), a);
  }
  return out;
}

// Only par at the top, if directly below it, assignments below that.
bool is_par_of_guarded_assignments(const Rule& r) {
  if (r.kind != Rule::Kind::Par) return false;
  for (const auto& c : r.children) {
    if (c->kind != Rule::Kind::If || c->else_branch) return false;
    if (c->then_branch->kind != Rule::Kind::Assign) return false;
  }
  return true;
}

}  // namespace

TEST(Classify, SwapIsPga) {
  MachineDef m = load_machine(support::model("swap.asm"));
  EXPECT_TRUE(classify_pga(m, "Main").is_pga);
}

TEST(Classify, ChooseIsOffending) {
  MachineDef m = load_machine(support::model("choose_out.asm"));
  PgaVerdict v = classify_pga(m, "Main");
  EXPECT_FALSE(v.is_pga);
  ASSERT_EQ(v.offending.size(), 1u);
  EXPECT_EQ(v.offending[0].second, "choose");
  EXPECT_TRUE(v.offending[0].first.known());
}

TEST(Classify, CallsAreInlined) {
  MachineDef m = guarded("rule S = x := 1", "S()");
  EXPECT_TRUE(classify_pga(m, "Main").is_pga);
  NormalForm nf = normalize(m, "Main");
  EXPECT_EQ(clauses_of(nf), (std::vector<std::pair<std::string, std::string>>{{"true", "x := 1"}}));
}

TEST(Classify, RecursionCannotBeInlined) {
  MachineDef m = guarded("rule S = if c then S()", "S()");
  try {
    classify_pga(m, "Main");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RecursiveCall);
  }
}

TEST(Normalize, GuardsArePushedInward) {
  MachineDef m = guarded("", "if c then par\n x := 1\n if d then y := 2\n endpar");
  EXPECT_EQ(clauses_of(normalize(m, "Main")),
            (std::vector<std::pair<std::string, std::string>>{{"c", "x := 1"}, {"c and d", "y := 2"}}));
}

TEST(Normalize, BareAssignmentGetsTrue) {
  MachineDef m = guarded("", "x := 1");
  EXPECT_EQ(clauses_of(normalize(m, "Main")),
            (std::vector<std::pair<std::string, std::string>>{{"true", "x := 1"}}));
}

TEST(Normalize, NoSimplification) {
  MachineDef m = guarded("", "if c then if c then x := 1");
  EXPECT_EQ(clauses_of(normalize(m, "Main")),
            (std::vector<std::pair<std::string, std::string>>{{"c and c", "x := 1"}}));
}

TEST(Normalize, ElseContributesNegation) {
  MachineDef m = guarded("", "if c then x := 1 else x := 2");
  EXPECT_EQ(clauses_of(normalize(m, "Main")),
            (std::vector<std::pair<std::string, std::string>>{{"c", "x := 1"}, {"not c", "x := 2"}}));
}

TEST(Normalize, RejectsNonPga) {
  MachineDef m = load_machine(support::model("choose_out.asm"));
  try {
    normalize(m, "Main");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPGA);
  }
}

TEST(Normalize, OutputShapeAndIdempotence) {
  support::RuleGen gen(17);
  MachineDef m = support::random_base();
  for (int i = 0; i < 100; ++i) {
    RulePtr r = gen.pga_rule(4);
    RulePtr nf = normalize(m, r).to_rule();
    EXPECT_TRUE(is_par_of_guarded_assignments(*nf)) << print_rule(nf);
    EXPECT_TRUE(classify_pga(m, nf).is_pga);
    RulePtr twice = normalize(m, nf).to_rule();
    EXPECT_TRUE(is_par_of_guarded_assignments(*twice));
  }
}

TEST(Equivalence, OriginalMatchesNormalForm) {
  MachineDef m = parse_machine(R"(
machine Space
controlled p : {false, true}, q : {false, true}, r : {false, true}
controlled u : {0, 1, 2}, v : {0, 1, 2}
rule Main =
  par
    if p then
      par
        u := v
        if q and not r then v := u + 1 else r := p
      endpar
    if u < v then q := r
  endpar
main Main
)");
  StateSpace space = default_space(m);
  EXPECT_EQ(space.size(), 8u * 9u);
  RulePtr body = m.rule("Main").body;
  EquivalenceResult res = equivalence_check(m, body, normalize(m, body).to_rule(), space);
  EXPECT_TRUE(res.equivalent);
  EXPECT_EQ(res.states_checked, 72u);
}

TEST(Equivalence, DifferentAssignmentsDifferEverywhere) {
  MachineDef m = guarded("", "skip");
  EquivalenceResult res =
      equivalence_check(m, parse_machine("machine A\ncontrolled x\nrule R = x := 1\nmain R\n").rule("R").body,
                        parse_machine("machine B\ncontrolled x\nrule R = x := 2\nmain R\n").rule("R").body,
                        default_space(m));
  EXPECT_FALSE(res.equivalent);
  ASSERT_TRUE(res.witness);
  EXPECT_EQ(res.states_checked, 1u);
  EXPECT_NE(res.left, res.right);
}

TEST(Equivalence, ElseEqualsTwoGuardedBranches) {
  MachineDef m = guarded("rule A = if c then x := 1 else x := 2\n"
                         "rule B = par\n if c then x := 1\n if not c then x := 2\n endpar",
                         "skip");
  EXPECT_TRUE(equivalence_check(m, "A", "B", default_space(m)).equivalent);
}

TEST(Equivalence, GuardErrorsCount) {
  MachineDef m = parse_machine(R"(
machine Err
controlled n : {0, 1, 2}
controlled x
rule A = if n = 0 then x := 1
rule B = if 1 / n = 1 then x := 1
main A
)");
  EXPECT_FALSE(equivalence_check(m, "A", "B", default_space(m)).equivalent);
}

TEST(Equivalence, ComparesChoiceOutcomeSets) {
  MachineDef m = parse_machine(R"(
machine Choice
controlled x
rule A = choose v in {1, 2} do x := v
rule B = choose v in {2, 1} do x := v
rule C = choose v in {1, 3} do x := v
main A
)");
  EXPECT_TRUE(equivalence_check(m, "A", "B", default_space(m)).equivalent);
  EXPECT_FALSE(equivalence_check(m, "A", "C", default_space(m)).equivalent);
}

TEST(Equivalence, SpaceBudget) {
  MachineDef m = guarded("", "skip");
  try {
    equivalence_check(m, "Main", "Main", default_space(m), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpaceTooLarge);
  }
}

TEST(Equivalence, AgreesWithIndependentOracle) {
  support::RuleGen gen(23);
  MachineDef m = support::random_base();
  for (int i = 0; i < 100; ++i) {
    RulePtr r = gen.pga_rule(4);
    State s = gen.random_state(m);
    std::map<std::string, Value> vals;
    for (const auto& [loc, v] : s.content())
      if (loc.args.empty()) vals[loc.fname] = v;
    support::OracleResult o = support::oracle_pga(*r, vals);
    ASSERT_TRUE(o.ok);
    StepOutcome out = step_outcome(m, normalize(m, r).to_rule(), s);
    ASSERT_FALSE(out.error);
    ASSERT_EQ(out.update_sets.size(), 1u);
    EXPECT_EQ(out.update_sets[0], support::to_update_set(o)) << print_rule(r);
  }
}
