#include <gtest/gtest.h>

#include "asmweave/core.hpp"
#include "support.hpp"

using namespace asmweave;

namespace {

std::shared_ptr<const Signature> small_sig() {
  auto sig = std::make_shared<Signature>();
  sig->declare("a", {0, FunctionKind::Controlled, {}});
  sig->declare("b", {0, FunctionKind::Controlled, {}});
  sig->declare("x", {0, FunctionKind::Controlled, {}});
  sig->declare("f", {1, FunctionKind::Controlled, {}});
  sig->declare("m", {0, FunctionKind::Monitored, {}});
  return sig;
}

Location loc(const std::string& f) { return {f, {}}; }
Value I(long long v) { return Value::integer(v); }

}  // namespace

TEST(Value, EqualityIsAnEquivalenceOverMixedKinds) {
  std::vector<Value> vs = {Value::undef(),         Value::boolean(false), Value::boolean(true), I(0), I(-3),
                           Value::str("x"),        Value::sym("x"),       Value::set({I(1), I(2)}),
                           Value::tuple({I(1), I(2)})};
  for (const auto& a : vs) {
    EXPECT_EQ(a, a);
    for (const auto& b : vs) {
      EXPECT_EQ(a == b, b == a);
      if (&a != &b) EXPECT_NE(a, b) << a << " vs " << b;
    }
  }
}

TEST(Value, SetsAreSortedAndUnique) {
  Value s = Value::set({I(3), I(1), I(3), I(2)});
  ASSERT_EQ(s.elements().size(), 3u);
  EXPECT_EQ(s, Value::set({I(1), I(2), I(3)}));
  EXPECT_EQ(s.to_string(), "{1, 2, 3}");
}

TEST(Value, BigIntegersStayExact) {
  Value big = Value::integer(BigInt("123456789012345678901234567890"));
  EXPECT_EQ(big.to_string(), "123456789012345678901234567890");
}

TEST(State, LookupHitsAndDefaults) {
  State s(small_sig());
  s.assign(loc("a"), I(1));
  EXPECT_EQ(s.lookup(loc("a")), I(1));
  EXPECT_TRUE(s.lookup(loc("b")).is_undef());
}

TEST(State, LookupUndeclaredAndWrongArity) {
  State s(small_sig());
  try {
    s.lookup(loc("zz"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFunction);
  }
  try {
    s.lookup(loc("f"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ArityMismatch);
  }
}

TEST(Conflicts, DetectsClashesOnly) {
  auto c = conflicts({{loc("x"), I(1)}, {loc("x"), I(2)}});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].loc, loc("x"));
  EXPECT_EQ(c[0].values, (std::vector<Value>{I(1), I(2)}));
  EXPECT_TRUE(conflicts({{loc("x"), I(1)}, {loc("a"), I(1)}}).empty());
  EXPECT_TRUE(conflicts({{loc("x"), I(1)}, {loc("x"), I(1)}}).empty());
}

TEST(Fire, SwapsTwoLocations) {
  State s(small_sig());
  s.assign(loc("a"), I(1));
  s.assign(loc("b"), I(2));
  State t = fire(s, {{loc("a"), I(2)}, {loc("b"), I(1)}});
  EXPECT_EQ(t.lookup(loc("a")), I(2));
  EXPECT_EQ(t.lookup(loc("b")), I(1));
  EXPECT_EQ(s.lookup(loc("a")), I(1));
}

TEST(Fire, EmptyUpdateSetIsIdentity) {
  State s(small_sig());
  s.assign(loc("a"), I(5));
  EXPECT_EQ(fire(s, {}), s);
}

TEST(Fire, ClashRaisesWithConflicts) {
  State s(small_sig());
  try {
    fire(s, {{loc("x"), I(1)}, {loc("x"), I(2)}});
    FAIL();
  } catch (const InconsistentError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentUpdateSet);
    ASSERT_EQ(e.conflicts().size(), 1u);
  }
}

TEST(Fire, MonitoredTargetIsKindViolation) {
  State s(small_sig());
  try {
    fire(s, {{loc("m"), I(1)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KindViolation);
  }
}

TEST(Fire, WritingUndefClearsTheLocation) {
  State s(small_sig());
  s.assign(loc("a"), I(1));
  State t = fire(s, {{loc("a"), Value::undef()}});
  EXPECT_EQ(t, State(small_sig()));
}

TEST(Fire, FrameHoldsOnRandomStates) {
  support::RuleGen gen(7);
  MachineDef m = support::random_base();
  for (int i = 0; i < 200; ++i) {
    State s = gen.random_state(m);
    UpdateSet us;
    if (gen.pick(2)) us.insert({loc("x1"), I(gen.pick(3))});
    if (gen.pick(2)) us.insert({{"f", {I(gen.pick(3))}}, I(9)});
    State t = fire(s, us);
    std::set<Location> touched;
    for (const auto& u : us) touched.insert(u.loc);
    for (const auto& [l, v] : s.content())
      if (!touched.count(l)) EXPECT_EQ(t.lookup(l), v);
    for (const auto& [l, v] : t.content())
      if (!touched.count(l)) EXPECT_EQ(s.lookup(l), v);
    EXPECT_EQ(fire(s, us), t);
  }
}

TEST(State, DigestDependsOnContentOnly) {
  State a(small_sig()), b(small_sig());
  a.assign(loc("a"), I(1));
  a.assign(loc("b"), I(2));
  b.assign(loc("b"), I(2));
  b.assign(loc("a"), I(1));
  EXPECT_EQ(a.digest(), b.digest());
  b.assign(loc("a"), I(3));
  EXPECT_NE(a.digest(), b.digest());
}
