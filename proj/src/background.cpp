#include "asmweave/background.hpp"

#include <algorithm>

#include "asmweave/error.hpp"

namespace asmweave {
namespace {

using Args = std::span<const Value>;

// Three-valued truth: anything that is not a Bool counts as unknown.
enum class Truth { False, True, Unknown };

Truth truth(const Value& v) {
  if (!v.is_bool()) return Truth::Unknown;
  return v.as_bool() ? Truth::True : Truth::False;
}

Value from_truth(Truth t) {
  if (t == Truth::Unknown) return Value::undef();
  return Value::boolean(t == Truth::True);
}

Value kleene_and(Args a) {
  Truth x = truth(a[0]), y = truth(a[1]);
  if (x == Truth::False || y == Truth::False) return Value::boolean(false);
  if (x == Truth::True && y == Truth::True) return Value::boolean(true);
  return Value::undef();
}

Value kleene_or(Args a) {
  Truth x = truth(a[0]), y = truth(a[1]);
  if (x == Truth::True || y == Truth::True) return Value::boolean(true);
  if (x == Truth::False && y == Truth::False) return Value::boolean(false);
  return Value::undef();
}

Value kleene_not(Args a) {
  Truth x = truth(a[0]);
  if (x == Truth::Unknown) return Value::undef();
  return Value::boolean(x == Truth::False);
}

Value kleene_implies(Args a) {
  Truth x = truth(a[0]), y = truth(a[1]);
  if (x == Truth::False || y == Truth::True) return Value::boolean(true);
  if (x == Truth::True && y == Truth::False) return Value::boolean(false);
  return from_truth(Truth::Unknown);
}

template <typename F>
BackgroundFunction int_binary(F f) {
  return {2, [f](Args a) -> Value {
            if (!a[0].is_int() || !a[1].is_int()) return Value::undef();
            return f(a[0].as_int(), a[1].as_int());
          }};
}

// Floor modulo: the result has the sign of the divisor.
BigInt floor_mod(const BigInt& a, const BigInt& b) {
  BigInt r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

template <typename Cmp>
BackgroundFunction ordering(Cmp cmp) {
  return {2, [cmp](Args a) -> Value {
            if (a[0].is_int() && a[1].is_int()) return Value::boolean(cmp(a[0].as_int().compare(a[1].as_int())));
            if (a[0].kind() == Value::Kind::Str && a[1].kind() == Value::Kind::Str)
              return Value::boolean(cmp(a[0].text().compare(a[1].text())));
            return Value::undef();
          }};
}

template <typename F>
BackgroundFunction set_binary(F f) {
  return {2, [f](Args a) -> Value {
            if (!a[0].is_set() || !a[1].is_set()) return Value::undef();
            return Value::set(f(a[0].elements(), a[1].elements()));
          }};
}

BackgroundRegistry make_standard() {
  BackgroundRegistry r;
  r.add("+", int_binary([](const BigInt& x, const BigInt& y) { return Value::integer(x + y); }));
  r.add("-", int_binary([](const BigInt& x, const BigInt& y) { return Value::integer(x - y); }));
  r.add("*", int_binary([](const BigInt& x, const BigInt& y) { return Value::integer(x * y); }));
  r.add("/", int_binary([](const BigInt& x, const BigInt& y) {
          if (y == 0) return Value::undef();
          return Value::integer((x - floor_mod(x, y)) / y);
        }));
  r.add("mod", int_binary([](const BigInt& x, const BigInt& y) {
          if (y == 0) return Value::undef();
          return Value::integer(floor_mod(x, y));
        }));
  r.add("neg", {1, [](Args a) { return a[0].is_int() ? Value::integer(-a[0].as_int()) : Value::undef(); }});

  r.add("<", ordering([](int c) { return c < 0; }));
  r.add("<=", ordering([](int c) { return c <= 0; }));
  r.add(">", ordering([](int c) { return c > 0; }));
  r.add(">=", ordering([](int c) { return c >= 0; }));
  r.add("=", {2, [](Args a) { return Value::boolean(a[0] == a[1]); }, false});
  r.add("!=", {2, [](Args a) { return Value::boolean(a[0] != a[1]); }, false});

  r.add("and", {2, kleene_and, false});
  r.add("or", {2, kleene_or, false});
  r.add("not", {1, kleene_not, false});
  r.add("implies", {2, kleene_implies, false});

  r.add("set", {BackgroundFunction::kVariadic, [](Args a) { return Value::set({a.begin(), a.end()}); }});
  r.add("range", {2, [](Args a) -> Value {
                    if (!a[0].is_int() || !a[1].is_int()) return Value::undef();
                    const BigInt& lo = a[0].as_int();
                    const BigInt& hi = a[1].as_int();
                    if (hi < lo) return Value::set({});
                    if (hi - lo >= BigInt(kMaxRangeSize))
                      throw Error(ErrorCode::BackgroundError, "range {" + lo.str() + ".." + hi.str() + "} too large");
                    std::vector<Value> elems;
                    for (BigInt i = lo; i <= hi; ++i) elems.push_back(Value::integer(i));
                    return Value::set(std::move(elems));
                  }});
  r.add("union", set_binary([](const std::vector<Value>& x, const std::vector<Value>& y) {
          std::vector<Value> out;
          std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
          return out;
        }));
  r.add("inter", set_binary([](const std::vector<Value>& x, const std::vector<Value>& y) {
          std::vector<Value> out;
          std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
          return out;
        }));
  r.add("diff", set_binary([](const std::vector<Value>& x, const std::vector<Value>& y) {
          std::vector<Value> out;
          std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
          return out;
        }));
  r.add("member", {2, [](Args a) -> Value {
                     if (!a[1].is_set()) return Value::undef();
                     return Value::boolean(a[1].contains(a[0]));
                   }});
  r.add("card", {1, [](Args a) -> Value {
                   if (!a[0].is_set()) return Value::undef();
                   return Value::integer(static_cast<long long>(a[0].elements().size()));
                 }});
  r.add("add", {2, [](Args a) -> Value {
                  if (!a[0].is_set()) return Value::undef();
                  auto elems = a[0].elements();
                  elems.push_back(a[1]);
                  return Value::set(std::move(elems));
                }});
  r.add("remove", {2, [](Args a) -> Value {
                     if (!a[0].is_set()) return Value::undef();
                     std::vector<Value> elems;
                     for (const auto& e : a[0].elements())
                       if (e != a[1]) elems.push_back(e);
                     return Value::set(std::move(elems));
                   }});

  r.add("tuple", {BackgroundFunction::kVariadic, [](Args a) { return Value::tuple({a.begin(), a.end()}); }});
  r.add("nth", {2, [](Args a) -> Value {
                  if (a[0].kind() != Value::Kind::Tuple || !a[1].is_int()) return Value::undef();
                  const auto& elems = a[0].elements();
                  const BigInt& i = a[1].as_int();
                  if (i < 0 || i >= BigInt(elems.size())) return Value::undef();
                  return elems[static_cast<std::size_t>(i)];
                }});
  return r;
}

}  // namespace

std::shared_ptr<const BackgroundRegistry> BackgroundRegistry::standard() {
  static const auto instance = std::make_shared<const BackgroundRegistry>(make_standard());
  return instance;
}

void BackgroundRegistry::add(std::string name, BackgroundFunction fn) { fns_[std::move(name)] = std::move(fn); }

const BackgroundFunction* BackgroundRegistry::find(const std::string& name) const {
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

Value BackgroundRegistry::apply(const std::string& name, std::span<const Value> args) const {
  const BackgroundFunction* fn = find(name);
  if (!fn) throw Error(ErrorCode::UnknownFunction, "unknown background function '" + name + "'");
  if (fn->arity != BackgroundFunction::kVariadic && static_cast<std::size_t>(fn->arity) != args.size())
    throw Error(ErrorCode::ArityMismatch, "'" + name + "' expects " + std::to_string(fn->arity) + " argument(s)");
  if (fn->strict && std::any_of(args.begin(), args.end(), [](const Value& v) { return v.is_undef(); }))
    return Value::undef();
  return fn->apply(args);
}

}  // namespace asmweave
