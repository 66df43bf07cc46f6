#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace asmweave {

using BigInt = boost::multiprecision::cpp_int;

// An element of the universe of a state. Values are immutable; sets and
// tuples share their element storage.
class Value {
 public:
  enum class Kind : std::uint8_t { Undef, Bool, Int, Str, Sym, Set, Tuple };

  Value() = default;

  static Value undef() { return Value(); }
  static Value boolean(bool b);
  static Value integer(BigInt i);
  static Value integer(long long i) { return integer(BigInt(i)); }
  static Value str(std::string s);
  static Value sym(std::string s);
  // Sorts and removes duplicates.
  static Value set(std::vector<Value> elems);
  static Value tuple(std::vector<Value> elems);

  Kind kind() const { return kind_; }
  bool is_undef() const { return kind_ == Kind::Undef; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_set() const { return kind_ == Kind::Set; }
  bool is_true() const { return kind_ == Kind::Bool && bool_; }
  bool is_false() const { return kind_ == Kind::Bool && !bool_; }

  bool as_bool() const;
  const BigInt& as_int() const;
  // Text of a Str or the name of a Sym.
  const std::string& text() const;
  // Elements of a Set (sorted, unique) or a Tuple.
  const std::vector<Value>& elements() const;

  bool contains(const Value& v) const;

  // Source-syntax rendering: 1, true, undef, "s", #sym, {1, 2}, tuple(1, 2).
  std::string to_string() const;
  std::uint64_t hash() const;

  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    int c = compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  static int compare(const Value& a, const Value& b);

  Kind kind_ = Kind::Undef;
  bool bool_ = false;
  std::shared_ptr<const BigInt> int_;
  std::shared_ptr<const std::string> text_;
  std::shared_ptr<const std::vector<Value>> elems_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

// FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::string to_hex(std::uint64_t h);

}  // namespace asmweave
