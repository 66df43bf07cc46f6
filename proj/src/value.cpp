#include "asmweave/value.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace asmweave {

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.bool_ = b;
  return v;
}

Value Value::integer(BigInt i) {
  Value v;
  v.kind_ = Kind::Int;
  v.int_ = std::make_shared<const BigInt>(std::move(i));
  return v;
}

Value Value::str(std::string s) {
  Value v;
  v.kind_ = Kind::Str;
  v.text_ = std::make_shared<const std::string>(std::move(s));
  return v;
}

Value Value::sym(std::string s) {
  Value v;
  v.kind_ = Kind::Sym;
  v.text_ = std::make_shared<const std::string>(std::move(s));
  return v;
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Value v;
  v.kind_ = Kind::Set;
  v.elems_ = std::make_shared<const std::vector<Value>>(std::move(elems));
  return v;
}

Value Value::tuple(std::vector<Value> elems) {
  Value v;
  v.kind_ = Kind::Tuple;
  v.elems_ = std::make_shared<const std::vector<Value>>(std::move(elems));
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw std::logic_error("value is not a Bool: " + to_string());
  return bool_;
}

const BigInt& Value::as_int() const {
  if (kind_ != Kind::Int) throw std::logic_error("value is not an Int: " + to_string());
  return *int_;
}

const std::string& Value::text() const {
  if (kind_ != Kind::Str && kind_ != Kind::Sym)
    throw std::logic_error("value is not a Str or Sym: " + to_string());
  return *text_;
}

const std::vector<Value>& Value::elements() const {
  if (kind_ != Kind::Set && kind_ != Kind::Tuple)
    throw std::logic_error("value is not a Set or Tuple: " + to_string());
  return *elems_;
}

bool Value::contains(const Value& v) const {
  if (kind_ != Kind::Set) return false;
  return std::binary_search(elems_->begin(), elems_->end(), v);
}

int Value::compare(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
  switch (a.kind_) {
    case Kind::Undef:
      return 0;
    case Kind::Bool:
      return a.bool_ == b.bool_ ? 0 : (a.bool_ ? 1 : -1);
    case Kind::Int:
      return a.int_->compare(*b.int_) < 0 ? -1 : (a.int_->compare(*b.int_) > 0 ? 1 : 0);
    case Kind::Str:
    case Kind::Sym: {
      int c = a.text_->compare(*b.text_);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Set:
    case Kind::Tuple: {
      const auto& x = *a.elems_;
      const auto& y = *b.elems_;
      std::size_t n = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(x[i], y[i]);
        if (c != 0) return c;
      }
      return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
    }
  }
  return 0;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Undef:
      return "undef";
    case Kind::Bool:
      return bool_ ? "true" : "false";
    case Kind::Int:
      return int_->str();
    case Kind::Str:
      return quote(*text_);
    case Kind::Sym:
      return "#" + *text_;
    case Kind::Set:
    case Kind::Tuple: {
      std::string out = kind_ == Kind::Set ? "{" : "tuple(";
      for (std::size_t i = 0; i < elems_->size(); ++i) {
        if (i) out += ", ";
        out += (*elems_)[i].to_string();
      }
      out += kind_ == Kind::Set ? "}" : ")";
      return out;
    }
  }
  return "?";
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t Value::hash() const { return fnv1a(to_string()); }

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.to_string(); }

}  // namespace asmweave
