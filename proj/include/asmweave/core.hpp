#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asmweave/error.hpp"
#include "asmweave/value.hpp"

namespace asmweave {

enum class FunctionKind { Static, Controlled, Monitored, Abstract };

std::string_view to_string(FunctionKind kind);

struct FunctionInfo {
  std::size_t arity = 0;
  FunctionKind kind = FunctionKind::Controlled;
  // Finite set of values an Abstract function may take. Also accepted on
  // other kinds, where it only narrows the default checking space.
  std::optional<std::vector<Value>> codomain;

  friend bool operator==(const FunctionInfo&, const FunctionInfo&) = default;
};

// Function names with their arity and kind. Keeps declaration order for
// printing; equality ignores it.
class Signature {
 public:
  // Throws ResolveError on a duplicate name.
  void declare(const std::string& name, FunctionInfo info);

  const FunctionInfo* find(const std::string& name) const;
  // Throws UnknownFunction.
  const FunctionInfo& at(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }

  friend bool operator==(const Signature& a, const Signature& b) { return a.entries_ == b.entries_; }

 private:
  std::map<std::string, FunctionInfo> entries_;
  std::vector<std::string> order_;
};

struct Location {
  std::string fname;
  std::vector<Value> args;

  // "a" for 0-ary locations, "f(1, #x)" otherwise.
  std::string to_string() const;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;
};

struct Update {
  Location loc;
  Value val;

  friend bool operator==(const Update&, const Update&) = default;
  friend auto operator<=>(const Update&, const Update&) = default;
};

// Set semantics: duplicate (location, value) pairs collapse. Consistency is
// not enforced here; see conflicts().
class UpdateSet {
 public:
  using const_iterator = std::set<Update>::const_iterator;

  UpdateSet() = default;
  UpdateSet(std::initializer_list<Update> updates) : updates_(updates) {}

  void insert(Update u) { updates_.insert(std::move(u)); }
  void merge(const UpdateSet& other) { updates_.insert(other.updates_.begin(), other.updates_.end()); }

  bool empty() const { return updates_.empty(); }
  std::size_t size() const { return updates_.size(); }
  const_iterator begin() const { return updates_.begin(); }
  const_iterator end() const { return updates_.end(); }
  bool contains(const Update& u) const { return updates_.count(u) != 0; }

  std::string to_string() const;

  friend bool operator==(const UpdateSet&, const UpdateSet&) = default;
  friend auto operator<=>(const UpdateSet&, const UpdateSet&) = default;

 private:
  std::set<Update> updates_;
};

struct Conflict {
  Location loc;
  std::vector<Value> values;        // distinct, sorted
  std::vector<std::string> agents;  // contributing agents, when known

  std::string to_string() const;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

// Every location assigned two or more distinct values. Empty iff consistent.
std::vector<Conflict> conflicts(const UpdateSet& us);

class InconsistentError : public Error {
 public:
  explicit InconsistentError(std::vector<Conflict> conflicts);
  const std::vector<Conflict>& conflicts() const { return conflicts_; }

 private:
  std::vector<Conflict> conflicts_;
};

// A signature plus the values of its locations. Absent dynamic locations
// read as undef, and writing undef removes the entry, so equal states have
// equal content maps.
class State {
 public:
  explicit State(std::shared_ptr<const Signature> sig);

  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }

  // Controlled or Monitored locations only.
  Value lookup(const Location& loc) const;
  // Interpretation of a Static function (undef outside its table).
  Value static_value(const Location& loc) const;

  // Sets a Static, Controlled or Monitored location; used for initial
  // states and environment input. Rules change states only through fire().
  void assign(const Location& loc, Value val);
  State with(const Location& loc, Value val) const;

  const std::map<Location, Value>& content() const { return content_; }
  const std::map<Location, Value>& statics() const { return statics_; }

  // Hash of the sorted Controlled (location, value) list.
  std::uint64_t digest() const;

  // Sorted "f(args) = value" lines, Controlled and Monitored.
  std::string dump() const;

  friend bool operator==(const State& a, const State& b) {
    return a.content_ == b.content_ && a.statics_ == b.statics_;
  }

 private:
  void check(const Location& loc) const;

  std::shared_ptr<const Signature> sig_;
  std::map<Location, Value> content_;
  std::map<Location, Value> statics_;
};

// Applies a consistent update set. The input state is left untouched.
// Throws InconsistentError or KindViolation.
State fire(const State& state, const UpdateSet& us);

}  // namespace asmweave
