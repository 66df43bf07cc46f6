#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "asmweave/value.hpp"

namespace asmweave {

// Interpretation of one background (built-in static) function.
struct BackgroundFunction {
  static constexpr int kVariadic = -1;

  int arity = 0;
  std::function<Value(std::span<const Value>)> apply;
  // Strict functions yield undef whenever an argument is undef; the
  // implementation is not consulted.
  bool strict = true;
};

// Registry of background functions: arithmetic, comparison, boolean
// connectives, finite sets and tuples. Machines may carry an extended copy
// to customize their vocabulary.
class BackgroundRegistry {
 public:
  // The default vocabulary; shared and immutable.
  static std::shared_ptr<const BackgroundRegistry> standard();

  void add(std::string name, BackgroundFunction fn);
  const BackgroundFunction* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  // Applies strictness, then the function. Throws UnknownFunction.
  Value apply(const std::string& name, std::span<const Value> args) const;

  const std::map<std::string, BackgroundFunction>& functions() const { return fns_; }

 private:
  std::map<std::string, BackgroundFunction> fns_;
};

// Largest set a range term may build.
inline constexpr std::size_t kMaxRangeSize = 1'000'000;

}  // namespace asmweave
