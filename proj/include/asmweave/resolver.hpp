#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asmweave/core.hpp"

namespace asmweave {

enum class ResolutionKind { Choose, Abstract, Schedule };

std::string_view to_string(ResolutionKind kind);

// One nondeterministic decision taken during a step.
struct Resolution {
  ResolutionKind kind = ResolutionKind::Choose;
  // Unique within a step: the choice label plus the dynamic context
  // (enclosing calls and bound variables), or the location for abstract
  // draws, or "schedule".
  std::string key;
  // Human-facing name: "Main.x", "coin", "f(1)", "schedule".
  std::string label;
  Value value;

  friend bool operator==(const Resolution&, const Resolution&) = default;
  friend auto operator<=>(const Resolution&, const Resolution&) = default;
};

// Per-step lists of resolutions, as recorded in a trace.
using Script = std::vector<std::vector<Resolution>>;

// Per-step Monitored inputs; step k reads entry k when present.
using MonitoredInputs = std::vector<std::map<Location, Value>>;

// Source of every nondeterministic decision: choose picks, Abstract function
// values and agent scheduling.
//
//   Seeded      the pick is a pure function of (seed, step index, key)
//   Scripted    picks come from a script, matched by key or label; a value
//               outside the admissible candidates is a ScriptViolation.
//               With a fallback seed, unscripted picks are seeded.
//   Exhaustive  depth-first enumeration of all pick combinations, driven by
//               next_branch()
class Resolver {
 public:
  enum class Mode { Seeded, Scripted, Exhaustive };

  static Resolver seeded(std::uint64_t seed);
  static Resolver scripted(Script script, std::optional<std::uint64_t> fallback_seed = std::nullopt);
  static Resolver exhaustive();

  Mode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  std::string provenance() const;

  void set_monitored(MonitoredInputs inputs) { monitored_ = std::move(inputs); }
  const std::map<Location, Value>* monitored_for(std::size_t step) const;

  // Starts step `step`: clears the recorded resolutions and abstract draws.
  void begin_step(std::size_t step);
  std::size_t step() const { return step_; }

  // Picks one of `candidates` (non-empty, sorted). When `candidates` is
  // empty and `open` is set, a scripted pick may take any value; the other
  // modes throw UnboundedAbstract.
  Value pick(ResolutionKind kind, const std::string& key, const std::string& label, std::span<const Value> candidates,
             bool open = false);

  // Abstract function values are drawn once per location and step.
  const Value* drawn(const Location& loc) const;
  void remember(const Location& loc, Value v) { draws_[loc] = std::move(v); }

  const std::vector<Resolution>& resolutions() const { return taken_; }
  std::vector<Resolution> take_resolutions();

  // Exhaustive mode: moves to the next combination of picks. Returns false
  // when every combination has been visited. Combinations are replayed from
  // the start of the evaluation, so the caller re-runs its evaluation after
  // each call.
  bool next_branch();
  // Number of picks with more than one candidate seen on the current branch.
  std::size_t branch_depth() const { return forced_.size(); }

 private:
  Resolver() = default;

  std::size_t seeded_index(const std::string& key, std::size_t n) const;

  Mode mode_ = Mode::Seeded;
  std::uint64_t seed_ = 0;
  bool has_fallback_ = false;
  Script script_;
  std::vector<std::vector<bool>> consumed_;
  MonitoredInputs monitored_;

  std::size_t step_ = 0;
  std::vector<Resolution> taken_;
  std::map<Location, Value> draws_;

  // Exhaustive cursor: chosen index and width of each pick on this branch.
  std::vector<std::size_t> forced_;
  std::vector<std::size_t> widths_;
  std::size_t cursor_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace asmweave
